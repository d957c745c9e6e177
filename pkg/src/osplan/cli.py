"""Command-line entry point: gen, compile, solve, verify and bench.

Exit codes: 0 on success, 1 when a verification fails or a search hits its
cap, 2 on usage errors, unreadable files and malformed tasks.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .bench import BenchConfig, BenchTask, run_benchmark
from .bfbb import HEURISTICS, bfbb_solve
from .errors import CapExceeded, OspError
from .generate import GenParams, generate_task
from .oracle import DEFAULT_STRATEGIES, Caps, check_equivalence, corpus_task, estimate_cstar, verify_rows
from .pipeline import compile_task
from .samples import SAMPLES
from .selective import reports_to_csv
from .taskio import assign_ipc_values, parse_fraction, parse_task, read_task, resolve_fraction, serialize_task
from .unit_effect import Strategy, close_plan, ledger_to_csv, restore_plan

STRATEGIES = [s.value for s in Strategy]


class UsageError(Exception):
    pass


def parse_seeds(text: str) -> list[int]:
    """``"1..50"`` (inclusive) or a comma-separated list of seeds."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(s) for s in text.split(",") if s]
    except ValueError:
        raise UsageError(f"bad seed range {text!r}") from None
    if not seeds:
        raise UsageError(f"empty seed range {text!r}")
    return seeds


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _load(path: str):
    if path in SAMPLES and not Path(path).exists():
        return parse_task(SAMPLES[path])
    return read_task(path)


def _caps(args) -> Caps:
    return Caps(args.cap_states, args.cap_ms)


def cmd_gen(args) -> int:
    params = GenParams(
        seed=args.seed, num_vars=args.vars, max_domain=args.dom, num_actions=args.acts,
        incomplete_pre_probability=args.pincomplete, budget=args.budget, num_mutex=args.mutex,
        max_utility=0 if args.ipc_values else 2,
    )
    task = generate_task(params)
    if args.ipc_values:
        task = assign_ipc_values(task, args.seed)
    if args.frac is not None:
        cstar = estimate_cstar(task, _caps(args))
        fraction = parse_fraction(args.frac)
        task = replace(task, budget=resolve_fraction(fraction, cstar), budget_fraction=fraction, cstar=cstar)
    _emit(serialize_task(task), args.output)
    return 0


def cmd_compile(args) -> int:
    task = _load(args.file)
    compiled, reports, _ = compile_task(task, args.strategy, preset=args.preset)
    _emit(serialize_task(compiled.task), args.output)
    if args.ledger:
        _emit(ledger_to_csv(compiled), args.ledger)
    if args.report:
        _emit(reports_to_csv(reports), args.report)
    return 0


def cmd_solve(args) -> int:
    task = _load(args.file)
    compiled, _, _ = compile_task(task, args.strategy)
    seconds = None if args.cap_ms is None else args.cap_ms / 1000
    sol = bfbb_solve(compiled.task, HEURISTICS[args.heuristic], max_expansions=args.cap_states, max_seconds=seconds)
    plan = restore_plan(compiled, close_plan(compiled, sol.plan))
    names = " ".join(task.actions[i].name for i in plan)
    print(f"utility {sol.utility}")
    print(f"cost {sol.cost}")
    print(f"expansions {sol.stats.expansions}")
    print(f"plan {names}".rstrip())
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["task", "strategy", "utility", "cost", "expansions", "generated", "time_ms", "plan"])
        writer.writerow([
            args.file, args.strategy, sol.utility, sol.cost, sol.stats.expansions,
            sol.stats.generated, f"{sol.stats.wall_time * 1000:.3f}", names,
        ])
        _emit(buf.getvalue(), args.csv)
    return 0


def cmd_verify(args) -> int:
    seeds = parse_seeds(args.seeds)
    strategies = args.strategies.split(",")
    for s in strategies:
        if s not in STRATEGIES:
            raise UsageError(f"unknown strategy {s!r}")
    results = []
    failed = 0
    for seed in seeds:
        report = check_equivalence(corpus_task(seed), strategies, _caps(args), name=str(seed))
        results.append((seed, report))
        if not report.passed:
            failed += 1
            print(f"seed {seed}: {report.counterexample}", file=sys.stderr)
    if args.csv:
        _emit(verify_rows(results), args.csv)
    print(f"verified {len(seeds) - failed}/{len(seeds)} seeds")
    return 1 if failed else 0


def cmd_bench(args) -> int:
    tasks = []
    for path in args.files:
        task = _load(path)
        domain = path if path in SAMPLES else Path(path).parent.name or "."
        tasks.append(BenchTask(Path(path).stem, domain, task))
    if args.seeds:
        for seed in parse_seeds(args.seeds):
            task = corpus_task(seed)
            if args.compute_cstar:
                task = replace(task, cstar=estimate_cstar(task, _caps(args)))
            tasks.append(BenchTask(f"seed{seed}", "random", task))
    if not tasks:
        raise UsageError("bench needs task files, sample names or --seeds")
    try:
        fractions = [parse_fraction(f) for f in args.fractions.split(",")]
        config = BenchConfig(tasks, fractions, args.strategies.split(","), args.cap_states, args.cap_ms)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_benchmark(config)
    _emit(result.rows_csv(), args.output)
    if args.summary:
        _emit(result.summary_csv(), args.summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="osplan", description=__doc__.splitlines()[0])
    parser.add_argument("--cap-states", type=int, default=2_000_000, help="state/expansion cap")
    parser.add_argument("--cap-ms", type=int, default=None, help="wall-clock cap per search in ms")
    # the caps may also follow the subcommand; SUPPRESS keeps them from resetting the top-level values
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap-states", type=int, default=argparse.SUPPRESS)
    common.add_argument("--cap-ms", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a random task")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vars", type=int, default=4)
    p.add_argument("--dom", type=int, default=4)
    p.add_argument("--acts", type=int, default=6)
    p.add_argument("--pincomplete", type=float, default=0.5)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--mutex", type=int, default=0, help="number of sampled pairwise mutex groups")
    p.add_argument("--ipc-values", action="store_true", help="cyclic 0/1/2 utilities keyed by the seed")
    p.add_argument("--frac", default=None, help="store the budget as p/q of an oracle-computed cstar")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compile", parents=[common], help="compile a task under a strategy")
    p.add_argument("file")
    p.add_argument("--strategy", choices=STRATEGIES, default="pretotal")
    p.add_argument("--preset", choices=["consistent", "refined", "literal"], default="consistent")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--ledger", default=None, help="write the action ledger CSV here")
    p.add_argument("--report", default=None, help="write the split report CSV here")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", parents=[common], help="solve a task optimally")
    p.add_argument("file")
    p.add_argument("--strategy", choices=STRATEGIES, default="none")
    p.add_argument("--heuristic", choices=sorted(HEURISTICS), default="maxfact")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="check the compilation guarantees on random tasks")
    p.add_argument("--seeds", default="1..50")
    p.add_argument("--strategies", default=",".join(DEFAULT_STRATEGIES))
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="benchmark strategies over budget fractions")
    p.add_argument("files", nargs="*", help="task files or sample names")
    p.add_argument("--seeds", default=None, help="add corpus tasks for these seeds")
    p.add_argument("--compute-cstar", action="store_true", help="compute cstar of generated tasks with the oracle")
    p.add_argument("--fractions", default="1/4,1/2,3/4,1")
    p.add_argument("--strategies", default="base,blind,pretotal")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--summary", default=None, help="write the relative-change summary CSV here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cap_states <= 0 or (args.cap_ms is not None and args.cap_ms <= 0):
        print("osplan: caps must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"osplan: {exc}", file=sys.stderr)
        return 1
    except (OSError, UsageError, OspError, ValueError) as exc:
        print(f"osplan: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
