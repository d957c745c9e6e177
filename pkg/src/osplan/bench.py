"""Benchmark harness: strategies x budget fractions x tasks, one CSV row each."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bfbb import bfbb_solve
from .errors import CapExceeded
from .model import OspTask
from .pipeline import compile_task
from .taskio import resolve_fraction

ALLOWED_FRACTIONS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
BENCH_HEADER = [
    "task", "fraction", "strategy", "expansions", "generated", "time_ms",
    "utility", "cost", "solved", "actions_compiled", "vars_compiled",
]
SUMMARY_HEADER = ["domain", "fraction", "comparison", "relative_change"]
# relative changes smaller than this are reported as no change
THRESHOLD = Fraction(1, 10)


@dataclass(frozen=True)
class BenchTask:
    name: str
    domain: str
    task: OspTask


@dataclass(frozen=True)
class BenchConfig:
    tasks: Sequence[BenchTask]
    fractions: Sequence[Fraction] = ALLOWED_FRACTIONS
    strategies: Sequence[str] = ("base", "blind", "pretotal")
    max_expansions: int = 2_000_000
    max_ms: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(Fraction(f) for f in self.fractions))
        bad = [f for f in self.fractions if f not in ALLOWED_FRACTIONS]
        if bad:
            raise ValueError(f"budget fractions must be among 1/4, 1/2, 3/4, 1; got {bad[0]}")
        if self.max_expansions <= 0 or (self.max_ms is not None and self.max_ms <= 0):
            raise ValueError("caps must be positive")
        for t in self.tasks:
            if self.fractions and t.task.cstar is None:
                raise ValueError(f"task {t.name!r} has no cstar; fractional budgets need one")


@dataclass
class BenchResult:
    rows: list[dict] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)

    def rows_csv(self) -> str:
        return _to_csv(BENCH_HEADER, self.rows)

    def summary_csv(self) -> str:
        return _to_csv(SUMMARY_HEADER, self.summary)


def _to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _run_row(bench: BenchTask, fraction: Fraction, strategy: str, config: BenchConfig) -> dict:
    task = bench.task.with_budget(resolve_fraction(fraction, bench.task.cstar))
    compiled, _, _ = compile_task(task, strategy)
    row = {
        "task": bench.name, "fraction": str(fraction), "strategy": strategy,
        "actions_compiled": len(compiled.task.actions), "vars_compiled": len(compiled.task.variables),
    }
    seconds = None if config.max_ms is None else config.max_ms / 1000
    try:
        sol = bfbb_solve(compiled.task, max_expansions=config.max_expansions, max_seconds=seconds)
    except CapExceeded as exc:
        row.update(expansions=exc.states_visited, generated="", time_ms="", utility="", cost="", solved=0)
        return row
    row.update(
        expansions=sol.stats.expansions, generated=sol.stats.generated,
        time_ms=f"{sol.stats.wall_time * 1000:.3f}", utility=sol.utility, cost=sol.cost, solved=1,
    )
    return row


def summarize(config: BenchConfig, rows: Sequence[dict]) -> list[dict]:
    """Relative change of total expansions from base to blind and to pretotal.

    Totals run over the tasks of a domain solved by both strategies; changes
    below the threshold are reported as 0.
    """
    domain_of = {t.name: t.domain for t in config.tasks}
    by_key = defaultdict(dict)
    for r in rows:
        if r["solved"]:
            by_key[(domain_of[r["task"]], r["fraction"], r["task"])][r["strategy"]] = r["expansions"]
    out = []
    domains = list(dict.fromkeys(t.domain for t in config.tasks))
    for domain in domains:
        for fraction in config.fractions:
            for other in ("blind", "pretotal"):
                if "base" not in config.strategies or other not in config.strategies:
                    continue
                base = mine = 0
                for (d, f, _), exp in by_key.items():
                    if d == domain and f == str(fraction) and "base" in exp and other in exp:
                        base += exp["base"]
                        mine += exp[other]
                if base == 0:
                    change = "" if mine else "0"
                else:
                    rel = Fraction(mine - base, base)
                    change = "0" if abs(rel) < THRESHOLD else f"{float(rel):+.3f}"
                out.append({"domain": domain, "fraction": str(fraction), "comparison": f"base->{other}",
                            "relative_change": change})
    return out


def run_benchmark(config: BenchConfig) -> BenchResult:
    rows = [
        _run_row(t, f, s, config)
        for t in config.tasks for f in config.fractions for s in config.strategies
    ]
    return BenchResult(rows, summarize(config, rows))


def mask_timing(text: str, column: str = "time_ms") -> str:
    """Blank out one CSV column so runs can be compared byte for byte."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    k = header.index(column)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in reader:
        row[k] = ""
        writer.writerow(row)
    return buf.getvalue()
