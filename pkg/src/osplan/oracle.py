"""Brute-force ground truth and checkers for the compilation guarantees.

The oracle is a uniform-cost search over (state) ordered by plan cost and then
plan length.  It shares no code with the branch-and-bound solver beyond the
successor generator, so agreement between the two is a meaningful check.
"""

from __future__ import annotations

import csv
import heapq
import io
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .bfbb import SearchStats, Solution, bfbb_solve
from .errors import CapExceeded, MalformedPlan, OspError
from .generate import GenParams, generate_task
from .model import OspTask, Plan, applicable, apply, is_consistent, net_utility_in_state, replay, state_utility
from .pipeline import compile_task
from .selective import Verdict, classify_action, complete_preconditions
from .unit_effect import BLOCK_BODY, CompiledTask, Kind, close_plan, restore_plan

DEFAULT_STRATEGIES = ("base", "blind", "pretotal", "unit-all")
PROPERTIES = ("value", "bfbb", "atomic", "restore", "valley", "prefix", "split_sound")


@dataclass(frozen=True)
class Caps:
    states: int = 2_000_000
    ms: int | None = None

    def __post_init__(self):
        if self.states <= 0 or (self.ms is not None and self.ms <= 0):
            raise ValueError("caps must be positive")


def brute_force_optimal(task: OspTask, caps: Caps = Caps()) -> Solution:
    """Maximal reachable utility within the budget; ties go to the cheapest, then shortest, plan."""
    start = time.perf_counter()
    deadline = None if caps.ms is None else start + caps.ms / 1000
    succ = task.successors
    budget = task.budget
    best = {task.initial: (0, 0)}
    parent = {task.initial: None}
    heap = [(0, 0, task.initial)]
    top = (state_utility(task, task.initial), 0, 0, task.initial)
    settled = 0
    while heap:
        cost, length, state = heapq.heappop(heap)
        if best[state] < (cost, length):
            continue
        settled += 1
        if settled > caps.states:
            raise CapExceeded(settled - 1)
        if deadline is not None and time.perf_counter() > deadline:
            raise CapExceeded(settled, "time cap")
        u = state_utility(task, state)
        if u > top[0]:
            top = (u, cost, length, state)
        for action, nxt, c in succ(state):
            key = (cost + c, length + 1)
            if key[0] > budget:
                continue
            old = best.get(nxt)
            if old is None or key < old:
                best[nxt] = key
                parent[nxt] = (state, action)
                heapq.heappush(heap, (key[0], key[1], nxt))

    plan = []
    state = top[3]
    while parent[state] is not None:
        state, action = parent[state]
        plan.append(action)
    stats = SearchStats(expansions=settled, wall_time=time.perf_counter() - start)
    return Solution(tuple(reversed(plan)), top[0], top[1], stats)


def estimate_cstar(task: OspTask, caps: Caps = Caps()) -> int:
    """Cheapest cost of reaching the best utility when the budget is unlimited."""
    unbounded = task.with_budget(sum(a.cost for a in task.actions) * max(1, caps.states))
    return brute_force_optimal(unbounded, caps).cost


def consistent_states(task: OspTask):
    """Every full assignment that violates no mutex group."""
    for state in product(*(range(len(v)) for v in task.variables)):
        if is_consistent(task, state):
            yield state


def split_sign_violations(task: OspTask) -> list[str]:
    """Actions whose fixed-sign verdict is contradicted in some consistent state."""
    task = complete_preconditions(task)
    states = list(consistent_states(task))
    bad = []
    for action in task.actions:
        verdict = classify_action(task, action).verdict
        if verdict is Verdict.AMBIGUOUS:
            continue
        for s in states:
            if not applicable(task, s, action):
                continue
            net = net_utility_in_state(task, s, action)
            if (verdict is Verdict.PURE_POSITIVE and net <= 0) or (verdict is Verdict.NON_POSITIVE and net > 0):
                bad.append(f"{action.name} {verdict.value} but {net} in {task.state_names(s)}")
                break
    return bad


def gaining_prefix(task: OspTask, plan: Sequence[int]) -> int | None:
    """Length of the shortest prefix that reaches the plan's final utility with a net-positive last action."""
    report = replay(task, plan)
    state = task.initial
    for k, i in enumerate(plan):
        action = task.actions[i]
        net = net_utility_in_state(task, state, action)
        state = apply(task, state, action)
        if net > 0 and report.utility_trace[k] >= report.final_utility:
            return k + 1
    return None


def blocks(compiled: CompiledTask, plan: Sequence[int]) -> list[tuple[int, int]]:
    """Split a compiled plan into (start, end) index ranges of unlock...lock blocks.

    Raises MalformedPlan if a foreign action interleaves with an open block or a
    block is left open.
    """
    spans = []
    start = owner = None
    for k, i in enumerate(plan):
        kind = compiled.kind(i)
        if owner is None:
            if kind is Kind.UNLOCK:
                start, owner = k, compiled.original(i)
            elif kind in BLOCK_BODY or kind is Kind.LOCK:
                raise MalformedPlan(f"step {k}: {kind.value} outside a block")
            continue
        if compiled.original(i) != owner or kind not in BLOCK_BODY + (Kind.LOCK,):
            raise MalformedPlan(f"step {k}: foreign action inside the block of {owner!r}")
        if kind is Kind.LOCK:
            spans.append((start, k))
            owner = None
    if owner is not None:
        raise MalformedPlan(f"plan ends inside the block of {owner!r}")
    return spans


def valley_violations(compiled: CompiledTask, plan: Sequence[int]) -> list[tuple[int, int]]:
    """Blocks in which some intermediate utility exceeds both the entry and exit utility."""
    trace = (state_utility(compiled.task, compiled.task.initial),) + replay(compiled.task, plan).utility_trace
    bad = []
    for start, end in blocks(compiled, plan):
        entry, exit_ = trace[start], trace[end + 1]
        if max(trace[start + 1 : end + 1]) > max(entry, exit_):
            bad.append((start, end))
    return bad


@dataclass
class EquivalenceReport:
    name: str
    original: tuple[int, int]
    # strategy -> (utility, cost) of the oracle on the compiled task
    compiled: dict[str, tuple[int, int]] = field(default_factory=dict)
    # property -> pass/fail, for the properties listed in PROPERTIES
    verdicts: dict[str, bool] = field(default_factory=dict)
    counterexample: str | None = None
    time_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def fail(self, prop: str, detail: str) -> None:
        self.verdicts[prop] = False
        if self.counterexample is None:
            self.counterexample = f"{prop}: {detail}"


def _check_compiled(report: EquivalenceReport, strategy: str, compiled: CompiledTask, caps: Caps) -> None:
    task = compiled.task
    opt = brute_force_optimal(task, caps)
    report.compiled[strategy] = (opt.utility, opt.cost)
    if (opt.utility, opt.cost) != report.original:
        report.fail("value", f"{strategy}: {(opt.utility, opt.cost)} != {report.original}")
    found = bfbb_solve(task)
    if found.utility != opt.utility:
        report.fail("bfbb", f"{strategy}: bfbb {found.utility} != oracle {opt.utility}")

    plan = close_plan(compiled, opt.plan)
    try:
        blocks(compiled, plan)
    except MalformedPlan as exc:
        report.fail("atomic", f"{strategy}: {exc}")
        return
    try:
        restored = restore_plan(compiled, plan)
        mine = replay(task, plan)
        theirs = replay(compiled.source, restored)
        if (mine.cost, mine.final_utility) != (theirs.cost, theirs.final_utility) or theirs.cost > compiled.source.budget:
            report.fail("restore", f"{strategy}: restored plan gives {(theirs.final_utility, theirs.cost)}")
    except OspError as exc:
        report.fail("restore", f"{strategy}: {exc}")
    if valley_violations(compiled, plan):
        report.fail("valley", f"{strategy}: plan {plan}")


def check_equivalence(
    task: OspTask, strategies: Sequence[str] = DEFAULT_STRATEGIES, caps: Caps = Caps(), name: str = "task"
) -> EquivalenceReport:
    """Run the oracle and the solver on ``task`` and each compilation and record every property."""
    start = time.perf_counter()
    opt = brute_force_optimal(task, caps)
    report = EquivalenceReport(name, (opt.utility, opt.cost))
    report.verdicts = {p: True for p in PROPERTIES}
    if bfbb_solve(task).utility != opt.utility:
        report.fail("bfbb", "original task")
    if opt.utility > state_utility(task, task.initial) and gaining_prefix(task, opt.plan) is None:
        report.fail("prefix", f"plan {opt.plan}")
    bad = split_sign_violations(task)
    if bad:
        report.fail("split_sound", bad[0])
    for strategy in strategies:
        compiled, _, _ = compile_task(task, strategy)
        _check_compiled(report, strategy, compiled, caps)
    report.time_ms = (time.perf_counter() - start) * 1000
    return report


def corpus_params(seed: int) -> GenParams:
    """Generator settings of the equivalence corpus: small tasks, a third of them with mutex groups."""
    return GenParams(
        seed=seed, num_vars=4, max_domain=4, num_actions=6, max_budget=8,
        incomplete_pre_probability=0.5, num_mutex=seed % 3,
    )


def corpus_task(seed: int) -> OspTask:
    return generate_task(corpus_params(seed))


VERIFY_HEADER = ["seed", "strategy", "utility", "cost", *PROPERTIES, "time_ms"]


def verify_rows(reports: Sequence[tuple[int, EquivalenceReport]]) -> str:
    """CSV with one row for the original task and one per strategy of every seed."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(VERIFY_HEADER)
    for seed, rep in reports:
        flags = [int(rep.verdicts[p]) for p in PROPERTIES]
        time_ms = f"{rep.time_ms:.1f}"
        writer.writerow([seed, "none", *rep.original, *flags, time_ms])
        for strategy, (u, c) in rep.compiled.items():
            writer.writerow([seed, strategy, u, c, *flags, time_ms])
    return buf.getvalue()
