"""Oversubscription planning tasks: variables, actions, states and utilities.

A task is the tuple <V, s0, u; O, c, b>: finite-domain variables carrying an
additive per-fact utility, an initial state, actions with nonnegative integer
costs, and a cost budget.  States are plain tuples of value indices so they
can be hashed and compared cheaply by the search code.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import chain
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, IncompletePrecondition, NotApplicable, NotApplicableAtStep

Fact = tuple[int, int]
State = tuple[int, ...]
Plan = tuple[int, ...]

_NAME = re.compile(r"[^\s=#]+")
_ACTION_NAME = re.compile(r"[^\s#]+")


def _check_name(name: str, pattern=_NAME) -> None:
    if not isinstance(name, str) or not pattern.fullmatch(name):
        raise ValueError(f"invalid name {name!r}")


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple[str, ...]
    utilities: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "utilities", tuple(int(u) for u in self.utilities))
        _check_name(self.name)
        if not self.values:
            raise ValueError(f"variable {self.name!r} has an empty domain")
        for value in self.values:
            _check_name(value)
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"variable {self.name!r} has duplicate values")
        if len(self.utilities) != len(self.values):
            raise ValueError(f"variable {self.name!r}: {len(self.values)} values but {len(self.utilities)} utilities")

    def __len__(self):
        return len(self.values)

    def index(self, value: str) -> int:
        return self.values.index(value)


def _normalize_assignment(entries: Iterable[Fact]) -> tuple[Fact, ...]:
    entries = tuple(sorted((int(v), int(d)) for v, d in entries))
    for (v1, _), (v2, _) in zip(entries, entries[1:]):
        if v1 == v2:
            raise ValueError(f"partial assignment has two entries for variable {v1}")
    return entries


@dataclass(frozen=True)
class Action:
    """A named pair of partial assignments with a cost.

    ``pre`` and ``eff`` are tuples of ``(variable, value)`` index pairs sorted by
    variable.  Use :meth:`make` to build an action from raw entries; it drops
    effect entries that merely restate a precondition.
    """

    name: str
    pre: tuple[Fact, ...]
    eff: tuple[Fact, ...]
    cost: int = 1

    def __post_init__(self):
        _check_name(self.name, _ACTION_NAME)
        object.__setattr__(self, "pre", _normalize_assignment(self.pre))
        object.__setattr__(self, "eff", _normalize_assignment(self.eff))
        if not self.eff:
            raise ValueError(f"action {self.name!r} has no effects")
        if set(self.pre) & set(self.eff):
            raise ValueError(f"action {self.name!r} repeats a precondition as an effect")
        if int(self.cost) != self.cost or self.cost < 0:
            raise ValueError(f"action {self.name!r} has invalid cost {self.cost!r}")

    @classmethod
    def make(cls, name: str, pre: Iterable[Fact], eff: Iterable[Fact], cost: int = 1) -> "Action":
        pre = tuple(pre)
        pre_set = set(pre)
        return cls(name, pre, tuple(f for f in eff if f not in pre_set), cost)

    @cached_property
    def pre_map(self) -> dict[int, int]:
        return dict(self.pre)

    @cached_property
    def eff_map(self) -> dict[int, int]:
        return dict(self.eff)

    @property
    def eff_vars(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.eff)

    def unknown_eff_vars(self) -> tuple[int, ...]:
        """Effect variables the precondition leaves unconstrained."""
        return tuple(v for v, _ in self.eff if v not in self.pre_map)


@dataclass(frozen=True)
class OspTask:
    variables: tuple[Variable, ...]
    initial: State
    actions: tuple[Action, ...]
    mutex_groups: tuple[tuple[Fact, ...], ...] = ()
    budget: int = 0
    # Set when the budget was given as a fraction of a reference cost c*.
    budget_fraction: Fraction | None = None
    cstar: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "initial", tuple(int(d) for d in self.initial))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(
            self, "mutex_groups", tuple(tuple(sorted(set(map(tuple, g)))) for g in self.mutex_groups)
        )
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            dup = next(n for n, c in Counter(names).items() if c > 1)
            raise ValueError(f"duplicate action name {dup!r}")
        for a in self.actions:
            for v, d in chain(a.pre, a.eff):
                self._check_fact((v, d), f"action {a.name!r}")
        for group in self.mutex_groups:
            for fact in group:
                self._check_fact(fact, "mutex group")
        if not is_state(self, self.initial):
            raise ValueError(f"malformed initial state {self.initial}")
        if not is_consistent(self, self.initial):
            raise ValueError("initial state violates a mutex group")
        if int(self.budget) != self.budget or self.budget < 0:
            raise ValueError(f"invalid budget {self.budget!r}")

    def _check_fact(self, fact: Fact, where: str) -> None:
        v, d = fact
        if not (0 <= v < len(self.variables) and 0 <= d < len(self.variables[v])):
            raise ValueError(f"{where}: fact {fact} out of range")

    @cached_property
    def action_index(self) -> dict[str, int]:
        return {a.name: i for i, a in enumerate(self.actions)}

    @cached_property
    def mutex_partners(self) -> dict[Fact, frozenset[Fact]]:
        """Facts on other variables declared mutually exclusive with each fact."""
        partners: dict[Fact, set[Fact]] = {}
        for group in self.mutex_groups:
            for f in group:
                partners.setdefault(f, set()).update(g for g in group if g[0] != f[0])
        return {f: frozenset(p) for f, p in partners.items()}

    @cached_property
    def utility_bound(self) -> int:
        """Utility of the best state if every variable held its best value."""
        return sum(max(v.utilities) for v in self.variables)

    @cached_property
    def successors(self) -> "SuccessorGenerator":
        return SuccessorGenerator(self)

    def with_budget(self, budget: int) -> "OspTask":
        return replace(self, budget=budget, budget_fraction=None, cstar=None)

    def fact_name(self, fact: Fact) -> str:
        v, d = fact
        var = self.variables[v]
        return f"{var.name}={var.values[d]}"

    def state_names(self, state: State) -> tuple[str, ...]:
        return tuple(self.fact_name((v, d)) for v, d in enumerate(state))


def is_state(task: OspTask, state: Sequence[int]) -> bool:
    return len(state) == len(task.variables) and all(
        0 <= d < len(var) for d, var in zip(state, task.variables)
    )


def is_consistent(task: OspTask, state: State) -> bool:
    """True iff at most one fact of every mutex group holds in ``state``."""
    for group in task.mutex_groups:
        if sum(1 for v, d in group if state[v] == d) > 1:
            return False
    return True


def consistent_values(task: OspTask, action: Action, var: int) -> tuple[int, ...]:
    """Values of ``var`` not declared mutex with any precondition fact of ``action``."""
    partners = task.mutex_partners
    pre = action.pre
    return tuple(
        d for d in range(len(task.variables[var]))
        if not any(p in partners.get((var, d), ()) for p in pre)
    )


def applicable(task: OspTask, state: State, action: Action) -> bool:
    return all(state[v] == d for v, d in action.pre)


def apply(task: OspTask, state: State, action: Action) -> State:
    if not applicable(task, state, action):
        raise NotApplicable(action.name, state)
    values = list(state)
    for v, d in action.eff:
        values[v] = d
    return tuple(values)


def state_utility(task: OspTask, state: State) -> int:
    return sum(var.utilities[d] for var, d in zip(task.variables, state))


def net_utility_static(task: OspTask, action: Action) -> int:
    """Net utility from the action's own precondition and effect lists.

    Raises IncompletePrecondition when an effect variable has no precondition,
    since the value being overwritten is then unknown.
    """
    missing = action.unknown_eff_vars()
    if missing:
        raise IncompletePrecondition(action.name, missing)
    pre = action.pre_map
    u = task.variables
    return sum(u[v].utilities[e] - u[v].utilities[pre[v]] for v, e in action.eff)


def net_utility_in_state(task: OspTask, state: State, action: Action) -> int:
    if not applicable(task, state, action):
        raise NotApplicable(action.name, state)
    u = task.variables
    return sum(u[v].utilities[e] - u[v].utilities[state[v]] for v, e in action.eff)


def net_utility_interval(task: OspTask, action: Action) -> tuple[int, int]:
    """Smallest and largest state-relative net utility the action can have.

    Effect variables with a precondition contribute a constant.  For the others
    the overwritten value ranges over the values not mutex with the known
    preconditions; if mutexes exclude every value the action can never fire in
    a consistent state and the variable contributes nothing.
    """
    lo = hi = 0
    pre = action.pre_map
    for v, e in action.eff:
        utils = task.variables[v].utilities
        if v in pre:
            delta = utils[e] - utils[pre[v]]
            lo += delta
            hi += delta
            continue
        candidates = [utils[d] for d in consistent_values(task, action, v)]
        if candidates:
            lo += utils[e] - max(candidates)
            hi += utils[e] - min(candidates)
    return lo, hi


@dataclass(frozen=True)
class PlanReport:
    cost: int
    final_state: State
    final_utility: int
    utility_trace: tuple[int, ...] = field(default=())


def replay(task: OspTask, plan: Sequence[int], start: State | None = None) -> PlanReport:
    """Apply ``plan`` step by step without checking the budget."""
    state = task.initial if start is None else tuple(start)
    cost = 0
    trace = []
    for step, idx in enumerate(plan):
        action = task.actions[idx]
        if not applicable(task, state, action):
            raise NotApplicableAtStep(step, action.name, state)
        state = apply(task, state, action)
        cost += action.cost
        trace.append(state_utility(task, state))
    return PlanReport(cost, state, state_utility(task, state), tuple(trace))


def validate_plan(task: OspTask, plan: Sequence[int], start: State | None = None) -> PlanReport:
    report = replay(task, plan, start)
    if report.cost > task.budget:
        raise BudgetExceeded(report.cost, task.budget)
    return report


class SuccessorGenerator:
    """Enumerates applicable actions, bucketed on the most constrained variable.

    Compiled tasks put a control variable into nearly every precondition, so a
    single level of bucketing removes most of the applicability tests.
    """

    def __init__(self, task: OspTask):
        counts = Counter(v for a in task.actions for v, _ in a.pre)
        self.key = min(counts, key=lambda v: (-counts[v], v)) if counts else None
        size = len(task.variables[self.key]) if self.key is not None else 0
        self.buckets: list[list] = [[] for _ in range(size)]
        self.free: list = []
        for i, a in enumerate(task.actions):
            pre = a.pre_map
            rest = tuple((v, d) for v, d in a.pre if v != self.key)
            entry = (i, rest, a.eff, a.cost)
            if self.key is not None and self.key in pre:
                self.buckets[pre[self.key]].append(entry)
            else:
                self.free.append(entry)

    def __call__(self, state: State) -> Iterator[tuple[int, State, int]]:
        group = self.buckets[state[self.key]] if self.key is not None else ()
        for i, pre, eff, cost in chain(group, self.free):
            for v, d in pre:
                if state[v] != d:
                    break
            else:
                values = list(state)
                for v, d in eff:
                    values[v] = d
                yield i, tuple(values), cost
