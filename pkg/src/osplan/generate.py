"""Seeded random task generator for the equivalence and property tests."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .model import Action, OspTask, Variable


@dataclass(frozen=True)
class GenParams:
    seed: int
    num_vars: int = 4
    max_domain: int = 4
    num_actions: int = 6
    min_cost: int = 1
    max_cost: int = 3
    max_utility: int = 2
    incomplete_pre_probability: float = 0.5
    # chance of an extra precondition on a variable the action does not change
    side_pre_probability: float = 0.25
    max_effects: int = 3
    # None draws the budget uniformly from [0, max_budget]
    budget: int | None = None
    max_budget: int = 8
    # pairwise mutex groups sampled from facts that never co-occur in a reachable state
    num_mutex: int = 0

    def __post_init__(self):
        for name in ("num_vars", "max_domain", "num_actions", "max_cost", "max_effects", "max_budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0 <= self.min_cost <= self.max_cost:
            raise ValueError("need 0 <= min_cost <= max_cost")
        if self.max_utility < 0:
            raise ValueError("max_utility must be >= 0")
        for name in ("incomplete_pre_probability", "side_pre_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.num_mutex < 0:
            raise ValueError("num_mutex must be >= 0")


def generate_task(params: GenParams) -> OspTask:
    rng = random.Random(params.seed)
    p = params
    variables = []
    for i in range(p.num_vars):
        size = rng.randint(min(2, p.max_domain), p.max_domain)
        utils = [rng.randint(0, p.max_utility) for _ in range(size)]
        variables.append(Variable(f"v{i}", [f"d{j}" for j in range(size)], utils))
    initial = tuple(rng.randrange(len(v)) for v in variables)

    actions = []
    for k in range(p.num_actions):
        changeable = [i for i, v in enumerate(variables) if len(v) > 1]
        if not changeable:
            break
        count = rng.randint(1, min(p.max_effects, len(changeable)))
        eff_vars = sorted(rng.sample(changeable, count))
        eff, pre = [], []
        for v in eff_vars:
            e = rng.randrange(len(variables[v]))
            eff.append((v, e))
            if rng.random() >= p.incomplete_pre_probability:
                others = [d for d in range(len(variables[v])) if d != e]
                pre.append((v, rng.choice(others)))
        for v in range(p.num_vars):
            if v not in eff_vars and rng.random() < p.side_pre_probability:
                pre.append((v, rng.randrange(len(variables[v]))))
        cost = rng.randint(p.min_cost, p.max_cost)
        actions.append(Action(f"a{k}", pre, eff, cost))

    budget = p.budget if p.budget is not None else rng.randint(0, p.max_budget)
    task = OspTask(variables, initial, actions, (), budget)
    if p.num_mutex:
        task = OspTask(variables, initial, actions, _sample_mutexes(task, rng, p.num_mutex), budget)
    return task


def reachable_states(task: OspTask, limit: int = 100_000) -> set:
    seen = {task.initial}
    queue = deque([task.initial])
    succ = task.successors
    while queue:
        state = queue.popleft()
        for _, nxt, _ in succ(state):
            if nxt not in seen:
                if len(seen) >= limit:
                    raise ValueError("too many reachable states for mutex sampling")
                seen.add(nxt)
                queue.append(nxt)
    return seen


def _sample_mutexes(task: OspTask, rng: random.Random, count: int):
    reached = reachable_states(task)
    seen_pairs = set()
    for state in reached:
        facts = list(enumerate(state))
        seen_pairs.update(combinations(facts, 2))
    facts = [(v, d) for v, var in enumerate(task.variables) for d in range(len(var))]
    # only facts that hold somewhere: an unreachable fact would pair with everything
    reachable_facts = {f for s in reached for f in enumerate(s)}
    candidates = [
        (f, g) for f, g in combinations(facts, 2)
        if f[0] != g[0] and f in reachable_facts and g in reachable_facts and (f, g) not in seen_pairs
    ]
    chosen = rng.sample(candidates, min(count, len(candidates)))
    return sorted(chosen)
