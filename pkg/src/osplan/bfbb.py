"""Best-first branch-and-bound for optimal oversubscription planning."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from itertools import count
from typing import Callable

from .errors import CapExceeded
from .model import OspTask, Plan, State, state_utility

Heuristic = Callable[[OspTask, State, int], int]


@dataclass
class SearchStats:
    expansions: int = 0
    generated: int = 0
    duplicate_hits: int = 0
    wall_time: float = 0.0
    # (utility, cost, plan) each time the incumbent improved
    incumbents: list[tuple[int, int, Plan]] = field(default_factory=list)
    # f-values of expanded nodes in expansion order
    expanded_f: list[int] = field(default_factory=list)


@dataclass
class Solution:
    plan: Plan
    utility: int
    cost: int
    stats: SearchStats = field(default_factory=SearchStats)


def heuristic_max_fact(task: OspTask, state: State, remaining_budget: int) -> int:
    """Sum of each variable's best utility; ignores the state and the budget."""
    return task.utility_bound


HEURISTICS: dict[str, Heuristic] = {"maxfact": heuristic_max_fact}


def _extract(parents, node: int) -> Plan:
    steps = []
    while node:
        node, action = parents[node]
        steps.append(action)
    return tuple(reversed(steps))


def bfbb_solve(
    task: OspTask,
    heuristic: Heuristic = heuristic_max_fact,
    *,
    max_expansions: int | None = None,
    max_seconds: float | None = None,
) -> Solution:
    """Find a plan with maximal final utility among plans within the budget.

    Open nodes are ordered by highest upper bound, then lowest cost, then
    insertion order.  A node is pruned when its bound cannot beat the
    incumbent or its cost exceeds the budget; a state reached again at equal
    or higher cost is discarded.
    """
    start = time.perf_counter()
    stats = SearchStats()
    budget = task.budget
    succ = task.successors

    best_u = state_utility(task, task.initial)
    best_node, best_cost = 0, 0
    stats.incumbents.append((best_u, 0, ()))

    parents: list[tuple[int, int] | None] = [None]
    best_g: dict[State, int] = {task.initial: 0}
    tie = count()
    f0 = heuristic(task, task.initial, budget)
    open_list = [(-f0, 0, next(tie), 0, task.initial)]

    while open_list:
        neg_f, g, _, node, state = heapq.heappop(open_list)
        if best_g.get(state, g) < g:
            stats.duplicate_hits += 1
            continue
        if -neg_f <= best_u:
            continue
        if max_expansions is not None and stats.expansions >= max_expansions:
            stats.wall_time = time.perf_counter() - start
            raise CapExceeded(stats.expansions, "expansion cap")
        if max_seconds is not None and time.perf_counter() - start > max_seconds:
            raise CapExceeded(stats.expansions, "time cap")
        stats.expansions += 1
        stats.expanded_f.append(-neg_f)

        for action, nxt, cost in succ(state):
            g2 = g + cost
            if g2 > budget:
                continue
            stats.generated += 1
            old = best_g.get(nxt)
            if old is not None and old <= g2:
                stats.duplicate_hits += 1
                continue
            best_g[nxt] = g2
            parents.append((node, action))
            child = len(parents) - 1
            u = state_utility(task, nxt)
            if u > best_u:
                best_u, best_node, best_cost = u, child, g2
                stats.incumbents.append((u, g2, _extract(parents, child)))
            f = heuristic(task, nxt, budget - g2)
            if f > best_u:
                heapq.heappush(open_list, (-f, g2, next(tie), child, nxt))

    stats.wall_time = time.perf_counter() - start
    return Solution(_extract(parents, best_node), best_u, best_cost, stats)
