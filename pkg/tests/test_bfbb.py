from collections import deque

import pytest
from hypothesis import given, settings

from osplan.bfbb import bfbb_solve, heuristic_max_fact
from osplan.errors import CapExceeded
from osplan.model import state_utility, validate_plan
from osplan.pipeline import compile_task
from osplan.samples import split_hostile_task, t1_task, truck_task

from conftest import small_tasks


def reachable_best(task):
    """Best (utility, -cost) over all (state, cost) pairs reachable within the budget."""
    seen = {(task.initial, 0)}
    queue = deque(seen)
    while queue:
        state, cost = queue.popleft()
        for _, nxt, c in task.successors(state):
            pair = (nxt, cost + c)
            if pair[1] <= task.budget and pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return max((state_utility(task, s), -c) for s, c in seen)


def test_t1():
    sol = bfbb_solve(t1_task())
    assert (sol.utility, sol.plan) == (2, (0,))


def test_truck():
    sol = bfbb_solve(truck_task())
    assert (sol.utility, sol.cost, sol.plan) == (4, 1, (0,))
    assert bfbb_solve(truck_task().with_budget(3)).utility == reachable_best(truck_task().with_budget(3))[0]


def test_compiled_truck():
    compiled, _, _ = compile_task(truck_task(), "blind")
    assert bfbb_solve(compiled.task).utility == 4


def test_zero_budget_keeps_initial_state():
    task = truck_task().with_budget(0)
    sol = bfbb_solve(task)
    assert (sol.utility, sol.plan, sol.cost) == (3, (), 0)


def test_heuristic_is_sum_of_best_values():
    assert heuristic_max_fact(truck_task(), (0, 3), 1) == 5


def test_caps():
    compiled, _, _ = compile_task(split_hostile_task(), "blind")
    with pytest.raises(CapExceeded):
        bfbb_solve(compiled.task, max_expansions=3)


def test_stats_are_consistent():
    compiled, _, _ = compile_task(split_hostile_task(), "blind")
    sol = bfbb_solve(compiled.task)
    stats = sol.stats
    assert stats.expansions == len(stats.expanded_f)
    assert all(a >= b for a, b in zip(stats.expanded_f, stats.expanded_f[1:]))
    utilities = [u for u, _, _ in stats.incumbents]
    assert utilities == sorted(set(utilities))
    assert stats.incumbents[-1][0] == sol.utility


@given(small_tasks())
@settings(max_examples=200, deadline=None)
def test_optimal_against_exhaustive_pairs(task):
    sol = bfbb_solve(task)
    assert sol.utility == reachable_best(task)[0]
    report = validate_plan(task, sol.plan)
    assert (report.final_utility, report.cost) == (sol.utility, sol.cost)


@given(small_tasks())
@settings(max_examples=60, deadline=None)
def test_optimal_on_compilations(task):
    for strategy in ("blind", "unit-all"):
        compiled, _, _ = compile_task(task, strategy)
        assert bfbb_solve(compiled.task).utility == reachable_best(task)[0]
