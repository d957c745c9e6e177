from collections import Counter
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osplan.errors import MalformedPlan
from osplan.model import (
    Action,
    OspTask,
    Variable,
    applicable,
    apply,
    is_consistent,
    net_utility_in_state,
    state_utility,
    validate_plan,
)
from osplan.oracle import brute_force_optimal
from osplan.pipeline import compile_task
from osplan.samples import t1_task, truck_task
from osplan.selective import classify_action, complete_preconditions
from osplan.unit_effect import (
    Kind,
    Strategy,
    StrategyFilter,
    choose_strategy,
    close_plan,
    expand_state,
    ledger_to_csv,
    project_state,
    restore_plan,
    unit_effect_compile,
)

from conftest import small_tasks


def _kinds(compiled, original):
    return Counter(e.kind for e in compiled.ledger.values() if e.original == original)


def _idx(compiled, name):
    return compiled.task.action_index[name]


def test_truck_block_refined_preset():
    compiled = unit_effect_compile(truck_task(), ["drive_E_2"], preset="refined")
    assert _kinds(compiled, "drive_E_2") == {
        Kind.UNLOCK: 1, Kind.VERIFY: 1, Kind.VERIFY_NO: 3, Kind.PLUS: 3, Kind.LOCK: 1,
    }


def test_truck_block_default_preset_adds_verify_for_effect_value():
    compiled = unit_effect_compile(truck_task(), ["drive_E_2"])
    assert sum(_kinds(compiled, "drive_E_2").values()) == 10
    assert "drive_E_2^verify:t:E->E" in compiled.ledger


def test_t1_block():
    compiled = unit_effect_compile(t1_task(), ["o"])
    assert _kinds(compiled, "o") == {Kind.UNLOCK: 1, Kind.VERIFY_NO: 1, Kind.PLUS: 1, Kind.LOCK: 1}


def test_compiled_task_shape():
    task = truck_task()
    compiled = unit_effect_compile(task, ["drive_E_2"])
    ctask = compiled.task
    assert ctask.budget == task.budget
    unlock = ctask.variables[compiled.unlock_var]
    assert unlock.values == ("drive_E_2", "noOP")
    assert ctask.initial == expand_state(compiled, task.initial) == (0, 3, 1, 0, 0)
    for entry_name, entry in compiled.ledger.items():
        a = ctask.actions[ctask.action_index[entry_name]]
        if entry.kind is Kind.UNLOCK:
            assert a.cost == 1
        elif entry.kind is not Kind.PASSTHROUGH:
            assert a.cost == 0
        else:
            assert (compiled.unlock_var, 1) in a.pre


def test_restore_worked_plan():
    compiled = unit_effect_compile(truck_task(), ["drive_E_2"], preset="refined")
    names = [
        "drive_E_2^unlock", "drive_E_2^verify:f:3->2", "drive_E_2^verifyNo:t:A->E",
        "drive_E_2^plus:t:A->E", "drive_E_2^lock",
    ]
    plan = [_idx(compiled, n) for n in names]
    assert restore_plan(compiled, plan) == (0,)
    assert restore_plan(compiled, []) == ()
    with pytest.raises(MalformedPlan):
        restore_plan(compiled, plan[:-1])
    with pytest.raises(MalformedPlan):
        restore_plan(compiled, plan[1:])
    # the lock is appended to a plan that stops after the last plus
    assert close_plan(compiled, plan[:-1]) == tuple(plan)


def test_plus_requires_all_flags():
    compiled = unit_effect_compile(truck_task(), ["drive_E_2"], preset="refined")
    ctask = compiled.task
    state = ctask.initial
    for name in ["drive_E_2^unlock", "drive_E_2^verifyNo:t:A->E"]:
        state = apply(ctask, state, ctask.actions[_idx(compiled, name)])
    assert not applicable(ctask, state, ctask.actions[_idx(compiled, "drive_E_2^plus:t:A->E")])


def test_psi_is_injective_and_keeps_utility():
    task = truck_task()
    compiled = unit_effect_compile(task, ["drive_E_2", "drive_E_1"])
    states = list(product(range(5), range(4)))
    images = {expand_state(compiled, s) for s in states}
    assert len(images) == len(states)
    for s in states:
        assert state_utility(compiled.task, expand_state(compiled, s)) == state_utility(task, s)
        assert project_state(compiled, expand_state(compiled, s)) == s


def test_strategy_filters_on_truck():
    task = complete_preconditions(truck_task())
    reports = [classify_action(task, a) for a in task.actions]
    assert choose_strategy(task, reports, "blind").selected == {"drive_E_2", "drive_E_1", "drive_E_0"}
    assert choose_strategy(task, reports, "base").selected == frozenset()
    assert choose_strategy(task, reports, "unit-all").selected == {a.name for a in task.actions}


def test_pretotal_selects_when_instances_outnumber_preconditions():
    # three x values and two y values differ in utility from the effects: 3 * 2 = 6 > 2
    x = Variable("x", ["x0", "x1", "x2", "x3"], [0, 1, 2, 3])
    y = Variable("y", ["y0", "y1", "y2"], [1, 2, 0])
    g = Variable("g", ["off", "on"], [0, 1])
    h = Variable("h", ["no", "yes"], [0, 0])
    action = Action("o", [(2, 0), (3, 1)], [(0, 0), (1, 2), (2, 1)])
    task = OspTask([x, y, g, h], (0, 0, 0, 1), [action], budget=1)
    reports = [classify_action(task, a) for a in task.actions]
    assert reports[0].expected_instances == 6 and reports[0].precondition_count == 2
    assert choose_strategy(task, reports, "pretotal").selected == {"o"}
    assert choose_strategy(task, reports, "blind").selected == {"o"}


def test_pretotal_declines_when_preconditions_dominate():
    x = Variable("x", ["a", "b"], [0, 1])
    g = Variable("g", ["off", "on"], [0, 4])
    k = Variable("k", ["no", "yes"], [0, 0])
    task = OspTask([x, g, k], (0, 0, 1), [Action("o", [(1, 0), (2, 1)], [(0, 0), (1, 1)])], budget=1)
    reports = [classify_action(task, a) for a in task.actions]
    assert choose_strategy(task, reports, "pretotal").selected == frozenset()


def test_empty_filter_only_guards_actions():
    task = truck_task()
    compiled = unit_effect_compile(task, StrategyFilter(Strategy.BASE))
    assert [a.name for a in compiled.task.actions] == [a.name for a in task.actions]
    for a, b in zip(task.actions, compiled.task.actions):
        assert b.eff == a.eff and b.cost == a.cost
        assert set(b.pre) == set(a.pre) | {(compiled.unlock_var, 0)}


def test_ledger_csv():
    compiled = unit_effect_compile(t1_task(), ["o"])
    assert ledger_to_csv(compiled).splitlines() == [
        "compiled_name,original_name,kind",
        "o^unlock,o,unlock",
        "o^verifyNo:v:a->b,o,verifyNo",
        "o^plus:v:a->b,o,plus",
        "o^lock,o,lock",
    ]


def test_name_collisions_are_resolved():
    v = Variable("unlock", ["a", "b"], [0, 1])
    task = OspTask([v], (0,), [Action("o", [(0, 0)], [(0, 1)]), Action("o^unlock", [], [(0, 0)])], budget=2)
    compiled = unit_effect_compile(task, ["o"])
    assert compiled.task.variables[compiled.unlock_var].name == "unlock_1"
    assert "o^unlock_1" in compiled.ledger and compiled.ledger["o^unlock"].kind is Kind.PASSTHROUGH
    assert brute_force_optimal(compiled.task).utility == 1


def _canonical_block(compiled, action, state):
    """Unlock, one verify or verifyNo per effect, the matching pluses, then the lock."""
    ctask = compiled.task
    names = [f"{action.name}^unlock"]
    pluses = []
    for v, e in action.eff:
        var = ctask.variables[v]
        tag = f"{var.name}:{var.values[state[v]]}->{var.values[e]}"
        if f"{action.name}^verify:{tag}" in ctask.action_index:
            names.append(f"{action.name}^verify:{tag}")
        else:
            names.append(f"{action.name}^verifyNo:{tag}")
            pluses.append(f"{action.name}^plus:{tag}")
    names += pluses + [f"{action.name}^lock"]
    plan = [ctask.action_index[n] for n in names]
    for i in plan:
        state = apply(ctask, state, ctask.actions[i])
    return plan, state


@given(small_tasks(), st.sampled_from(["consistent", "literal"]), st.booleans())
@settings(max_examples=100, deadline=None)
def test_block_equivalence(task, preset, all_flags):
    compiled = unit_effect_compile(task, [a.name for a in task.actions], preset=preset, all_flags=all_flags)
    ctask = compiled.task
    for s in product(*(range(len(v)) for v in task.variables)):
        if not is_consistent(task, s):
            continue
        for action in task.actions:
            if not applicable(task, s, action):
                continue
            plan, end = _canonical_block(compiled, action, expand_state(compiled, s))
            assert end == expand_state(compiled, apply(task, s, action))
            assert sum(ctask.actions[i].cost for i in plan) == action.cost
            trace = [state_utility(task, s)]
            state = expand_state(compiled, s)
            for i in plan:
                state = apply(ctask, state, ctask.actions[i])
                trace.append(state_utility(ctask, state))
            assert trace[-1] - trace[0] == net_utility_in_state(task, s, action)
            first_plus = next(
                (k for k, i in enumerate(plan) if compiled.kind(i) is Kind.PLUS), len(plan)
            )
            down, up = trace[: first_plus + 1], trace[first_plus:]
            assert all(a >= b for a, b in zip(down, down[1:]))
            assert all(a <= b for a, b in zip(up, up[1:]))
            assert max(trace) <= max(trace[0], trace[-1])


@given(small_tasks(), st.sampled_from(["consistent", "literal"]), st.booleans())
@settings(max_examples=60, deadline=None)
def test_literal_and_pruned_compilations_agree(task, preset, all_flags):
    compiled = unit_effect_compile(task, [a.name for a in task.actions], preset=preset, all_flags=all_flags)
    a, b = brute_force_optimal(task), brute_force_optimal(compiled.task)
    assert (a.utility, a.cost) == (b.utility, b.cost)


@given(small_tasks(), st.sampled_from([s.value for s in Strategy]))
@settings(max_examples=100, deadline=None)
def test_restored_optimal_plan_matches(task, strategy):
    compiled, _, _ = compile_task(task, strategy)
    sol = brute_force_optimal(compiled.task)
    plan = restore_plan(compiled, close_plan(compiled, sol.plan))
    report = validate_plan(task, plan)
    assert (report.final_utility, report.cost) == (sol.utility, sol.cost)
