"""Acceptance checks; one pass/fail line per criterion is printed at the end of the run."""

import time

from osplan.bench import ALLOWED_FRACTIONS, mask_timing
from osplan.bfbb import bfbb_solve
from osplan.cli import main
from osplan.model import apply, net_utility_in_state, state_utility
from osplan.pipeline import compile_task
from osplan.samples import split_friendly_task, split_hostile_task, truck_task
from osplan.taskio import resolve_fraction
from osplan.unit_effect import expand_state, unit_effect_compile

STRATEGIES = ("blind", "pretotal", "unit-all")


def test_criterion_1_truck_example():
    start = time.perf_counter()
    task = truck_task()
    drive = task.actions[task.action_index["drive_E_2"]]
    assert net_utility_in_state(task, task.initial, drive) == 1

    compiled = unit_effect_compile(task, ["drive_E_2"], preset="refined")
    block = [n for n in compiled.ledger if compiled.ledger[n].original == "drive_E_2"]
    assert len(block) == 9

    names = [
        "drive_E_2^unlock", "drive_E_2^verify:f:3->2", "drive_E_2^verifyNo:t:A->E",
        "drive_E_2^plus:t:A->E", "drive_E_2^lock",
    ]
    ctask = compiled.task
    state = expand_state(compiled, task.initial)
    start_u = state_utility(ctask, state)
    deltas, accumulated = [], []
    for name in names:
        nxt = apply(ctask, state, ctask.actions[ctask.action_index[name]])
        deltas.append(state_utility(ctask, nxt) - state_utility(ctask, state))
        accumulated.append(state_utility(ctask, nxt) - start_u)
        state = nxt
    assert deltas == [0, -1, 0, 2, 0]
    assert accumulated == [0, -1, -1, 1, 1]
    assert sum(deltas) == 1
    assert time.perf_counter() - start < 1.0


def test_criterion_2_equivalence(corpus):
    reports, elapsed = corpus
    assert len(reports) >= 200
    matches = sum(
        all(rep.compiled[s] == rep.original for s in STRATEGIES) for _, _, rep in reports
    )
    assert matches == len(reports)
    # the property is only meaningful if compilation actually happens on most tasks
    compiled_something = sum(
        bool(compile_task(task, "blind")[2].selected) for _, task, _ in reports
    )
    assert compiled_something >= 100
    assert elapsed < 300


def test_criterion_3_block_structure(corpus):
    reports, _ = corpus
    bad = [
        (seed, rep.counterexample) for seed, _, rep in reports
        if not (rep.verdicts["atomic"] and rep.verdicts["restore"] and rep.verdicts["valley"])
    ]
    assert bad == []


def test_criterion_4_gaining_prefix(corpus):
    reports, _ = corpus
    gaining = [rep for _, task, rep in reports if rep.original[0] > state_utility(task, task.initial)]
    assert len(gaining) >= 50
    assert all(rep.verdicts["prefix"] for rep in gaining)


def test_criterion_5_split_soundness(corpus):
    reports, _ = corpus
    assert all(rep.verdicts["split_sound"] for _, _, rep in reports)
    assert all(rep.compiled["base"][0] == rep.original[0] for _, _, rep in reports)


def test_criterion_6_bfbb_optimality(corpus):
    reports, _ = corpus
    assert all(rep.verdicts["bfbb"] for _, _, rep in reports)


def _expansions(task, strategy):
    return bfbb_solve(compile_task(task, strategy)[0].task).stats.expansions


def test_criterion_7_strategy_direction():
    friendly, hostile = split_friendly_task(), split_hostile_task()
    assert not compile_task(friendly, "pretotal")[2].selected
    assert compile_task(hostile, "pretotal")[2].selected
    for fraction in ALLOWED_FRACTIONS:
        task = hostile.with_budget(resolve_fraction(fraction, hostile.cstar))
        assert _expansions(task, "pretotal") <= _expansions(task, "blind")


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for run in range(2):
        verify_csv = tmp_path / f"verify{run}.csv"
        bench_csv = tmp_path / f"bench{run}.csv"
        assert main(["verify", "--seeds", "1..20", "--csv", str(verify_csv)]) == 0
        assert main([
            "bench", "truck", "split-friendly", "split-hostile", "--seeds", "1..5",
            "--compute-cstar", "-o", str(bench_csv),
        ]) == 0
        outputs.append((
            mask_timing(verify_csv.read_text(encoding="utf-8")),
            mask_timing(bench_csv.read_text(encoding="utf-8")),
        ))
    assert outputs[0] == outputs[1]
    assert outputs[0][1].count("\n") == 1 + 8 * 4 * 3
