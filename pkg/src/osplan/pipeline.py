"""Strategy-driven compilation: selective split plus optional unit-effect blocks."""

from __future__ import annotations

from dataclasses import replace

from .model import OspTask
from .selective import SplitReport, Verdict, classify_action, complete_preconditions, selective_split, split_origins
from .unit_effect import CompiledTask, Kind, LedgerEntry, Strategy, StrategyFilter, choose_strategy, unit_effect_compile


def compile_task(task: OspTask, strategy, **options) -> tuple[CompiledTask, list[SplitReport], StrategyFilter]:
    """Compile ``task`` under one of the split strategies.

    ``none`` leaves the task untouched.  ``base`` splits every ambiguous action
    into instances.  ``blind`` and ``pretotal`` unit-effect compile the
    ambiguous actions they select and split the rest; ``unit-all`` unit-effect
    compiles every action.  Extra keyword options go to
    :func:`unit_effect_compile`.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.NONE:
        ledger = {a.name: LedgerEntry(a.name, Kind.PASSTHROUGH) for a in task.actions}
        return CompiledTask(task, ledger, task), [], StrategyFilter(strategy)

    completed = complete_preconditions(task)
    reports = [classify_action(completed, a) for a in completed.actions]
    selection = choose_strategy(completed, reports, strategy)
    if strategy is Strategy.UNIT_ALL:
        split = completed
        origins = {}
    else:
        split, reports = selective_split(completed, exclude=selection.selected)
        origins = split_origins(reports)

    if not selection.selected:
        ledger = {
            a.name: LedgerEntry(origins[a.name], Kind.INSTANCE) if a.name in origins
            else LedgerEntry(a.name, Kind.PASSTHROUGH)
            for a in split.actions
        }
        return CompiledTask(split, ledger, task), reports, selection

    compiled = unit_effect_compile(split, selection, **options)
    ledger = {}
    for name, entry in compiled.ledger.items():
        if entry.kind is Kind.PASSTHROUGH and entry.original in origins:
            entry = LedgerEntry(origins[entry.original], Kind.INSTANCE)
        ledger[name] = entry
    return replace(compiled, ledger=ledger, source=task), reports, selection


def ambiguous_actions(reports) -> list[str]:
    return [r.action for r in reports if r.verdict is Verdict.AMBIGUOUS]
