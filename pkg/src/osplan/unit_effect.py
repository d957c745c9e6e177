"""Unit-effect compilation of actions with an unlock/lock control structure.

Every selected action ``o`` becomes a block

    o^unlock, (verify | verifyNo)*, plus*, o^lock

where ``o^unlock`` carries the cost of ``o`` and checks its preconditions,
each effect fact is achieved by a single-effect action from one specific
previous value, and the y-flags force every non-positive change to happen
before any positive one.  A control variable ``unlock`` keeps blocks from
interleaving.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .errors import MalformedPlan
from .model import Action, OspTask, Plan, State, Variable, applicable, apply, consistent_values
from .selective import SplitReport, Verdict, refined_domain

NOOP = "noOP"


class Strategy(enum.Enum):
    NONE = "none"
    BASE = "base"
    BLIND = "blind"
    PRETOTAL = "pretotal"
    UNIT_ALL = "unit-all"


class Kind(str, enum.Enum):
    UNLOCK = "unlock"
    LOCK = "lock"
    VERIFY = "verify"
    VERIFY_NO = "verifyNo"
    PLUS = "plus"
    PASSTHROUGH = "passthrough"
    INSTANCE = "instance"


BLOCK_BODY = (Kind.VERIFY, Kind.VERIFY_NO, Kind.PLUS)


class LedgerEntry(NamedTuple):
    original: str
    kind: Kind


@dataclass(frozen=True)
class StrategyFilter:
    strategy: Strategy
    selected: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CompiledTask:
    task: OspTask
    ledger: dict[str, LedgerEntry]
    # the task plans are restored into
    source: OspTask
    unlock_var: int | None = None
    flag_vars: dict[tuple[int, int], int] = field(default_factory=dict)

    def kind(self, index: int) -> Kind:
        return self.ledger[self.task.actions[index].name].kind

    def original(self, index: int) -> str:
        return self.ledger[self.task.actions[index].name].original


def choose_strategy(task: OspTask, reports: Sequence[SplitReport], strategy) -> StrategyFilter:
    strategy = Strategy(strategy)
    ambiguous = [r for r in reports if r.verdict is Verdict.AMBIGUOUS]
    if strategy is Strategy.UNIT_ALL:
        return StrategyFilter(strategy, frozenset(a.name for a in task.actions))
    if strategy is Strategy.BLIND:
        return StrategyFilter(strategy, frozenset(r.action for r in ambiguous))
    if strategy is Strategy.PRETOTAL:
        # one decision for the whole task, not per action
        expected = sum(r.expected_instances for r in ambiguous)
        pre_total = sum(r.precondition_count for r in ambiguous)
        if expected > pre_total:
            return StrategyFilter(strategy, frozenset(r.action for r in ambiguous))
        return StrategyFilter(strategy)
    return StrategyFilter(strategy)


def _fresh(name: str, taken: set[str]) -> str:
    candidate, i = name, 1
    while candidate in taken:
        candidate = f"{name}_{i}"
        i += 1
    taken.add(candidate)
    return candidate


def pre_set(task: OspTask, action: Action, v: int, mode: str = "consistent") -> tuple[int, ...]:
    """Values ``v`` may hold when ``action`` starts.

    ``consistent`` drops values mutex with a known precondition, ``literal``
    keeps the whole domain, and ``refined`` additionally drops values with the
    effect's utility (reproduces the hand-worked truck example, but blocks
    started from such a value can never finish).
    """
    if v in action.pre_map:
        return (action.pre_map[v],)
    if mode == "consistent":
        return consistent_values(task, action, v)
    if mode == "literal":
        return tuple(range(len(task.variables[v])))
    if mode == "refined":
        return refined_domain(task, action, v)
    raise ValueError(f"unknown preSet mode {mode!r}")


def unit_effect_compile(
    task: OspTask,
    selection: StrategyFilter | Sequence[str],
    *,
    preset: str = "consistent",
    all_flags: bool = False,
) -> CompiledTask:
    """Replace the selected actions by guarded single-effect blocks.

    Unselected actions only gain the precondition ``unlock=noOP``.  y-flags are
    created for the effect facts of selected actions; ``all_flags`` creates one
    per fact of the task instead.
    """
    selected = selection.selected if isinstance(selection, StrategyFilter) else frozenset(selection)
    unknown = selected - set(task.action_index)
    if unknown:
        raise ValueError(f"selected actions not in task: {sorted(unknown)}")
    chosen = [a for a in task.actions if a.name in selected]

    taken = {v.name for v in task.variables}
    unlock_name = _fresh("unlock", taken)
    lock_values = [a.name for a in chosen]
    if NOOP in lock_values:
        raise ValueError(f"an action named {NOOP!r} cannot be unit-effect compiled")
    unlock_values = lock_values + [NOOP]
    unlock_var = len(task.variables)
    noop = len(unlock_values) - 1
    slot = {name: i for i, name in enumerate(lock_values)}

    if all_flags:
        flag_facts = [(v, d) for v, var in enumerate(task.variables) for d in range(len(var))]
    else:
        flag_facts = sorted({f for a in chosen for f in a.eff})
    flag_vars = {}
    variables = list(task.variables) + [Variable(unlock_name, unlock_values, [0] * len(unlock_values))]
    for fact in flag_facts:
        var = task.variables[fact[0]]
        name = _fresh(f"y({var.name},{var.values[fact[1]]})", taken)
        flag_vars[fact] = len(variables)
        variables.append(Variable(name, ("0", "1"), (0, 0)))

    ledger: dict[str, LedgerEntry] = {}
    actions: list[Action] = []
    names = set(task.action_index)

    def emit(name, pre, eff, cost, original, kind):
        if kind is not Kind.PASSTHROUGH:
            name = _fresh(name, names)
        actions.append(Action.make(name, pre, eff, cost))
        ledger[name] = LedgerEntry(original, kind)

    for a in task.actions:
        if a.name not in selected:
            emit(a.name, a.pre + ((unlock_var, noop),), a.eff, a.cost, a.name, Kind.PASSTHROUGH)
            continue
        mine = (unlock_var, slot[a.name])
        flags_on = tuple((flag_vars[f], 1) for f in a.eff)
        emit(f"{a.name}^unlock", a.pre + ((unlock_var, noop),), (mine,), a.cost, a.name, Kind.UNLOCK)
        pluses = []
        for v, e in a.eff:
            utils = task.variables[v].utilities
            var = task.variables[v]
            flag = (flag_vars[(v, e)], 1)
            for p in pre_set(task, a, v, preset):
                tag = f"{var.name}:{var.values[p]}->{var.values[e]}"
                if utils[e] - utils[p] <= 0:
                    emit(f"{a.name}^verify:{tag}", ((v, p), mine), ((v, e), flag), 0, a.name, Kind.VERIFY)
                else:
                    emit(f"{a.name}^verifyNo:{tag}", ((v, p), mine), (flag,), 0, a.name, Kind.VERIFY_NO)
                    pluses.append((f"{a.name}^plus:{tag}", ((v, p), mine) + flags_on, ((v, e),)))
        for name, pre, eff in pluses:
            emit(name, pre, eff, 0, a.name, Kind.PLUS)
        emit(
            f"{a.name}^lock",
            a.eff + (mine,) + flags_on,
            ((unlock_var, noop),) + tuple((flag_vars[f], 0) for f in a.eff),
            0,
            a.name,
            Kind.LOCK,
        )

    initial = task.initial + (noop,) + (0,) * len(flag_facts)
    # flags and unlock are new variables, so the declared mutexes carry over unchanged
    compiled = OspTask(
        variables, initial, actions, task.mutex_groups, task.budget, task.budget_fraction, task.cstar
    )
    return CompiledTask(compiled, ledger, task, unlock_var, flag_vars)


def expand_state(compiled: CompiledTask, state: State) -> State:
    """Embed a state of the source task: unlock=noOP and every flag 0."""
    extra = len(compiled.task.variables) - len(compiled.source.variables)
    if extra == 0:
        return tuple(state)
    noop = len(compiled.task.variables[compiled.unlock_var]) - 1
    return tuple(state) + (noop,) + (0,) * (extra - 1)


def project_state(compiled: CompiledTask, state: State) -> State:
    return tuple(state[: len(compiled.source.variables)])


def restore_plan(compiled: CompiledTask, plan: Sequence[int]) -> Plan:
    """Map a compiled plan back to actions of the source task.

    Every passthrough or instance action stands for itself; every complete
    unlock ... lock block stands for its original action.
    """
    index = compiled.source.action_index
    restored = []
    open_block = None
    for step, i in enumerate(plan):
        entry = compiled.ledger[compiled.task.actions[i].name]
        if open_block is None:
            if entry.kind in (Kind.PASSTHROUGH, Kind.INSTANCE):
                restored.append(index[entry.original])
            elif entry.kind is Kind.UNLOCK:
                open_block = entry.original
            else:
                raise MalformedPlan(f"step {step}: {entry.kind.value} action outside a block")
        else:
            if entry.original != open_block or entry.kind not in BLOCK_BODY + (Kind.LOCK,):
                raise MalformedPlan(
                    f"step {step}: {compiled.task.actions[i].name!r} inside the block of {open_block!r}"
                )
            if entry.kind is Kind.LOCK:
                restored.append(index[open_block])
                open_block = None
    if open_block is not None:
        raise MalformedPlan(f"plan ends inside the block of {open_block!r}")
    return tuple(restored)


def close_plan(compiled: CompiledTask, plan: Sequence[int]) -> Plan:
    """Append the lock action when ``plan`` stops right before it.

    A plan may end after the last plus of a block: the utility there already
    equals the block's final utility and the zero-cost lock changes only
    control variables.  Plans ending anywhere else are returned unchanged.
    """
    plan = tuple(plan)
    if compiled.unlock_var is None:
        return plan
    task = compiled.task
    state = task.initial
    for i in plan:
        state = apply(task, state, task.actions[i])
    noop = len(task.variables[compiled.unlock_var]) - 1
    if state[compiled.unlock_var] == noop:
        return plan
    owner = task.variables[compiled.unlock_var].values[state[compiled.unlock_var]]
    for j, a in enumerate(task.actions):
        entry = compiled.ledger[a.name]
        if entry.kind is Kind.LOCK and entry.original == owner and applicable(task, state, a):
            return plan + (j,)
    return plan


def ledger_to_csv(compiled: CompiledTask) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["compiled_name", "original_name", "kind"])
    for a in compiled.task.actions:
        entry = compiled.ledger[a.name]
        writer.writerow([a.name, entry.original, entry.kind.value])
    return buf.getvalue()
