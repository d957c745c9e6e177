"""Offline net-utility analysis of actions with incomplete preconditions.

Each action is classified by the interval of net utilities it can have over
the states where it applies.  Actions whose sign is fixed are kept as they
are; ambiguous actions are split into normal-form instances, one per
combination of values of the unconstrained effect variables that matter.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field, replace
from itertools import product
from math import prod

from .errors import InstanceExplosion
from .model import Action, OspTask, consistent_values

INSTANCE_CAP = 512


class Verdict(enum.Enum):
    NON_POSITIVE = "NonPositive"
    PURE_POSITIVE = "PurePositive"
    AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class Instance:
    name: str
    assignment: tuple[tuple[int, int], ...]
    net: int

    @property
    def positive(self) -> bool:
        return self.net > 0


@dataclass(frozen=True)
class SplitReport:
    action: str
    enu: int
    mss: tuple[int, ...]
    refined: dict[int, tuple[int, ...]]
    floor: int
    ceiling: int
    verdict: Verdict
    instances: tuple[Instance, ...] = ()
    # product of refined-domain sizes over the min-split-set
    expected_instances: int = 0
    precondition_count: int = 0
    uncompiled: bool = False
    domains: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.uncompiled:
            return "Ambiguous-Uncompiled"
        return self.verdict.value


def complete_preconditions(task: OspTask) -> OspTask:
    """Pin unconstrained effect variables that the mutex groups leave only one value.

    Repeats until nothing changes, since a new precondition can exclude values
    of another variable.  An added precondition equal to the effect turns that
    effect entry into a no-op, which is dropped unless it is the only effect.
    """
    if not task.mutex_groups:
        return task
    actions = []
    changed_any = False
    for action in task.actions:
        current = action
        while True:
            update = None
            for v in current.unknown_eff_vars():
                values = consistent_values(task, current, v)
                if len(values) != 1:
                    continue
                d = values[0]
                if current.eff_map[v] == d and len(current.eff) == 1:
                    continue
                update = (v, d)
                break
            if update is None:
                break
            current = Action.make(current.name, current.pre + (update,), current.eff, current.cost)
        changed_any |= current is not action
        actions.append(current)
    return replace(task, actions=tuple(actions)) if changed_any else task


def explicit_net_utility(task: OspTask, action: Action) -> int:
    pre = action.pre_map
    total = 0
    for v, e in action.eff:
        if v in pre:
            utils = task.variables[v].utilities
            total += utils[e] - utils[pre[v]]
    return total


def refined_domain(task: OspTask, action: Action, v: int) -> tuple[int, ...]:
    utils = task.variables[v].utilities
    target = utils[action.eff_map[v]]
    return tuple(d for d in consistent_values(task, action, v) if utils[d] != target)


def min_split_set(task: OspTask, action: Action) -> tuple[int, ...]:
    return tuple(v for v in action.unknown_eff_vars() if refined_domain(task, action, v))


def _instance_name(task: OspTask, action: Action, assignment) -> str:
    return f"{action.name}[{';'.join(task.fact_name(f) for f in assignment)}]"


def classify_action(
    task: OspTask,
    action: Action,
    *,
    instance_cap: int = INSTANCE_CAP,
    defer: bool = True,
    instance_domain: str = "consistent",
) -> SplitReport:
    """Classify ``action`` as NonPositive, PurePositive or Ambiguous.

    The floor and ceiling subtract the largest and smallest utility over the
    values of each min-split-set variable that are consistent with the known
    preconditions.  For ambiguous actions the instance table ranges over those
    same values (``instance_domain="consistent"``), so every state the action
    applies in is covered; ``"refined"`` restricts it to values whose utility
    differs from the effect's, as in the hand-worked truck example.  When the
    table would exceed ``instance_cap`` rows the action is reported as
    uncompiled, or InstanceExplosion is raised if ``defer`` is false.
    """
    if instance_domain not in ("consistent", "refined"):
        raise ValueError(f"unknown instance domain {instance_domain!r}")
    enu = explicit_net_utility(task, action)
    mss = min_split_set(task, action)
    refined = {v: refined_domain(task, action, v) for v in mss}
    consistent = {v: consistent_values(task, action, v) for v in mss}
    eff = action.eff_map
    floor = ceiling = enu
    for v in mss:
        utils = task.variables[v].utilities
        values = [utils[d] for d in consistent[v]]
        floor += utils[eff[v]] - max(values)
        ceiling += utils[eff[v]] - min(values)

    report = SplitReport(
        action=action.name,
        enu=enu,
        mss=mss,
        refined=refined,
        floor=floor,
        ceiling=ceiling,
        verdict=Verdict.AMBIGUOUS,
        expected_instances=prod(len(refined[v]) for v in mss) if mss else 0,
        precondition_count=len(action.pre),
    )
    if floor > 0:
        return replace(report, verdict=Verdict.PURE_POSITIVE)
    if ceiling <= 0:
        return replace(report, verdict=Verdict.NON_POSITIVE)

    domains = consistent if instance_domain == "consistent" else refined
    count = prod(len(domains[v]) for v in mss)
    if count > instance_cap:
        if not defer:
            raise InstanceExplosion(action.name, count, instance_cap)
        return replace(report, uncompiled=True, domains=domains)

    instances = []
    for values in product(*(domains[v] for v in mss)):
        assignment = tuple(zip(mss, values))
        net = enu
        for v, d in assignment:
            utils = task.variables[v].utilities
            net += utils[eff[v]] - utils[d]
        # positive iff the unconstrained part outweighs -ENU; ties are non-positive
        instances.append(Instance(_instance_name(task, action, assignment), assignment, net))
    return replace(report, instances=tuple(instances), domains=domains)


def instance_action(action: Action, instance: Instance) -> Action | None:
    """The concrete action for one row of the instance table.

    Returns None when the instance only rewrites values that already hold.
    """
    pre = action.pre + instance.assignment
    pre_set = set(pre)
    eff = tuple(f for f in action.eff if f not in pre_set)
    if not eff:
        return None
    return Action(instance.name, pre, eff, action.cost)


def selective_split(
    task: OspTask,
    *,
    exclude=frozenset(),
    instance_cap: int = INSTANCE_CAP,
    defer: bool = True,
    instance_domain: str = "consistent",
) -> tuple[OspTask, list[SplitReport]]:
    """Complete preconditions, classify every action and split the ambiguous ones.

    Actions named in ``exclude`` are classified but never split; the unit-effect
    compilation handles them instead.
    """
    task = complete_preconditions(task)
    reports = []
    actions = []
    for action in task.actions:
        report = classify_action(
            task, action, instance_cap=instance_cap, defer=defer, instance_domain=instance_domain
        )
        reports.append(report)
        if report.verdict is not Verdict.AMBIGUOUS or report.uncompiled or action.name in exclude:
            actions.append(action)
            continue
        for inst in report.instances:
            concrete = instance_action(action, inst)
            if concrete is not None:
                actions.append(concrete)
    return replace(task, actions=tuple(actions)), reports


def split_origins(reports) -> dict[str, str]:
    """Map each instance action name to the action it was split from."""
    return {inst.name: r.action for r in reports for inst in r.instances}


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["action", "enu", "floor", "ceiling", "verdict", "instance_count"])
    for r in reports:
        writer.writerow([r.action, r.enu, r.floor, r.ceiling, r.label, len(r.instances)])
    return buf.getvalue()
