"""Reading and writing tasks in the line-oriented OSP-SAS v1 format.

Example::

    osp-sas 1
    vars 1
    var v 2
    val a 0
    val b 2
    init v=a
    budget 1
    actions 1
    action o cost 1
    pre 1 v=a
    eff 1 v=b

Tokens are whitespace separated, ``#`` starts a comment, blank lines are
ignored.  Zero or more ``mutex <m> var=val ...`` lines may sit between the
variable blocks and ``init``.  The budget is either absolute or given as
``budget-frac p/q cstar N`` and resolved to ``ceil(p/q * N)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .errors import NotClassical, OspSyntaxError, SemanticError
from .model import Action, OspTask, Variable

HEADER = ("osp-sas", "1")


@dataclass(frozen=True)
class BudgetSpec:
    absolute: int | None = None
    fraction: Fraction | None = None
    cstar: int | None = None

    def __post_init__(self):
        if (self.absolute is None) == (self.fraction is None):
            raise ValueError("give either an absolute budget or a fraction")
        if self.absolute is not None and self.absolute < 0:
            raise ValueError(f"negative budget {self.absolute}")
        if self.fraction is not None:
            if self.fraction < 0:
                raise ValueError(f"negative budget fraction {self.fraction}")
            if self.cstar is None or self.cstar < 0:
                raise ValueError("a fractional budget needs a nonnegative cstar")

    def resolve(self) -> int:
        if self.absolute is not None:
            return self.absolute
        return resolve_fraction(self.fraction, self.cstar)


def resolve_fraction(fraction: Fraction, cstar: int) -> int:
    return math.ceil(Fraction(fraction) * cstar)


def parse_fraction(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not sep:
        den = "1"
    p, q = int(num), int(den)
    if q <= 0 or p < 0:
        raise ValueError(f"invalid fraction {text!r}")
    return Fraction(p, q)


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield lineno, tokens


class _Reader:
    def __init__(self, text: str):
        self._lines = list(_lines(text))
        self._pos = 0

    @property
    def lineno(self) -> int:
        if self._pos < len(self._lines):
            return self._lines[self._pos][0]
        return self._lines[-1][0] + 1 if self._lines else 1

    def peek(self):
        if self._pos < len(self._lines):
            return self._lines[self._pos][1]
        return None

    def next(self, keyword: str, min_args: int = 0):
        tokens = self.peek()
        if tokens is None:
            raise OspSyntaxError(self.lineno, f"unexpected end of input, expected {keyword!r}")
        if tokens[0] != keyword:
            raise OspSyntaxError(self.lineno, f"expected {keyword!r}, found {tokens[0]!r}")
        if len(tokens) - 1 < min_args:
            raise OspSyntaxError(self.lineno, f"{keyword!r} needs {min_args} argument(s)")
        line = self.lineno
        self._pos += 1
        return line, tokens[1:]


def _int(token: str, line: int, what: str, minimum: int | None = 0) -> int:
    try:
        value = int(token)
    except ValueError:
        raise OspSyntaxError(line, f"{what}: expected an integer, found {token!r}") from None
    if minimum is not None and value < minimum:
        raise OspSyntaxError(line, f"{what} must be >= {minimum}, found {value}")
    return value


def parse_task(text: str) -> OspTask:
    r = _Reader(text)
    line, args = r.next("osp-sas", 1)
    if tuple(["osp-sas", *args]) != HEADER:
        raise OspSyntaxError(line, f"unsupported format version {' '.join(args)!r}")

    line, args = r.next("vars", 1)
    nvars = _int(args[0], line, "variable count")
    variables = []
    for _ in range(nvars):
        line, args = r.next("var", 2)
        name, k = args[0], _int(args[1], line, "domain size", 1)
        values, utils = [], []
        for _ in range(k):
            vline, vargs = r.next("val", 2)
            values.append(vargs[0])
            utils.append(_int(vargs[1], vline, "utility", None))
        try:
            variables.append(Variable(name, values, utils))
        except ValueError as exc:
            raise SemanticError(f"line {line}: {exc}") from None

    var_index = {v.name: i for i, v in enumerate(variables)}
    if len(var_index) != len(variables):
        raise SemanticError("duplicate variable names")

    def fact(token: str, line: int):
        name, sep, value = token.partition("=")
        if not sep:
            raise OspSyntaxError(line, f"expected var=val, found {token!r}")
        if name not in var_index:
            raise SemanticError(f"line {line}: unknown variable {name!r}")
        var = variables[var_index[name]]
        if value not in var.values:
            raise SemanticError(f"line {line}: unknown value {value!r} for variable {name!r}")
        return var_index[name], var.index(value)

    def fact_list(keyword: str, min_count: int):
        line, args = r.next(keyword, 1)
        count = _int(args[0], line, f"{keyword} count", min_count)
        if len(args) - 1 != count:
            raise OspSyntaxError(line, f"{keyword} declares {count} entries but lists {len(args) - 1}")
        facts = [fact(tok, line) for tok in args[1:]]
        if len({v for v, _ in facts}) != len(facts):
            raise SemanticError(f"line {line}: {keyword} assigns a variable twice")
        return line, facts

    mutex_groups = []
    while r.peek() and r.peek()[0] == "mutex":
        # unlike pre/eff, a group may hold several facts of one variable
        _, facts = _mutex_line(r, fact)
        mutex_groups.append(facts)

    line, args = r.next("init", 0)
    if len(args) != nvars:
        raise OspSyntaxError(line, f"init lists {len(args)} facts for {nvars} variables")
    initial = []
    for i, tok in enumerate(args):
        v, d = fact(tok, line)
        if v != i:
            raise SemanticError(f"line {line}: init facts must follow variable declaration order")
        initial.append(d)

    tokens = r.peek()
    budget_fraction = cstar = None
    if tokens and tokens[0] == "budget-frac":
        line, args = r.next("budget-frac", 3)
        if len(args) != 3 or args[1] != "cstar":
            raise OspSyntaxError(line, "expected 'budget-frac <p>/<q> cstar <int>'")
        try:
            budget_fraction = parse_fraction(args[0])
        except ValueError as exc:
            raise OspSyntaxError(line, str(exc)) from None
        cstar = _int(args[2], line, "cstar")
        budget = resolve_fraction(budget_fraction, cstar)
    else:
        line, args = r.next("budget", 1)
        if len(args) != 1:
            raise OspSyntaxError(line, "expected 'budget <int>'")
        budget = _int(args[0], line, "budget")

    line, args = r.next("actions", 1)
    nactions = _int(args[0], line, "action count")
    actions = []
    for _ in range(nactions):
        aline, args = r.next("action", 3)
        if len(args) != 3 or args[1] != "cost":
            raise OspSyntaxError(aline, "expected 'action <name> cost <int>'")
        name, cost = args[0], _int(args[2], aline, "cost")
        _, pre = fact_list("pre", 0)
        _, eff = fact_list("eff", 1)
        try:
            action = Action.make(name, pre, eff, cost)
        except ValueError as exc:
            raise SemanticError(f"line {aline}: {exc}") from None
        actions.append(action)

    if r.peek() is not None:
        raise OspSyntaxError(r.lineno, f"unexpected trailing content {r.peek()[0]!r}")

    try:
        return OspTask(variables, tuple(initial), actions, mutex_groups, budget, budget_fraction, cstar)
    except ValueError as exc:
        raise SemanticError(str(exc)) from None


def _mutex_line(r: _Reader, fact):
    line, args = r.next("mutex", 1)
    count = _int(args[0], line, "mutex count")
    if len(args) - 1 != count:
        raise OspSyntaxError(line, f"mutex declares {count} facts but lists {len(args) - 1}")
    return line, [fact(tok, line) for tok in args[1:]]


def _fmt_facts(task: OspTask, facts) -> str:
    return " ".join([str(len(facts)), *(task.fact_name(f) for f in facts)])


def serialize_task(task: OspTask) -> str:
    out = ["osp-sas 1", f"vars {len(task.variables)}"]
    for var in task.variables:
        out.append(f"var {var.name} {len(var)}")
        out.extend(f"val {value} {u}" for value, u in zip(var.values, var.utilities))
    for group in task.mutex_groups:
        out.append(f"mutex {_fmt_facts(task, group)}")
    out.append(" ".join(["init", *task.state_names(task.initial)]))
    if task.budget_fraction is not None:
        f = task.budget_fraction
        out.append(f"budget-frac {f.numerator}/{f.denominator} cstar {task.cstar}")
    else:
        out.append(f"budget {task.budget}")
    out.append(f"actions {len(task.actions)}")
    for a in task.actions:
        out.append(f"action {a.name} cost {a.cost}")
        out.append(f"pre {_fmt_facts(task, a.pre)}")
        out.append(f"eff {_fmt_facts(task, a.eff)}")
    return "\n".join(out) + "\n"


def read_task(path) -> OspTask:
    return parse_task(Path(path).read_text(encoding="utf-8"))


def write_task(path, task: OspTask) -> None:
    Path(path).write_text(serialize_task(task), encoding="utf-8", newline="\n")


def assign_ipc_values(task: OspTask, seed: int) -> OspTask:
    """Give every fact a utility in {0, 1, 2}, cycling over facts in declaration order.

    The cycle starts at ``seed mod 3``; the task must carry no utilities yet.
    """
    if any(u for var in task.variables for u in var.utilities):
        raise NotClassical("task already has nonzero utilities")
    variables = []
    i = seed % 3
    for var in task.variables:
        utils = []
        for _ in var.values:
            utils.append(i % 3)
            i += 1
        variables.append(replace(var, utilities=tuple(utils)))
    return replace(task, variables=tuple(variables))
