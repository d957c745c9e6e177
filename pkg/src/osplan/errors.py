"""Exception types shared across the package."""


class OspError(Exception):
    """Base class for all errors raised by osplan."""


class NotApplicable(OspError):
    def __init__(self, action_name, state=None):
        self.action_name = action_name
        self.state = state
        super().__init__(f"action {action_name!r} is not applicable in state {state}")


class NotApplicableAtStep(NotApplicable):
    def __init__(self, step, action_name, state=None):
        self.step = step
        super().__init__(action_name, state)
        self.args = (f"plan step {step}: action {action_name!r} is not applicable in state {state}",)


class BudgetExceeded(OspError):
    def __init__(self, cost, budget):
        self.cost = cost
        self.budget = budget
        super().__init__(f"plan cost {cost} exceeds budget {budget}")


class IncompletePrecondition(OspError):
    """Net utility of an action is undefined without a precondition on some effect variable."""

    def __init__(self, action_name, variables):
        self.action_name = action_name
        self.variables = tuple(variables)
        super().__init__(
            f"action {action_name!r} has no precondition on effect variable(s) {list(self.variables)}"
        )


class OspSyntaxError(OspError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class SemanticError(OspError, ValueError):
    pass


class NotClassical(OspError, ValueError):
    pass


class InstanceExplosion(OspError):
    def __init__(self, action_name, count, cap):
        self.action_name = action_name
        self.count = count
        self.cap = cap
        super().__init__(f"action {action_name!r} expands to {count} instances (cap {cap})")


class MalformedPlan(OspError, ValueError):
    pass


class CapExceeded(OspError):
    def __init__(self, states_visited, reason="state cap"):
        self.states_visited = states_visited
        super().__init__(f"{reason} exceeded after {states_visited} states")
