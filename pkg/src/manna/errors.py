"""Exception types raised by the library."""


class MannaError(Exception):
    """Base class for every error raised by this package."""


class InstanceFormatError(MannaError, ValueError):
    """Input JSON could not be turned into an instance or allocation.

    ``field`` names the offending part of the document.
    """

    def __init__(self, message, field):
        super().__init__(message)
        self.field = field


class MalformedJsonError(InstanceFormatError):
    pass


class RaggedMatrixError(InstanceFormatError):
    pass


class ZeroDenominatorError(InstanceFormatError):
    pass


class DuplicateLabelError(InstanceFormatError):
    pass


class InvalidAllocationError(MannaError, ValueError):
    """Bundles are not a partition of the item set."""


class ZeroTotalError(MannaError, ValueError):
    """An agent's total value is zero, so no normalizing scale exists."""

    def __init__(self, agent):
        super().__init__(f"agent {agent} has total value 0; cannot normalize")
        self.agent = agent


class TauConditionError(MannaError, ValueError):
    def __init__(self, agents, message=None):
        agents = list(agents)
        super().__init__(message or f"tau-condition fails for agents {agents}")
        self.agents = agents


class ParameterError(MannaError, ValueError):
    pass


class BudgetExceededError(MannaError):
    """An enumeration would exceed the configured budget."""

    def __init__(self, required, budget, what="enumeration"):
        super().__init__(
            f"{what} needs {required} enumerations but the budget is {budget}")
        self.required = required
        self.budget = budget


class BagFillPreconditionError(MannaError, ValueError):
    def __init__(self, condition, message):
        super().__init__(f"bag-fill precondition '{condition}' violated: {message}")
        self.condition = condition


class InvariantViolation(MannaError, AssertionError):
    """A structural guarantee of the algorithms did not hold. Always a defect."""
