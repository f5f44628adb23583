"""Exception hierarchy shared by every module."""


class ZeroFreeError(Exception):
    """Base class for all package errors."""


class ConfigError(ZeroFreeError, ValueError):
    """Malformed graph, decoration, assignment or run configuration."""


class ConflictingAssignment(ConfigError):
    def __init__(self, node, first, second):
        super().__init__(
            f"conflicting assignment: node {node} assigned {first} and {second}"
        )
        self.node = node


class BudgetExceeded(ZeroFreeError):
    """An exhaustive enumeration would exceed the configured budget."""


class GibbsUndefined(ZeroFreeError, ZeroDivisionError):
    """Z(G) = 0, so the Gibbs measure (and its marginals) do not exist."""


class InfeasibleCondition(ZeroFreeError, ZeroDivisionError):
    """The conditioning event has probability zero."""


class VanishingConstantTerm(ZeroFreeError, ZeroDivisionError):
    """Polynomial with c_0 = 0: power sums of inverse roots are undefined."""
