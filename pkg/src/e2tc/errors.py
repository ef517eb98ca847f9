"""Exception types raised by the library."""


class ContractViolation(ValueError):
    """An argument broke an operation's precondition (shape, range, sign)."""


class NotPositiveDefinite(ContractViolation):
    pass


class ZeroParameter(ContractViolation):
    """The oracle action is undefined for a zero parameter vector."""


class IncompleteDesign(ContractViolation):
    """Least squares requested on a partial round-robin block."""


class SingularDesign(ContractViolation):
    pass


class UnsupportedActionSet(ContractViolation):
    pass


class PolicyViolation(RuntimeError):
    """A policy emitted an action outside the action set."""


class ConfigError(ValueError):
    pass
