"""Exception hierarchy shared by all modules."""


class PolyTunnelError(Exception):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    code = "PolyTunnelError"


class ParameterError(PolyTunnelError, ValueError):
    code = "ParameterError"


class NonPositive(ParameterError):
    code = "NonPositive"


class NotTunneling(ParameterError):
    code = "NotTunneling"


class EnergyCutoffViolation(ParameterError):
    code = "EnergyCutoffViolation"


# name used by the sweep for skipped lattice sizes
CutoffExceeded = EnergyCutoffViolation


class SingularSystem(PolyTunnelError, ArithmeticError):
    code = "SingularSystem"


class FitSingular(PolyTunnelError, ArithmeticError):
    code = "FitSingular"


class DegenerateBarrier(PolyTunnelError, ArithmeticError):
    code = "DegenerateBarrier"


class EmptyBand(PolyTunnelError, LookupError):
    code = "EmptyBand"


class InvariantViolation(PolyTunnelError):
    code = "InvariantViolation"


class ConfigError(PolyTunnelError, ValueError):
    code = "ConfigError"
