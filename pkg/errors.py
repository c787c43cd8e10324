"""Exception hierarchy shared by the solver modules.

Configuration problems map to exit code 1, numerical failures to exit
code 2 and failed verification checks to exit code 3.
"""


class SteklovError(Exception):
    """Base class for every error raised by this package"""

    exit_code = 2


# Configuration -------------------------------------------------------------

class ConfigError(SteklovError, ValueError):
    exit_code = 1


class ConfigParseError(ConfigError):
    """Malformed run file line"""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigValidationError(ConfigError):
    """A field of the run configuration holds an invalid value"""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


# Numerics ------------------------------------------------------------------

class NumericalError(SteklovError):
    exit_code = 2


class SizeError(NumericalError, ValueError):
    """Array length does not match the boundary grid"""


class DomainError(NumericalError, ValueError):
    """Argument outside the admissible range (e.g. radius r >= 1)"""


class QuadratureError(NumericalError, ArithmeticError):
    """Non-finite value encountered while integrating"""


class InvalidGeneratorError(NumericalError, ValueError):
    """Berkson-Porta data violates Re F >= 0 or |b| <= 1"""


class ProbeError(NumericalError, ArithmeticError):
    """Evaluation failed at near-boundary probe points"""


class IntegrationError(NumericalError, RuntimeError):
    """Adaptive step size underflow or step budget exhausted"""

    def __init__(self, message, partial=None, node=None):
        self.detail = message
        if node is not None:
            message = f"node {node}: {message}"
        super().__init__(message)
        self.partial = partial
        self.node = node


class InvarianceViolationError(NumericalError, RuntimeError):
    """A flow state left the closed domain"""

    def __init__(self, message, node=None):
        self.detail = message
        if node is not None:
            message = f"node {node}: {message}"
        super().__init__(message)
        self.node = node


class DegenerateMapError(NumericalError, ArithmeticError):
    """Conformal map derivative too small to divide by"""


class DegenerateWeightError(NumericalError, ArithmeticError):
    """Coboundary weight vanishes at an evaluation point"""


class InvalidMapError(NumericalError, ValueError):
    """Polynomial map fails the univalence criterion"""


class InversionError(NumericalError, RuntimeError):
    """Newton inversion of a conformal map did not converge"""


class MappingError(NumericalError, RuntimeError):
    """Boundary correspondence iteration did not converge"""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnsupportedDataError(NumericalError, ValueError):
    """Initial data has no holomorphic extension (negative modes present)"""


# Verification --------------------------------------------------------------

class InvariantFailure(SteklovError):
    exit_code = 3

    def __init__(self, failures):
        names = ', '.join(failures)
        super().__init__(f"failed checks: {names}")
        self.failures = list(failures)
