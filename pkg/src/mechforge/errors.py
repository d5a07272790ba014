"""Exception hierarchy shared by every mechforge module."""


class MechforgeError(Exception):
    """Base class for all errors raised by mechforge."""


# -- configuration -----------------------------------------------------------

class ConfigError(MechforgeError):
    """Problem definition could not be turned into a valid ProblemConfig."""


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class InvalidValue(ConfigError):
    pass


class InvalidCombination(ConfigError):
    pass


class UnknownRegion(ConfigError):
    def __init__(self, region, available):
        self.region = region
        self.available = sorted(available)
        super().__init__(
            f"boundary region {region} not present in mesh "
            f"(available: {self.available})")


class ExprSyntaxError(ConfigError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifier(ConfigError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class EvalError(MechforgeError):
    """Runtime failure while evaluating a scalar expression."""


# -- mesh ----------------------------------------------------------------------

class MeshError(MechforgeError):
    pass


class FormatError(MeshError):
    pass


class GeometryError(MeshError):
    pass


class CountMismatch(MeshError):
    pass


class ZeroVector(MeshError):
    pass


# -- input / output -------------------------------------------------------------

class IoError(MechforgeError, OSError):
    """A file could not be read or written."""


# -- finite elements -----------------------------------------------------------

class UnsupportedDegree(MechforgeError):
    pass


class PatternMiss(MechforgeError):
    pass


# -- materials / assembly ------------------------------------------------------

class MaterialError(MechforgeError):
    pass


class NonPositiveJacobian(MaterialError):
    """J <= 0 somewhere; the offending cell (when known) is attached."""

    def __init__(self, message, cell=None, point=None):
        self.cell = cell
        self.point = point
        super().__init__(message)


class ExponentOverflow(MaterialError):
    def __init__(self, message, cell=None, point=None):
        self.cell = cell
        self.point = point
        super().__init__(message)


# -- solvers -------------------------------------------------------------------

class SolverError(MechforgeError):
    pass


class NonConvergence(SolverError):
    def __init__(self, message, iterations=None, residual=None, report=None):
        self.iterations = iterations
        self.residual = residual
        self.report = report
        super().__init__(message)


class SingularMatrix(SolverError):
    def __init__(self, message, dof=None):
        self.dof = dof
        super().__init__(message)
