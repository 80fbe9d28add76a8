"""Exception types shared across the package."""


class ArchFemError(Exception):
    """Base class for all package-specific errors."""


class NoConvergence(ArchFemError):
    """A local or global iterative solve exceeded its iteration budget."""


class SingularConstraint(ArchFemError):
    """The shear-reciprocity constraint matrix is numerically singular."""


class LinearSolveFailure(ArchFemError):
    """The global sparse linear solve failed (singular/ill-posed system)."""


class GeometryError(ArchFemError):
    """A parametric model specification is geometrically inconsistent."""


class MeshMismatch(ArchFemError):
    """Paired interface faces could not be matched between two mesh parts."""


class DegenerateRatio(ArchFemError):
    """A stiffness-ratio conversion produced a non-physical Poisson ratio."""


class NonMonotoneTime(ArchFemError):
    """A ground-motion record has non-increasing time samples."""


class EmptyRecord(ArchFemError):
    """A ground-motion record contains no samples."""


class ConfigError(ArchFemError):
    """A configuration or model file failed to parse/validate.

    Carries the offending file and line number when available.
    """

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line
