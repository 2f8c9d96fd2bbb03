"""Exception hierarchy. Every error carries a short kebab-case tag."""


class SbigaError(Exception):
    """Base class; ``tag`` is a stable machine-readable identifier."""

    tag = "error"

    def __init__(self, message, tag=None):
        if tag is not None:
            self.tag = tag
        super().__init__(f"[{self.tag}] {message}")


class SplineError(SbigaError):
    tag = "spline-error"


class GeometryError(SbigaError):
    tag = "geometry-error"


class CouplingError(SbigaError):
    tag = "coupling-error"


class AssemblyError(SbigaError):
    tag = "assembly-failure"


class SolverError(SbigaError):
    tag = "solver-error"


class ConfigError(SbigaError):
    tag = "config-error"
