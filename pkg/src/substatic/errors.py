"""Exception hierarchy shared across the package."""


class SubstaticError(Exception):
    """Base class for every error raised by this package."""


class ModelError(SubstaticError):
    pass


class NakedSingularity(ModelError):
    """No non-degenerate horizon exists for a spec that requires one."""


class DomainEmpty(ModelError):
    """The squared lapse is negative everywhere."""


class BadProfile(ModelError):
    """A tabulated profile is malformed."""


class OutOfDomain(SubstaticError):
    """A radius lies outside the working domain of a triple."""


class HorizonEvaluation(SubstaticError):
    """The finite-difference oracle was asked to evaluate too close to the horizon."""


class StepUnderflow(SubstaticError):
    pass


class InapplicableEnd(SubstaticError):
    """A check that needs an f-complete end was given something else."""


class HorizonDivergence(SubstaticError):
    """Optical distance to the horizon is infinite."""


class NotMeanConvex(SubstaticError):
    pass


class LeftDomain(SubstaticError):
    """A geodesic reached the boundary of the domain."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NoArrival(SubstaticError):
    pass


class BaseInvalid(SubstaticError):
    pass


class NotUniform(SubstaticError):
    pass


class AvrUncertified(SubstaticError):
    pass


class PrerequisiteFailed(SubstaticError):
    pass


class SurfaceBelowHorizon(SubstaticError):
    pass


class DegenerateTangent(SubstaticError):
    pass


class ConfigError(SubstaticError):
    pass
