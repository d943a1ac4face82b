"""Exception hierarchy.

Invalid inputs derive from :class:`InvalidInputError` (CLI exit code 2);
numerical failures derive from :class:`ComputationError` (exit code 1).
"""


class AutocalError(Exception):
    exit_code = 1


class InvalidInputError(AutocalError, ValueError):
    exit_code = 2


class ComputationError(AutocalError, RuntimeError):
    exit_code = 1


class ConfigError(InvalidInputError):
    pass


# camera
class ZeroFocal(InvalidInputError):
    pass


class ZeroFocalSquare(InvalidInputError):
    pass


class NegativeSquare(InvalidInputError):
    pass


class ShearWithoutV(InvalidInputError):
    pass


# scene
class BehindCamera(InvalidInputError):
    pass


class ExhaustedRetries(ComputationError):
    pass


# taxonomy
class TooLarge(InvalidInputError):
    pass


class Infeasible(InvalidInputError):
    pass


# polysys
class SizeMismatch(InvalidInputError):
    pass


class DimensionMismatch(InvalidInputError):
    pass


class NotOnVariety(InvalidInputError):
    pass


# tracker / monodromy
class SingularJacobian(ComputationError):
    pass


class NoConvergence(ComputationError):
    pass


class NoProgress(ComputationError):
    pass


# recovery / metrics / robust
class DegeneratePoints(ComputationError):
    pass


class NoPhysicalSolution(ComputationError):
    pass


class NoHypothesis(ComputationError):
    pass


class ZeroGroundTruth(InvalidInputError):
    pass


class ZeroCenter(InvalidInputError):
    pass
