"""Exception hierarchy.

Every error raised by the package derives from :class:`QuditError`, which is a
``ValueError`` so callers that only care about bad input can catch that.
"""


class QuditError(ValueError):
    pass


class InvalidDimension(QuditError):
    pass


class RegisterTooLarge(QuditError):
    pass


class InvalidBasisDigit(QuditError):
    pass


class QuditIndexOutOfRange(QuditError, IndexError):
    pass


class GateShapeMismatch(QuditError):
    pass


class InvalidPermutation(QuditError):
    pass


class SelfControlledGate(QuditError):
    pass


class ShapeMismatch(QuditError):
    pass


class RequiresPowerOfTwo(QuditError):
    pass


class XorRequiresPowerOfTwo(RequiresPowerOfTwo):
    pass


class InvalidBitCount(QuditError):
    pass


class BlockLengthMismatch(QuditError):
    pass


class OverlappingBlocks(QuditError):
    pass


class ConfigError(QuditError):
    pass


class InvalidSecret(QuditError):
    pass


class ShamirRequiresPrime(QuditError):
    pass


class InvalidEvaluationPoints(QuditError):
    pass


class OracleTooLarge(QuditError):
    pass


class CircuitParseError(QuditError):
    pass
