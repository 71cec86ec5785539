"""Named error types shared by every module.

Each error class carries its own name as the machine-readable code so the
CLI can report ``{"error": "<Name>", "message": ...}`` without a lookup table.
"""

from __future__ import annotations


class LeonardError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class InvalidInput(LeonardError):
    pass


class DivisionByZero(LeonardError, ZeroDivisionError):
    pass


class FieldMismatch(LeonardError):
    pass


class MissingRoot(LeonardError):
    pass


class NotIrreducibleTridiagonal(LeonardError):
    pass


class LengthMismatch(LeonardError):
    pass


class DegreeTooSmall(LeonardError):
    pass


class InternalInconsistency(LeonardError):
    """A cross-check between two independent computations failed."""


class ZeroScale(LeonardError):
    pass


class ZeroCoordinate(LeonardError):
    pass


class TypeMismatch(LeonardError):
    pass


class InvalidBasicSequence(LeonardError):
    pass


class TypeO(LeonardError):
    pass


class MissingQ(LeonardError):
    pass


class ThetaStarMismatch(LeonardError):
    pass


class NotCompatible(LeonardError):
    pass


class WrongDegree(LeonardError):
    pass


class ConstraintViolated(LeonardError):
    pass


class NotDiagonal(LeonardError):
    pass


class EigenvalueNotInField(LeonardError):
    pass


class FieldTooLarge(LeonardError):
    pass


class NotInOmega(LeonardError):
    pass
