"""Exception hierarchy.

``InputError`` subclasses describe bad user input (CLI exit code 1).
``InternalError`` subclasses mean an invariant the library itself should
guarantee was broken (CLI exit code 2).
"""

from __future__ import annotations


class QMTError(Exception):
    """Base class; ``payload`` is a JSON-friendly description of the failure."""

    def __init__(self, message: str, **payload):
        super().__init__(message)
        self.payload = payload

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), **self.payload}


class InputError(QMTError):
    pass


class InternalError(QMTError):
    pass


# measure-core
class DimensionMismatch(InputError):
    pass


class NonHermitian(InputError):
    pass


class NotUnitTotal(InputError):
    pass


class NegativeMeasure(InputError):
    pass


class NotNormalized(InputError):
    pass


class RepresentationError(InputError):
    pass


class ForeignEvent(InputError):
    pass


class CapExceeded(InputError):
    pass


class NotASublattice(InputError):
    pass


# grainings
class SpaceMismatch(InputError):
    pass


class InvalidPartition(InputError):
    pass


class NotAnUpperSet(InputError):
    pass


class InternalUpperSetViolation(InternalError):
    pass


# coevents
class NotMultiplicative(InputError):
    pass


class EmptyDual(InputError):
    pass


# valuations
class OutsideDomain(InputError):
    pass


class NotComparable(InputError):
    pass


class NotABlock(InputError):
    pass


# topos
class NotASubobject(InputError):
    pass


class ForeignElement(InputError):
    pass


class NotAccessibleAnywhere(InputError):
    pass


class HomeNotInPoset(InputError):
    pass


class NotAPartialOrder(InputError):
    pass


# io / cli
class ParseError(InputError):
    """Syntax or schema problem in a theory file."""


class AxiomError(InputError):
    """A theory file parsed but violates a measure axiom."""


class UnknownExample(InputError):
    pass


class OracleMismatch(InternalError):
    pass
