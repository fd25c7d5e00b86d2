"""Exceptions shared across the package."""


class CRQError(Exception):
    """Base class for all errors raised by this package."""


class NotInvertible(CRQError):
    pass


class InvalidTwist(CRQError):
    pass


class InvalidForm(CRQError):
    pass


class InvalidParameter(CRQError):
    pass


class SingularPoint(CRQError):
    pass


class NotPolynomialDeg2(CRQError):
    pass


class NeedMoreSamples(CRQError):
    pass


class NotInGLQ(CRQError):
    pass


class InvalidGrading(CRQError):
    pass


class UnsupportedFamily(CRQError):
    pass


class MissingAssignment(CRQError):
    pass


class CertificationError(CRQError):
    """The modular linear-algebra path could not produce a verified exact answer."""


class BadDescriptor(CRQError):
    """A JSON descriptor or configuration could not be interpreted."""
