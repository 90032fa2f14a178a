class JuntaLabError(Exception):
    """Base class for library errors."""


class CapacityError(JuntaLabError, ValueError):
    """An exact computation would exceed the desk-scale limits."""


class ArityMismatchError(JuntaLabError, ValueError):
    pass


class ZeroProbabilityError(JuntaLabError, ValueError):
    """Conditioning on an event of probability zero."""


class ParsevalError(JuntaLabError, ValueError):
    """Squared coefficients do not sum to one, so the source was not Boolean."""


class NotSymmetricError(JuntaLabError, ValueError):
    pass


class DegenerateStabilityError(JuntaLabError, ValueError):
    """Univariate stability is constant in rho, so no unique root exists."""


class BoundViolation(JuntaLabError, AssertionError):
    """A proven inequality failed numerically. Signals a bug, not bad input."""


class ProtocolViolation(JuntaLabError, RuntimeError):
    """A tester broke the oracle exchange protocol."""
