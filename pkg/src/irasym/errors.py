"""Exception types.  All derive from ``ValueError`` so callers can catch broadly."""


class IrasymError(ValueError):
    pass


class InvalidOrderError(IrasymError):
    pass


class InvalidSequenceError(IrasymError):
    pass


class InvalidWidthError(IrasymError):
    pass


class InvalidGridError(IrasymError):
    pass


class DegreeMismatchError(IrasymError):
    pass


class ChargedFieldError(IrasymError):
    """A decomposition that needs charge-free input received l.V != 0."""


class InconsistentEventError(IrasymError):
    pass


class InconsistentInputError(IrasymError):
    pass


class OutOfDomainError(IrasymError):
    pass


class DivergenceError(IrasymError):
    """A limit or integral does not converge; carries the partial report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CannotIntegrateError(IrasymError):
    pass


class InconsistentChargeError(IrasymError):
    pass


class QuantizationError(IrasymError):
    pass


class BasisTooSmallError(IrasymError):
    pass


class InvalidCouplingError(IrasymError):
    pass


class ScenarioError(IrasymError):
    """Scenario file could not be read or validated (CLI exit status 2)."""
