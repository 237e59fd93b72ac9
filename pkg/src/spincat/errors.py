"""Exception types shared across the package."""


class SpinCatError(Exception):
    """Base class for all spincat errors."""


class DomainError(SpinCatError, ValueError):
    """A parameter lies outside the domain an operation is defined on."""


class ResolutionError(SpinCatError):
    """A quadrature grid is too coarse (or too narrow) for the requested state."""


class CapacityError(SpinCatError):
    """The required basis truncation exceeds the configured cap."""

    def __init__(self, message, required_n_max=None):
        super().__init__(message)
        self.required_n_max = required_n_max


class DegenerateStateError(SpinCatError):
    """A state with zero norm (or no detectable structure) was encountered."""


class ImprobableOutcomeError(SpinCatError):
    """The conditional state weight underflowed: the outcome is essentially
    impossible for the given state, as opposed to a mere numerical accident."""

    def __init__(self, message, log_norm=None):
        super().__init__(message)
        self.log_norm = log_norm


class NoCatError(DomainError):
    """Cat-state analysis requested for a non-positive mean flip number."""


class NoFringeError(SpinCatError):
    """Too few zero crossings inside the envelope to estimate a fringe period."""
