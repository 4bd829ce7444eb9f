"""Exception types. InputError subclasses map to CLI exit code 2."""


class InputError(ValueError):
    """Invalid argument, file, or configuration."""


class SignatureMismatchError(InputError):
    """Operands live in different algebras."""


class NotASpinorError(InputError):
    """Element is not an even unit spinor."""


class IntegrabilityError(InputError):
    """Wavelet parameters fail a decay or regularity guard."""


class DivergentMomentError(InputError):
    """Requested moment integral does not converge absolutely."""


class PoleNodeError(InputError):
    """A grid node hit a non-finite value of the sampled function."""


class ResolutionError(InputError):
    """Grid too coarse for the smallest requested scale."""


class TruncationError(InputError):
    """Coefficient domain leaves too much energy in its outer shells."""


class RegionError(InputError):
    """Malformed region description."""


class CheckFailedError(RuntimeError):
    """A verification ran to completion and failed its tolerance."""
