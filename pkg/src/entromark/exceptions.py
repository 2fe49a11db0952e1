"""Error types shared across the toolkit."""


class WatermarkError(Exception):
    """Base class for every error this package raises on purpose."""


class UnsupportedFormatError(WatermarkError):
    """Audio file is not 16-bit mono PCM."""


class BadLengthError(WatermarkError):
    """Signal length incompatible with the requested transform depth."""


class ShapeMismatchError(WatermarkError):
    """Coefficient bands do not fit together."""


class UnknownFilterError(WatermarkError):
    """Requested wavelet filter is not in the registry."""


class NoRootError(WatermarkError):
    """Entropy target cannot be bracketed on the curve."""


class CapacityExceededError(WatermarkError):
    """Payload does not fit the available coefficient pairs."""


class KeyInvariantError(WatermarkError):
    """Embedding band does not fit between the entropy bounds."""


class KeyMismatchError(WatermarkError):
    """Key file is malformed, incomplete, or of an unknown version."""


class BadRateError(WatermarkError):
    """Resampling rate outside the accepted range."""


class BadCutoffError(WatermarkError):
    """Low-pass cutoff outside (0, Nyquist)."""


class EncoderUnavailableError(WatermarkError):
    """No external MP3 encoder is configured or present."""


class EncoderFailedError(WatermarkError):
    """External encoder ran but did not produce usable audio."""


class LengthMismatchError(WatermarkError):
    """Two sequences that must align have different lengths."""


class ZeroSignalError(WatermarkError):
    """Reference signal has no energy, ratio undefined."""
