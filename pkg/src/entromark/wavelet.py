"""Multi-level orthogonal wavelet transform with periodic boundary handling.

The analysis step correlates the signal with the lowpass/highpass pair at
even shifts, indices taken modulo the block length, so each level is an
orthogonal map and coefficient energy equals signal energy at every depth.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import BadLengthError, ShapeMismatchError, UnknownFilterError

# Daubechies length-16 orthonormal lowpass, frozen at 17 significant digits.
# sum = sqrt(2), unit norm, all even-shift autocorrelations vanish.
_DB8_LOWPASS = (
    0.054415842243104010,
    0.31287159091429997,
    0.67563073629728981,
    0.58535468365420671,
    -0.015829105256349306,
    -0.28401554296154693,
    0.00047248457391328277,
    0.12874742662047846,
    -0.017369301001807546,
    -0.044088253930794752,
    0.013981027917398282,
    0.0087460940474057767,
    -0.0048703529934515743,
    -0.00039174037337694705,
    0.00067544940645056937,
    -0.00011747678412476953,
)

_SQRT_HALF = 0.70710678118654752
_HAAR_LOWPASS = (_SQRT_HALF, _SQRT_HALF)


@dataclass(frozen=True)
class WaveletFilter:
    name: str
    lowpass: np.ndarray
    highpass: np.ndarray

    @property
    def length(self) -> int:
        return self.lowpass.size


def quadrature_mirror(lowpass: np.ndarray) -> np.ndarray:
    """g[m] = (-1)^m h[K-1-m]; turns an orthonormal lowpass into its highpass mate."""
    k = lowpass.size
    signs = (-1.0) ** np.arange(k)
    return signs * lowpass[::-1]


def get_filter(name: str) -> WaveletFilter:
    try:
        taps = {"haar": _HAAR_LOWPASS, "db8": _DB8_LOWPASS}[name]
    except KeyError:
        raise UnknownFilterError(f"unknown wavelet filter {name!r}, expected 'haar' or 'db8'")
    h = np.array(taps, dtype=np.float64)
    h.flags.writeable = False
    g = quadrature_mirror(h)
    g.flags.writeable = False
    return WaveletFilter(name, h, g)


@dataclass
class WaveletDecomposition:
    level: int
    approximation: np.ndarray
    details: list  # details[0] is the finest band (level 1)

    @property
    def signal_length(self) -> int:
        return 2 * self.details[0].size if self.details else self.approximation.size


def _analysis_windows(x: np.ndarray, taps: int) -> np.ndarray:
    n = x.size
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n
    return x[idx]


def dwt_level(x: np.ndarray, filt: WaveletFilter):
    """One analysis step: returns (approximation, detail), each half length."""
    if x.size % 2 or x.size == 0:
        raise BadLengthError(f"block length {x.size} is not even")
    win = _analysis_windows(x, filt.length)
    return win @ filt.lowpass, win @ filt.highpass


def idwt_level(approx: np.ndarray, detail: np.ndarray, filt: WaveletFilter) -> np.ndarray:
    """Inverse of dwt_level; transpose of the analysis map, so exact for orthonormal filters."""
    if approx.size != detail.size:
        raise ShapeMismatchError(
            f"approximation length {approx.size} != detail length {detail.size}")
    n = 2 * approx.size
    out = np.zeros(n)
    base = 2 * np.arange(approx.size)
    for m in range(filt.length):
        # indices (2l + m) mod n are distinct for fixed m, so += has no collisions
        out[(base + m) % n] += approx * filt.lowpass[m] + detail * filt.highpass[m]
    return out


def check_transform_length(n: int, level: int) -> None:
    if level < 1:
        raise BadLengthError(f"level must be >= 1, got {level}")
    block = 1 << level
    if n == 0 or n % block:
        raise BadLengthError(f"length {n} is not a positive multiple of 2^{level}")


def dwt(x: np.ndarray, filt: WaveletFilter, level: int) -> WaveletDecomposition:
    x = np.asarray(x, dtype=np.float64)
    check_transform_length(x.size, level)
    details = []
    approx = x
    for _ in range(level):
        approx, detail = dwt_level(approx, filt)
        details.append(detail)
    return WaveletDecomposition(level, approx, details)


def idwt(dec: WaveletDecomposition, filt: WaveletFilter) -> np.ndarray:
    expect = dec.approximation.size
    for depth, detail in enumerate(reversed(dec.details), start=1):
        if detail.size != expect:
            raise ShapeMismatchError(
                f"detail band {dec.level - depth + 1} has length {detail.size}, expected {expect}")
        expect *= 2
    x = dec.approximation
    for detail in reversed(dec.details):
        x = idwt_level(x, detail, filt)
    return x


def approximation_band(x: np.ndarray, filt: WaveletFilter, level: int) -> np.ndarray:
    """Lowpass chain only; cheaper than dwt when the detail bands are not needed."""
    x = np.asarray(x, dtype=np.float64)
    check_transform_length(x.size, level)
    for _ in range(level):
        win = _analysis_windows(x, filt.length)
        x = win @ filt.lowpass
    return x
