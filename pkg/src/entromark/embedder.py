"""Embedding: plan an entropy target per bit, rescale coefficient pairs to hit it.

Each audio segment is transformed once, the mean pair entropy of its
approximation band is recorded, and every framed bit steers one coefficient
pair into a band above (bit 1) or below (bit 0) that mean. The pair is moved
by scaling its two magnitudes with the factor pair that minimizes relative
squared distortion subject to the required magnitude ratio.
"""

from dataclasses import dataclass, field, replace
import json

import numpy as np

from .audio_io import AudioSignal
from .entropy import LN2, MAGNITUDE_FLOOR, gamma_from_x, solve_f_inverse, wbe_pair
from .exceptions import (BadLengthError, CapacityExceededError, KeyInvariantError,
                         KeyMismatchError)
from .wavelet import dwt, get_filter, idwt

KEY_VERSION = 1

# half-width offset into each target band: bit 1 aims at f_mean + 1.5 eps,
# the center of [f_mean + eps, f_mean + 2 eps]
_BAND_CENTER = 1.5


@dataclass(frozen=True)
class EmbedConfig:
    epsilon: float = 0.03
    level: int = 8
    filter_name: str = "db8"
    segments: int = 4
    pn_seed: int = 1
    sync_length: int = 63
    delta: float = 1e-3


@dataclass(frozen=True)
class KeySegment:
    start: int
    length: int
    f_mean: float


@dataclass
class WatermarkKey:
    epsilon: float
    level: int
    filter_name: str
    pn_seed: int
    sync_length: int
    payload_length: int
    segments: list
    version: int = KEY_VERSION


def pn_sequence(length: int, seed: int) -> np.ndarray:
    """Maximal-length sequence from the 6-stage LFSR x^6 + x^5 + 1, period 63.

    Any seed selects a phase of the same sequence; the register is never
    all-zero. Returns uint8 bits.
    """
    if length < 0:
        raise ValueError(f"length {length} must be >= 0")
    state = (int(seed) % 63) + 1
    out = np.empty(length, dtype=np.uint8)
    for i in range(length):
        out[i] = state & 1
        feedback = ((state >> 5) ^ (state >> 4)) & 1
        state = ((state << 1) | feedback) & 0x3F
    return out


def segment_layout(n_samples: int, segments: int, level: int):
    """Consecutive equal segments, each trimmed to a multiple of 2^level.

    The leftover tail carries no watermark and is passed through untouched.
    """
    if segments < 1:
        raise ValueError(f"segments {segments} must be >= 1")
    usable = ((n_samples // segments) >> level) << level
    if usable == 0:
        raise BadLengthError(
            f"{n_samples} samples cannot hold {segments} segments at level {level}")
    return [(i * usable, usable) for i in range(segments)]


def payload_slices(pair_counts, sync_length: int, payload_length: int):
    """Split a payload across segments in order; returns (lo, hi) per segment."""
    slices = []
    cursor = 0
    for pairs in pair_counts:
        room = pairs - sync_length
        if room < 0:
            raise CapacityExceededError(
                f"segment holds {pairs} pairs, sync alone needs {sync_length}")
        take = min(room, payload_length - cursor)
        slices.append((cursor, cursor + take))
        cursor += take
    if cursor < payload_length:
        raise CapacityExceededError(
            f"payload of {payload_length} bits exceeds capacity {cursor}")
    return slices


def compute_f_mean(approximation: np.ndarray) -> float:
    """Mean pair entropy over consecutive non-overlapping pairs of a band."""
    pairs = approximation.size // 2
    if pairs == 0:
        raise ValueError("band too short to form a pair")
    c0 = approximation[0:2 * pairs:2]
    c1 = approximation[1:2 * pairs:2]
    return float(np.mean(wbe_pair(c0, c1)))


def validate_band(f_mean: float, epsilon: float) -> None:
    """Both target bands must fit strictly inside (0, ln 2)."""
    if epsilon <= 0.0:
        raise KeyInvariantError(f"epsilon {epsilon} must be positive")
    margin = min(LN2 - f_mean, f_mean)
    if not 2.0 * epsilon < margin:
        raise KeyInvariantError(
            f"2*epsilon = {2 * epsilon:.6g} does not fit inside the entropy "
            f"margin {margin:.6g} around mean {f_mean:.6g}")


def plan_bit(bit: int, f_mean: float, epsilon: float, delta: float = 1e-3) -> float:
    """Left-branch magnitude share whose pair entropy is the band center for `bit`."""
    validate_band(f_mean, epsilon)
    sign = 1.0 if bit else -1.0
    target = f_mean + sign * _BAND_CENTER * epsilon
    return solve_f_inverse(target, delta)


def optimal_alphas(c0, c1, gamma):
    """Scaling pair (a0, a1) with a0 = gamma * a1 minimizing relative pair distortion.

    Closed form of the constrained least-squares problem; broadcasts over arrays.
    """
    e0 = np.square(np.asarray(c0, dtype=np.float64))
    e1 = np.square(np.asarray(c1, dtype=np.float64))
    g = np.asarray(gamma, dtype=np.float64)
    if np.any(g <= 0.0):
        raise ValueError("gamma must be positive")
    a1 = (g * e0 + e1) / (g * g * e0 + e1)
    a0 = g * a1
    if np.ndim(a0) == 0:
        return float(a0), float(a1)
    return a0, a1


def pair_distortion(c0, c1, a0, a1):
    """Squared coefficient change relative to pair energy; broadcasts."""
    e0 = np.square(np.asarray(c0, dtype=np.float64))
    e1 = np.square(np.asarray(c1, dtype=np.float64))
    out = (np.square(a0 - 1.0) * e0 + np.square(a1 - 1.0) * e1) / (e0 + e1)
    return float(out) if np.ndim(out) == 0 else out


def _scale_to_share(c0, c1, x_left):
    """Rescale signed pairs so the first magnitude share hits x_left or its mirror.

    Both candidate shares produce the same pair entropy; the branch with the
    smaller relative distortion wins, ties going to the left branch.
    """
    sign0 = np.where(np.asarray(c0) < 0.0, -1.0, 1.0)
    sign1 = np.where(np.asarray(c1) < 0.0, -1.0, 1.0)
    m0 = np.maximum(np.abs(c0), MAGNITUDE_FLOOR)
    m1 = np.maximum(np.abs(c1), MAGNITUDE_FLOOR)
    mu = m1 / m0

    best = None
    for x in (x_left, 1.0 - x_left):
        gamma = mu * x / (1.0 - x)
        a0, a1 = optimal_alphas(m0, m1, gamma)
        dist = pair_distortion(m0, m1, a0, a1)
        cand = (a0, a1, dist)
        if best is None:
            best = cand
        else:
            keep_new = cand[2] < best[2]
            best = tuple(np.where(keep_new, n, o) for n, o in zip(cand, best))
    a0, a1, _ = best
    return sign0 * a0 * m0, sign1 * a1 * m1


def embed_bit(c0: float, c1: float, bit: int, f_mean: float, epsilon: float,
              delta: float = 1e-3):
    """Move one coefficient pair into the entropy band for `bit`. Signs survive."""
    x_left = plan_bit(bit, f_mean, epsilon, delta)
    out0, out1 = _scale_to_share(np.float64(c0), np.float64(c1), np.float64(x_left))
    return float(out0), float(out1)


def embed(audio: AudioSignal, payload_bits, config: EmbedConfig = EmbedConfig()):
    """Watermark an audio signal; returns (watermarked signal, key).

    Per segment: transform, record the approximation band's mean pair entropy,
    write the sync prefix followed by this segment's payload slice into
    consecutive pairs from the start of the band, inverse transform.
    """
    payload = np.asarray(payload_bits, dtype=np.uint8)
    if payload.ndim != 1 or (payload.size and payload.max() > 1):
        raise ValueError("payload must be a flat vector of 0/1 bits")

    filt = get_filter(config.filter_name)
    layout = segment_layout(len(audio), config.segments, config.level)
    pair_counts = [(length >> config.level) // 2 for _, length in layout]
    slices = payload_slices(pair_counts, config.sync_length, payload.size)
    sync_bits = pn_sequence(config.sync_length, config.pn_seed)

    out = audio.samples.copy()
    key_segments = []
    for (start, length), (lo, hi) in zip(layout, slices):
        dec = dwt(audio.samples[start:start + length], filt, config.level)
        band = dec.approximation
        f_mean = compute_f_mean(band)
        validate_band(f_mean, config.epsilon)

        bits = np.concatenate([sync_bits, payload[lo:hi]])
        if bits.size:
            x_one = plan_bit(1, f_mean, config.epsilon, config.delta)
            x_zero = plan_bit(0, f_mean, config.epsilon, config.delta)
            x_left = np.where(bits.astype(bool), x_one, x_zero)
            idx = 2 * np.arange(bits.size)
            band[idx], band[idx + 1] = _scale_to_share(band[idx], band[idx + 1], x_left)
        out[start:start + length] = idwt(dec, filt)
        key_segments.append(KeySegment(start, length, f_mean))

    key = WatermarkKey(config.epsilon, config.level, config.filter_name,
                       config.pn_seed, config.sync_length, payload.size, key_segments)
    return AudioSignal(out, audio.sample_rate, audio.bit_depth), key


# --------- key file serialization ---------

def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_key(path, key: WatermarkKey) -> None:
    """Plain UTF-8 JSON; floats carry 17 significant digits and round-trip exactly."""
    seg_lines = ",\n".join(
        f'    {{"start": {s.start}, "length": {s.length}, "f_mean": {_fmt(s.f_mean)}}}'
        for s in key.segments)
    text = (
        "{\n"
        f'  "version": {key.version},\n'
        f'  "epsilon": {_fmt(key.epsilon)},\n'
        f'  "level": {key.level},\n'
        f'  "filter": "{key.filter_name}",\n'
        f'  "pn_seed": {key.pn_seed},\n'
        f'  "sync_length": {key.sync_length},\n'
        f'  "payload_length": {key.payload_length},\n'
        '  "segments": [\n' + seg_lines + "\n  ]\n"
        "}\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


_KEY_FIELDS = {"version", "epsilon", "level", "filter", "pn_seed",
               "sync_length", "payload_length", "segments"}
_SEGMENT_FIELDS = {"start", "length", "f_mean"}


def read_key(path) -> WatermarkKey:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise KeyMismatchError(f"{path}: not valid key JSON ({exc})") from exc
    if not isinstance(raw, dict) or set(raw) != _KEY_FIELDS:
        raise KeyMismatchError(f"{path}: key fields {sorted(raw)} != {sorted(_KEY_FIELDS)}")
    if raw["version"] != KEY_VERSION:
        raise KeyMismatchError(f"{path}: key version {raw['version']}, expected {KEY_VERSION}")
    segments = []
    for rec in raw["segments"]:
        if not isinstance(rec, dict) or set(rec) != _SEGMENT_FIELDS:
            raise KeyMismatchError(f"{path}: malformed segment record {rec!r}")
        segments.append(KeySegment(int(rec["start"]), int(rec["length"]),
                                   float(rec["f_mean"])))
    try:
        return WatermarkKey(float(raw["epsilon"]), int(raw["level"]),
                            str(raw["filter"]), int(raw["pn_seed"]),
                            int(raw["sync_length"]), int(raw["payload_length"]),
                            segments)
    except (TypeError, ValueError) as exc:
        raise KeyMismatchError(f"{path}: bad field value ({exc})") from exc


# --------- payload text helpers ---------

def bits_from_hex(text: str) -> np.ndarray:
    """Hex string to uint8 bit vector, most significant bit of each digit first."""
    text = text.strip().lower().removeprefix("0x")
    if not text:
        return np.zeros(0, dtype=np.uint8)
    try:
        digits = [int(ch, 16) for ch in text]
    except ValueError:
        raise ValueError(f"not a hex payload: {text!r}")
    bits = np.zeros(4 * len(digits), dtype=np.uint8)
    for i, d in enumerate(digits):
        for b in range(4):
            bits[4 * i + b] = (d >> (3 - b)) & 1
    return bits


def hex_from_bits(bits) -> str:
    """Inverse of bits_from_hex; pads the tail with zero bits to a whole digit."""
    bits = np.asarray(bits, dtype=np.uint8)
    padded = np.concatenate([bits, np.zeros((-bits.size) % 4, dtype=np.uint8)])
    out = []
    for i in range(0, padded.size, 4):
        d = (padded[i] << 3) | (padded[i + 1] << 2) | (padded[i + 2] << 1) | padded[i + 3]
        out.append(format(int(d), "x"))
    return "".join(out)
