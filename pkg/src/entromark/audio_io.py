"""16-bit mono WAV input and output with one fixed scaling convention.

Integer sample v maps to float v / 32768, so the float range is
[-1.0, 1.0) and every int16 value survives a round trip exactly.
"""

import wave
from dataclasses import dataclass, field

import numpy as np

from .exceptions import UnsupportedFormatError

INT16_SCALE = 32768.0


@dataclass
class AudioSignal:
    samples: np.ndarray
    sample_rate: int
    bit_depth: int = 16

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise UnsupportedFormatError(
                f"expected a mono sample vector, got shape {self.samples.shape}")
        if self.sample_rate <= 0:
            raise UnsupportedFormatError(f"bad sample rate {self.sample_rate}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def copy(self) -> "AudioSignal":
        return AudioSignal(self.samples.copy(), self.sample_rate, self.bit_depth)


def float_from_int16(values: np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=np.float64) / INT16_SCALE


def int16_from_float(samples: np.ndarray) -> np.ndarray:
    # round to nearest, then saturate: +1.0 would land on 32768 which int16 lacks
    scaled = np.rint(np.asarray(samples, dtype=np.float64) * INT16_SCALE)
    return np.clip(scaled, -32768, 32767).astype(np.int16)


def quantize(signal: AudioSignal) -> AudioSignal:
    """Model a write/read cycle without touching disk."""
    return AudioSignal(float_from_int16(int16_from_float(signal.samples)),
                       signal.sample_rate, signal.bit_depth)


def read_wav(path) -> AudioSignal:
    """Read a 16-bit mono PCM WAV file.

    Anything else (stereo, other sample widths, compressed streams) raises
    UnsupportedFormatError rather than being converted silently.
    """
    try:
        with wave.open(str(path), "rb") as wav:
            channels = wav.getnchannels()
            width = wav.getsampwidth()
            comptype = wav.getcomptype()
            rate = wav.getframerate()
            frames = wav.readframes(wav.getnframes())
    except wave.Error as exc:
        raise UnsupportedFormatError(f"{path}: {exc}") from exc
    if comptype != "NONE":
        raise UnsupportedFormatError(f"{path}: compressed WAV ({comptype}) not supported")
    if channels != 1:
        raise UnsupportedFormatError(f"{path}: expected mono, got {channels} channels")
    if width != 2:
        raise UnsupportedFormatError(f"{path}: expected 16-bit samples, got {8 * width}-bit")
    ints = np.frombuffer(frames, dtype="<i2")
    return AudioSignal(float_from_int16(ints), rate)


def write_wav(path, signal: AudioSignal) -> None:
    """Write as 16-bit mono PCM, saturating anything outside [-1, 1)."""
    ints = int16_from_float(signal.samples)
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(signal.sample_rate)
        wav.writeframes(ints.astype("<i2").tobytes())
