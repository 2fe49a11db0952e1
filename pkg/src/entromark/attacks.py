"""Channel attacks for robustness evaluation.

Everything here is deterministic: fixed filter designs, no randomness, so a
sweep reruns to identical output. The MP3 attack shells out to an external
encoder when one is configured and reports unavailability otherwise.
"""

import os
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve, firwin, resample_poly

from .audio_io import AudioSignal, read_wav, write_wav
from .exceptions import (BadCutoffError, BadRateError, EncoderFailedError,
                         EncoderUnavailableError)

MP3_COMMAND_ENV = "ENTROMARK_MP3_COMMAND"
DEFAULT_MP3_COMMAND = ("lame --quiet -b {bitrate} {input} {mp3} "
                       "&& lame --quiet --decode {mp3} {output}")

# polyphase design constants: sharp windowed sinc, 64 taps per phase
_KAISER_BETA = 8.0
_TAPS_PER_PHASE = 64


@dataclass(frozen=True)
class AttackSpec:
    kind: str                      # none|resample|lowpass|amplitude|timescale|mp3
    parameter: float | None = None

    @property
    def label(self) -> str:
        if self.parameter is None:
            return self.kind
        p = self.parameter
        text = str(int(p)) if float(p).is_integer() else repr(float(p))
        return f"{self.kind}:{text}"


DEFAULT_GRID = (
    (AttackSpec("none"),)
    + tuple(AttackSpec("resample", r) for r in (22050, 11025, 8000))
    + tuple(AttackSpec("mp3", b) for b in (128, 112, 96, 80))
    + (AttackSpec("lowpass", 3000),)
    + tuple(AttackSpec("amplitude", t) for t in (0.2, 0.8, 1.1, 1.2))
    + tuple(AttackSpec("timescale", p) for p in (-5, -2, 2, 5))
)


def _rational_rate(numerator: int | float, denominator: int | float) -> Fraction:
    return Fraction(numerator).limit_denominator(10 ** 6) / \
        Fraction(denominator).limit_denominator(10 ** 6)


def _polyphase_filter(up: int, down: int) -> np.ndarray:
    # cutoff at the tighter of the two Nyquist grids; resample_poly itself
    # scales the filter by up to undo the zero stuffing
    m = max(up, down)
    taps = 2 * _TAPS_PER_PHASE * m + 1
    return firwin(taps, 1.0 / m, window=("kaiser", _KAISER_BETA))


def _resample(x: np.ndarray, ratio: Fraction) -> np.ndarray:
    up, down = ratio.numerator, ratio.denominator
    if up == down:
        return x.copy()
    return resample_poly(x, up, down, window=_polyphase_filter(up, down))


def _fit_length(x: np.ndarray, n: int) -> np.ndarray:
    if x.size >= n:
        return x[:n]
    return np.concatenate([x, np.zeros(n - x.size)])


def attack_resample(signal: AudioSignal, intermediate_rate: float) -> AudioSignal:
    """Down to intermediate_rate and back; length and rate metadata preserved."""
    if intermediate_rate <= 0 or intermediate_rate > signal.sample_rate:
        raise BadRateError(
            f"intermediate rate {intermediate_rate} outside (0, {signal.sample_rate}]")
    ratio = _rational_rate(intermediate_rate, signal.sample_rate)
    down_leg = _resample(signal.samples, ratio)
    back = _resample(down_leg, 1 / ratio)
    return AudioSignal(_fit_length(back, len(signal)), signal.sample_rate,
                       signal.bit_depth)


def attack_lowpass(signal: AudioSignal, cutoff_hz: float) -> AudioSignal:
    """255-tap linear-phase FIR low-pass, group delay compensated exactly."""
    nyquist = signal.sample_rate / 2.0
    if not 0.0 < cutoff_hz < nyquist:
        raise BadCutoffError(f"cutoff {cutoff_hz} Hz outside (0, {nyquist})")
    taps = firwin(255, cutoff_hz, window="hamming", fs=signal.sample_rate)
    # odd length keeps the delay integral, mode="same" removes it
    filtered = fftconvolve(signal.samples, taps, mode="same")
    return AudioSignal(filtered, signal.sample_rate, signal.bit_depth)


def attack_amplitude(signal: AudioSignal, factor: float) -> AudioSignal:
    """Scale then hard-clip to the 16-bit float range."""
    if factor <= 0:
        raise ValueError(f"scale factor {factor} must be positive")
    return AudioSignal(np.clip(signal.samples * factor, -1.0, 1.0),
                       signal.sample_rate, signal.bit_depth)


def attack_timescale(signal: AudioSignal, percent: float) -> AudioSignal:
    """Stretch duration by percent without resample correction (desync attack)."""
    if not -50.0 < percent < 100.0:
        raise ValueError(f"timescale percent {percent} outside (-50, 100)")
    ratio = _rational_rate(100 + percent, 100)
    stretched = _resample(signal.samples, ratio)
    return AudioSignal(stretched, signal.sample_rate, signal.bit_depth)


def resolve_mp3_command(template: str | None = None) -> str:
    if template is None:
        template = os.environ.get(MP3_COMMAND_ENV) or DEFAULT_MP3_COMMAND
    return template


def mp3_available(template: str | None = None) -> bool:
    """True when the first word of the encoder command resolves to a binary."""
    command = resolve_mp3_command(template)
    try:
        first = shlex.split(command)[0]
    except (ValueError, IndexError):
        return False
    return shutil.which(first) is not None


def _align_to(reference: np.ndarray, candidate: np.ndarray, max_lag: int = 4096) -> np.ndarray:
    """Shift candidate so it best lines up with reference, then fix the length."""
    head = min(reference.size, candidate.size)
    a = reference[:head]
    b = candidate[:head]
    corr = fftconvolve(b, a[::-1], mode="full")
    center = head - 1
    lo = max(center - max_lag, 0)
    hi = min(center + max_lag + 1, corr.size)
    lag = int(np.argmax(corr[lo:hi])) + lo - center  # >0: candidate is late
    if lag > 0:
        shifted = candidate[lag:]
    else:
        shifted = np.concatenate([np.zeros(-lag), candidate])
    return _fit_length(shifted, reference.size)


def attack_mp3(signal: AudioSignal, bitrate_kbps: int,
               encoder_command: str | None = None) -> AudioSignal:
    """Round trip through an external MP3 encoder at the given bitrate.

    The command template must contain {input}, {output}, {bitrate} and may use
    {mp3} for the intermediate file; it runs under a shell in a temp directory.
    Raises EncoderUnavailableError when no encoder is on PATH.
    """
    if bitrate_kbps <= 0:
        raise ValueError(f"bitrate {bitrate_kbps} must be positive")
    command = resolve_mp3_command(encoder_command)
    if not mp3_available(command):
        raise EncoderUnavailableError(
            f"no MP3 encoder available (set {MP3_COMMAND_ENV} or install one)")
    with tempfile.TemporaryDirectory(prefix="entromark_mp3_") as work:
        in_path = os.path.join(work, "in.wav")
        mp3_path = os.path.join(work, "mid.mp3")
        out_path = os.path.join(work, "out.wav")
        write_wav(in_path, signal)
        rendered = command.format(input=shlex.quote(in_path),
                                  output=shlex.quote(out_path),
                                  mp3=shlex.quote(mp3_path),
                                  bitrate=int(bitrate_kbps))
        proc = subprocess.run(rendered, shell=True, capture_output=True, text=True)
        if proc.returncode != 0:
            raise EncoderFailedError(
                f"encoder exited {proc.returncode}: {proc.stderr.strip()[:500]}")
        if not os.path.exists(out_path):
            raise EncoderFailedError("encoder produced no output file")
        decoded = read_wav(out_path)
    aligned = _align_to(signal.samples, decoded.samples)
    return AudioSignal(aligned, signal.sample_rate, signal.bit_depth)


def apply_attack(signal: AudioSignal, spec: AttackSpec,
                 mp3_encoder: str | None = None) -> AudioSignal:
    if spec.kind == "none":
        return signal.copy()
    if spec.kind == "resample":
        return attack_resample(signal, spec.parameter)
    if spec.kind == "lowpass":
        return attack_lowpass(signal, spec.parameter)
    if spec.kind == "amplitude":
        return attack_amplitude(signal, spec.parameter)
    if spec.kind == "timescale":
        return attack_timescale(signal, spec.parameter)
    if spec.kind == "mp3":
        return attack_mp3(signal, int(spec.parameter), mp3_encoder)
    raise ValueError(f"unknown attack kind {spec.kind!r}")
