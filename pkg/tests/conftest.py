"""Deterministic synthesized test clips shared across the suite.

Four textures, 512000 samples (11.6 s) at 44.1 kHz each, tuned so every
segment's mean pair entropy admits a 0.03 band step at levels 7 and 8 and no
region is digitally silent.
"""

import numpy as np
import pytest
from scipy.signal import lfilter

from entromark.audio_io import AudioSignal

RATE = 44100
CLIP_SAMPLES = 512000


def _norm(x, peak):
    return x * (peak / np.abs(x).max())


def make_bursts(n=CLIP_SAMPLES):
    """Percussive: pitched kicks plus noise hats over a low noise floor."""
    rng = np.random.default_rng(101)
    x = np.zeros(n)
    step = int(0.45 * RATE)
    for i, onset in enumerate(range(0, n - step, step)):
        dur = int(0.30 * RATE)
        seg = np.arange(dur) / RATE
        f0 = 90.0 * (1 + 0.25 * ((i * 7) % 3))
        sweep = 1 + 6 * np.exp(-seg * 30)
        x[onset:onset + dur] += 0.65 * np.sin(2 * np.pi * f0 * seg * sweep) * np.exp(-seg * 9)
        hat = rng.standard_normal(dur // 3) * np.exp(-np.arange(dur // 3) / RATE * 60)
        x[onset:onset + dur // 3] += 0.38 * hat
    x += 0.04 * rng.standard_normal(n)
    return _norm(x, 0.80)


def make_harmonic(n=CLIP_SAMPLES):
    """Plucked overtone-rich notes with overlapping decays.

    The note fundamentals sit above the deep approximation bands, so the
    noise floor carries most of the band energy; it is set high enough that
    no coefficient pair sinks to within quantization noise of silence.
    """
    rng = np.random.default_rng(202)
    x = np.zeros(n)
    notes = [220.0, 277.18, 329.63, 440.0, 369.99, 293.66, 493.88, 261.63]
    onset, i = 0, 0
    while onset < n - RATE:
        dur = min(int(0.8 * RATE), n - onset)
        seg = np.arange(dur) / RATE
        f0 = notes[i % len(notes)]
        tone = sum((0.5 ** k) * np.sin(2 * np.pi * f0 * (k + 1) * seg + 0.3 * k)
                   for k in range(5))
        x[onset:onset + dur] += tone * np.exp(-seg * 2.5)
        onset += int(0.55 * RATE)
        i += 1
    x += 0.08 * rng.standard_normal(n)
    return _norm(x, 0.75)


def make_band(n=CLIP_SAMPLES):
    """Tilted broadband noise with a wandering melody and bass pulses."""
    rng = np.random.default_rng(303)
    t = np.arange(n) / RATE
    noise = lfilter([1.0], [1.0, -0.9], rng.standard_normal(n))
    noise /= np.abs(noise).max()
    melody = 0.25 * np.sin(2 * np.pi * (660 + 60 * np.sin(2 * np.pi * 0.4 * t)) * t)
    bass = np.zeros(n)
    step = int(0.6 * RATE)
    for onset in range(0, n - step, step):
        dur = int(0.35 * RATE)
        seg = np.arange(dur) / RATE
        bass[onset:onset + dur] += np.sin(2 * np.pi * 65 * seg) * np.exp(-seg * 7)
    x = 0.45 * noise + melody + 0.5 * bass + 0.05 * rng.standard_normal(n)
    return _norm(x, 0.70)


def make_pad(n=CLIP_SAMPLES):
    """Sustained detuned layers with fast tremolo so pair magnitudes keep moving."""
    rng = np.random.default_rng(404)
    t = np.arange(n) / RATE
    x = np.zeros(n)
    for f0, depth, trem in [(110.0, 0.5, 31), (164.8, 0.6, 47),
                            (220.0, 0.4, 23), (329.6, 0.5, 59)]:
        am = 1 + depth * np.sin(2 * np.pi * trem * t + f0)
        x += am * np.sin(2 * np.pi * f0 * t + 0.1 * np.sin(2 * np.pi * 5 * t))
    x += 0.06 * rng.standard_normal(n)
    return _norm(x, 0.60)


_MAKERS = {
    "bursts": make_bursts,
    "harmonic": make_harmonic,
    "band": make_band,
    "pad": make_pad,
}


@pytest.fixture(scope="session")
def clips():
    return {name: AudioSignal(maker(), RATE) for name, maker in _MAKERS.items()}


@pytest.fixture(scope="session")
def short_noise():
    """Quick unwatermarked signal for negative tests."""
    rng = np.random.default_rng(77)
    return AudioSignal(0.2 * rng.standard_normal(262144), RATE)
