"""Attack behavior measured on known signals: spectra, lengths, clipping,
alignment, and encoder plumbing."""

import shlex
import sys

import numpy as np
import pytest

from entromark.attacks import (
    DEFAULT_GRID,
    AttackSpec,
    _align_to,
    apply_attack,
    attack_amplitude,
    attack_lowpass,
    attack_mp3,
    attack_resample,
    attack_timescale,
    mp3_available,
    resolve_mp3_command,
)
from entromark.audio_io import AudioSignal
from entromark.exceptions import (
    BadCutoffError,
    BadRateError,
    EncoderFailedError,
    EncoderUnavailableError,
)

RATE = 44100


def _sine(freq, n=65536, amp=0.5):
    t = np.arange(n) / RATE
    return AudioSignal(amp * np.sin(2 * np.pi * freq * t), RATE)


def _tone_amplitude(x, freq, n=None):
    """Amplitude of one frequency via projection, interior window only."""
    n = n or x.size
    core = x[n // 4: 3 * n // 4]
    t = (np.arange(n) / RATE)[n // 4: 3 * n // 4]
    c = np.cos(2 * np.pi * freq * t)
    s = np.sin(2 * np.pi * freq * t)
    return 2.0 * np.hypot(np.dot(core, c), np.dot(core, s)) / core.size


# ---- resample ----

def test_resample_at_original_rate_is_exact_copy():
    sig = _sine(1000)
    out = attack_resample(sig, RATE)
    assert out is not sig
    assert np.array_equal(out.samples, sig.samples)


@pytest.mark.parametrize("rate", [22050, 11025, 8000])
def test_resample_preserves_length_and_rate(rate):
    sig = _sine(440)
    out = attack_resample(sig, rate)
    assert len(out) == len(sig)
    assert out.sample_rate == RATE


def test_resample_passband_tone_survives():
    sig = _sine(1000)
    out = attack_resample(sig, 8000)
    assert _tone_amplitude(out.samples, 1000) == pytest.approx(0.5, rel=0.01)


def test_resample_kills_tone_above_intermediate_nyquist():
    sig = _sine(10000)
    out = attack_resample(sig, 8000)  # 10 kHz cannot pass a 4 kHz Nyquist
    residual = _tone_amplitude(out.samples, 10000)
    assert residual < 0.5 * 10 ** (-40 / 20)


def test_resample_rejects_bad_rates():
    sig = _sine(440, n=1024)
    for bad in (0, -1, RATE + 1):
        with pytest.raises(BadRateError):
            attack_resample(sig, bad)


# ---- lowpass ----

def test_lowpass_passes_dc_and_low_tone():
    flat = AudioSignal(np.full(32768, 0.25), RATE)
    out = attack_lowpass(flat, 3000)
    mid = out.samples[500:-500]
    assert np.max(np.abs(mid - 0.25)) < 1e-3

    tone = _sine(1000)
    assert _tone_amplitude(attack_lowpass(tone, 3000).samples, 1000) == \
        pytest.approx(0.5, rel=0.01)


def test_lowpass_attenuates_high_tone():
    tone = _sine(10000)
    out = attack_lowpass(tone, 3000)
    assert _tone_amplitude(out.samples, 10000) < 0.5 * 10 ** (-40 / 20)


def test_lowpass_keeps_length_and_alignment():
    # linear phase with odd taps and centered convolution: impulse stays put
    x = np.zeros(4096)
    x[2000] = 1.0
    out = attack_lowpass(AudioSignal(x, RATE), 3000)
    assert len(out) == 4096
    assert int(np.argmax(out.samples)) == 2000


def test_lowpass_rejects_bad_cutoff():
    sig = _sine(440, n=1024)
    for bad in (0.0, -10.0, RATE / 2, RATE):
        with pytest.raises(BadCutoffError):
            attack_lowpass(sig, bad)


# ---- amplitude ----

def test_amplitude_scales_exactly():
    sig = _sine(440, amp=0.4)
    out = attack_amplitude(sig, 0.5)
    assert np.max(np.abs(out.samples - 0.5 * sig.samples)) == 0.0


def test_amplitude_clips_at_unit_range():
    sig = AudioSignal(np.array([0.9, -0.9, 0.1]), RATE)
    out = attack_amplitude(sig, 1.2)
    assert out.samples.tolist() == [1.0, -1.0, pytest.approx(0.12)]


def test_amplitude_rejects_nonpositive():
    with pytest.raises(ValueError):
        attack_amplitude(_sine(440, n=64), 0.0)


# ---- timescale ----

@pytest.mark.parametrize("percent,factor", [(5, 1.05), (-5, 0.95), (2, 1.02)])
def test_timescale_changes_length(percent, factor):
    sig = _sine(440, n=44100)
    out = attack_timescale(sig, percent)
    assert abs(len(out) - round(44100 * factor)) <= 1
    assert out.sample_rate == RATE


def test_timescale_shifts_pitch():
    # played back at the old rate, +5% duration lowers the tone to 440/1.05
    out = attack_timescale(_sine(440), 5)
    spec = np.abs(np.fft.rfft(out.samples))
    peak_hz = np.argmax(spec) * RATE / out.samples.size
    assert peak_hz == pytest.approx(440 / 1.05, abs=2 * RATE / out.samples.size)


def test_timescale_rejects_extremes():
    sig = _sine(440, n=1024)
    for bad in (-50, 100, 250):
        with pytest.raises(ValueError):
            attack_timescale(sig, bad)


# ---- alignment helper ----

def test_align_recovers_late_start():
    rng = np.random.default_rng(61)
    ref = rng.standard_normal(8192)
    late = np.concatenate([np.zeros(37), ref])  # content arrives 37 samples late
    fixed = _align_to(ref, late)
    assert fixed.size == ref.size
    assert np.array_equal(fixed, ref)


def test_align_recovers_early_start():
    rng = np.random.default_rng(62)
    ref = rng.standard_normal(8192)
    early = ref[41:]  # first 41 samples lost
    fixed = _align_to(ref, early)
    assert fixed.size == ref.size
    assert np.array_equal(fixed[41:], ref[41:])
    assert np.array_equal(fixed[:41], np.zeros(41))


# ---- mp3 plumbing ----

def test_mp3_unavailable_raises(monkeypatch):
    monkeypatch.setenv("ENTROMARK_MP3_COMMAND",
                       "no_such_encoder_binary {input} {output} {bitrate}")
    assert not mp3_available()
    with pytest.raises(EncoderUnavailableError):
        attack_mp3(_sine(440, n=4096), 128)


def test_mp3_with_fake_encoder(monkeypatch):
    # stand-in encoder: copy input to output; exercises the full temp-file,
    # shell, decode, and align path without a real codec
    fake = (f"{shlex.quote(sys.executable)} -c "
            "\"import shutil,sys; shutil.copy(sys.argv[1], sys.argv[2])\" "
            "{input} {output}")
    monkeypatch.setenv("ENTROMARK_MP3_COMMAND", fake)
    assert mp3_available()
    sig = AudioSignal(np.round(np.linspace(-0.5, 0.5, 4096) * 32768) / 32768, RATE)
    out = attack_mp3(sig, 128)
    assert len(out) == len(sig)
    assert np.max(np.abs(out.samples - sig.samples)) < 1e-9


def test_mp3_encoder_failure(monkeypatch):
    monkeypatch.setenv("ENTROMARK_MP3_COMMAND", "false {input} {output} {bitrate}")
    with pytest.raises(EncoderFailedError):
        attack_mp3(_sine(440, n=4096), 128)


def test_mp3_rejects_bad_bitrate():
    with pytest.raises(ValueError):
        attack_mp3(_sine(440, n=64), 0)


def test_resolve_command_priority(monkeypatch):
    monkeypatch.delenv("ENTROMARK_MP3_COMMAND", raising=False)
    assert "lame" in resolve_mp3_command()
    monkeypatch.setenv("ENTROMARK_MP3_COMMAND", "custom {input} {output} {bitrate}")
    assert resolve_mp3_command().startswith("custom")
    assert resolve_mp3_command("given {input} {output} {bitrate}").startswith("given")


# ---- dispatch and grid ----

def test_apply_attack_dispatch():
    sig = _sine(440, n=4096)
    none = apply_attack(sig, AttackSpec("none"))
    assert np.array_equal(none.samples, sig.samples)
    assert none is not sig
    scaled = apply_attack(sig, AttackSpec("amplitude", 0.5))
    assert np.max(np.abs(scaled.samples - 0.5 * sig.samples)) == 0.0
    with pytest.raises(ValueError):
        apply_attack(sig, AttackSpec("reverb", 1.0))


def test_attack_labels():
    assert AttackSpec("none").label == "none"
    assert AttackSpec("resample", 22050).label == "resample:22050"
    assert AttackSpec("amplitude", 0.2).label == "amplitude:0.2"
    assert AttackSpec("timescale", -5).label == "timescale:-5"


def test_default_grid_shape():
    labels = [spec.label for spec in DEFAULT_GRID]
    assert labels[0] == "none"
    assert len(labels) == len(set(labels)) == 17
    kinds = {spec.kind for spec in DEFAULT_GRID}
    assert kinds == {"none", "resample", "mp3", "lowpass", "amplitude", "timescale"}
