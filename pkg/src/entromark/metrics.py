"""Quality and robustness measurements plus the evaluation report format."""

import json
import math
from dataclasses import dataclass

import numpy as np

from .attacks import DEFAULT_GRID, apply_attack
from .audio_io import AudioSignal, quantize
from .embedder import EmbedConfig, embed, segment_layout
from .entropy import wbe_pair
from .exceptions import (BadLengthError, EncoderUnavailableError,
                         LengthMismatchError, ZeroSignalError)
from .extractor import extract
from .wavelet import approximation_band, get_filter

REPORT_VERSION = 1


def snr_db(original, processed) -> float:
    """10 log10 of signal power over difference power; +inf when identical."""
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(processed, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatchError(f"length {a.size} vs {b.size}")
    signal = float(np.sum(a * a))
    if signal == 0.0:
        raise ZeroSignalError("reference signal has zero energy")
    noise = float(np.sum(np.square(b - a)))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(signal / noise)


def ber_percent(sent, received) -> float:
    """Hamming distance over length, in percent."""
    s = np.asarray(sent, dtype=np.uint8)
    r = np.asarray(received, dtype=np.uint8)
    if s.shape != r.shape:
        raise LengthMismatchError(f"bit count {s.size} vs {r.size}")
    if s.size == 0:
        raise ValueError("cannot score an empty bit vector")
    return 100.0 * float(np.count_nonzero(s != r)) / s.size


def capacity(n_samples: int, level: int, segments: int = 1,
             sync_length: int = 0) -> int:
    """Payload pairs available: floor(segment/2^level)/2 each, minus sync bits.

    sync_length=0 gives the gross figure. Audio too short for even one block
    per segment has capacity 0.
    """
    try:
        layout = segment_layout(n_samples, segments, level)
    except BadLengthError:
        return 0
    total = 0
    for _, length in layout:
        pairs = (length >> level) // 2
        total += max(0, pairs - sync_length)
    return total


def wbe_statistics(audio: AudioSignal, level: int, filter_name: str = "db8",
                   segments: int = 1):
    """Mean and population stddev of pair entropy across all segments' bands."""
    filt = get_filter(filter_name)
    values = []
    for start, length in segment_layout(len(audio), segments, level):
        band = approximation_band(audio.samples[start:start + length], filt, level)
        pairs = band.size // 2
        values.append(wbe_pair(band[0:2 * pairs:2], band[1:2 * pairs:2]))
    flat = np.concatenate(values)
    return float(np.mean(flat)), float(np.std(flat))


@dataclass
class EvalRow:
    attack: str
    status: str               # "ok" or "skipped"
    ber_percent: float | None = None
    bits_wrong: int | None = None
    bits_total: int | None = None
    hard_fraction: float | None = None
    syncs: list | None = None
    reason: str | None = None


@dataclass
class EvalReport:
    clip: str
    sample_rate: int
    samples: int
    config: EmbedConfig
    payload_bits: int
    capacity_bits: int
    snr_db: float
    rows: list
    report_version: int = REPORT_VERSION


def evaluate_clip(audio: AudioSignal, payload, config: EmbedConfig,
                  attacks=DEFAULT_GRID, mp3_encoder: str | None = None,
                  clip_name: str = "clip", recompute_mean: bool = False) -> EvalReport:
    """Embed once, push the watermarked audio through each attack, score BER.

    Both the watermarked and the attacked signals pass through 16-bit
    quantization, matching what a file on disk would carry. MP3 rows become
    status "skipped" when no encoder is available.
    """
    payload = np.asarray(payload, dtype=np.uint8)
    marked, key = embed(audio, payload, config)
    marked = quantize(marked)
    snr = snr_db(audio.samples, marked.samples)

    rows = []
    for spec in attacks:
        try:
            attacked = quantize(apply_attack(marked, spec, mp3_encoder))
        except EncoderUnavailableError as exc:
            rows.append(EvalRow(spec.label, "skipped", reason=str(exc)))
            continue
        result = extract(attacked, key, recompute_mean=recompute_mean)
        wrong = int(np.count_nonzero(result.payload != payload))
        rows.append(EvalRow(
            spec.label, "ok",
            ber_percent=ber_percent(payload, result.payload),
            bits_wrong=wrong,
            bits_total=int(payload.size),
            hard_fraction=float(np.mean(result.hard)) if payload.size else 1.0,
            syncs=[{"offset": s.offset, "correlation": s.correlation,
                    "found": s.found} for s in result.syncs]))
    return EvalReport(clip_name, audio.sample_rate, len(audio), config,
                      int(payload.size),
                      capacity(len(audio), config.level, config.segments,
                               config.sync_length),
                      snr, rows)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)  # "inf" stays readable without breaking strict parsers
    return value


def report_json(report: EvalReport) -> str:
    """Deterministic serialization: fixed field order, no timestamps or paths."""
    doc = {
        "report_version": report.report_version,
        "clip": report.clip,
        "sample_rate": report.sample_rate,
        "samples": report.samples,
        "config": {
            "epsilon": report.config.epsilon,
            "level": report.config.level,
            "filter": report.config.filter_name,
            "segments": report.config.segments,
            "pn_seed": report.config.pn_seed,
            "sync_length": report.config.sync_length,
        },
        "payload_bits": report.payload_bits,
        "capacity_bits": report.capacity_bits,
        "snr_db": _jsonable(report.snr_db),
        "rows": [],
    }
    for row in report.rows:
        entry = {"attack": row.attack, "status": row.status}
        if row.status == "ok":
            entry.update({
                "ber_percent": _jsonable(row.ber_percent),
                "bits_wrong": row.bits_wrong,
                "bits_total": row.bits_total,
                "hard_fraction": _jsonable(row.hard_fraction),
                "syncs": row.syncs,
            })
        else:
            entry["reason"] = row.reason
        doc["rows"].append(entry)
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def render_table(report: EvalReport) -> str:
    """Human-readable summary of one report."""
    head = (f"clip {report.clip}  level {report.config.level}  "
            f"filter {report.config.filter_name}  eps {report.config.epsilon:g}  "
            f"snr {report.snr_db:.2f} dB  payload {report.payload_bits}"
            f"/{report.capacity_bits} bits")
    lines = [head, f"{'attack':<16} {'status':<8} {'BER%':>7} {'wrong':>6} "
                   f"{'hard%':>6}  sync"]
    for row in report.rows:
        if row.status != "ok":
            lines.append(f"{row.attack:<16} {row.status:<8} {'-':>7} {'-':>6} "
                         f"{'-':>6}  {row.reason or ''}")
            continue
        syncs = " ".join(f"{s['offset']:+d}@{s['correlation']:.2f}"
                         + ("" if s["found"] else "?") for s in row.syncs)
        lines.append(f"{row.attack:<16} {row.status:<8} {row.ber_percent:>7.2f} "
                     f"{row.bits_wrong:>6} {100 * row.hard_fraction:>6.1f}  {syncs}")
    return "\n".join(lines) + "\n"
