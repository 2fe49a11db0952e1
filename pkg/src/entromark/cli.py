"""Command line front end.

Subcommands: embed, extract, attack, evaluate, stats. Exit codes are stable
per error class so scripts can branch on them; see EXIT_CODES.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .attacks import DEFAULT_GRID, AttackSpec, apply_attack
from .audio_io import read_wav, write_wav
from .embedder import (EmbedConfig, bits_from_hex, embed, hex_from_bits,
                       read_key, write_key)
from .exceptions import (BadCutoffError, BadLengthError, BadRateError,
                         CapacityExceededError, EncoderFailedError,
                         EncoderUnavailableError, KeyInvariantError,
                         KeyMismatchError, UnsupportedFormatError,
                         WatermarkError)
from .extractor import extract
from .metrics import (capacity, evaluate_clip, render_table, report_json,
                      snr_db, wbe_statistics)

EXIT_CODES = {
    "ok": 0,
    "error": 1,
    "usage": 2,
    "capacity": 3,
    "invariant": 4,
    "key": 5,
    "audio": 6,
    "attack_parameter": 7,
    "encoder": 8,
}

ATTACK_KINDS = ("none", "resample", "lowpass", "amplitude", "timescale", "mp3")


def _config_from_args(args) -> EmbedConfig:
    return EmbedConfig(epsilon=args.epsilon, level=args.level,
                       filter_name=args.filter, segments=args.segments,
                       pn_seed=args.pn_seed, sync_length=args.sync_length)


def _add_embed_options(parser, with_level=True):
    parser.add_argument("--epsilon", type=float, default=0.03,
                        help="embedding band half-step (default 0.03)")
    if with_level:
        parser.add_argument("--level", type=int, default=8,
                            help="wavelet decomposition depth (default 8)")
    parser.add_argument("--filter", default="db8", choices=("haar", "db8"),
                        help="wavelet filter (default db8)")
    parser.add_argument("--segments", type=int, default=4,
                        help="number of independently keyed segments (default 4)")
    parser.add_argument("--pn-seed", type=int, default=1,
                        help="seed for the sync sequence generator (default 1)")
    parser.add_argument("--sync-length", type=int, default=63,
                        help="sync prefix bits per segment (default 63)")


def _add_sync_options(parser):
    parser.add_argument("--sync-radius", type=int, default=16,
                        help="search steps each way around the nominal start (default 16)")
    parser.add_argument("--sync-stride", type=int, default=None,
                        help="offset step in samples (default: one block, 2^level)")
    parser.add_argument("--sync-threshold", type=float, default=0.8,
                        help="correlation needed to accept an offset (default 0.8)")
    parser.add_argument("--recompute-mean", action="store_true",
                        help="re-measure the entropy mean from the audio instead "
                             "of trusting the key")


def _read_payload(args) -> np.ndarray:
    if args.payload_file:
        with open(args.payload_file, "r", encoding="utf-8") as fh:
            return bits_from_hex(fh.read())
    return bits_from_hex(args.payload)


def cmd_embed(args) -> int:
    audio = read_wav(args.input)
    payload = _read_payload(args)
    marked, key = embed(audio, payload, _config_from_args(args))
    write_wav(args.output, marked)
    write_key(args.key, key)
    print(f"embedded {payload.size} bits into {args.output}")
    print(f"snr {snr_db(audio.samples, marked.samples):.2f} dB, key {args.key}")
    return 0


def cmd_extract(args) -> int:
    audio = read_wav(args.input)
    key = read_key(args.key)
    result = extract(audio, key, recompute_mean=args.recompute_mean,
                     sync_radius=args.sync_radius, sync_stride=args.sync_stride,
                     sync_threshold=args.sync_threshold)
    text = hex_from_bits(result.payload)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(f"payload[{result.payload.size} bits] {text}")
    print(f"hard {100 * float(np.mean(result.hard)):.1f}%" if result.payload.size
          else "hard n/a")
    for i, s in enumerate(result.syncs):
        mark = "" if s.found else " (below threshold, using nominal)"
        print(f"segment {i}: offset {s.offset:+d}, correlation {s.correlation:.3f}{mark}")
    return 0


def cmd_attack(args) -> int:
    audio = read_wav(args.input)
    spec = AttackSpec(args.kind, args.parameter)
    if args.kind != "none" and args.parameter is None:
        raise ValueError(f"attack {args.kind!r} needs --parameter")
    write_wav(args.output, apply_attack(audio, spec, args.mp3_encoder))
    print(f"{spec.label} -> {args.output}")
    return 0


def cmd_evaluate(args) -> int:
    audio = read_wav(args.input)
    levels = [int(v) for v in args.levels.split(",") if v.strip()]
    kinds = ([k.strip() for k in args.attacks.split(",") if k.strip()]
             if args.attacks else None)
    if kinds:
        unknown = set(kinds) - set(ATTACK_KINDS)
        if unknown:
            raise ValueError(f"unknown attack kinds {sorted(unknown)}")
        grid = [spec for spec in DEFAULT_GRID if spec.kind in kinds]
    else:
        grid = list(DEFAULT_GRID)

    reports = []
    for level in levels:
        config = EmbedConfig(epsilon=args.epsilon, level=level,
                             filter_name=args.filter, segments=args.segments,
                             pn_seed=args.pn_seed, sync_length=args.sync_length)
        if args.payload:
            payload = bits_from_hex(args.payload)
        else:
            room = capacity(len(audio), level, args.segments, args.sync_length)
            payload = np.random.default_rng(args.pn_seed).integers(
                0, 2, size=room, dtype=np.uint8)
        report = evaluate_clip(audio, payload, config, attacks=grid,
                               mp3_encoder=args.mp3_encoder,
                               clip_name=args.clip_name,
                               recompute_mean=args.recompute_mean)
        reports.append(report)
        print(render_table(report))

    if args.report:
        body = "[\n" + ",\n".join(report_json(r).rstrip("\n") for r in reports) + "\n]\n"
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(body)
        print(f"report written to {args.report}")
    return 0


def cmd_stats(args) -> int:
    audio = read_wav(args.input)
    mean, std = wbe_statistics(audio, args.level, args.filter, args.segments)
    print(f"pairs entropy at level {args.level} ({args.filter}, "
          f"{args.segments} segments): mean {mean:.6f}, stddev {std:.6f}")
    print(f"capacity {capacity(len(audio), args.level, args.segments, 0)} bits gross, "
          f"{capacity(len(audio), args.level, args.segments, args.sync_length)} net "
          f"of {args.sync_length}-bit sync")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entromark",
        description="Blind audio watermarking via pair entropy of low-frequency "
                    "wavelet coefficients")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a payload and write audio + key")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--key", required=True, help="key file to write")
    p.add_argument("--payload", default="", help="payload bits as hex")
    p.add_argument("--payload-file", help="file containing the hex payload")
    _add_embed_options(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover a payload using a key file")
    p.add_argument("input")
    p.add_argument("--key", required=True)
    p.add_argument("--output", help="write the recovered hex payload here")
    _add_sync_options(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply one channel attack to a WAV")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--kind", required=True, choices=ATTACK_KINDS)
    p.add_argument("--parameter", type=float,
                   help="rate (Hz), cutoff (Hz), scale factor, percent, or kbps")
    p.add_argument("--mp3-encoder", help="encoder command template")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="embed, attack, extract, report")
    p.add_argument("input")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--levels", default="7,8", help="comma list (default 7,8)")
    p.add_argument("--attacks", help="comma list of kinds (default: all)")
    p.add_argument("--payload", help="hex payload (default: fill capacity, seeded)")
    p.add_argument("--clip-name", default="clip", help="label used in the report")
    p.add_argument("--mp3-encoder", help="encoder command template")
    _add_embed_options(p, with_level=False)
    _add_sync_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="entropy statistics and capacity of a clip")
    p.add_argument("input")
    _add_embed_options(p)
    p.set_defaults(func=cmd_stats)
    return parser


_ERROR_CODE_MAP = (
    (CapacityExceededError, "capacity"),
    (KeyInvariantError, "invariant"),
    (KeyMismatchError, "key"),
    ((UnsupportedFormatError, BadLengthError), "audio"),
    ((BadRateError, BadCutoffError), "attack_parameter"),
    ((EncoderUnavailableError, EncoderFailedError), "encoder"),
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["audio"]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["usage"]
    except WatermarkError as exc:
        for classes, name in _ERROR_CODE_MAP:
            if isinstance(exc, classes):
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_CODES[name]
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["error"]


if __name__ == "__main__":
    raise SystemExit(main())
