"""Command-line front end.

Subcommands:

* ``featurize``: WAV files to log-mel SPGM spectrograms.
* ``augment``: apply a JSON-configured pipeline to a directory of SPGM or
  WAV files, deterministically per seed.
* ``bench``: padded-batch proxy benchmark over a synthetic corpus.
* ``stats``: statistic-distortion sweep over an SPGM corpus.
* ``score``: corpus WER with a bootstrap standard error and interval.
* ``abtest``: matched-pairs significance test between two hypothesis files.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 data or format error.

``AUGFORGE_THREADS`` caps the worker threads used for per-file work
(default 1). Outputs are byte-identical regardless of the thread count:
every file's random stream is derived from the base seed and the file's
index in sorted order, never from scheduling.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .analysis import SWEEP_METHODS, distortion_sweep, write_distortion_csv
from .bench import CostModel, run_benchmark
from .errors import AugforgeError, ConfigError, FormatError
from .evalstats import bootstrap_wer, mapsswe, score_files
from .features import FeatureConfig, extract_logmel
from .pipeline import apply_pipeline, load_pipeline_config
from .rng import SplitMix64Source, derive_seed
from .signal_io import Waveform, read_spgm, read_wav, write_spgm, write_wav
from .synth import random_walk_corpus
from .augment import LabeledSample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA = 3

_BENCH_BINS = 80


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AugforgeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="augforge", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="WAV files to log-mel SPGM spectrograms")
    p.add_argument("--in", dest="input", required=True, help="WAV file or directory")
    p.add_argument("--out", dest="output", required=True, help="output directory")
    p.add_argument("--frame-ms", type=float, default=25.0)
    p.add_argument("--hop-ms", type=float, default=10.0)
    p.add_argument("--mels", type=int, default=80)
    p.add_argument("--fmin", type=float, default=0.0)
    p.add_argument("--fmax", type=float, default=None)
    p.set_defaults(handler=_cmd_featurize)

    p = sub.add_parser("augment", help="apply a pipeline config to a corpus")
    p.add_argument("--config", required=True, help="JSON pipeline config")
    p.add_argument("--in", dest="input", required=True, help="SPGM/WAV file or directory")
    p.add_argument("--out", dest="output", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.set_defaults(handler=_cmd_augment)

    p = sub.add_parser("bench", help="padded-batch proxy benchmark")
    p.add_argument("--n-masks", default="2,4,8,16,32,64", help="comma-separated counts")
    p.add_argument("--t", type=int, default=40, help="max interval width (frames)")
    p.add_argument("--tau", type=int, default=1000, help="frames per synthetic item")
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--report", required=True, help="output JSON path")
    p.set_defaults(handler=_cmd_bench)

    p = sub.add_parser("stats", help="statistic-distortion sweep over SPGM files")
    p.add_argument("--in", dest="input", required=True, help="directory of SPGM files")
    p.add_argument("--methods", default=",".join(SWEEP_METHODS))
    p.add_argument("--n-masks", default="2,4,8,16,32,64")
    p.add_argument("--t", type=int, default=40)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--report", required=True, help="output CSV path")
    p.set_defaults(handler=_cmd_stats)

    p = sub.add_parser("score", help="corpus WER with bootstrap uncertainty")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--b", type=int, default=1000, help="bootstrap resamples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_score)

    p = sub.add_parser("abtest", help="matched-pairs test between two systems")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp1", required=True)
    p.add_argument("--hyp2", required=True)
    p.set_defaults(handler=_cmd_abtest)

    return parser


def _worker_count(n_items: int) -> int:
    raw = os.environ.get("AUGFORGE_THREADS", "")
    if not raw:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"AUGFORGE_THREADS must be an integer, got {raw!r}")
    return max(1, min(cap, n_items))


def _map_files(fn, items):
    """Run fn over items, threaded when AUGFORGE_THREADS allows."""
    workers = _worker_count(len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _collect_inputs(root: Path, suffixes) -> list[Path]:
    if root.is_dir():
        return sorted(p for p in root.iterdir() if p.suffix.lower() in suffixes)
    if not root.exists():
        raise FileNotFoundError(f"input path {root} does not exist")
    return [root]


def _report_failures(failures) -> int:
    failures = sorted(failures, key=lambda pair: str(pair[0]))
    for path, exc in failures:
        print(f"{path}: {exc}", file=sys.stderr)
    first = failures[0][1]
    if isinstance(first, ConfigError):
        return EXIT_USAGE
    if isinstance(first, OSError):
        return EXIT_IO
    return EXIT_DATA


def _cmd_featurize(args) -> int:
    cfg = FeatureConfig(
        frame_len_ms=args.frame_ms,
        hop_ms=args.hop_ms,
        n_mels=args.mels,
        fmin=args.fmin,
        fmax=args.fmax,
    )
    files = _collect_inputs(Path(args.input), {".wav"})
    if not files:
        print(f"warning: no WAV files under {args.input}", file=sys.stderr)
        return EXIT_OK
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures = []

    def one(path: Path):
        try:
            wave = read_wav(path)
            write_spgm(out_dir / (path.stem + ".spgm"), extract_logmel(wave, cfg))
        except (AugforgeError, OSError, ValueError) as exc:
            failures.append((path, exc))

    _map_files(one, files)
    return _report_failures(failures) if failures else EXIT_OK


def _cmd_augment(args) -> int:
    config = load_pipeline_config(args.config)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise ConfigError("--seed must be an integer in [0, 2^64)")
    base_seed = config.seed if args.seed is None else args.seed
    files = _collect_inputs(Path(args.input), {".spgm", ".wav"})
    if not files:
        print(f"warning: no SPGM or WAV files under {args.input}", file=sys.stderr)
        return EXIT_OK
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures = []

    def one(indexed):
        index, path = indexed
        try:
            if path.suffix.lower() == ".wav":
                sample = LabeledSample(read_wav(path))
            else:
                sample = LabeledSample(read_spgm(path))
            rng = SplitMix64Source(derive_seed(base_seed, index))
            result = apply_pipeline(rng, sample, config.steps)
            if isinstance(result.features, Waveform):
                write_wav(out_dir / path.name, result.features)
            else:
                write_spgm(out_dir / path.name, result.features)
        except (AugforgeError, OSError, ValueError) as exc:
            failures.append((path, exc))

    _map_files(one, list(enumerate(files)))
    return _report_failures(failures) if failures else EXIT_OK


def _parse_int_list(raw: str, flag: str) -> list[int]:
    try:
        values = [int(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} must be a comma-separated integer list, got {raw!r}")
    if not values or any(v < 0 for v in values):
        raise ConfigError(f"{flag} must name non-negative counts")
    return values


def _cmd_bench(args) -> int:
    n_values = _parse_int_list(args.n_masks, "--n-masks")
    if args.tau < 1 or args.t < 1:
        raise ConfigError("--tau and --t must be positive")
    corpus = random_walk_corpus(seed=0, count=args.batch, n_frames=args.tau, n_bins=_BENCH_BINS)
    report = run_benchmark(
        corpus,
        n_values=n_values,
        max_width=args.t,
        repetitions=args.reps,
        batch_size=args.batch,
        cost=CostModel(),
    )
    Path(args.report).write_text(report.to_json() + "\n")
    return EXIT_OK


def _cmd_stats(args) -> int:
    root = Path(args.input)
    if not root.is_dir():
        raise FileNotFoundError(f"input directory {root} does not exist")
    corpus = [read_spgm(p) for p in sorted(root.glob("*.spgm"))]
    if not corpus:
        raise ConfigError(f"no SPGM files under {root}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    n_values = _parse_int_list(args.n_masks, "--n-masks")
    if args.trials < 1:
        raise ConfigError("--trials must be positive")
    reports = distortion_sweep(corpus, methods, n_values, args.t, args.trials)
    write_distortion_csv(args.report, reports)
    return EXIT_OK


def _json_number(value: float):
    if math.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf"


def _cmd_score(args) -> int:
    if args.b < 2:
        raise ConfigError("--b must be at least 2")
    counts = score_files(args.ref, args.hyp)
    result = bootstrap_wer(counts, args.b, SplitMix64Source(args.seed))
    print(
        json.dumps(
            {
                "wer": result.wer,
                "std_error": result.std_error,
                "ci95": [result.ci95[0], result.ci95[1]],
                "resamples": result.resamples,
                "utterances": len(counts),
            }
        )
    )
    return EXIT_OK


def _cmd_abtest(args) -> int:
    counts1 = score_files(args.ref, args.hyp1)
    counts2 = score_files(args.ref, args.hyp2)
    result = mapsswe(counts1, counts2)
    print(
        json.dumps(
            {
                "z": _json_number(result.z),
                "p": result.p,
                "n": result.n,
                "mean_diff": result.mean_diff,
            }
        )
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
