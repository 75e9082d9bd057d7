"""How much an augmentation disturbs a spectrogram's long-run statistics.

For each trial a fresh seeded stream drives the augmentation, the per-bin
time-averaged mean and population variance of the result are compared to
the input's, and the l1 distances are expressed as percentages of the
input statistic's l1 norm. Percentages are averaged over trials. When a
reference norm is zero (constant or silent input) the absolute l1 distance
is reported instead and the report says so.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .augment import FILL_MEAN, FILL_ZERO, SpliceConfig, splice_out, time_mask
from .errors import ConfigError
from .rng import RandomSource, SplitMix64Source, derive_seed
from .signal_io import as_matrix

AugmentFn = Callable[[np.ndarray, RandomSource], np.ndarray]

SWEEP_METHODS = ("splice_out", "tm_zero", "tm_mean")
_METHOD_CODES = {"splice_out": 1, "tm_zero": 2, "tm_mean": 3}

CSV_COLUMNS = ("method", "N", "T", "mean_distortion_pct", "var_distortion_pct", "trials")


@dataclass(frozen=True)
class DistortionReport:
    method: str
    n_intervals: int
    max_width: int
    mean_distortion_pct: float
    var_distortion_pct: float
    trials: int
    absolute_mean: bool = False  # l1 reported unnormalized: reference norm was 0
    absolute_var: bool = False


def time_avg_stats(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Per-bin mean and population variance over frames, in float64."""
    m = as_matrix(matrix)
    if m.shape[0] == 0:
        raise ValueError("need at least one frame")
    mean = m.mean(axis=0, dtype=np.float64)
    var = m.var(axis=0, dtype=np.float64)
    return mean, var


def distortion(
    matrix,
    augment_fn: AugmentFn,
    trials: int,
    base_seed: int = 0,
    method: str = "custom",
    n_intervals: int = 0,
    max_width: int = 0,
) -> DistortionReport:
    """Average statistic distortion of ``augment_fn`` over seeded trials.

    Trial t runs the closure with a stream seeded ``derive_seed(base_seed, t)``,
    so trials are independent and the whole measurement is reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m = as_matrix(matrix)
    mean_ref, var_ref = time_avg_stats(m)
    mean_norm = float(np.abs(mean_ref).sum())
    var_norm = float(np.abs(var_ref).sum())

    mean_acc = 0.0
    var_acc = 0.0
    for trial in range(trials):
        rng = SplitMix64Source(derive_seed(base_seed, trial))
        augmented = augment_fn(m, rng)
        mean_aug, var_aug = time_avg_stats(augmented)
        mean_l1 = float(np.abs(mean_aug - mean_ref).sum())
        var_l1 = float(np.abs(var_aug - var_ref).sum())
        mean_acc += mean_l1 / mean_norm if mean_norm > 0.0 else mean_l1
        var_acc += var_l1 / var_norm if var_norm > 0.0 else var_l1

    return DistortionReport(
        method=method,
        n_intervals=n_intervals,
        max_width=max_width,
        mean_distortion_pct=100.0 * mean_acc / trials,
        var_distortion_pct=100.0 * var_acc / trials,
        trials=trials,
        absolute_mean=mean_norm == 0.0,
        absolute_var=var_norm == 0.0,
    )


def method_fn(method: str, n_intervals: int, max_width: int) -> AugmentFn:
    """Closure for one named sweep method at a given mask count and width."""
    cfg = SpliceConfig(n_intervals=n_intervals, max_width=max_width)
    if method == "splice_out":
        return lambda m, rng: splice_out(rng, m, cfg)
    if method == "tm_zero":
        return lambda m, rng: time_mask(rng, m, cfg, fill=FILL_ZERO)
    if method == "tm_mean":
        return lambda m, rng: time_mask(rng, m, cfg, fill=FILL_MEAN)
    raise ConfigError(f"unknown method {method!r}; expected one of {SWEEP_METHODS}")


def distortion_sweep(
    corpus: Sequence,
    methods: Sequence[str],
    n_values: Sequence[int],
    max_width: int,
    trials: int,
    base_seed: int = 0,
) -> list[DistortionReport]:
    """Distortion of every method at every mask count, averaged over a corpus."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    for method in methods:
        if method not in _METHOD_CODES:
            raise ConfigError(f"unknown method {method!r}; expected one of {SWEEP_METHODS}")

    reports = []
    for method in methods:
        code = _METHOD_CODES[method]
        for n in n_values:
            fn = method_fn(method, n, max_width)
            mean_pct = 0.0
            var_pct = 0.0
            absolute_mean = False
            absolute_var = False
            for idx, item in enumerate(corpus):
                item_seed = derive_seed(derive_seed(derive_seed(base_seed, code), n), idx)
                r = distortion(item, fn, trials, base_seed=item_seed)
                mean_pct += r.mean_distortion_pct
                var_pct += r.var_distortion_pct
                absolute_mean |= r.absolute_mean
                absolute_var |= r.absolute_var
            reports.append(
                DistortionReport(
                    method=method,
                    n_intervals=n,
                    max_width=max_width,
                    mean_distortion_pct=mean_pct / len(corpus),
                    var_distortion_pct=var_pct / len(corpus),
                    trials=trials,
                    absolute_mean=absolute_mean,
                    absolute_var=absolute_var,
                )
            )
    return reports


def write_distortion_csv(path, reports: Sequence[DistortionReport]) -> None:
    """Write one row per report with the columns in CSV_COLUMNS."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow(
                [
                    r.method,
                    r.n_intervals,
                    r.max_width,
                    f"{r.mean_distortion_pct:.10g}",
                    f"{r.var_distortion_pct:.10g}",
                    r.trials,
                ]
            )
