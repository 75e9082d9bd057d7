"""Padded-batch cost benchmark.

The question answered here: when an augmentation shortens sequences, how
much padded-batch compute and memory does a training step save? Instead of
a full model, a proxy workload with an explicit cost shape runs on the true
(unpadded) lengths: per sample, ``linear_passes`` fused multiply-add sweeps
over the frames plus ``quad_passes`` rounds of all pairwise frame dot
products, the latter giving the quadratic length term that dominates
attention-style layers. Padded bytes are the closed form
``batch * max_len * n_bins * 4``.

Timing medians are taken over repeated runs with the process pinned to one
logical CPU (where the platform allows), so multi-threaded math libraries
cannot smear the comparison.
"""

from __future__ import annotations

import json
import os
import statistics
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .augment import FILL_ZERO, SpliceConfig, splice_out, time_mask
from .errors import ConfigError
from .rng import SplitMix64Source, derive_seed
from .signal_io import as_matrix

BENCH_METHODS = ("splice_out", "tm_zero")
_METHOD_CODES = {"splice_out": 1, "tm_zero": 2}

ROW_KEYS = (
    "method",
    "N",
    "T",
    "time_ms_median",
    "padded_bytes",
    "sum_len",
    "sum_len_sq",
    "padding_waste",
)


@dataclass(frozen=True)
class CostModel:
    """Per-sample proxy work: linear and quadratic passes over true length."""

    linear_passes: int = 1
    quad_passes: int = 1

    def __post_init__(self):
        if self.linear_passes < 0 or self.quad_passes < 0:
            raise ValueError("pass counts must be >= 0")
        if self.linear_passes == 0 and self.quad_passes == 0:
            raise ValueError("cost model must do some work")


@dataclass
class Batch:
    """Zero-padded (batch, max_len, n_bins) float32 tensor plus true lengths."""

    data: np.ndarray
    lengths: tuple[int, ...]

    @property
    def padded_bytes(self) -> int:
        return self.data.size * 4

    @property
    def padding_waste(self) -> int:
        return self.data.shape[0] * self.data.shape[1] - sum(self.lengths)


def build_padded_batch(samples: Sequence) -> Batch:
    """Stack matrices of equal bin count, zero padding to the longest."""
    if not samples:
        raise ValueError("batch must be non-empty")
    mats = [as_matrix(s) for s in samples]
    n_bins = mats[0].shape[1]
    for m in mats:
        if m.shape[1] != n_bins:
            raise ValueError("all batch members must share the bin count")
    lengths = tuple(m.shape[0] for m in mats)
    max_len = max(lengths)
    data = np.zeros((len(mats), max_len, n_bins), dtype=np.float32)
    for i, m in enumerate(mats):
        data[i, : m.shape[0]] = m
    return Batch(data=data, lengths=lengths)


def proxy_step(batch: Batch, cost: CostModel = CostModel()) -> tuple[float, float]:
    """One training-step stand-in; returns (elapsed seconds, checksum).

    Work runs on each sample's true length only, the way length-aware
    kernels would. The checksum folds in results so none of the arithmetic
    is removable as dead code.
    """
    start = time.perf_counter()
    checksum = 0.0
    for i, length in enumerate(batch.lengths):
        if length == 0:
            continue
        x = batch.data[i, :length]
        if cost.linear_passes:
            acc = np.zeros_like(x)
            for _ in range(cost.linear_passes):
                np.multiply(acc, np.float32(0.999), out=acc)
                np.add(acc, x, out=acc)
            checksum += float(acc[-1, -1])
        if cost.quad_passes:
            for _ in range(cost.quad_passes):
                gram = x @ x.T
                checksum += float(gram[-1, -1])
    return time.perf_counter() - start, checksum


@contextmanager
def _pinned_to_one_cpu():
    # Best effort; platforms without sched affinity run unpinned.
    getaff = getattr(os, "sched_getaffinity", None)
    setaff = getattr(os, "sched_setaffinity", None)
    if getaff is None or setaff is None:
        yield
        return
    saved = getaff(0)
    try:
        setaff(0, {min(saved)})
        yield
    finally:
        setaff(0, saved)


@dataclass
class BenchReport:
    config: dict
    rows: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"config": self.config, "rows": self.rows}, indent=2)

    def row(self, method: str, n: int) -> dict:
        for r in self.rows:
            if r["method"] == method and r["N"] == n:
                return r
        raise KeyError(f"no row for {method} at N={n}")


def run_benchmark(
    corpus: Sequence,
    methods: Sequence[str] = BENCH_METHODS,
    n_values: Sequence[int] = (2, 4, 8, 16, 32, 64),
    max_width: int = 40,
    repetitions: int = 5,
    batch_size: int = 32,
    cost: CostModel = CostModel(),
    base_seed: int = 0,
) -> BenchReport:
    """Time the proxy step over an augmented corpus for every (method, N).

    Per cell: every corpus item is augmented with a fresh derived seed, the
    results are packed into padded batches, and one repetition times the
    proxy step over all batches; the reported time is the median repetition
    in milliseconds. Augmentation happens before the clock starts.
    """
    if repetitions < 5:
        raise ConfigError("need at least 5 repetitions for a stable median")
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    if not corpus:
        raise ValueError("corpus must be non-empty")
    for method in methods:
        if method not in _METHOD_CODES:
            raise ConfigError(f"unknown method {method!r}; expected one of {BENCH_METHODS}")

    mats = [as_matrix(m) for m in corpus]
    report = BenchReport(
        config={
            "methods": list(methods),
            "n_values": list(n_values),
            "t": max_width,
            "repetitions": repetitions,
            "batch_size": batch_size,
            "corpus_size": len(mats),
            "n_bins": mats[0].shape[1],
            "linear_passes": cost.linear_passes,
            "quad_passes": cost.quad_passes,
            "seed": base_seed,
        }
    )

    total_checksum = 0.0
    for method in methods:
        code = _METHOD_CODES[method]
        for n in n_values:
            cfg = SpliceConfig(n_intervals=n, max_width=max_width)
            augmented = []
            for idx, item in enumerate(mats):
                seed = derive_seed(derive_seed(derive_seed(base_seed, code), n), idx)
                rng = SplitMix64Source(seed)
                if method == "splice_out":
                    augmented.append(splice_out(rng, item, cfg))
                else:
                    augmented.append(time_mask(rng, item, cfg, fill=FILL_ZERO))

            batches = [
                build_padded_batch(augmented[i : i + batch_size])
                for i in range(0, len(augmented), batch_size)
            ]
            checksum = 0.0
            with _pinned_to_one_cpu():
                proxy_step(batches[0], cost)  # warm caches and library state
                times = []
                for _ in range(repetitions):
                    elapsed = 0.0
                    for batch in batches:
                        seconds, check = proxy_step(batch, cost)
                        elapsed += seconds
                        checksum += check
                    times.append(elapsed)

            total_checksum += checksum
            lengths = [length for b in batches for length in b.lengths]
            report.rows.append(
                {
                    "method": method,
                    "N": n,
                    "T": max_width,
                    "time_ms_median": statistics.median(times) * 1000.0,
                    "padded_bytes": sum(b.padded_bytes for b in batches),
                    "sum_len": sum(lengths),
                    "sum_len_sq": sum(l * l for l in lengths),
                    "padding_waste": sum(b.padding_waste for b in batches),
                }
            )
    report.config["checksum"] = total_checksum
    return report
