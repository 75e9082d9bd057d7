"""Synthetic spectrogram corpora for benchmarks and distortion studies.

Random-walk matrices mimic the feel of log-mel features: each bin sits on
its own base level and drifts slowly over time. All generation is
deterministic given the seed (a fixed PCG64 stream), so command-line runs
that build their own corpora are reproducible.
"""

from __future__ import annotations

import numpy as np


def random_walk_spectrogram(
    seed: int,
    n_frames: int,
    n_bins: int,
    base_level: float = -4.0,
    level_spread: float = 2.0,
    step: float = 0.05,
) -> np.ndarray:
    """One matrix: per-bin base levels plus a per-bin Gaussian random walk."""
    g = np.random.Generator(np.random.PCG64(seed))
    base = base_level + level_spread * g.standard_normal(n_bins)
    walk = np.cumsum(step * g.standard_normal((n_frames, n_bins)), axis=0)
    return np.ascontiguousarray(base[None, :] + walk, dtype=np.float32)


def random_walk_corpus(seed: int, count: int, n_frames: int, n_bins: int) -> list[np.ndarray]:
    """``count`` matrices with per-item seeds spun off ``seed``."""
    return [
        random_walk_spectrogram(seed * 1_000_003 + i, n_frames, n_bins)
        for i in range(count)
    ]
