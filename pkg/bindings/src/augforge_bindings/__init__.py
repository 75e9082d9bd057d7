"""Array-in, array-out wrappers over the augforge augmentation ops.

Dataloader glue. A training loop that already holds its features as numpy
arrays should not round-trip through files or pipeline configs just to
augment a batch element. Each function here checks one strict array
contract (C-contiguous 2-D float32 with every cell finite), seeds a fresh
random stream, delegates to the corresponding augforge op, and returns a
new buffer that shares no memory with any input. Given equal seeds the
output is bit for bit what the core op produces, so results line up with
seeded CLI runs on the same data.

There is no module-level state; calls are reentrant and threads may invoke
them concurrently on distinct inputs.
"""

from __future__ import annotations

import numpy as np

from augforge import (
    FILL_ZERO,
    LabeledSample,
    SpliceConfig,
    SplitMix64Source,
    freq_mask,
    mixup,
    splice_out,
    time_mask,
)

__version__ = "0.1.0"

__all__ = [
    "bind_freq_mask",
    "bind_mixup",
    "bind_splice_out",
    "bind_time_mask",
]


def _checked(array, name: str) -> np.ndarray:
    """Reject anything but a finite, C-contiguous 2-D float32 ndarray.

    Conversion is deliberately not offered: a silent copy or cast here
    would hide a dataloader handing over the wrong buffer layout.
    """
    if not isinstance(array, np.ndarray):
        raise TypeError(f"{name} must be a numpy ndarray, got {type(array).__name__}")
    if array.dtype != np.float32:
        raise TypeError(f"{name} must have dtype float32, got {array.dtype}")
    if array.ndim != 2:
        raise TypeError(f"{name} must be 2-D (frames, bins), got {array.ndim}-D")
    if not array.flags.c_contiguous:
        raise TypeError(f"{name} must be C-contiguous")
    if not np.isfinite(array).all():
        raise ValueError(f"{name} contains non-finite values")
    return array


def _stream(seed) -> SplitMix64Source:
    # Out-of-range seeds would alias after masking; refuse instead.
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise TypeError(f"seed must be an int, got {type(seed).__name__}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must lie in [0, 2^64)")
    return SplitMix64Source(seed)


def bind_splice_out(array, n, t, seed, min_retained=1) -> np.ndarray:
    """Remove ``n`` random time intervals of width below ``t``; close the gaps.

    The output keeps the bin count and loses the covered frames, so it has
    at most as many frames as the input. At least ``min_retained`` frames
    survive; draws that would cut below that are dropped, newest first.
    """
    m = _checked(array, "array")
    cfg = SpliceConfig(n_intervals=n, max_width=t, min_retained=min_retained)
    return splice_out(_stream(seed), m, cfg)


def bind_time_mask(array, n, t, seed, fill=FILL_ZERO) -> np.ndarray:
    """Overwrite ``n`` random time intervals of width below ``t``; length kept.

    ``fill`` is ``"zero"``, ``"mean"`` (the global input mean), or a finite
    number. Equal seeds give the same interval draws as bind_splice_out.
    """
    m = _checked(array, "array")
    cfg = SpliceConfig(n_intervals=n, max_width=t)
    return time_mask(_stream(seed), m, cfg, fill=fill)


def bind_freq_mask(array, n, t, seed, fill=FILL_ZERO) -> np.ndarray:
    """Overwrite ``n`` random frequency bands of width below ``t``; shape kept."""
    m = _checked(array, "array")
    cfg = SpliceConfig(n_intervals=n, max_width=t)
    return freq_mask(_stream(seed), m, cfg, fill=fill)


def bind_mixup(array_a, array_b, label_a, label_b, lam) -> tuple[np.ndarray, np.ndarray]:
    """Convex blend of two equally shaped arrays and their label vectors.

    Returns ``lam * a + (1 - lam) * b`` applied to both features and labels,
    as new float32 buffers. Labels must be non-negative 1-D vectors of equal
    length summing to one. Endpoints are exact copies: ``lam`` 1 gives the
    first pair, 0 the second.
    """
    a = LabeledSample(_checked(array_a, "array_a"), label_a)
    b = LabeledSample(_checked(array_b, "array_b"), label_b)
    mixed = mixup(a, b, lam)
    return mixed.features, mixed.label
