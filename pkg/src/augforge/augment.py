"""Spectrogram and waveform augmentation ops.

Stochastic ops take a RandomSource first and document their draw order,
which is part of each op's contract: given the same seed and inputs the
output is bit-identical. Randomness (interval sampling) is kept separate
from deterministic application (splicing, masking) so either half can be
tested or reused on its own.

Interval conventions are half-open ``[start, end)`` over frame (or bin)
indices. Splicing removes the covered rows and concatenates what is left,
so the output is shorter; masking overwrites the covered rows in place of
a value and preserves length.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError
from .rng import RandomSource
from .signal_io import Waveform, as_matrix

TIME_AXIS = "time"
FREQ_AXIS = "frequency"

FILL_ZERO = "zero"
FILL_MEAN = "mean"


@dataclass(frozen=True)
class Interval:
    """Half-open index range ``[start, end)``."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid interval [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start


class IntervalSet:
    """An ordered list of possibly overlapping intervals plus their union.

    ``intervals`` preserves sampling order (some callers drop from the end
    of that list); ``merged`` is the canonical union: sorted, disjoint,
    zero-length entries removed, adjacent runs coalesced.
    """

    def __init__(self, intervals=()):
        self.intervals: tuple[Interval, ...] = tuple(intervals)
        self.merged: tuple[tuple[int, int], ...] = merge_intervals(self.intervals)

    @property
    def union_length(self) -> int:
        return sum(e - s for s, e in self.merged)

    def __len__(self) -> int:
        return len(self.intervals)

    def __repr__(self) -> str:
        spans = ", ".join(f"[{iv.start}, {iv.end})" for iv in self.intervals)
        return f"IntervalSet({spans})"


def merge_intervals(intervals) -> tuple[tuple[int, int], ...]:
    """Sorted disjoint union of ``intervals`` as (start, end) pairs."""
    spans = sorted((iv.start, iv.end) for iv in intervals if iv.end > iv.start)
    merged: list[list[int]] = []
    for start, end in spans:
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return tuple((s, e) for s, e in merged)


@dataclass(frozen=True)
class SpliceConfig:
    """How many intervals to draw and how wide they may be.

    ``max_width`` is exclusive: drawn lengths lie in ``[0, max_width)``,
    clamped further by the extent being sampled. ``min_retained`` is the
    fewest frames a splice may leave standing.
    """

    n_intervals: int
    max_width: int
    min_retained: int = 1

    def __post_init__(self):
        if self.n_intervals < 0:
            raise ValueError("n_intervals must be >= 0")
        if self.max_width < 1:
            raise ValueError("max_width must be >= 1")
        if self.min_retained < 0:
            raise ValueError("min_retained must be >= 0")


@dataclass(frozen=True)
class TokenSpan:
    """Frame range ``[start_frame, end_frame)`` occupied by one token."""

    start_frame: int
    end_frame: int
    token_id: int | str = 0

    def __post_init__(self):
        if not 0 <= self.start_frame <= self.end_frame:
            raise ValueError(
                f"invalid span [{self.start_frame}, {self.end_frame})"
            )


@dataclass
class LabeledSample:
    """Features (a spectrogram matrix or a Waveform) with a soft label."""

    features: np.ndarray | Waveform
    label: np.ndarray = field(default_factory=lambda: np.array([1.0], dtype=np.float32))

    def __post_init__(self):
        self.label = np.asarray(self.label, dtype=np.float32)
        if self.label.ndim != 1 or len(self.label) == 0:
            raise ValueError("label must be a non-empty 1-D vector")
        if (self.label < 0).any() or abs(float(self.label.sum()) - 1.0) > 1e-6:
            raise ValueError("label entries must be >= 0 and sum to 1")


# ---------------------------------------------------------------------------
# Interval sampling and deterministic application


def sample_intervals(rng: RandomSource, extent: int, cfg: SpliceConfig) -> IntervalSet:
    """Draw ``cfg.n_intervals`` ranges over ``[0, extent)``; they may overlap.

    Per interval, in order: ``length = rng.next_below(min(max_width, extent))``
    then ``start = rng.next_below(extent - length)``. Two draws per interval.
    """
    if extent < 1:
        raise ValueError("extent must be >= 1")
    width = min(cfg.max_width, extent)
    out = []
    for _ in range(cfg.n_intervals):
        length = rng.next_below(width)
        start = rng.next_below(extent - length)
        out.append(Interval(start, start + length))
    return IntervalSet(out)


def _check_bounds(intervals: IntervalSet, extent: int, what: str) -> None:
    for iv in intervals.intervals:
        if iv.end > extent:
            raise BoundsError(f"interval [{iv.start}, {iv.end}) outside {what} extent {extent}")


def _kept_ranges(extent: int, intervals: IntervalSet, min_retained: int) -> list[tuple[int, int]]:
    """Complement of the interval union, after enforcing ``min_retained``.

    If removal would leave fewer than ``min_retained`` positions, intervals
    are dropped from the end of the sampling-ordered list until enough
    survive; an empty list removes nothing.
    """
    active = list(intervals.intervals)
    merged = intervals.merged
    while active and extent - sum(e - s for s, e in merged) < min_retained:
        active.pop()
        merged = merge_intervals(active)
    kept = []
    cursor = 0
    for start, end in merged:
        if start > cursor:
            kept.append((cursor, start))
        cursor = max(cursor, end)
    if cursor < extent:
        kept.append((cursor, extent))
    return kept


def apply_splice(matrix, intervals: IntervalSet, min_retained: int = 0) -> np.ndarray:
    """Remove the frames covered by ``intervals`` and close the gaps.

    Kept frames appear in their original order with their exact cell values;
    overlapping intervals are removed once. Returns a new array.
    """
    m = as_matrix(matrix)
    _check_bounds(intervals, m.shape[0], "frame")
    kept = _kept_ranges(m.shape[0], intervals, min_retained)
    if not kept:
        return np.empty((0, m.shape[1]), dtype=m.dtype)
    if len(kept) == 1:
        s, e = kept[0]
        return m[s:e].copy()
    return np.concatenate([m[s:e] for s, e in kept], axis=0)


def _resolve_fill(m: np.ndarray, fill) -> np.float32:
    if isinstance(fill, str):
        if fill == FILL_ZERO:
            return np.float32(0.0)
        if fill == FILL_MEAN:
            return np.float32(m.mean(dtype=np.float64))
        raise ValueError(f"unknown fill policy {fill!r}")
    value = float(fill)
    if not math.isfinite(value):
        raise ValueError("fill value must be finite")
    return np.float32(value)


def apply_mask(matrix, intervals: IntervalSet, fill=FILL_ZERO, axis: str = TIME_AXIS) -> np.ndarray:
    """Overwrite the covered frames (or bins) with a fill value; length kept.

    ``fill`` is ``"zero"``, ``"mean"`` (the mean of all input cells, taken
    before any overwriting), or a finite number.
    """
    m = as_matrix(matrix)
    if axis not in (TIME_AXIS, FREQ_AXIS):
        raise ValueError(f"axis must be {TIME_AXIS!r} or {FREQ_AXIS!r}")
    extent = m.shape[0] if axis == TIME_AXIS else m.shape[1]
    _check_bounds(intervals, extent, axis)
    out = m.copy()
    if intervals.merged:
        value = _resolve_fill(m, fill)
        for start, end in intervals.merged:
            if axis == TIME_AXIS:
                out[start:end, :] = value
            else:
                out[:, start:end] = value
    return out


# ---------------------------------------------------------------------------
# Spectrogram ops


def splice_out(rng: RandomSource, matrix, cfg: SpliceConfig) -> np.ndarray:
    """Drop ``cfg.n_intervals`` random time ranges and concatenate the rest.

    Draws: two per interval, as in sample_intervals. An empty input is
    returned unchanged without drawing.
    """
    m = as_matrix(matrix)
    if m.shape[0] == 0:
        return m.copy()
    intervals = sample_intervals(rng, m.shape[0], cfg)
    return apply_splice(m, intervals, min_retained=cfg.min_retained)


def time_mask(rng: RandomSource, matrix, cfg: SpliceConfig, fill=FILL_ZERO) -> np.ndarray:
    """Overwrite random time ranges with ``fill``; same draws as splice_out."""
    m = as_matrix(matrix)
    if m.shape[0] == 0:
        return m.copy()
    intervals = sample_intervals(rng, m.shape[0], cfg)
    return apply_mask(m, intervals, fill=fill, axis=TIME_AXIS)


def freq_mask(rng: RandomSource, matrix, cfg: SpliceConfig, fill=FILL_ZERO) -> np.ndarray:
    """Overwrite random frequency bands with ``fill``; draws over bins."""
    m = as_matrix(matrix)
    if m.shape[1] == 0:
        return m.copy()
    intervals = sample_intervals(rng, m.shape[1], cfg)
    return apply_mask(m, intervals, fill=fill, axis=FREQ_AXIS)


def semantic_intervals(rng: RandomSource, spans, ratio: float) -> IntervalSet:
    """Pick ``ceil(ratio * len(spans))`` distinct token spans uniformly.

    Selection is a partial Fisher-Yates shuffle: for slot i the draw is
    ``rng.next_below(len(spans) - i)`` giving the swap offset. The returned
    intervals keep selection order.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    spans = list(spans)
    n = len(spans)
    k = math.ceil(ratio * n)
    order = list(range(n))
    for i in range(k):
        j = i + rng.next_below(n - i)
        order[i], order[j] = order[j], order[i]
    return IntervalSet(
        Interval(spans[i].start_frame, spans[i].end_frame) for i in order[:k]
    )


def validate_token_spans(spans, n_frames: int) -> None:
    """Check spans are sorted, non-overlapping, and inside [0, n_frames)."""
    prev_end = 0
    for span in spans:
        if span.start_frame < prev_end:
            raise ValueError(
                f"token span [{span.start_frame}, {span.end_frame}) overlaps or is out of order"
            )
        if span.end_frame > n_frames:
            raise BoundsError(
                f"token span [{span.start_frame}, {span.end_frame}) outside {n_frames} frames"
            )
        prev_end = span.end_frame


# ---------------------------------------------------------------------------
# Sample mixing


def _standard_normal(rng: RandomSource) -> float:
    # Box-Muller; u1 is reflected into (0, 1] so the log is always defined.
    u1 = 1.0 - rng.next_unit()
    u2 = rng.next_unit()
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

def _gamma_variate(rng: RandomSource, shape: float) -> float:
    # Marsaglia-Tsang squeeze method; shapes below 1 are boosted through
    # Gamma(shape + 1) * U^(1/shape).
    if shape < 1.0:
        u = 1.0 - rng.next_unit()
        return _gamma_variate(rng, shape + 1.0) * u ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = _standard_normal(rng)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = rng.next_unit()
        if u < 1.0 - 0.0331 * x**4:
            return d * v
        if u <= 0.0 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v


def sample_beta(rng: RandomSource, alpha: float) -> float:
    """Symmetric Beta(alpha, alpha) variate via two gamma draws.

    Consumes a variable number of ``next_unit`` draws (rejection sampling).
    The result is clamped into the open interval (0, 1).
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    x = _gamma_variate(rng, alpha)
    y = _gamma_variate(rng, alpha)
    if x + y == 0.0:
        return 0.5
    lam = x / (x + y)
    return min(max(lam, sys.float_info.min), 1.0 - sys.float_info.epsilon / 2)


def mixup(a: LabeledSample, b: LabeledSample, lam: float) -> LabeledSample:
    """Convex blend ``lam * a + (1 - lam) * b`` of features and labels.

    Endpoints are exact: lam 1 returns a copy of ``a``, lam 0 of ``b``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    if len(a.label) != len(b.label):
        raise ValueError("label dimensions differ")

    if isinstance(a.features, Waveform) and isinstance(b.features, Waveform):
        if len(a.features.samples) != len(b.features.samples):
            raise ValueError("waveform lengths differ")
        if a.features.sample_rate != b.features.sample_rate:
            raise ValueError("sample rates differ")
        if lam == 1.0:
            return _copy_sample(a)
        if lam == 0.0:
            return _copy_sample(b)
        mixed = lam * a.features.samples + (1.0 - lam) * b.features.samples
        features: np.ndarray | Waveform = Waveform(mixed, a.features.sample_rate)
    elif isinstance(a.features, Waveform) or isinstance(b.features, Waveform):
        raise ValueError("cannot mix a waveform with a spectrogram")
    else:
        fa, fb = as_matrix(a.features), as_matrix(b.features)
        if fa.shape != fb.shape:
            raise ValueError(f"feature shapes differ: {fa.shape} vs {fb.shape}")
        if lam == 1.0:
            return _copy_sample(a)
        if lam == 0.0:
            return _copy_sample(b)
        features = (lam * fa + (1.0 - lam) * fb).astype(np.float32)
    label = (lam * a.label + (1.0 - lam) * b.label).astype(np.float32)
    return LabeledSample(features, label)


def _copy_sample(s: LabeledSample) -> LabeledSample:
    if isinstance(s.features, Waveform):
        features: np.ndarray | Waveform = Waveform(s.features.samples.copy(), s.features.sample_rate)
    else:
        features = as_matrix(s.features).copy()
    return LabeledSample(features, s.label.copy())


def cutmix(a: LabeledSample, b: LabeledSample, time_iv: Interval, freq_iv: Interval) -> LabeledSample:
    """Transplant ``b``'s cells inside a time-by-frequency rectangle into ``a``.

    Labels blend with weight ``1 - rect_area / total_area`` on ``a``,
    matching the fraction of surviving cells.
    """
    fa, fb = as_matrix(a.features), as_matrix(b.features)
    if fa.shape != fb.shape:
        raise ValueError(f"feature shapes differ: {fa.shape} vs {fb.shape}")
    if len(a.label) != len(b.label):
        raise ValueError("label dimensions differ")
    n_frames, n_bins = fa.shape
    if time_iv.end > n_frames:
        raise BoundsError(f"time interval [{time_iv.start}, {time_iv.end}) outside {n_frames} frames")
    if freq_iv.end > n_bins:
        raise BoundsError(f"frequency interval [{freq_iv.start}, {freq_iv.end}) outside {n_bins} bins")

    out = fa.copy()
    out[time_iv.start : time_iv.end, freq_iv.start : freq_iv.end] = fb[
        time_iv.start : time_iv.end, freq_iv.start : freq_iv.end
    ]
    total = fa.size
    lam = 1.0 - (time_iv.length * freq_iv.length) / total if total else 1.0
    if lam == 1.0:
        label = a.label.copy()
    elif lam == 0.0:
        label = b.label.copy()
    else:
        label = (lam * a.label + (1.0 - lam) * b.label).astype(np.float32)
    return LabeledSample(out, label)


# ---------------------------------------------------------------------------
# Time warping


def time_warp(rng: RandomSource, matrix, max_shift: int) -> np.ndarray:
    """Stretch one side of the time axis and squeeze the other.

    Draws, in order: ``anchor = max_shift + rng.next_below(tau - 2 * max_shift)``
    then ``shift = rng.next_below(2 * max_shift + 1) - max_shift``. Output
    frame t follows the piecewise-linear map taking 0 to 0, ``anchor + shift``
    to ``anchor``, and ``tau - 1`` to itself, with linear interpolation
    between source frames. If the shifted anchor would land on an endpoint
    it is nudged one frame inward so the map stays monotone. Zero shift is
    the identity. Length is preserved; requires ``tau > 2 * max_shift``.
    """
    m = as_matrix(matrix)
    tau = m.shape[0]
    if max_shift < 0:
        raise ValueError("max_shift must be >= 0")
    if tau <= 2 * max_shift:
        raise ValueError(f"need more than {2 * max_shift} frames, got {tau}")

    anchor = max_shift + rng.next_below(tau - 2 * max_shift)
    shift = rng.next_below(2 * max_shift + 1) - max_shift
    if shift == 0 or tau < 3:
        return m.copy()
    dest = min(max(anchor + shift, 1), tau - 2)

    t = np.arange(tau, dtype=np.float64)
    src = np.empty(tau, dtype=np.float64)
    left = t <= dest
    src[left] = t[left] * (anchor / dest)
    src[~left] = anchor + (t[~left] - dest) * ((tau - 1.0 - anchor) / (tau - 1.0 - dest))
    src[0] = 0.0
    src[-1] = tau - 1.0

    i0 = np.floor(src).astype(np.intp)
    i0 = np.minimum(i0, tau - 2)
    frac = (src - i0)[:, None]
    out = (1.0 - frac) * m[i0] + frac * m[i0 + 1]
    return out.astype(np.float32)


# ---------------------------------------------------------------------------
# Waveform ops


def splice_out_wave(rng: RandomSource, wave: Waveform, cfg: SpliceConfig) -> Waveform:
    """splice_out over raw samples: remove random ranges, concatenate the rest.

    ``cfg`` is measured in samples; draws match sample_intervals.
    """
    n = len(wave.samples)
    if n == 0:
        return Waveform(wave.samples.copy(), wave.sample_rate)
    intervals = sample_intervals(rng, n, cfg)
    kept = _kept_ranges(n, intervals, cfg.min_retained)
    if not kept:
        return Waveform(np.empty(0, dtype=np.float32), wave.sample_rate)
    out = np.concatenate([wave.samples[s:e] for s, e in kept])
    return Waveform(out, wave.sample_rate)


def fade(rng: RandomSource, wave: Waveform, max_fraction: float = 0.5) -> Waveform:
    """Linear fade-in and fade-out of independently drawn sizes.

    Draws, in order: fade-in size then fade-out size, each
    ``rng.next_below(floor(max_fraction * len) + 1)``. Gain over a fade of
    size s is ``i / s`` at offset i from the faded end; size 0 leaves that
    end untouched.
    """
    if not 0.0 < max_fraction <= 0.5:
        raise ValueError("max_fraction must lie in (0, 0.5]")
    x = wave.samples
    n = len(x)
    bound = int(math.floor(max_fraction * n)) + 1
    fade_in = rng.next_below(bound)
    fade_out = rng.next_below(bound)
    out = x.copy()
    if fade_in > 0:
        ramp = np.arange(fade_in, dtype=np.float32) / np.float32(fade_in)
        out[:fade_in] *= ramp
    if fade_out > 0:
        ramp = np.arange(fade_out, dtype=np.float32) / np.float32(fade_out)
        out[n - fade_out :] *= ramp[::-1]
    return Waveform(out, wave.sample_rate)


def speed_perturb(wave: Waveform, factor: float) -> Waveform:
    """Resample to ``round(len / factor)`` samples by linear interpolation.

    Output position i reads the input at ``i * factor``, clamped to the last
    sample; factor 1 is the identity.
    """
    if not factor > 0.0 or not math.isfinite(factor):
        raise ValueError("factor must be positive and finite")
    x = wave.samples
    n = len(x)
    if n == 0 or factor == 1.0:
        return Waveform(x.copy(), wave.sample_rate)
    out_len = int(math.floor(n / factor + 0.5))
    if out_len == 0:
        return Waveform(np.empty(0, dtype=np.float32), wave.sample_rate)
    pos = np.minimum(np.arange(out_len, dtype=np.float64) * factor, n - 1.0)
    i0 = np.minimum(np.floor(pos).astype(np.intp), max(n - 2, 0))
    frac = pos - i0
    if n == 1:
        out = np.repeat(x[:1], out_len)
    else:
        out = (1.0 - frac) * x.astype(np.float64)[i0] + frac * x.astype(np.float64)[i0 + 1]
    return Waveform(out.astype(np.float32), wave.sample_rate)
