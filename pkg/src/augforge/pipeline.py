"""JSON pipeline configs and their deterministic execution.

A config document looks like::

    {"seed": 42,
     "pipeline": [{"op": "splice_out", "n": 2, "t": 40},
                  {"op": "time_mask", "n": 2, "t": 40, "fill": "mean"}]}

Ops run in order against a single sample, sharing one random stream, so a
whole pipeline is reproducible from the seed. Spectrogram ops reject
waveform inputs and vice versa. Validation failures carry the offending
key path (``pipeline[3].t``).

Two ops blend a pair of samples when used as library calls (mixup, cutmix);
inside a pipeline, which transforms one sample at a time, they blend the
sample with itself. Their random draws are still consumed so downstream
ops see the same stream either way.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from . import augment
from .augment import (
    FILL_MEAN,
    FILL_ZERO,
    Interval,
    LabeledSample,
    SpliceConfig,
    TokenSpan,
)
from .errors import ConfigError
from .rng import RandomSource
from .signal_io import Waveform

_MAX_SEED = (1 << 64) - 1

MATRIX_OPS = frozenset(
    {"splice_out", "time_mask", "freq_mask", "semantic_splice", "semantic_mask",
     "cutmix", "time_warp"}
)
WAVE_OPS = frozenset({"fade", "speed_perturb", "splice_out_wave"})
EITHER_OPS = frozenset({"mixup"})
ALL_OPS = MATRIX_OPS | WAVE_OPS | EITHER_OPS


@dataclass(frozen=True)
class PipelineStep:
    op: str
    params: Mapping[str, Any]


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    steps: tuple[PipelineStep, ...]


def load_pipeline_config(path) -> PipelineConfig:
    """Read and validate a JSON config file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_pipeline_config(doc)


def parse_pipeline_config(doc) -> PipelineConfig:
    """Validate a parsed config document; errors name the offending key path."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(doc) - {"seed", "pipeline"}
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= _MAX_SEED:
        raise ConfigError("seed: must be an integer in [0, 2^64)")

    raw_steps = doc.get("pipeline")
    if not isinstance(raw_steps, list):
        raise ConfigError("pipeline: must be a list of op objects")
    steps = tuple(
        _parse_step(step, f"pipeline[{i}]") for i, step in enumerate(raw_steps)
    )
    return PipelineConfig(seed=seed, steps=steps)


def _parse_step(raw, path: str) -> PipelineStep:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: each step must be an object")
    op = raw.get("op")
    if op is None:
        raise ConfigError(f"{path}.op: missing")
    if not isinstance(op, str) or op not in ALL_OPS:
        raise ConfigError(f"{path}.op: unknown op {op!r}")
    params = {k: v for k, v in raw.items() if k != "op"}
    validator = _VALIDATORS[op]
    return PipelineStep(op=op, params=validator(params, path))


def _int_param(params, path, key, minimum, default=None, required=False):
    if key not in params:
        if required:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    v = params[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{path}.{key}: must be an integer")
    if v < minimum:
        raise ConfigError(f"{path}.{key}: must be >= {minimum}")
    return v


def _float_param(params, path, key, default=None, required=False):
    if key not in params:
        if required:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{path}.{key}: must be a finite number")
    return float(v)


def _reject_unknown(params, path, allowed):
    unknown = set(params) - set(allowed)
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown parameter")


def _fill_param(params, path):
    fill = params.get("fill", FILL_ZERO)
    if isinstance(fill, str):
        if fill not in (FILL_ZERO, FILL_MEAN):
            raise ConfigError(f'{path}.fill: must be "zero", "mean", or a number')
        return fill
    if isinstance(fill, bool) or not isinstance(fill, (int, float)) or not math.isfinite(fill):
        raise ConfigError(f'{path}.fill: must be "zero", "mean", or a finite number')
    return float(fill)


def _spans_param(params, path):
    raw = params.get("spans")
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise ConfigError(f"{path}.spans: must be a list of [start, end] pairs")
    spans = []
    for i, item in enumerate(raw):
        if (
            not isinstance(item, list)
            or len(item) not in (2, 3)
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in item[:2])
        ):
            raise ConfigError(f"{path}.spans[{i}]: must be [start, end] or [start, end, id]")
        token_id = item[2] if len(item) == 3 else i
        try:
            spans.append(TokenSpan(item[0], item[1], token_id))
        except ValueError as exc:
            raise ConfigError(f"{path}.spans[{i}]: {exc}") from exc
    return spans


def _validate_splice(params, path):
    _reject_unknown(params, path, ("n", "t", "min_retained"))
    return {
        "n": _int_param(params, path, "n", 0, required=True),
        "t": _int_param(params, path, "t", 1, required=True),
        "min_retained": _int_param(params, path, "min_retained", 0, default=1),
    }


def _validate_mask(params, path):
    _reject_unknown(params, path, ("n", "t", "fill"))
    return {
        "n": _int_param(params, path, "n", 0, required=True),
        "t": _int_param(params, path, "t", 1, required=True),
        "fill": _fill_param(params, path),
    }


def _validate_semantic(params, path, with_fill):
    allowed = ["ratio", "spans", "token_frames"]
    allowed.append("fill" if with_fill else "min_retained")
    _reject_unknown(params, path, allowed)
    ratio = _float_param(params, path, "ratio", default=0.15)
    if not 0.0 <= ratio <= 1.0:
        raise ConfigError(f"{path}.ratio: must lie in [0, 1]")
    spans = _spans_param(params, path)
    token_frames = _int_param(params, path, "token_frames", 1)
    if (spans is None) == (token_frames is None):
        raise ConfigError(f"{path}: exactly one of spans or token_frames is required")
    out = {"ratio": ratio, "spans": spans, "token_frames": token_frames}
    if with_fill:
        out["fill"] = _fill_param(params, path)
    else:
        out["min_retained"] = _int_param(params, path, "min_retained", 0, default=1)
    return out


def _validate_mixup(params, path):
    _reject_unknown(params, path, ("lambda", "alpha"))
    lam = _float_param(params, path, "lambda")
    alpha = _float_param(params, path, "alpha")
    if lam is not None and alpha is not None:
        raise ConfigError(f"{path}: give lambda or alpha, not both")
    if lam is not None and not 0.0 <= lam <= 1.0:
        raise ConfigError(f"{path}.lambda: must lie in [0, 1]")
    if alpha is not None and alpha <= 0.0:
        raise ConfigError(f"{path}.alpha: must be positive")
    return {"lambda": lam, "alpha": alpha if alpha is not None else 1.0}


def _validate_cutmix(params, path):
    _reject_unknown(params, path, ("t_time", "t_freq"))
    return {
        "t_time": _int_param(params, path, "t_time", 1, required=True),
        "t_freq": _int_param(params, path, "t_freq", 1, required=True),
    }


def _validate_time_warp(params, path):
    _reject_unknown(params, path, ("w",))
    return {"w": _int_param(params, path, "w", 0, required=True)}


def _validate_fade(params, path):
    _reject_unknown(params, path, ("max_fraction",))
    fraction = _float_param(params, path, "max_fraction", default=0.5)
    if not 0.0 < fraction <= 0.5:
        raise ConfigError(f"{path}.max_fraction: must lie in (0, 0.5]")
    return {"max_fraction": fraction}


def _validate_speed(params, path):
    _reject_unknown(params, path, ("factor", "factors"))
    factor = _float_param(params, path, "factor")
    factors = params.get("factors")
    if (factor is None) == (factors is None):
        raise ConfigError(f"{path}: exactly one of factor or factors is required")
    if factor is not None:
        if factor <= 0.0:
            raise ConfigError(f"{path}.factor: must be positive")
        return {"factor": factor, "factors": None}
    if not isinstance(factors, list) or not factors:
        raise ConfigError(f"{path}.factors: must be a non-empty list of numbers")
    checked = []
    for i, v in enumerate(factors):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"{path}.factors[{i}]: must be a positive number")
        checked.append(float(v))
    return {"factor": None, "factors": checked}


_VALIDATORS = {
    "splice_out": _validate_splice,
    "splice_out_wave": _validate_splice,
    "time_mask": _validate_mask,
    "freq_mask": _validate_mask,
    "semantic_splice": lambda p, path: _validate_semantic(p, path, with_fill=False),
    "semantic_mask": lambda p, path: _validate_semantic(p, path, with_fill=True),
    "mixup": _validate_mixup,
    "cutmix": _validate_cutmix,
    "time_warp": _validate_time_warp,
    "fade": _validate_fade,
    "speed_perturb": _validate_speed,
}


# ---------------------------------------------------------------------------
# Execution


def apply_pipeline(rng: RandomSource, sample: LabeledSample, steps) -> LabeledSample:
    """Run validated steps in order against ``sample`` using one stream."""
    current = sample
    for step in steps:
        current = _apply_step(rng, current, step)
    return current


def _require_matrix(sample: LabeledSample, op: str):
    if isinstance(sample.features, Waveform):
        raise ConfigError(f"op {op!r} needs spectrogram input, got a waveform")
    return sample.features


def _require_wave(sample: LabeledSample, op: str) -> Waveform:
    if not isinstance(sample.features, Waveform):
        raise ConfigError(f"op {op!r} needs waveform input, got a spectrogram")
    return sample.features


def _token_spans(params, n_frames: int, op: str):
    spans = params["spans"]
    if spans is None:
        width = params["token_frames"]
        spans = [
            TokenSpan(start, min(start + width, n_frames), i)
            for i, start in enumerate(range(0, n_frames, width))
        ]
    try:
        augment.validate_token_spans(spans, n_frames)
    except ValueError as exc:
        raise ConfigError(f"op {op!r}: {exc}") from exc
    return spans


def _apply_step(rng: RandomSource, sample: LabeledSample, step: PipelineStep) -> LabeledSample:
    op, p = step.op, step.params

    if op == "splice_out":
        m = _require_matrix(sample, op)
        cfg = SpliceConfig(p["n"], p["t"], p["min_retained"])
        return LabeledSample(augment.splice_out(rng, m, cfg), sample.label)
    if op == "time_mask":
        m = _require_matrix(sample, op)
        cfg = SpliceConfig(p["n"], p["t"])
        return LabeledSample(augment.time_mask(rng, m, cfg, fill=p["fill"]), sample.label)
    if op == "freq_mask":
        m = _require_matrix(sample, op)
        cfg = SpliceConfig(p["n"], p["t"])
        return LabeledSample(augment.freq_mask(rng, m, cfg, fill=p["fill"]), sample.label)
    if op in ("semantic_splice", "semantic_mask"):
        m = _require_matrix(sample, op)
        if m.shape[0] == 0:
            return LabeledSample(m.copy(), sample.label)
        spans = _token_spans(p, m.shape[0], op)
        intervals = augment.semantic_intervals(rng, spans, p["ratio"])
        if op == "semantic_splice":
            out = augment.apply_splice(m, intervals, min_retained=p["min_retained"])
        else:
            out = augment.apply_mask(m, intervals, fill=p["fill"])
        return LabeledSample(out, sample.label)
    if op == "mixup":
        lam = p["lambda"]
        if lam is None:
            lam = augment.sample_beta(rng, p["alpha"])
        return augment.mixup(sample, sample, lam)
    if op == "cutmix":
        m = _require_matrix(sample, op)
        n_frames, n_bins = m.shape
        if n_frames == 0 or n_bins == 0:
            return LabeledSample(m.copy(), sample.label)
        time_iv = _sample_one_interval(rng, n_frames, p["t_time"])
        freq_iv = _sample_one_interval(rng, n_bins, p["t_freq"])
        return augment.cutmix(sample, sample, time_iv, freq_iv)
    if op == "time_warp":
        m = _require_matrix(sample, op)
        if m.shape[0] <= 2 * p["w"]:
            raise ConfigError(
                f"op 'time_warp': input has {m.shape[0]} frames, needs more than {2 * p['w']}"
            )
        return LabeledSample(augment.time_warp(rng, m, p["w"]), sample.label)
    if op == "fade":
        w = _require_wave(sample, op)
        return LabeledSample(augment.fade(rng, w, p["max_fraction"]), sample.label)
    if op == "speed_perturb":
        w = _require_wave(sample, op)
        factor = p["factor"]
        if factor is None:
            factor = p["factors"][rng.next_below(len(p["factors"]))]
        return LabeledSample(augment.speed_perturb(w, factor), sample.label)
    if op == "splice_out_wave":
        w = _require_wave(sample, op)
        cfg = SpliceConfig(p["n"], p["t"], p["min_retained"])
        return LabeledSample(augment.splice_out_wave(rng, w, cfg), sample.label)
    raise ConfigError(f"unknown op {op!r}")  # unreachable after parsing


def _sample_one_interval(rng: RandomSource, extent: int, max_width: int) -> Interval:
    # Same two-draw law as sample_intervals, for a single interval.
    length = rng.next_below(min(max_width, extent))
    start = rng.next_below(extent - length)
    return Interval(start, start + length)
