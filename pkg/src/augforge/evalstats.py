"""Word error rate scoring and significance statistics.

Alignment is the standard Levenshtein DP with unit costs. Backtrace ties
are broken the same way everywhere: diagonal (match or substitution) over
deletion over insertion, so the error decomposition is deterministic and
comparable across runs.

Transcript files carry one utterance per line: an utterance id followed by
the words, whitespace separated. Hypothesis files are matched to the
reference by id and must cover exactly the same id set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import FormatError
from .rng import RandomSource


class ErrorCounts(NamedTuple):
    """Alignment outcome for one utterance."""

    correct: int
    substitutions: int
    insertions: int
    deletions: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def reference_length(self) -> int:
        return self.correct + self.substitutions + self.deletions


@dataclass(frozen=True)
class BootstrapResult:
    wer: float
    std_error: float
    ci95: tuple[float, float]
    resamples: int


@dataclass(frozen=True)
class MapssweResult:
    z: float
    p: float
    n: int
    mean_diff: float


def align_wer(ref: Sequence[str], hyp: Sequence[str]) -> ErrorCounts:
    """Minimum-edit alignment of ``hyp`` against ``ref`` with unit costs."""
    n, m = len(ref), len(hyp)
    rows = [list(range(m + 1))]
    for i in range(1, n + 1):
        prev = rows[i - 1]
        cur = [i] + [0] * m
        ref_word = ref[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (ref_word != hyp[j - 1])
            dele = prev[j] + 1
            if dele < best:
                best = dele
            ins = cur[j - 1] + 1
            if ins < best:
                best = ins
            cur[j] = best
        rows.append(cur)

    correct = subs = ins = dels = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and rows[i][j] == rows[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            if ref[i - 1] == hyp[j - 1]:
                correct += 1
            else:
                subs += 1
            i -= 1
            j -= 1
        elif i > 0 and rows[i][j] == rows[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return ErrorCounts(correct, subs, ins, dels)


def corpus_wer(counts: Sequence[ErrorCounts]) -> float:
    """Pooled WER: total errors over total reference words."""
    total_ref = sum(c.reference_length for c in counts)
    if total_ref == 0:
        raise ValueError("corpus has no reference words")
    total_errors = sum(c.errors for c in counts)
    return total_errors / total_ref


def bootstrap_wer(counts: Sequence[ErrorCounts], resamples: int, rng: RandomSource) -> BootstrapResult:
    """Nonparametric bootstrap over utterances.

    Each resample draws ``len(counts)`` utterances with replacement (one
    ``rng.next_below(len(counts))`` per slot, in order) and pools their
    counts. The standard error is the sample standard deviation of the
    resampled WERs; the interval is their 2.5th and 97.5th percentiles,
    widened if needed to contain the point estimate.
    """
    n = len(counts)
    if n < 1:
        raise ValueError("need at least one utterance")
    if resamples < 2:
        raise ValueError("need at least two resamples")
    point = corpus_wer(counts)

    values = np.empty(resamples, dtype=np.float64)
    for b in range(resamples):
        picked = [counts[rng.next_below(n)] for _ in range(n)]
        values[b] = corpus_wer(picked)

    # Shift-invariant variance; anchoring on the first sample keeps the
    # all-identical case at exactly zero instead of accumulated round-off.
    std_error = float((values - values[0]).std(ddof=1))
    low, high = np.percentile(values, [2.5, 97.5])
    return BootstrapResult(
        wer=point,
        std_error=std_error,
        ci95=(min(float(low), point), max(float(high), point)),
        resamples=resamples,
    )


def mapsswe(system1: Sequence[ErrorCounts], system2: Sequence[ErrorCounts]) -> MapssweResult:
    """Matched-pairs test on per-utterance error differences.

    The statistic is ``mean(d) / sqrt(var(d) / n)`` with the n-1 variance,
    where ``d_i`` is system1's errors minus system2's on utterance i; the
    two-sided p-value comes from the normal approximation. A zero-variance
    difference vector degenerates to z = 0 (p = 1) when the means agree
    and an infinite z (p = 0) when they do not.
    """
    if len(system1) != len(system2):
        raise ValueError("paired corpora must have equal length")
    n = len(system1)
    if n < 2:
        raise ValueError("need at least two utterances")
    diffs = [a.errors - b.errors for a, b in zip(system1, system2)]
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        if mean == 0.0:
            return MapssweResult(z=0.0, p=1.0, n=n, mean_diff=mean)
        return MapssweResult(z=math.copysign(math.inf, mean), p=0.0, n=n, mean_diff=mean)
    z = mean / math.sqrt(var / n)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return MapssweResult(z=z, p=p, n=n, mean_diff=mean)


# ---------------------------------------------------------------------------
# Transcript files


def read_transcripts(path) -> dict[str, list[str]]:
    """Parse ``UTT_ID word word ...`` lines into an ordered id -> words map."""
    table: dict[str, list[str]] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        utt_id, words = tokens[0], tokens[1:]
        if utt_id in table:
            raise FormatError(f"{path}:{lineno}: duplicate utterance id {utt_id!r}")
        table[utt_id] = words
    return table


def match_utterances(ref: dict[str, list[str]], hyp: dict[str, list[str]], ref_name="ref", hyp_name="hyp"):
    """Pair reference and hypothesis word lists by id, in reference order."""
    missing = [u for u in ref if u not in hyp]
    extra = [u for u in hyp if u not in ref]
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing from {hyp_name}: {', '.join(sorted(missing))}")
        if extra:
            parts.append(f"not in {ref_name}: {', '.join(sorted(extra))}")
        raise FormatError("utterance ids do not match; " + "; ".join(parts))
    return [(utt_id, ref[utt_id], hyp[utt_id]) for utt_id in ref]


def score_files(ref_path, hyp_path) -> list[ErrorCounts]:
    """Per-utterance alignment counts for a ref/hyp transcript file pair."""
    ref = read_transcripts(ref_path)
    hyp = read_transcripts(hyp_path)
    pairs = match_utterances(ref, hyp, ref_name=str(ref_path), hyp_name=str(hyp_path))
    return [align_wer(r, h) for _, r, h in pairs]
