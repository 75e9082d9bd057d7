"""Seedable random streams with a fixed draw-order contract.

Every stochastic operation in this package pulls randomness through the
two-method interface below: ``next_below(k)`` for uniform integers in
``[0, k)`` and ``next_unit()`` for uniform floats in ``[0, 1)``. Each
operation documents the order and meaning of its draws, so a run is
reproducible from a single 64-bit seed and a scripted stream can stand in
during tests.

The concrete generator is SplitMix64: a 64-bit counter advanced by a fixed
odd increment and passed through an avalanching finalizer. It is fast,
trivially seedable, and has no state beyond one integer. Independent
streams for the items of a run (files, trials, corpus entries) use seeds
derived as ``seed XOR mix64(index)``.
"""

from __future__ import annotations

from typing import Protocol

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix of the low 64 bits."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th independent stream of a run.

    ``mix64`` of the index decorrelates neighbouring indices; the XOR keeps
    the map invertible per index. Note ``derive_seed(s, 0) == s``.
    """
    return (seed ^ mix64(index)) & _MASK64


class RandomSource(Protocol):
    """Duck type consumed by the stochastic ops."""

    def next_below(self, bound: int) -> int: ...

    def next_unit(self) -> float: ...


class SplitMix64Source:
    """Deterministic random stream; the package-wide default generator."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return mix64(self._state)

    def next_below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``.

        Uses rejection sampling, so there is no modulo bias for any bound up
        to 2**64. A bound of zero or less returns 0 without consuming a draw.
        """
        if bound <= 0:
            return 0
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound

    def next_unit(self) -> float:
        """Uniform float in ``[0, 1)`` built from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * 2.0**-53


class ScriptedSource:
    """Replays a fixed list of draws; lets tests pin exact outcomes.

    ``next_below`` pops the next scripted value and checks it lies in range;
    ``next_unit`` pops and returns the value as a float. Exhausting the
    script raises, so a test must provision exactly as many draws as the
    operation under test consumes.
    """

    def __init__(self, values):
        self._values = list(values)
        self._pos = 0

    def _pop(self):
        if self._pos >= len(self._values):
            raise RuntimeError("scripted random stream exhausted")
        value = self._values[self._pos]
        self._pos += 1
        return value

    def next_below(self, bound: int) -> int:
        if bound <= 0:
            return 0
        value = int(self._pop())
        if not 0 <= value < bound:
            raise RuntimeError(f"scripted draw {value} outside [0, {bound})")
        return value

    def next_unit(self) -> float:
        value = float(self._pop())
        if not 0.0 <= value < 1.0:
            raise RuntimeError(f"scripted unit draw {value} outside [0, 1)")
        return value

    @property
    def remaining(self) -> int:
        return len(self._values) - self._pos
