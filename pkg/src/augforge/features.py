"""Log-mel spectrogram front end.

The chain is the usual one: slice the waveform into overlapping frames,
window with a periodic Hann, take the squared-magnitude real DFT (zero
padded to the next power of two), pool the power bins through a triangular
mel filterbank on the HTK scale ``mel(f) = 2595 * log10(1 + f / 700)``, and
take the natural log with a floor that keeps silence finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .signal_io import Waveform


@dataclass(frozen=True)
class FeatureConfig:
    """Front-end settings; defaults give 80 log-mels from 25 ms / 10 ms frames.

    ``fmax`` of None resolves to the Nyquist frequency of the input.
    """

    frame_len_ms: float = 25.0
    hop_ms: float = 10.0
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float | None = None
    log_floor: float = 1e-10

    def resolved_fmax(self, sample_rate: int) -> float:
        return sample_rate / 2.0 if self.fmax is None else self.fmax

    def validate(self, sample_rate: int) -> None:
        if self.hop_ms <= 0 or self.frame_len_ms <= 0:
            raise ConfigError("frame and hop lengths must be positive")
        if self.frame_len_ms < self.hop_ms:
            raise ConfigError("frame length must be at least the hop")
        if self.n_mels < 1:
            raise ConfigError("n_mels must be at least 1")
        fmax = self.resolved_fmax(sample_rate)
        if not 0.0 <= self.fmin < fmax:
            raise ConfigError(f"need 0 <= fmin < fmax, got [{self.fmin}, {fmax}]")
        if fmax > sample_rate / 2.0:
            raise ConfigError(f"fmax {fmax} exceeds Nyquist {sample_rate / 2.0}")
        if self.log_floor <= 0.0:
            raise ConfigError("log floor must be positive")


def hz_to_mel(freq_hz: float) -> float:
    return 2595.0 * math.log10(1.0 + freq_hz / 700.0)


def mel_to_hz(mel: float) -> float:
    return 700.0 * (10.0 ** (mel / 2595.0) - 1.0)


def next_pow2(n: int) -> int:
    return 1 << max(0, n - 1).bit_length()


def frame_signal(samples, frame_len: int, hop: int) -> np.ndarray:
    """Slice ``samples`` into ``floor((len - frame_len) / hop) + 1`` frames.

    Frame i starts at ``i * hop``; samples past the last full frame are
    dropped. A signal shorter than one frame yields zero frames.
    """
    if frame_len < 1 or hop < 1:
        raise ValueError("frame_len and hop must be positive")
    x = np.ascontiguousarray(samples, dtype=np.float32)
    if x.ndim != 1:
        raise ValueError("expected a 1-D signal")
    if len(x) < frame_len:
        return np.empty((0, frame_len), dtype=np.float32)
    windows = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop]
    return np.ascontiguousarray(windows, dtype=np.float32)


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann: ``0.5 - 0.5 cos(2 pi n / length)`` for n in [0, length)."""
    n = np.arange(length, dtype=np.float64)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / length)


def power_spectrum(frames) -> np.ndarray:
    """Squared-magnitude real DFT of Hann-windowed frames.

    Frames are zero padded to the next power of two above the frame length;
    the result has ``n_fft // 2 + 1`` bins per frame.
    """
    f = np.asarray(frames, dtype=np.float32)
    if f.ndim != 2 or f.shape[1] < 2:
        raise ValueError("expected (n_frames, frame_len >= 2) input")
    frame_len = f.shape[1]
    n_fft = next_pow2(frame_len)
    windowed = f.astype(np.float64) * hann_window(frame_len)
    spectrum = np.fft.rfft(windowed, n=n_fft, axis=1)
    power = spectrum.real**2 + spectrum.imag**2
    return power.astype(np.float32)


def mel_filterbank(n_fft: int, sample_rate: int, cfg: FeatureConfig) -> np.ndarray:
    """Triangular mel filter weights, shape ``(n_mels, n_fft // 2 + 1)``.

    Filter centers are spaced evenly in mel between ``fmin`` and ``fmax``;
    each filter rises from the previous center and falls to the next. A
    configuration whose filters are narrower than the bin spacing (so some
    filter would be all zero) is rejected.
    """
    cfg.validate(sample_rate)
    fmax = cfg.resolved_fmax(sample_rate)
    n_bins = n_fft // 2 + 1
    mel_points = np.linspace(hz_to_mel(cfg.fmin), hz_to_mel(fmax), cfg.n_mels + 2)
    hz_points = np.array([mel_to_hz(m) for m in mel_points])
    bin_freqs = np.arange(n_bins, dtype=np.float64) * sample_rate / n_fft

    weights = np.zeros((cfg.n_mels, n_bins), dtype=np.float64)
    for m in range(1, cfg.n_mels + 1):
        left, center, right = hz_points[m - 1 : m + 2]
        if not left < center < right:
            raise ConfigError("mel points collapsed; fewer mels or a wider band needed")
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        weights[m - 1] = np.maximum(0.0, np.minimum(rising, falling))
        if not (weights[m - 1] > 0.0).any():
            raise ConfigError(
                f"mel filter {m - 1} covers no FFT bin; reduce n_mels or raise n_fft"
            )
    return weights


def extract_logmel(wave: Waveform, cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Full front end: waveform in, (n_frames, n_mels) float32 log-mels out."""
    cfg.validate(wave.sample_rate)
    frame_len = int(round(cfg.frame_len_ms * wave.sample_rate / 1000.0))
    hop = int(round(cfg.hop_ms * wave.sample_rate / 1000.0))
    if frame_len < 2 or hop < 1:
        raise ConfigError("frame and hop round to fewer samples than usable")

    frames = frame_signal(wave.samples, frame_len, hop)
    if frames.shape[0] == 0:
        return np.empty((0, cfg.n_mels), dtype=np.float32)
    power = power_spectrum(frames)
    fb = mel_filterbank(next_pow2(frame_len), wave.sample_rate, cfg)
    energies = power.astype(np.float64) @ fb.T
    return np.log(np.maximum(energies, cfg.log_floor)).astype(np.float32)
