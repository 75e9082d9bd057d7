"""Reading and writing waveforms and spectrogram matrices.

Three on-disk forms are supported:

* WAV: RIFF containers holding 16-bit PCM or 32-bit IEEE float samples.
  Multichannel files are averaged down to mono on read; writes always
  produce 16-bit PCM mono.
* SPGM: this package's raw spectrogram format. Little-endian layout:
  bytes 0-3 magic ``SPGM``, bytes 4-7 format version (currently 1),
  bytes 8-11 frame count, bytes 12-15 bin count, then frame-major float32
  cell data. Round-trips are bit-exact.
* CSV: one frame per line, comma-separated decimal values, for inspection
  and interchange. Round-trips are exact to float32 precision.

In memory a spectrogram is a C-contiguous 2-D float32 ndarray indexed
``[frame, bin]``; a waveform is the small dataclass below.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, UnsupportedFormatError

_PCM16_SCALE = 32768.0

_SPGM_MAGIC = b"SPGM"
_SPGM_VERSION = 1

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


@dataclass
class Waveform:
    """Mono audio: float32 samples in [-1, 1] plus their sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float32)
        if self.samples.ndim != 1:
            raise ValueError("waveform samples must be 1-D")
        if self.sample_rate < 1:
            raise ValueError("sample rate must be positive")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def as_matrix(values) -> np.ndarray:
    """Canonicalize ``values`` to a C-contiguous 2-D float32 array."""
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {arr.ndim}-D")
    return np.ascontiguousarray(arr)


# ---------------------------------------------------------------------------
# WAV


def read_wav(path) -> Waveform:
    """Read a PCM16 or float32 WAV file, averaging channels to mono.

    Raises FormatError for truncated or malformed containers and
    UnsupportedFormatError for encodings other than the two above.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise FormatError(f"{path}: truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are 2-byte aligned

    if fmt is None or payload is None:
        raise FormatError(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise FormatError(f"{path}: fmt chunk too short")
    audio_format, n_channels, sample_rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt
    )
    if n_channels < 1 or sample_rate < 1:
        raise FormatError(f"{path}: invalid channel count or sample rate")

    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        sample_dtype = np.dtype("<i2")
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        sample_dtype = np.dtype("<f4")
    else:
        raise UnsupportedFormatError(
            f"{path}: unsupported encoding (format tag {audio_format}, {bits}-bit);"
            " only 16-bit PCM and 32-bit float are readable"
        )

    frame_size = sample_dtype.itemsize * n_channels
    if block_align not in (0, frame_size):
        raise FormatError(f"{path}: block alignment disagrees with sample layout")
    if len(payload) % frame_size != 0:
        raise FormatError(f"{path}: data chunk is not a whole number of frames")

    raw = np.frombuffer(payload, dtype=sample_dtype)
    if sample_dtype.kind == "i":
        samples = raw.astype(np.float32) / np.float32(_PCM16_SCALE)
    else:
        samples = raw.astype(np.float32)
        if not np.isfinite(samples).all():
            raise FormatError(f"{path}: non-finite float samples")
        samples = np.clip(samples, -1.0, 1.0)
    if n_channels > 1:
        samples = samples.reshape(-1, n_channels).mean(axis=1, dtype=np.float64)
        samples = samples.astype(np.float32)
    return Waveform(samples, sample_rate)


def write_wav(path, wave: Waveform) -> None:
    """Write ``wave`` as mono 16-bit PCM.

    Samples are scaled by 32768, rounded, and clipped to the int16 range, so
    a read-back differs from the original by less than 1/32768 per sample.
    """
    samples = wave.samples
    if not np.isfinite(samples).all():
        raise ValueError("cannot write non-finite samples")
    quantized = np.clip(np.round(samples.astype(np.float64) * _PCM16_SCALE), -32768, 32767)
    payload = quantized.astype("<i2").tobytes()

    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        _WAVE_FORMAT_PCM,
        1,
        wave.sample_rate,
        wave.sample_rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    Path(path).write_bytes(header + payload)


# ---------------------------------------------------------------------------
# SPGM


def write_spgm(path, matrix) -> None:
    """Write a spectrogram in the SPGM layout described in the module docs."""
    m = as_matrix(matrix)
    if not np.isfinite(m).all():
        raise ValueError("cannot write non-finite spectrogram values")
    header = _SPGM_MAGIC + struct.pack("<III", _SPGM_VERSION, m.shape[0], m.shape[1])
    Path(path).write_bytes(header + m.astype("<f4").tobytes())


def read_spgm(path) -> np.ndarray:
    """Read an SPGM file back into a (n_frames, n_bins) float32 matrix."""
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise FormatError(f"{path}: truncated SPGM header")
    if data[:4] != _SPGM_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}")
    version, n_frames, n_bins = struct.unpack_from("<III", data, 4)
    if version != _SPGM_VERSION:
        raise UnsupportedFormatError(f"{path}: SPGM version {version} not supported")
    expected = 16 + 4 * n_frames * n_bins
    if len(data) != expected:
        raise FormatError(
            f"{path}: payload is {len(data) - 16} bytes, header implies {expected - 16}"
        )
    cells = np.frombuffer(data, dtype="<f4", offset=16)
    matrix = cells.reshape(n_frames, n_bins).astype(np.float32)
    if not np.isfinite(matrix).all():
        raise FormatError(f"{path}: non-finite cell values")
    return np.ascontiguousarray(matrix)


# ---------------------------------------------------------------------------
# CSV


def write_csv_matrix(path, matrix) -> None:
    """Write one frame per line with enough digits to round-trip float32."""
    m = as_matrix(matrix)
    lines = [",".join(f"{v:.9g}" for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_csv_matrix(path) -> np.ndarray:
    """Read a rectangular numeric CSV into a float32 matrix."""
    text = Path(path).read_text()
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        cells = line.split(",")
        try:
            row = [float(c) for c in cells]
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: non-numeric cell") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(
                f"{path}:{lineno}: ragged row ({len(row)} cells, expected {width})"
            )
        rows.append(row)
    if not rows:
        return np.empty((0, 0), dtype=np.float32)
    matrix = np.array(rows, dtype=np.float32)
    if not np.isfinite(matrix).all():
        raise FormatError(f"{path}: non-finite cell values")
    return matrix
