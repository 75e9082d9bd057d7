import struct

import numpy as np
import pytest

from augforge.errors import FormatError, UnsupportedFormatError
from augforge.signal_io import (
    Waveform,
    as_matrix,
    read_csv_matrix,
    read_spgm,
    read_wav,
    write_csv_matrix,
    write_spgm,
    write_wav,
)


def _float32_wav(path, channels, sample_rate=16000):
    """Hand-build an IEEE float WAV; the writer only emits PCM16."""
    data = np.asarray(channels, dtype="<f4")  # (frames, channels) or (frames,)
    if data.ndim == 1:
        data = data[:, None]
    payload = data.tobytes()
    n_ch = data.shape[1]
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        3,
        n_ch,
        sample_rate,
        sample_rate * 4 * n_ch,
        4 * n_ch,
        32,
        b"data",
        len(payload),
    )
    path.write_bytes(header + payload)


class TestWaveform:
    def test_coerces_to_float32(self):
        w = Waveform(np.array([0, 1], dtype=np.int64), 8000)
        assert w.samples.dtype == np.float32

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            Waveform(np.zeros((2, 2)), 8000)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            Waveform(np.zeros(4, dtype=np.float32), 0)

    def test_duration(self):
        assert Waveform(np.zeros(8000, dtype=np.float32), 16000).duration == 0.5


class TestAsMatrix:
    def test_contiguous_float32(self):
        m = as_matrix(np.arange(12, dtype=np.float64).reshape(3, 4).T)
        assert m.dtype == np.float32
        assert m.flags.c_contiguous
        assert m.shape == (4, 3)

    def test_rejects_1d(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros(3))


class TestWav:
    def test_pcm16_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        original = (0.5 * rng.standard_normal(2000)).clip(-0.999, 0.999).astype(np.float32)
        p = tmp_path / "a.wav"
        write_wav(p, Waveform(original, 16000))
        back = read_wav(p)
        assert back.sample_rate == 16000
        assert back.samples.shape == original.shape
        # quantization step is 1/32768; round-to-nearest halves it
        assert np.max(np.abs(back.samples - original)) <= 0.5 / 32768 + 1e-9

    def test_pcm16_endpoints(self, tmp_path):
        p = tmp_path / "e.wav"
        write_wav(p, Waveform(np.array([1.0, -1.0, 0.0], dtype=np.float32), 8000))
        back = read_wav(p).samples
        # +1.0 clips to 32767 on write, so it comes back one LSB short
        assert back[0] == np.float32(32767 / 32768)
        assert back[1] == -1.0
        assert back[2] == 0.0

    def test_write_rejects_nonfinite(self, tmp_path):
        w = Waveform(np.array([0.0, np.nan], dtype=np.float32), 8000)
        object.__setattr__(w, "samples", np.array([0.0, np.nan], dtype=np.float32))
        with pytest.raises(ValueError):
            write_wav(tmp_path / "x.wav", w)

    def test_float32_wav_reads_exactly(self, tmp_path):
        p = tmp_path / "f.wav"
        values = np.array([0.25, -0.75, 0.001], dtype=np.float32)
        _float32_wav(p, values)
        back = read_wav(p)
        np.testing.assert_array_equal(back.samples, values)

    def test_float32_wav_clips_out_of_range(self, tmp_path):
        p = tmp_path / "c.wav"
        _float32_wav(p, np.array([2.0, -3.0], dtype=np.float32))
        np.testing.assert_array_equal(read_wav(p).samples, [1.0, -1.0])

    def test_float32_wav_rejects_nan(self, tmp_path):
        p = tmp_path / "n.wav"
        _float32_wav(p, np.array([0.0, np.nan], dtype=np.float32))
        with pytest.raises(FormatError):
            read_wav(p)

    def test_stereo_averages_to_mono(self, tmp_path):
        p = tmp_path / "s.wav"
        _float32_wav(p, np.array([[1.0, 0.0], [0.0, 0.0], [-0.5, 0.5]], dtype=np.float32))
        back = read_wav(p)
        np.testing.assert_allclose(back.samples, [0.5, 0.0, 0.0], atol=1e-7)

    def test_not_riff(self, tmp_path):
        p = tmp_path / "bad.wav"
        p.write_bytes(b"OGGS" + b"\x00" * 40)
        with pytest.raises(FormatError):
            read_wav(p)

    def test_truncated_data_chunk(self, tmp_path):
        p = tmp_path / "t.wav"
        _float32_wav(p, np.zeros(10, dtype=np.float32))
        whole = p.read_bytes()
        p.write_bytes(whole[:-6])
        with pytest.raises(FormatError):
            read_wav(p)

    def test_missing_data_chunk(self, tmp_path):
        p = tmp_path / "m.wav"
        fmt = struct.pack("<HHIIHH", 1, 1, 8000, 16000, 2, 16)
        p.write_bytes(b"RIFF" + struct.pack("<I", 24) + b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt)
        with pytest.raises(FormatError):
            read_wav(p)

    def test_unsupported_encoding(self, tmp_path):
        p = tmp_path / "u.wav"
        # 8-bit PCM: valid container, encoding outside the supported pair
        fmt = struct.pack("<HHIIHH", 1, 1, 8000, 8000, 1, 8)
        body = (
            b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", 2) + b"\x00\x00"
        )
        p.write_bytes(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)
        with pytest.raises(UnsupportedFormatError):
            read_wav(p)

    def test_partial_frame_rejected(self, tmp_path):
        p = tmp_path / "pf.wav"
        fmt = struct.pack("<HHIIHH", 1, 1, 8000, 16000, 2, 16)
        body = b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", 3) + b"\x00\x00\x00"
        p.write_bytes(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)
        with pytest.raises(FormatError):
            read_wav(p)

    def test_odd_sized_chunk_alignment(self, tmp_path):
        # a 3-byte auxiliary chunk must be padded to 4 before the next header
        p = tmp_path / "al.wav"
        fmt = struct.pack("<HHIIHH", 1, 1, 8000, 16000, 2, 16)
        samples = struct.pack("<hh", 100, -100)
        body = (
            b"junk" + struct.pack("<I", 3) + b"abc\x00"
            + b"fmt " + struct.pack("<I", 16) + fmt
            + b"data" + struct.pack("<I", len(samples)) + samples
        )
        p.write_bytes(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)
        back = read_wav(p)
        np.testing.assert_allclose(back.samples, [100 / 32768, -100 / 32768], atol=1e-7)


class TestSpgm:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(11)
        m = rng.standard_normal((17, 9)).astype(np.float32)
        p = tmp_path / "m.spgm"
        write_spgm(p, m)
        back = read_spgm(p)
        assert back.dtype == np.float32
        assert back.tobytes() == m.tobytes()

    def test_empty_matrix(self, tmp_path):
        p = tmp_path / "z.spgm"
        write_spgm(p, np.zeros((0, 5), dtype=np.float32))
        assert read_spgm(p).shape == (0, 5)

    def test_header_layout(self, tmp_path):
        p = tmp_path / "h.spgm"
        write_spgm(p, np.zeros((2, 3), dtype=np.float32))
        raw = p.read_bytes()
        assert raw[:4] == b"SPGM"
        assert struct.unpack_from("<III", raw, 4) == (1, 2, 3)
        assert len(raw) == 16 + 4 * 6

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "b.spgm"
        p.write_bytes(b"NOPE" + b"\x00" * 12)
        with pytest.raises(FormatError):
            read_spgm(p)

    def test_unknown_version(self, tmp_path):
        p = tmp_path / "v.spgm"
        p.write_bytes(b"SPGM" + struct.pack("<III", 2, 0, 0))
        with pytest.raises(UnsupportedFormatError):
            read_spgm(p)

    def test_truncated_header(self, tmp_path):
        p = tmp_path / "t.spgm"
        p.write_bytes(b"SPGM\x01\x00")
        with pytest.raises(FormatError):
            read_spgm(p)

    def test_payload_length_mismatch(self, tmp_path):
        p = tmp_path / "p.spgm"
        p.write_bytes(b"SPGM" + struct.pack("<III", 1, 2, 2) + b"\x00" * 15)
        with pytest.raises(FormatError):
            read_spgm(p)

    def test_nonfinite_payload_rejected(self, tmp_path):
        p = tmp_path / "nf.spgm"
        cells = np.array([[np.inf]], dtype="<f4")
        p.write_bytes(b"SPGM" + struct.pack("<III", 1, 1, 1) + cells.tobytes())
        with pytest.raises(FormatError):
            read_spgm(p)

    def test_write_rejects_nonfinite(self, tmp_path):
        with pytest.raises(ValueError):
            write_spgm(tmp_path / "x.spgm", np.array([[np.nan]], dtype=np.float32))


class TestCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        m = rng.standard_normal((6, 4)).astype(np.float32)
        p = tmp_path / "m.csv"
        write_csv_matrix(p, m)
        np.testing.assert_array_equal(read_csv_matrix(p), m)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("")
        assert read_csv_matrix(p).shape == (0, 0)

    def test_ragged_rejected(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("1,2,3\n4,5\n")
        with pytest.raises(FormatError):
            read_csv_matrix(p)

    def test_non_numeric_rejected(self, tmp_path):
        p = tmp_path / "n.csv"
        p.write_text("1,two\n")
        with pytest.raises(FormatError):
            read_csv_matrix(p)

    def test_nonfinite_rejected(self, tmp_path):
        p = tmp_path / "i.csv"
        p.write_text("1,inf\n")
        with pytest.raises(FormatError):
            read_csv_matrix(p)
