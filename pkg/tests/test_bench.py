import json

import numpy as np
import pytest

from augforge.bench import (
    BENCH_METHODS,
    ROW_KEYS,
    Batch,
    BenchReport,
    CostModel,
    build_padded_batch,
    proxy_step,
    run_benchmark,
)
from augforge.errors import ConfigError
from augforge.synth import random_walk_corpus


class TestCostModel:
    def test_defaults(self):
        c = CostModel()
        assert c.linear_passes == 1 and c.quad_passes == 1

    def test_rejects_no_work(self):
        with pytest.raises(ValueError):
            CostModel(0, 0)
        with pytest.raises(ValueError):
            CostModel(-1, 1)


class TestBatch:
    def test_padded_bytes_closed_form(self):
        samples = [np.ones((n, 6), dtype=np.float32) for n in (10, 4, 7)]
        batch = build_padded_batch(samples)
        assert batch.data.shape == (3, 10, 6)
        assert batch.padded_bytes == 3 * 10 * 6 * 4
        assert batch.lengths == (10, 4, 7)
        assert batch.padding_waste == (10 - 10) + (10 - 4) + (10 - 7)

    def test_zero_padding(self):
        samples = [np.ones((3, 2), dtype=np.float32), np.ones((1, 2), dtype=np.float32)]
        batch = build_padded_batch(samples)
        np.testing.assert_array_equal(batch.data[1, 1:], 0.0)
        np.testing.assert_array_equal(batch.data[1, :1], 1.0)

    def test_mismatched_bins_rejected(self):
        with pytest.raises(ValueError):
            build_padded_batch([np.ones((2, 3), dtype=np.float32), np.ones((2, 4), dtype=np.float32)])

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            build_padded_batch([])


class TestProxyStep:
    def test_returns_time_and_checksum(self):
        batch = build_padded_batch([np.ones((5, 4), dtype=np.float32)])
        seconds, checksum = proxy_step(batch)
        assert seconds >= 0.0
        assert np.isfinite(checksum)

    def test_checksum_reflects_true_lengths_only(self):
        # padding rows must not feed the arithmetic
        a = build_padded_batch([np.ones((3, 2), dtype=np.float32)])
        padded = Batch(
            data=np.concatenate([a.data, np.zeros((1, 2, 2), dtype=np.float32)], axis=1),
            lengths=a.lengths,
        )
        _, c1 = proxy_step(a)
        _, c2 = proxy_step(padded)
        assert c1 == c2

    def test_checksum_deterministic(self):
        rng = np.random.default_rng(0)
        batch = build_padded_batch([rng.standard_normal((8, 4)).astype(np.float32)])
        _, c1 = proxy_step(batch, CostModel(2, 2))
        _, c2 = proxy_step(batch, CostModel(2, 2))
        assert c1 == c2

    def test_zero_length_sample_skipped(self):
        batch = Batch(data=np.zeros((1, 4, 3), dtype=np.float32), lengths=(0,))
        _, checksum = proxy_step(batch)
        assert checksum == 0.0

    def test_linear_only_scales_linearly(self):
        # with quad_passes 0, doubling lengths should roughly double time;
        # generous bounds keep this stable on a busy machine
        cost = CostModel(linear_passes=40, quad_passes=0)
        short = build_padded_batch([np.ones((400, 64), dtype=np.float32)] * 8)
        long = build_padded_batch([np.ones((800, 64), dtype=np.float32)] * 8)
        proxy_step(short, cost)
        proxy_step(long, cost)
        t_short = min(proxy_step(short, cost)[0] for _ in range(7))
        t_long = min(proxy_step(long, cost)[0] for _ in range(7))
        ratio = t_long / t_short
        assert 1.4 < ratio < 2.9, f"linear cost ratio {ratio}"


class TestRunBenchmark:
    def _corpus(self, count=8, tau=60, bins=12):
        return random_walk_corpus(0, count, tau, bins)

    def test_report_grid_and_keys(self):
        report = run_benchmark(
            self._corpus(),
            methods=BENCH_METHODS,
            n_values=(2, 4),
            max_width=10,
            repetitions=5,
            batch_size=4,
        )
        assert len(report.rows) == 4
        for row in report.rows:
            assert tuple(row.keys()) == ROW_KEYS
        assert report.row("splice_out", 2)["T"] == 10
        with pytest.raises(KeyError):
            report.row("splice_out", 99)

    def test_tm_zero_keeps_lengths(self):
        report = run_benchmark(
            self._corpus(count=6, tau=50),
            methods=("tm_zero",),
            n_values=(2, 8),
            max_width=12,
            repetitions=5,
            batch_size=3,
        )
        for row in report.rows:
            assert row["sum_len"] == 6 * 50
            assert row["padding_waste"] == 0
            assert row["padded_bytes"] == 6 * 50 * 12 * 4

    def test_splice_shrinks_everything(self):
        report = run_benchmark(
            self._corpus(count=6, tau=80),
            methods=("splice_out", "tm_zero"),
            n_values=(8,),
            max_width=20,
            repetitions=5,
            batch_size=6,
        )
        spliced = report.row("splice_out", 8)
        masked = report.row("tm_zero", 8)
        assert spliced["sum_len"] < masked["sum_len"]
        assert spliced["padded_bytes"] <= masked["padded_bytes"]
        assert spliced["sum_len_sq"] < masked["sum_len_sq"]

    def test_deterministic_lengths(self):
        a = run_benchmark(self._corpus(), n_values=(4,), max_width=10, repetitions=5)
        b = run_benchmark(self._corpus(), n_values=(4,), max_width=10, repetitions=5)
        assert a.row("splice_out", 4)["sum_len"] == b.row("splice_out", 4)["sum_len"]
        assert a.config["checksum"] == b.config["checksum"]

    def test_too_few_repetitions(self):
        with pytest.raises(ConfigError):
            run_benchmark(self._corpus(), repetitions=4)

    def test_unknown_method(self):
        with pytest.raises(ConfigError):
            run_benchmark(self._corpus(), methods=("reverb",), repetitions=5)

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            run_benchmark([], repetitions=5)

    def test_json_round_trip(self):
        report = run_benchmark(
            self._corpus(count=4), n_values=(2,), max_width=8, repetitions=5, batch_size=2
        )
        doc = json.loads(report.to_json())
        assert doc["config"]["batch_size"] == 2
        assert len(doc["rows"]) == len(BENCH_METHODS)
        assert doc["rows"][0]["method"] == "splice_out"

    def test_report_type(self):
        report = run_benchmark(self._corpus(count=2), n_values=(2,), repetitions=5)
        assert isinstance(report, BenchReport)
        assert report.config["corpus_size"] == 2
