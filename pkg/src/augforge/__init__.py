"""Audio augmentation ops with benchmarking and scoring statistics.

The core idea: augmentations that remove time intervals outright
(splice_out) keep sequences short, so padded batches get cheaper, while
augmentations that overwrite intervals (time_mask) keep length and cost.
This package provides both families over spectrogram matrices and raw
waveforms, a log-mel front end, a padded-batch cost benchmark, statistic
distortion analysis, and WER scoring with bootstrap and matched-pairs
significance statistics. Everything stochastic is reproducible from a
64-bit seed.
"""

from .analysis import DistortionReport, distortion, distortion_sweep, time_avg_stats
from .augment import (
    FILL_MEAN,
    FILL_ZERO,
    FREQ_AXIS,
    TIME_AXIS,
    Interval,
    IntervalSet,
    LabeledSample,
    SpliceConfig,
    TokenSpan,
    apply_mask,
    apply_splice,
    cutmix,
    fade,
    freq_mask,
    merge_intervals,
    mixup,
    sample_beta,
    sample_intervals,
    semantic_intervals,
    speed_perturb,
    splice_out,
    splice_out_wave,
    time_mask,
    time_warp,
)
from .bench import Batch, BenchReport, CostModel, build_padded_batch, proxy_step, run_benchmark
from .errors import (
    AugforgeError,
    BoundsError,
    ConfigError,
    FormatError,
    UnsupportedFormatError,
)
from .evalstats import (
    BootstrapResult,
    ErrorCounts,
    MapssweResult,
    align_wer,
    bootstrap_wer,
    corpus_wer,
    mapsswe,
)
from .features import FeatureConfig, extract_logmel, frame_signal, mel_filterbank, power_spectrum
from .pipeline import PipelineConfig, PipelineStep, apply_pipeline, load_pipeline_config, parse_pipeline_config
from .rng import RandomSource, ScriptedSource, SplitMix64Source, derive_seed, mix64
from .signal_io import (
    Waveform,
    as_matrix,
    read_csv_matrix,
    read_spgm,
    read_wav,
    write_csv_matrix,
    write_spgm,
    write_wav,
)

__version__ = "0.1.0"
