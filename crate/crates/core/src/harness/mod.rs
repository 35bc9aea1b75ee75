//! Test signals, sampling and noise, metrics, and scheme comparisons.

mod experiment;
mod metrics;
mod sampling;
mod signals;

pub use experiment::{
    compare_schemes, compare_trials, estimate_noise_sigma, hard_threshold_denoise, ComparisonRow,
    Experiment, ExperimentKind, ExperimentParams, LambdaChoice, RecoveryMode, Reference,
    SchemeOutcome, SignalSource, Trial, DEFAULT_LAMBDA_GRID,
};
pub use metrics::{
    evaluate, psnr, rmse, signal_peak, support_overlap, MetricsReport, IMAGE_PEAK,
    SUPPORT_THRESHOLD,
};
pub use sampling::{
    add_noise, sample_indices, subsample, subsample_columns, NoiseLevel, SampleSize,
};
pub use signals::{
    heavisine, runge, runge_at, synth_row_sparse, synth_tree_signal, synthetic_image, SynthTree,
    TreeCoefficientLaw,
};
