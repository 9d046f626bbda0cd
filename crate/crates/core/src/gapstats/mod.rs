//! Unfolding, nearest-gap and pair statistics, reference laws and distances.

mod distance;
mod experiments;
mod reference;
mod unfold;

pub use distance::{
    distribution_distance, distribution_distance_two_sample, histogram, ComparisonReport, HistBin, DEFAULT_BINS,
    DEFAULT_RESAMPLES,
};
pub use reference::{
    npoint_correlation, pair_correlation, pair_correlation_reference, sine_kernel, surmise_cdf, surmise_pdf,
    surmise_quantile, CorrelationCurve, Reference, Surmise, Exponential, PAIR_KERNEL_WIDTH,
};
pub use unfold::{bulk_gaps, unfold, unfold_points, BulkWindow, GapSample};
pub use experiments::{
    compare_bulk_gaps, four_moment_config, histogram_table, pair_correlation_experiment, pooled_bulk_gaps,
    surmise_experiment, GapComparisonConfig, PairCorrelationConfig, SurmiseConfig,
};
