//! Variable bandpass periodic block bootstrap (VBPBB) for periodically
//! correlated time series.
//!
//! The plain periodic block bootstrap (PBB) resamples a series in blocks
//! aligned to a component's period, preserving the periodic correlation
//! structure but also resampling every interfering component (noise, trend,
//! shocks). VBPBB first isolates the component with a KZFT bandpass filter
//! centered at the component frequency and block-bootstraps the filtered
//! series instead, which sharply narrows the confidence bands for periodic
//! means. PBB is exactly the trivial VBPBB whose filter window is `m = 1`.
//!
//! Modules:
//! - [`series`]: time series, periodic components, confidence bands.
//! - [`kzft`]: KZ/KZFT filters, coefficient generation, bandwidth selection.
//! - [`bootstrap`]: resampling, ensembles, bands, and the two pipelines.
//! - [`inference`]: significance tests, width ratios, scanning, R-squared.
//! - [`synth`]: synthetic generator with analytic ground truth.
//! - [`ingest`]: CSV ingestion, differencing, per-capita rates.

pub mod bootstrap;
pub mod error;
pub mod inference;
pub mod ingest;
pub mod kzft;
pub mod rng;
pub mod series;
pub mod synth;

pub use bootstrap::{
    bootstrap_ensemble, bootstrap_ensemble_at_period, ci_band, combine_components, pbb_pipeline,
    pbb_resample, periodic_mean, phase_counts, quantile, quantile_sorted, vbpbb_pipeline,
    BootstrapConfig, FilterOverrides, PbbOutcome, PhaseMeanEnsemble, ResampleMode, VbpbbOutcome,
};
pub use error::{Error, ErrorCategory, Result};
pub use inference::{
    extend_periodic, harmonic_scan, horizontal_line_test, median_band_width, r_squared,
    run_analysis, width_ratio, AnalysisReport, AnalysisRequest, ComponentEntry,
    HorizontalLineTest, MethodSelection, PeriodRequest, ScanEntry, SignificanceReport,
};
pub use ingest::{
    cumulative_to_incident, ingest, load_csv, normalize_per_capita, GapPolicy, IngestConfig,
    IngestSummary,
};
pub use kzft::{
    kz_coefficients, kz_lowpass, kzft_apply, reconstruct_real, select_bandwidth, EdgeMode,
    FilteredComponent, Frequency, KZFTPlan,
};
pub use series::{CIBand, ComponentSpec, Method, TimeSeries};
pub use synth::{
    coverage_experiment, generate, true_periodic_mean, CoverageReport, LevelShift, SynthComponent,
    SynthSpec, Waveform,
};
