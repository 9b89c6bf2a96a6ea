//! Box-counting multifractal analysis of intraday series, with a
//! shuffle-based test of whether the measured multifractality exceeds what
//! random reorderings of the same values produce.
//!
//! Pipeline for one day: [`measure`] coarse-grains the series into boxes,
//! [`partition`] evaluates `ln χ_q(l)`, [`scaling`] fits `τ(q)`,
//! [`spectrum`] Legendre-transforms to `(α, f(α))`, and [`bootstrap`]
//! repeats all of it on shuffled copies.

pub mod analysis;
pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod export;
pub mod ingest;
pub mod measure;
pub mod partition;
pub mod rng;
pub mod scaling;
pub mod spectrum;
pub mod stats;
pub mod synth;

pub use analysis::{analyze_series, DayAnalysis, DaySummary};
pub use bootstrap::{
    batch_summary, bootstrap_analysis, bootstrap_days, scatter_fit, shuffle_series, BatchSummary,
    BootstrapConfig, BootstrapReport, ScatterLine,
};
pub use error::{Error, Result};
pub use ingest::{
    parse_intraday_csv, segment_by_day, BoxScheme, ColumnSpec, PriceSeries, Record, Segmentation,
};
pub use measure::{build_box_measure, BoxMeasure};
pub use partition::{log_partition_value, partition_surface, MomentGrid, PartitionSurface};
pub use scaling::{fit_mass_exponents, tau_linearity_report, LinearityReport, MassExponents};
pub use spectrum::{legendre_spectrum, spectrum_stats, SingularitySpectrum, SpectrumStats};
