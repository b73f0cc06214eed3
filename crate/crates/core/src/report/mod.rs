//! Pipeline orchestration: configuration, the coefficient cache, and the CSV
//! and JSON artifacts behind the angle, unfolding and spacing plots.

mod cache;
mod config;
mod output;
mod pipeline;
mod schema;
mod verify;

pub use cache::{
    decode_table, encode_table, CacheHeader, CacheStatus, CoefficientCache, CACHE_ENV,
    CACHE_VERSION,
};
pub use config::{
    ConfigFile, RunConfig, SampleSize, Source, DEFAULT_PAIR_BINS, DEFAULT_PAIR_RANGE,
};
pub use output::{format_float, histogram_csv, sha256_hex};
pub use pipeline::{
    run_pipeline, Acceptance, ConfigEcho, CrossCheckSummary, DensityFigure, Figures, PairFigure,
    Report, RunSummary, SpacingAcceptance, SpacingFigure, UnfoldedFigure,
};
pub use schema::{validate_report, REPORT_SCHEMA};
pub use verify::{cross_check, verify, CrossCheckReport, VerifyOutcome};
