use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use num_bigint::BigInt;
use serde::Serialize;

use super::cache::{CacheStatus, CoefficientCache};
use super::config::{RunConfig, SampleSize, Source};
use super::output::{angles_csv, histogram_csv, sha256_hex, unfolded_csv};
use super::schema::validate_report;
use super::verify::cross_check;
use crate::angles::{angle_series, density_histogram, unfold, unfolded_series, AngleSeries};
use crate::curve::trace_ap;
use crate::eta::eta_product;
use crate::hecke::{bad_prime_notes, BadPrimeNote};
use crate::primes::{first_n_primes, sieve, PrimeTable};
use crate::spacing::{
    chi_square_critical, chi_square_test, default_spacing_range, ks_critical, ks_test, mean_check,
    mean_tolerance, pair_correlation, spacing_chi_square, spacing_histogram, spacings,
    uniformity_ks, GofReport, Level,
};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// The run configuration as recorded in `report.json`. Paths are left out so
/// that identical runs into different directories produce identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub source: String,
    pub label: String,
    pub eta: Option<String>,
    pub bad_primes: Vec<u64>,
    pub curve: Option<Vec<i64>>,
    pub conductor: Option<u64>,
    pub cross_check: bool,
    pub num_primes: Option<usize>,
    pub prime_limit: Option<u64>,
    pub k: Vec<u32>,
    pub bins: usize,
    pub spacing_bins: usize,
    pub spacing_range: Option<f64>,
    pub pair_correlation: bool,
    pub strict_stats: bool,
}

impl ConfigEcho {
    fn new(config: &RunConfig) -> Self {
        let (source, eta, bad_primes, curve, cross_check) = match &config.source {
            Source::Eta {
                spec,
                curve,
                cross_check,
            } => (
                "eta",
                Some(spec.factors_string()),
                spec.bad_primes().to_vec(),
                curve.as_ref(),
                *cross_check,
            ),
            Source::Curve(c) => ("curve", None, c.bad_primes(), Some(c), false),
        };
        let (num_primes, prime_limit) = match config.sample {
            SampleSize::NumPrimes(n) => (Some(n), None),
            SampleSize::PrimeLimit(x) => (None, Some(x)),
        };
        ConfigEcho {
            source: source.to_string(),
            label: config.label().to_string(),
            eta,
            bad_primes,
            curve: curve.map(|c| c.coefficients().to_vec()),
            conductor: curve.map(|c| c.conductor),
            cross_check,
            num_primes,
            prime_limit,
            k: config.k_list.clone(),
            bins: config.bins,
            spacing_bins: config.spacing_bins,
            spacing_range: config.spacing_range,
            pair_correlation: config.pair_correlation,
            strict_stats: config.strict_stats,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CrossCheckSummary {
    pub enabled: bool,
    pub primes_checked: u64,
    pub skipped_primes: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityFigure {
    pub bins: usize,
    pub gof: GofReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnfoldedFigure {
    pub gof: GofReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingFigure {
    pub k: u32,
    pub range: f64,
    pub bins: usize,
    pub mean_tolerance: f64,
    pub gof: GofReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairFigure {
    pub bins: usize,
    pub range: f64,
    /// Largest `|density - 1|` over the bins.
    pub max_abs_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figures {
    pub density: DensityFigure,
    pub unfolded: UnfoldedFigure,
    pub spacings: Vec<SpacingFigure>,
    pub pair_correlation: Option<PairFigure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingAcceptance {
    pub k: u32,
    pub ks_1pct: bool,
    pub mean_within_tolerance: bool,
}

/// Statistical thresholds at the 1% level: chi-square of the angle histogram,
/// KS uniformity of the unfolded values, and per order k the spacing KS
/// distance plus `|mean - (k+1)| <= 4 sqrt((k+1)/n)`.
#[derive(Debug, Clone, Serialize)]
pub struct Acceptance {
    /// `None` when the histogram has too few samples for a chi-square test.
    pub density_chi_square_1pct: Option<bool>,
    pub uniformity_ks_1pct: bool,
    pub spacings: Vec<SpacingAcceptance>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub label: String,
    pub weight: u32,
    pub sample_size: usize,
    pub prime_limit: u64,
    pub n_max: u64,
    pub cross_check: CrossCheckSummary,
    pub bad_primes: Vec<BadPrimeNote>,
    pub figures: Figures,
    pub acceptance: Acceptance,
    /// File name to SHA-256 of its contents.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: Report,
    pub files: Vec<PathBuf>,
    pub cache_status: Option<CacheStatus>,
}

/// Coefficients, angles, unfolding, spacings and tests for one
/// configuration; writes every artifact into `config.output_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let primes = match config.sample {
        SampleSize::NumPrimes(n) => first_n_primes(n)?,
        SampleSize::PrimeLimit(x) => sieve(x)?,
    };

    let (angles, cross, bad_notes, cache_status) = match &config.source {
        Source::Eta {
            spec,
            curve,
            cross_check: wanted,
        } => {
            let (table, status) = match &config.cache_dir {
                Some(dir) => {
                    let (t, s) =
                        CoefficientCache::new(dir).load_or_compute(spec, primes.limit())?;
                    (t, Some(s))
                }
                None => (eta_product(spec, primes.limit())?, None),
            };
            let cross = match (curve, wanted) {
                (Some(curve), true) => {
                    let report = cross_check(&table, curve, primes.primes());
                    if let Some(m) = report.mismatches.first() {
                        return Err(Error::CrossCheck {
                            prime: m.prime,
                            eta: m.eta.clone(),
                            curve: m.curve,
                        });
                    }
                    CrossCheckSummary {
                        enabled: true,
                        primes_checked: report.primes_checked,
                        skipped_primes: report.skipped_primes,
                    }
                }
                _ => CrossCheckSummary::default(),
            };
            (
                angle_series(&table, &primes)?,
                cross,
                bad_prime_notes(&table),
                status,
            )
        }
        Source::Curve(curve) => (
            curve_angles(curve, &primes)?,
            CrossCheckSummary::default(),
            Vec::new(),
            None,
        ),
    };

    let mut files: Vec<(String, String)> = Vec::new();
    files.push(("angles.csv".into(), angles_csv(&angles)));

    let density = density_histogram(&angles, config.bins)?;
    let density_gof = chi_square_test(&density, angles.len() as u64, unfold_cdf).ok();
    files.push(("density_hist.csv".into(), histogram_csv(&density)));

    let unfolded = unfolded_series(&angles)?;
    let m = unfolded.sample_size();
    let uniform_gof = uniformity_ks(&unfolded)?;
    files.push(("unfolded.csv".into(), unfolded_csv(&unfolded)));

    let mut spacing_figures = Vec::new();
    let mut spacing_acceptance = Vec::new();
    for &k in &config.k_list {
        let sample = spacings(&unfolded, k)?;
        let range = config
            .spacing_range
            .unwrap_or_else(|| default_spacing_range(k));
        let hist = spacing_histogram(&sample, config.spacing_bins, range)?;
        let mut gof = ks_test(&sample)?;
        if let Ok(chi) = spacing_chi_square(&hist, &sample) {
            gof = gof.merge(chi);
        }
        let mean = mean_check(&sample);
        gof.sample_mean = Some(mean);
        let tolerance = mean_tolerance(k, sample.len());
        spacing_acceptance.push(SpacingAcceptance {
            k,
            ks_1pct: gof.ks_statistic.unwrap_or(1.0) < ks_critical(sample.len(), Level::OnePercent),
            mean_within_tolerance: (mean - (k as f64 + 1.0)).abs() <= tolerance,
        });
        spacing_figures.push(SpacingFigure {
            k,
            range,
            bins: config.spacing_bins,
            mean_tolerance: tolerance,
            gof,
        });
        files.push((format!("spacing_k{k}.csv"), histogram_csv(&hist)));
    }

    let pair = if config.pair_correlation {
        let hist = pair_correlation(&unfolded, config.pair_bins, config.pair_range)?;
        files.push(("pair_correlation.csv".into(), histogram_csv(&hist)));
        Some(PairFigure {
            bins: config.pair_bins,
            range: config.pair_range,
            max_abs_deviation: hist
                .density
                .iter()
                .map(|d| (d - 1.0).abs())
                .fold(0.0, f64::max),
        })
    } else {
        None
    };

    let density_ok = density_gof.as_ref().map(|g| {
        g.chi_square.unwrap_or(f64::INFINITY)
            < chi_square_critical(g.degrees_of_freedom.unwrap_or(1).max(1), Level::OnePercent)
    });
    let uniform_ok = uniform_gof.ks_statistic.unwrap_or(1.0) < ks_critical(m, Level::OnePercent);
    let all_passed = density_ok.unwrap_or(true)
        && uniform_ok
        && spacing_acceptance
            .iter()
            .all(|s| s.ks_1pct && s.mean_within_tolerance);

    fs::create_dir_all(&config.output_dir)?;
    let mut artifacts = BTreeMap::new();
    let mut written = Vec::new();
    for (name, contents) in &files {
        let path = config.output_dir.join(name);
        fs::write(&path, contents)?;
        artifacts.insert(name.clone(), sha256_hex(contents.as_bytes()));
        written.push(path);
    }

    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        config: ConfigEcho::new(config),
        label: config.label().to_string(),
        weight: angles.weight,
        sample_size: m,
        prime_limit: primes.limit(),
        n_max: primes.limit(),
        cross_check: cross,
        bad_primes: bad_notes,
        figures: Figures {
            density: DensityFigure {
                bins: config.bins,
                gof: density_gof.unwrap_or_default(),
            },
            unfolded: UnfoldedFigure { gof: uniform_gof },
            spacings: spacing_figures,
            pair_correlation: pair,
        },
        acceptance: Acceptance {
            density_chi_square_1pct: density_ok,
            uniformity_ks_1pct: uniform_ok,
            spacings: spacing_acceptance,
            all_passed,
        },
        artifacts,
    };
    let json = serde_json::to_value(&report).map_err(|e| Error::Cache(e.to_string()))?;
    validate_report(&json)?;
    let path = config.output_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&json).map_err(|e| Error::Cache(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);

    Ok(RunSummary {
        report,
        files: written,
        cache_status,
    })
}

fn unfold_cdf(theta: f64) -> f64 {
    unfold(theta.clamp(0.0, std::f64::consts::PI)).unwrap_or(0.0)
}

fn curve_angles(curve: &crate::curve::CurveSpec, primes: &PrimeTable) -> Result<AngleSeries> {
    let good: Vec<u64> = primes
        .iter()
        .filter(|&p| curve.has_good_reduction(p))
        .collect();
    let trace = |p: u64| trace_ap(curve, p).map(|a| (p, BigInt::from(a)));
    #[cfg(feature = "parallel")]
    let pairs: Vec<(u64, BigInt)> = {
        use rayon::prelude::*;
        good.par_iter().map(|&p| trace(p)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let pairs: Vec<(u64, BigInt)> = good.iter().map(|&p| trace(p)).collect::<Result<_>>()?;
    AngleSeries::from_coefficients(curve.label.clone(), 2, pairs)
}
