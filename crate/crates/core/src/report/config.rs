use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::angles::DEFAULT_ANGLE_BINS;
use crate::curve::CurveSpec;
use crate::eta::{parse_factors, EtaProductSpec};
use crate::presets;
use crate::spacing::DEFAULT_SPACING_BINS;
use crate::{Error, Result};

pub const DEFAULT_PAIR_BINS: usize = 50;
pub const DEFAULT_PAIR_RANGE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Coefficients from an eta product, optionally cross-checked against a
    /// curve with the same L-function.
    Eta {
        spec: EtaProductSpec,
        curve: Option<CurveSpec>,
        cross_check: bool,
    },
    /// Traces from point counting alone; bad primes are left out.
    Curve(CurveSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSize {
    NumPrimes(usize),
    PrimeLimit(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub sample: SampleSize,
    pub k_list: Vec<u32>,
    pub bins: usize,
    pub spacing_bins: usize,
    /// Upper end of every spacing histogram; `None` picks a per-k default.
    pub spacing_range: Option<f64>,
    pub pair_correlation: bool,
    pub pair_bins: usize,
    pub pair_range: f64,
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub strict_stats: bool,
}

impl RunConfig {
    pub fn from_preset(name: &str, output_dir: impl Into<PathBuf>) -> Result<Self> {
        ConfigFile {
            preset: Some(name.to_string()),
            out: Some(output_dir.into()),
            ..Default::default()
        }
        .resolve()
    }

    pub fn label(&self) -> &str {
        match &self.source {
            Source::Eta { spec, .. } => spec.label(),
            Source::Curve(c) => &c.label,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.sample {
            SampleSize::NumPrimes(0) => {
                return Err(Error::config("num_primes", "must be at least 1"))
            }
            SampleSize::PrimeLimit(x) if x < 2 => {
                return Err(Error::config("prime_limit", "must be at least 2"))
            }
            _ => {}
        }
        if self.k_list.is_empty() {
            return Err(Error::config("k", "at least one spacing order is required"));
        }
        if self.bins < 2 {
            return Err(Error::config("bins", "need at least 2 bins"));
        }
        if self.spacing_bins == 0 {
            return Err(Error::config("spacing_bins", "need at least 1 bin"));
        }
        if let Some(r) = self.spacing_range {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::config("spacing_range", "must be positive"));
            }
        }
        if self.pair_correlation
            && (self.pair_bins == 0 || self.pair_range.is_nan() || self.pair_range <= 0.0)
        {
            return Err(Error::config(
                "pair_range",
                "pair correlation needs bins >= 1 and a positive range",
            ));
        }
        if let Source::Eta {
            curve: None,
            cross_check: true,
            ..
        } = &self.source
        {
            return Err(Error::config(
                "cross_check",
                "cross-check requested without a curve",
            ));
        }
        Ok(())
    }
}

/// Flat key-value run description, read from TOML or assembled from CLI flags.
/// Every key is optional; [`ConfigFile::overlay`] lets flags override a file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// `a`, `b` or `c`; supplies defaults for everything below.
    pub preset: Option<String>,
    pub label: Option<String>,
    /// Eta factors as `m^e,m^e,...`.
    pub eta: Option<String>,
    pub bad_primes: Option<Vec<u64>>,
    /// `[a1, a2, a3, a4, a6]`.
    pub curve: Option<Vec<i64>>,
    pub conductor: Option<u64>,
    pub cross_check: Option<bool>,
    pub num_primes: Option<usize>,
    pub prime_limit: Option<u64>,
    pub k: Option<Vec<u32>>,
    pub bins: Option<usize>,
    pub spacing_bins: Option<usize>,
    pub spacing_range: Option<f64>,
    pub pair_correlation: Option<bool>,
    pub pair_bins: Option<usize>,
    pub pair_range: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub strict_stats: Option<bool>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        ConfigFile { $($f: $top.$f.or($base.$f)),* }
    };
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: ConfigFile) -> ConfigFile {
        let base = self;
        overlay_fields!(base, top; preset, label, eta, bad_primes, curve, conductor, cross_check,
            num_primes, prime_limit, k, bins, spacing_bins, spacing_range, pair_correlation,
            pair_bins, pair_range, out, cache, strict_stats)
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let preset = self.preset.as_deref().map(presets::preset).transpose()?;

        let label = self
            .label
            .clone()
            .or_else(|| preset.as_ref().map(|p| p.name.to_string()))
            .unwrap_or_else(|| "custom".to_string());

        let explicit_curve = match &self.curve {
            Some(c) => {
                let coeffs: [i64; 5] = c.as_slice().try_into().map_err(|_| {
                    Error::config("curve", "expected five coefficients a1,a2,a3,a4,a6")
                })?;
                let conductor = self
                    .conductor
                    .ok_or_else(|| Error::config("conductor", "required together with `curve`"))?;
                Some(
                    CurveSpec::new(label.clone(), coeffs, conductor)
                        .map_err(|e| Error::config("curve", e.to_string()))?,
                )
            }
            None => None,
        };

        let eta = match (&self.eta, &preset) {
            (Some(text), _) => {
                let factors =
                    parse_factors(text).map_err(|e| Error::config("eta", e.to_string()))?;
                let bad = self.bad_primes.clone().unwrap_or_default();
                Some(
                    EtaProductSpec::new(label.clone(), factors, bad)
                        .map_err(|e| Error::config("eta", e.to_string()))?,
                )
            }
            (None, Some(p)) => {
                let bad = self
                    .bad_primes
                    .clone()
                    .unwrap_or_else(|| p.eta.bad_primes().to_vec());
                Some(
                    EtaProductSpec::new(label.clone(), p.eta.factors().to_vec(), bad)
                        .map_err(|e| Error::config("bad_primes", e.to_string()))?,
                )
            }
            (None, None) => None,
        };
        // a preset's curve only belongs to the preset's own eta product
        let curve = explicit_curve.or_else(|| match (&self.eta, &preset) {
            (None, Some(p)) => p.curve.clone().map(|mut c| {
                c.label = label.clone();
                c
            }),
            _ => None,
        });

        let source = match (eta, curve) {
            (Some(spec), curve) => {
                let cross_check = self.cross_check.unwrap_or(curve.is_some());
                Source::Eta {
                    spec,
                    curve,
                    cross_check,
                }
            }
            (None, Some(curve)) => Source::Curve(curve),
            (None, None) => return Err(Error::config("source", "set `preset`, `eta` or `curve`")),
        };

        let sample = match (self.num_primes, self.prime_limit) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "num_primes",
                    "set only one of num_primes and prime_limit",
                ));
            }
            (Some(n), None) => SampleSize::NumPrimes(n),
            (None, Some(x)) => SampleSize::PrimeLimit(x),
            (None, None) => match &preset {
                Some(p) => SampleSize::NumPrimes(p.num_primes),
                None => return Err(Error::config("num_primes", "set num_primes or prime_limit")),
            },
        };

        let config = RunConfig {
            source,
            sample,
            k_list: self.k.unwrap_or_else(|| vec![0, 1, 2]),
            bins: self.bins.unwrap_or(DEFAULT_ANGLE_BINS),
            spacing_bins: self.spacing_bins.unwrap_or(DEFAULT_SPACING_BINS),
            spacing_range: self.spacing_range,
            pair_correlation: self.pair_correlation.unwrap_or(false),
            pair_bins: self.pair_bins.unwrap_or(DEFAULT_PAIR_BINS),
            pair_range: self.pair_range.unwrap_or(DEFAULT_PAIR_RANGE),
            output_dir: self.out.unwrap_or_else(|| PathBuf::from("out")),
            cache_dir: self.cache,
            strict_stats: self.strict_stats.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }
}
