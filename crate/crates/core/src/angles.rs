//! Sato-Tate angles, the density `(2/pi) sin^2 theta` and the unfolding map
//! `Theta(theta) = (theta - sin theta cos theta) / pi`, its integral.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::eta::{within_deligne_bound, CoefficientTable};
use crate::histogram::Histogram;
use crate::primes::PrimeTable;
use crate::{Error, Result};

/// Default bin count for the angle histogram.
pub const DEFAULT_ANGLE_BINS: usize = 40;

const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleRecord {
    pub prime: u64,
    #[serde(serialize_with = "as_decimal")]
    pub a_p: BigInt,
    pub cos_theta: f64,
    pub theta: f64,
}

fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSeries {
    pub records: Vec<AngleRecord>,
    pub weight: u32,
    pub source_label: String,
}

impl AngleSeries {
    /// Builds the series from `(p, a_p)` pairs in increasing `p`.
    pub fn from_coefficients(
        source_label: impl Into<String>,
        weight: u32,
        coefficients: impl IntoIterator<Item = (u64, BigInt)>,
    ) -> Result<Self> {
        let records = coefficients
            .into_iter()
            .map(|(p, a_p)| {
                let (cos_theta, theta) = angle(&a_p, p, weight)?;
                Ok(AngleRecord {
                    prime: p,
                    a_p,
                    cos_theta,
                    theta,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        debug_assert!(records.windows(2).all(|w| w[0].prime < w[1].prime));
        Ok(AngleSeries {
            records,
            weight,
            source_label: source_label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.theta)
    }
}

/// `cos theta_p = a_p / (2 p^{(k-1)/2})` and `theta_p`. The Deligne bound is
/// checked in exact integer arithmetic first.
pub fn angle(a_p: &BigInt, p: u64, weight: u32) -> Result<(f64, f64)> {
    if !within_deligne_bound(a_p, p, weight) {
        return Err(Error::BoundViolation {
            prime: p,
            a_p: a_p.to_string(),
        });
    }
    let pf = p as f64;
    // p^{(k-1)/2} = p^{(k-2)/2} * sqrt(p) for even k
    let norm = 2.0 * pf.powi((weight as i32 - 2) / 2) * pf.sqrt();
    let c = a_p.to_f64().expect("finite") / norm;
    if c.abs() > 1.0 + CLAMP_TOLERANCE {
        return Err(Error::BoundViolation {
            prime: p,
            a_p: a_p.to_string(),
        });
    }
    let c = c.clamp(-1.0, 1.0);
    Ok((c, c.acos()))
}

/// One record per prime in `primes`, bad primes included.
pub fn angle_series(table: &CoefficientTable, primes: &PrimeTable) -> Result<AngleSeries> {
    if primes.limit() > table.n_max() {
        return Err(Error::OutOfRange {
            index: primes.limit(),
            max: table.n_max(),
        });
    }
    #[cfg(feature = "parallel")]
    let records: Vec<Result<AngleRecord>> = {
        use rayon::prelude::*;
        primes
            .primes()
            .par_iter()
            .map(|&p| record(table, p))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<Result<AngleRecord>> = primes.iter().map(|p| record(table, p)).collect();
    Ok(AngleSeries {
        records: records.into_iter().collect::<Result<_>>()?,
        weight: table.weight(),
        source_label: table.label().to_string(),
    })
}

fn record(table: &CoefficientTable, p: u64) -> Result<AngleRecord> {
    let a_p = table.get(p);
    let (cos_theta, theta) = angle(&a_p, p, table.weight())?;
    Ok(AngleRecord {
        prime: p,
        a_p,
        cos_theta,
        theta,
    })
}

fn check_angle(theta: f64) -> Result<()> {
    if (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "theta",
            value: theta,
        })
    }
}

/// `(2/pi) sin^2 theta` on `[0, pi]`.
pub fn st_density(theta: f64) -> Result<f64> {
    check_angle(theta)?;
    Ok(density_unchecked(theta))
}

pub(crate) fn density_unchecked(theta: f64) -> f64 {
    let s = theta.sin();
    2.0 / PI * s * s
}

/// `Theta(theta) = (theta - sin theta cos theta) / pi`, mapping `[0, pi]` onto
/// `[0, 1]`.
pub fn unfold(theta: f64) -> Result<f64> {
    check_angle(theta)?;
    Ok(unfold_unchecked(theta))
}

pub(crate) fn unfold_unchecked(theta: f64) -> f64 {
    let theta = theta.clamp(0.0, PI);
    ((theta - theta.sin() * theta.cos()) / PI).clamp(0.0, 1.0)
}

/// Sorted unfolded values `Theta_1 <= ... <= Theta_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnfoldedSeries {
    values: Vec<f64>,
}

impl UnfoldedSeries {
    /// Sorts `values`; each must lie in `[0, 1]`.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain {
                what: "unfolded value",
                value: v,
            });
        }
        values.sort_by(f64::total_cmp);
        Ok(UnfoldedSeries { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `M`, the number of unfolded values.
    pub fn sample_size(&self) -> usize {
        self.values.len()
    }
}

pub fn unfolded_series(angles: &AngleSeries) -> Result<UnfoldedSeries> {
    if angles.is_empty() {
        return Err(Error::EmptySeries);
    }
    UnfoldedSeries::from_values(angles.thetas().map(unfold_unchecked).collect())
}

/// Empirical density of the angles on `[0, pi]` next to `st_density` at bin
/// midpoints.
pub fn density_histogram(angles: &AngleSeries, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::config(
            "bins",
            format!("need at least 2 bins, got {bins}"),
        ));
    }
    let thetas: Vec<f64> = angles.thetas().collect();
    Histogram::build(&thetas, 0.0, PI, bins, density_unchecked)
}
