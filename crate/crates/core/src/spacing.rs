//! Next^k nearest-neighbour spacings of unfolded values and their comparison
//! with the Poisson prediction `p_k(s) = s^k e^{-s} / k!`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::angles::UnfoldedSeries;
use crate::histogram::Histogram;
use crate::{Error, Result};

pub const DEFAULT_SPACING_BINS: usize = 50;

/// Minimum expected count per chi-square cell after merging.
pub const MIN_EXPECTED: f64 = 5.0;

/// Default upper end of the spacing histogram: 6 for k = 0, 1 and 8 for k = 2.
pub fn default_spacing_range(k: u32) -> f64 {
    match k {
        0 | 1 => 6.0,
        2 => 8.0,
        k => {
            let mean = k as f64 + 1.0;
            (mean + 6.0 * mean.sqrt()).ceil()
        }
    }
}

/// Significance level of a test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    FivePercent,
    OnePercent,
}

impl Level {
    pub fn alpha(self) -> f64 {
        match self {
            Level::FivePercent => 0.05,
            Level::OnePercent => 0.01,
        }
    }

    /// Asymptotic Kolmogorov critical coefficient `c` in `c / sqrt(n)`.
    pub fn ks_coefficient(self) -> f64 {
        match self {
            Level::FivePercent => 1.358,
            Level::OnePercent => 1.628,
        }
    }
}

pub fn ks_critical(n: usize, level: Level) -> f64 {
    level.ks_coefficient() / (n as f64).sqrt()
}

pub fn chi_square_critical(dof: u32, level: Level) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - level.alpha())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingSample {
    pub k: u32,
    values: Vec<f64>,
    sample_size: usize,
}

impl SpacingSample {
    /// `s_i`, in index order (not sorted).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The scaling factor `M`.
    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `s_i = (Theta_{i+k+1} - Theta_i) * M` for `i = 1 ..= M - k - 1`.
pub fn spacings(series: &UnfoldedSeries, k: u32) -> Result<SpacingSample> {
    let m = series.sample_size();
    let needed = k as usize + 2;
    if m < needed {
        return Err(Error::InsufficientSample { needed, have: m });
    }
    let theta = series.values();
    let step = k as usize + 1;
    let scale = m as f64;
    let values = theta
        .iter()
        .zip(&theta[step..])
        .map(|(lo, hi)| (hi - lo) * scale)
        .collect();
    Ok(SpacingSample {
        k,
        values,
        sample_size: m,
    })
}

fn check_spacing(s: f64) -> Result<()> {
    if s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "s",
            value: s,
        })
    }
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// `s^k e^{-s} / k!`.
pub fn poisson_density(k: u32, s: f64) -> Result<f64> {
    check_spacing(s)?;
    Ok(density_unchecked(k, s))
}

fn density_unchecked(k: u32, s: f64) -> f64 {
    if s == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * s.ln() - s - ln_factorial(k)).exp()
}

/// `1 - e^{-s} sum_{j<=k} s^j / j!`, the Gamma(k+1, 1) distribution function.
pub fn poisson_cdf(k: u32, s: f64) -> Result<f64> {
    check_spacing(s)?;
    Ok(cdf_unchecked(k, s))
}

fn cdf_unchecked(k: u32, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        term *= s / j as f64;
        sum += term;
    }
    (1.0 - (-s).exp() * sum).clamp(0.0, 1.0)
}

/// Histogram of a spacing sample on `[0, range]` with `p_k` as reference.
pub fn spacing_histogram(sample: &SpacingSample, bins: usize, range: f64) -> Result<Histogram> {
    let k = sample.k;
    Histogram::build(&sample.values, 0.0, range, bins, |s| {
        density_unchecked(k, s)
    })
}

/// Goodness-of-fit summary. Operations fill the fields they compute and leave
/// the rest `None`; [`GofReport::merge`] combines partial reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GofReport {
    pub ks_statistic: Option<f64>,
    pub ks_critical_5pct: Option<f64>,
    pub chi_square: Option<f64>,
    pub degrees_of_freedom: Option<u32>,
    pub chi_square_critical_5pct: Option<f64>,
    pub sample_mean: Option<f64>,
    pub sample_count: u64,
    pub pass_at_5pct: bool,
}

impl GofReport {
    pub fn merge(self, other: GofReport) -> GofReport {
        let some_test = |r: &GofReport| r.ks_statistic.is_some() || r.chi_square.is_some();
        let pass = match (some_test(&self), some_test(&other)) {
            (true, true) => self.pass_at_5pct && other.pass_at_5pct,
            (true, false) => self.pass_at_5pct,
            (false, true) => other.pass_at_5pct,
            (false, false) => false,
        };
        GofReport {
            ks_statistic: self.ks_statistic.or(other.ks_statistic),
            ks_critical_5pct: self.ks_critical_5pct.or(other.ks_critical_5pct),
            chi_square: self.chi_square.or(other.chi_square),
            degrees_of_freedom: self.degrees_of_freedom.or(other.degrees_of_freedom),
            chi_square_critical_5pct: self
                .chi_square_critical_5pct
                .or(other.chi_square_critical_5pct),
            sample_mean: self.sample_mean.or(other.sample_mean),
            sample_count: self.sample_count.max(other.sample_count),
            pass_at_5pct: pass,
        }
    }
}

/// Two-sided KS distance between the empirical CDF of `sorted` and `cdf`,
/// taken at both one-sided limits of every jump.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

fn ks_report(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<GofReport> {
    if values.is_empty() {
        return Err(Error::InsufficientSample { needed: 1, have: 0 });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = ks_statistic(&sorted, cdf);
    let critical = ks_critical(sorted.len(), Level::FivePercent);
    Ok(GofReport {
        ks_statistic: Some(d),
        ks_critical_5pct: Some(critical),
        sample_count: sorted.len() as u64,
        pass_at_5pct: d < critical,
        ..Default::default()
    })
}

/// KS test of a spacing sample against Gamma(k+1, 1).
pub fn ks_test(sample: &SpacingSample) -> Result<GofReport> {
    let k = sample.k;
    ks_report(&sample.values, |s| cdf_unchecked(k, s))
}

/// KS distance of unfolded values from the uniform law on `[0, 1]`.
pub fn uniformity_ks(series: &UnfoldedSeries) -> Result<GofReport> {
    ks_report(series.values(), |x| x.clamp(0.0, 1.0))
}

/// Pearson chi-square of `hist` against the model with distribution function
/// `cdf`. Cell probabilities are CDF differences; out-of-range samples join
/// the outermost bins, and adjacent bins are merged left to right until each
/// cell expects at least [`MIN_EXPECTED`] samples.
pub fn chi_square_test(
    hist: &Histogram,
    sample_count: u64,
    cdf: impl Fn(f64) -> f64,
) -> Result<GofReport> {
    let bins = hist.bins();
    if bins == 0 || sample_count == 0 {
        return Err(Error::UnderSampled);
    }
    let n = sample_count as f64;
    let last = bins - 1;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for j in 0..bins {
        let lo = if j == 0 { 0.0 } else { cdf(hist.edges[j]) };
        let hi = if j == last {
            1.0
        } else {
            cdf(hist.edges[j + 1])
        };
        obs += hist.counts[j] as f64;
        if j == 0 {
            obs += hist.underflow as f64;
        }
        if j == last {
            obs += hist.overflow as f64;
        }
        exp += n * (hi - lo).max(0.0);
        if exp >= MIN_EXPECTED {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(cell) => {
                cell.0 += obs;
                cell.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::UnderSampled);
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() as u32 - 1;
    let critical = chi_square_critical(dof, Level::FivePercent);
    Ok(GofReport {
        chi_square: Some(statistic),
        degrees_of_freedom: Some(dof),
        chi_square_critical_5pct: Some(critical),
        sample_count,
        pass_at_5pct: statistic < critical,
        ..Default::default()
    })
}

/// Chi-square of a spacing histogram against `p_k`.
pub fn spacing_chi_square(hist: &Histogram, sample: &SpacingSample) -> Result<GofReport> {
    let k = sample.k;
    chi_square_test(hist, sample.len() as u64, |s| cdf_unchecked(k, s))
}

/// Sample mean of the spacings; the model mean is `k + 1`.
pub fn mean_check(sample: &SpacingSample) -> f64 {
    if sample.is_empty() {
        return f64::NAN;
    }
    sample.values.iter().sum::<f64>() / sample.len() as f64
}

/// Allowed deviation `4 sqrt((k+1)/n)` of the sample mean from `k + 1`.
pub fn mean_tolerance(k: u32, n: usize) -> f64 {
    4.0 * ((k as f64 + 1.0) / n as f64).sqrt()
}

/// Scaled gaps `(Theta_j - Theta_i) * M`, `j > i`, up to `range`, counted per
/// unit length per point: `density = count / (M * width)`. Uncorrelated points
/// give a flat density of 1, which is the reference column.
pub fn pair_correlation(series: &UnfoldedSeries, bins: usize, range: f64) -> Result<Histogram> {
    let m = series.sample_size();
    if m < 2 {
        return Err(Error::InsufficientSample { needed: 2, have: m });
    }
    if bins == 0 || range.is_nan() || range <= 0.0 {
        return Err(Error::config(
            "pair_correlation",
            "need bins >= 1 and a positive range",
        ));
    }
    let theta = series.values();
    let scale = m as f64;
    let width = range / bins as f64;
    let mut counts = vec![0u64; bins];
    for (i, &lo) in theta.iter().enumerate() {
        for &hi in &theta[i + 1..] {
            let gap = (hi - lo) * scale;
            if gap > range {
                break;
            }
            counts[((gap / width) as usize).min(bins - 1)] += 1;
        }
    }
    let edges = (0..=bins).map(|j| width * j as f64).collect();
    Ok(Histogram::from_counts(
        edges,
        counts,
        0,
        0,
        m as u64,
        |_| 1.0,
    ))
}

/// Fraction of `replications` samples of `m` i.i.d. uniform points whose
/// order-`k` spacings pass the 5% KS test. Calibration only.
pub fn monte_carlo_ks_pass_rate(m: usize, k: u32, replications: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0usize;
    for _ in 0..replications {
        let points: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let series = UnfoldedSeries::from_values(points)?;
        if ks_test(&spacings(&series, k)?)?.pass_at_5pct {
            passes += 1;
        }
    }
    Ok(passes as f64 / replications as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize) -> UnfoldedSeries {
        UnfoldedSeries::from_values((1..=m).map(|i| i as f64 / m as f64).collect()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn grid_spacings() {
        let g = grid(100);
        let s0 = spacings(&g, 0).unwrap();
        assert_eq!(s0.len(), 99);
        assert!(s0.values().iter().all(|&s| close(s, 1.0, 1e-12)));
        let s2 = spacings(&g, 2).unwrap();
        assert_eq!(s2.len(), 97);
        assert!(s2.values().iter().all(|&s| close(s, 3.0, 1e-12)));
        assert!(close(mean_check(&s0), 1.0, 1e-12));
        assert!(close(mean_check(&s2), 3.0, 1e-12));
    }

    #[test]
    fn three_point_spacings() {
        let u = UnfoldedSeries::from_values(vec![0.1, 0.4, 0.5]).unwrap();
        let s = spacings(&u, 0).unwrap();
        assert!(close(s.values()[0], 0.9, 1e-12));
        assert!(close(s.values()[1], 0.3, 1e-12));
        assert_eq!(s.sample_size(), 3);
    }

    #[test]
    fn insufficient_sample() {
        let u = UnfoldedSeries::from_values(vec![0.5]).unwrap();
        assert!(matches!(
            spacings(&u, 0),
            Err(Error::InsufficientSample { needed: 2, have: 1 })
        ));
        let u = UnfoldedSeries::from_values(vec![0.1, 0.5, 0.7]).unwrap();
        assert!(spacings(&u, 1).is_ok());
        assert!(spacings(&u, 2).is_err());
    }

    #[test]
    fn poisson_values() {
        assert_eq!(poisson_density(0, 0.0).unwrap(), 1.0);
        assert_eq!(poisson_density(2, 0.0).unwrap(), 0.0);
        assert!(close(
            poisson_density(1, 1.0).unwrap(),
            (-1f64).exp(),
            1e-15
        ));
        assert!(poisson_density(0, -1.0).is_err());

        assert!(close(poisson_cdf(0, 2f64.ln()).unwrap(), 0.5, 1e-15));
        for k in 0..5 {
            assert_eq!(poisson_cdf(k, 0.0).unwrap(), 0.0);
        }
        assert!(close(
            poisson_cdf(1, 2.0).unwrap(),
            1.0 - 3.0 * (-2f64).exp(),
            1e-15
        ));
        assert!(close(poisson_cdf(1, 2.0).unwrap(), 0.59399, 1e-5));
        assert!(poisson_cdf(1, -0.5).is_err());
    }

    // Inverse transform by bisection on the closed-form CDF.
    fn gamma_quantile(k: u32, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if poisson_cdf(k, mid).unwrap() < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn ks_on_quantile_grid() {
        for k in 0..3 {
            let n = 400;
            let values: Vec<f64> = (0..n)
                .map(|i| gamma_quantile(k, (i as f64 + 0.5) / n as f64))
                .collect();
            let sample = SpacingSample {
                k,
                values,
                sample_size: n + k as usize + 1,
            };
            let r = ks_test(&sample).unwrap();
            assert!(r.ks_statistic.unwrap() <= 1.0 / n as f64);
            assert!(r.pass_at_5pct);
        }
    }

    #[test]
    fn ks_degenerate_sample() {
        // every s_i = 1: the empirical CDF jumps from 0 to 1 at s = 1, so the
        // distance is max(F(1), 1 - F(1)) = 1 - e^{-1}
        let s = spacings(&grid(500), 0).unwrap();
        let r = ks_test(&s).unwrap();
        assert!(close(r.ks_statistic.unwrap(), 1.0 - (-1f64).exp(), 1e-9));
        assert!(!r.pass_at_5pct);
    }

    #[test]
    fn ks_empty() {
        let s = SpacingSample {
            k: 0,
            values: vec![],
            sample_size: 1,
        };
        assert!(matches!(ks_test(&s), Err(Error::InsufficientSample { .. })));
    }

    #[test]
    fn uniformity_examples() {
        let m = 250;
        let u = UnfoldedSeries::from_values((1..=m).map(|i| (i as f64 - 0.5) / m as f64).collect())
            .unwrap();
        assert!(close(
            uniformity_ks(&u).unwrap().ks_statistic.unwrap(),
            0.5 / m as f64,
            1e-12
        ));
        let single = UnfoldedSeries::from_values(vec![0.5]).unwrap();
        assert!(close(
            uniformity_ks(&single).unwrap().ks_statistic.unwrap(),
            0.5,
            1e-15
        ));
    }

    #[test]
    fn chi_square_exact_fit_is_zero() {
        // uniform model on [0, 1], 10 bins, 10 samples per bin
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let h = Histogram::build(&samples, 0.0, 1.0, 10, |_| 1.0).unwrap();
        let r = chi_square_test(&h, 100, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.chi_square.unwrap().abs() < 1e-20);
        assert_eq!(r.degrees_of_freedom, Some(9));
        assert!(r.pass_at_5pct);
    }

    #[test]
    fn chi_square_merges_small_cells() {
        let samples: Vec<f64> = (0..20).map(|i| (i as f64 + 0.5) / 20.0).collect();
        let h = Histogram::build(&samples, 0.0, 1.0, 10, |_| 1.0).unwrap();
        // 2 expected per bin -> merged in threes, remainder folded into the last
        let r = chi_square_test(&h, 20, |x| x.clamp(0.0, 1.0)).unwrap();
        assert_eq!(r.degrees_of_freedom, Some(2));
    }

    #[test]
    fn chi_square_under_sampled() {
        let h = Histogram::build(&[0.5], 0.0, 1.0, 1, |_| 1.0).unwrap();
        assert!(matches!(
            chi_square_test(&h, 1, |x| x),
            Err(Error::UnderSampled)
        ));
        let h = Histogram::build(&[0.2, 0.7], 0.0, 1.0, 4, |_| 1.0).unwrap();
        assert!(matches!(
            chi_square_test(&h, 2, |x| x),
            Err(Error::UnderSampled)
        ));
        let h = Histogram::build(&vec![0.5; 1000], 0.0, 1.0, 1, |_| 1.0).unwrap();
        assert!(matches!(
            chi_square_test(&h, 1000, |x| x),
            Err(Error::UnderSampled)
        ));
    }

    #[test]
    fn critical_values() {
        assert!(close(ks_critical(2000, Level::FivePercent), 0.03037, 1e-5));
        assert!(close(ks_critical(2000, Level::OnePercent), 0.0364, 1e-4));
        assert!(close(ks_critical(10000, Level::OnePercent), 0.01628, 1e-6));
        // tabulated chi-square quantiles
        assert!(close(
            chi_square_critical(10, Level::FivePercent),
            18.307,
            1e-3
        ));
        assert!(close(
            chi_square_critical(10, Level::OnePercent),
            23.209,
            1e-3
        ));
    }

    #[test]
    fn mean_tolerance_value() {
        assert!(close(mean_tolerance(1, 9998), 0.0566, 1e-4));
    }

    #[test]
    fn pair_correlation_two_points() {
        let u = UnfoldedSeries::from_values(vec![0.2, 0.7]).unwrap();
        let h = pair_correlation(&u, 1, 2.0).unwrap();
        assert_eq!(h.counts, vec![1]);
        assert!(close(h.density[0], 0.25, 1e-15));
        assert_eq!(h.reference, vec![1.0]);
        let one = UnfoldedSeries::from_values(vec![0.2]).unwrap();
        assert!(pair_correlation(&one, 1, 2.0).is_err());
    }

    #[test]
    fn pair_correlation_grid_spikes() {
        // gaps on a grid are integers, so only bins touching an integer fill
        let h = pair_correlation(&grid(200), 40, 3.5).unwrap();
        let filled: Vec<usize> = (0..h.bins()).filter(|&j| h.counts[j] > 0).collect();
        assert!((3..=6).contains(&filled.len()), "{filled:?}");
        for j in filled {
            let (lo, hi) = (h.edges[j] - 1e-6, h.edges[j + 1] + 1e-6);
            assert!((1..=3).any(|n| (lo..=hi).contains(&(n as f64))), "bin {j}");
        }
        assert_eq!(h.counts.iter().sum::<u64>(), 199 + 198 + 197);
    }

    #[test]
    fn pair_correlation_uniform_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let h = pair_correlation(&UnfoldedSeries::from_values(pts).unwrap(), 20, 10.0).unwrap();
        for d in &h.density {
            assert!((d - 1.0).abs() < 0.1, "{d}");
        }
    }

    #[test]
    fn gof_merge() {
        let a = GofReport {
            ks_statistic: Some(0.01),
            pass_at_5pct: true,
            sample_count: 10,
            ..Default::default()
        };
        let b = GofReport {
            chi_square: Some(3.0),
            pass_at_5pct: false,
            sample_count: 10,
            ..Default::default()
        };
        let m = a.clone().merge(b);
        assert_eq!(m.ks_statistic, Some(0.01));
        assert_eq!(m.chi_square, Some(3.0));
        assert!(!m.pass_at_5pct);
        assert!(a.merge(GofReport::default()).pass_at_5pct);
    }
}
