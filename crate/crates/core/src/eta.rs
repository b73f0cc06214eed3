//! Exact q-expansions of eta products `eta(q^m1)^e1 ... eta(q^mr)^er`.
//!
//! Each `eta(q^m) = q^{m/24} prod (1 - q^{mn})` contributes the pentagonal
//! series `sum (-1)^k q^{m k(3k-1)/2}`, whose nonzero coefficients are all
//! `+-1`. Raising to the exponent is done by repeated in-place sparse-by-dense
//! multiplication, so the inner loop is only additions. Series are held in
//! `i128` with checked arithmetic and recomputed with [`BigInt`] if that
//! overflows.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaFactor {
    pub dilation: u32,
    pub exponent: u32,
}

impl EtaFactor {
    pub fn new(dilation: u32, exponent: u32) -> Self {
        EtaFactor { dilation, exponent }
    }
}

impl fmt::Display for EtaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.dilation, self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaProductSpec {
    factors: Vec<EtaFactor>,
    bad_primes: Vec<u64>,
    label: String,
}

impl EtaProductSpec {
    pub fn new(
        label: impl Into<String>,
        factors: Vec<EtaFactor>,
        mut bad_primes: Vec<u64>,
    ) -> Result<Self> {
        let label = label.into();
        if factors.is_empty() {
            return Err(Error::InvalidSpec(format!("{label}: no eta factors")));
        }
        if let Some(f) = factors.iter().find(|f| f.dilation == 0 || f.exponent == 0) {
            return Err(Error::InvalidSpec(format!(
                "{label}: dilation and exponent must be positive, got {f}"
            )));
        }
        let twist: u64 = factors
            .iter()
            .map(|f| f.dilation as u64 * f.exponent as u64)
            .sum();
        if !twist.is_multiple_of(24) {
            return Err(Error::InvalidSpec(format!(
                "{label}: sum of dilation*exponent is {twist}, not divisible by 24"
            )));
        }
        let exponents: u64 = factors.iter().map(|f| f.exponent as u64).sum();
        if !exponents.is_multiple_of(4) {
            return Err(Error::InvalidSpec(format!(
                "{label}: weight {exponents}/2 is not an even integer"
            )));
        }
        if let Some(&p) = bad_primes.iter().find(|&&p| !crate::primes::is_prime(p)) {
            return Err(Error::InvalidSpec(format!(
                "{label}: bad prime {p} is not prime"
            )));
        }
        bad_primes.sort_unstable();
        bad_primes.dedup();
        Ok(EtaProductSpec {
            factors,
            bad_primes,
            label,
        })
    }

    pub fn factors(&self) -> &[EtaFactor] {
        &self.factors
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent).sum::<u32>() / 2
    }

    /// Exponent of the leading `q` power, `sum(m_i e_i) / 24`.
    pub fn leading_power(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| f.dilation as u64 * f.exponent as u64)
            .sum::<u64>()
            / 24
    }

    /// `"1^2,11^2"` form, the inverse of [`parse_factors`].
    pub fn factors_string(&self) -> String {
        self.factors
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Parses `"m^e,m^e,..."`.
pub fn parse_factors(text: &str) -> Result<Vec<EtaFactor>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (m, e) = t.split_once('^').unwrap_or((t, "1"));
            let parse = |s: &str| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidSpec(format!("cannot parse eta factor `{t}`")))
            };
            Ok(EtaFactor::new(parse(m)?, parse(e)?))
        })
        .collect()
}

/// Sparse integer series, terms sorted by exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSeries {
    terms: Vec<(u64, i64)>,
}

impl SparseSeries {
    pub fn terms(&self) -> &[(u64, i64)] {
        &self.terms
    }

    pub fn coefficient(&self, n: u64) -> i64 {
        self.terms
            .binary_search_by_key(&n, |&(e, _)| e)
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `prod_{n>=1} (1 - q^n)` through `q^n_max`, via the pentagonal number theorem.
pub fn euler_series(n_max: u64) -> SparseSeries {
    let mut terms = vec![(0, 1)];
    for k in 1u64.. {
        let g = k * (3 * k - 1) / 2;
        if g > n_max {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        terms.push((g, sign));
        let h = g + k;
        if h <= n_max {
            terms.push((h, sign));
        }
    }
    SparseSeries { terms }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Store {
    Fixed(Vec<i128>),
    Big(Vec<BigInt>),
}

/// Exact Fourier coefficients `a_1 ..= a_{n_max}` of a cusp form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    // index 0 holds a zero placeholder so that `store[n] = a_n`
    store: Store,
    weight: u32,
    bad_primes: Vec<u64>,
    label: String,
}

impl CoefficientTable {
    /// Builds a table from `values[i] = a_{i+1}`, choosing `i128` storage when
    /// every value fits.
    pub fn from_values(
        label: impl Into<String>,
        weight: u32,
        bad_primes: Vec<u64>,
        values: Vec<BigInt>,
    ) -> Self {
        let fixed: Option<Vec<i128>> = std::iter::once(Some(0))
            .chain(values.iter().map(ToPrimitive::to_i128))
            .collect();
        let store = match fixed {
            Some(v) => Store::Fixed(v),
            None => Store::Big(std::iter::once(BigInt::zero()).chain(values).collect()),
        };
        CoefficientTable {
            store,
            weight,
            bad_primes,
            label: label.into(),
        }
    }

    pub fn n_max(&self) -> u64 {
        match &self.store {
            Store::Fixed(v) => v.len() as u64 - 1,
            Store::Big(v) => v.len() as u64 - 1,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    pub fn is_bad_prime(&self, p: u64) -> bool {
        self.bad_primes.contains(&p)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `a_n` for `1 <= n <= n_max`.
    pub fn coefficient(&self, n: u64) -> Result<BigInt> {
        if n == 0 || n > self.n_max() {
            return Err(Error::OutOfRange {
                index: n,
                max: self.n_max(),
            });
        }
        Ok(self.get(n))
    }

    pub(crate) fn get(&self, n: u64) -> BigInt {
        match &self.store {
            Store::Fixed(v) => BigInt::from(v[n as usize]),
            Store::Big(v) => v[n as usize].clone(),
        }
    }

    /// Coefficients as `i128`, indexed so that `slice[n] = a_n`, when the whole
    /// table fits that width.
    pub fn as_i128(&self) -> Option<&[i128]> {
        match &self.store {
            Store::Fixed(v) => Some(v),
            Store::Big(_) => None,
        }
    }

    /// `a_1 ..= a_{n_max}`.
    pub fn values(&self) -> Vec<BigInt> {
        (1..=self.n_max()).map(|n| self.get(n)).collect()
    }

    /// Describes every broken invariant: `a_1 = 1` and the Deligne bound at
    /// each prime index.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_max() >= 1 && !self.get(1).is_one() {
            out.push(format!("a_1 = {}", self.get(1)));
        }
        for p in (2..=self.n_max()).filter(|&p| crate::primes::is_prime(p)) {
            let a_p = self.get(p);
            if !within_deligne_bound(&a_p, p, self.weight) {
                out.push(format!("bound violated at p = {p}: a_p = {a_p}"));
            }
        }
        out
    }
}

/// Exact test of `a_p^2 <= 4 p^(weight-1)`.
pub fn within_deligne_bound(a_p: &BigInt, p: u64, weight: u32) -> bool {
    let bound =
        BigInt::from(4) * num_traits::pow(BigInt::from(p), weight.saturating_sub(1) as usize);
    a_p * a_p <= bound
}

/// Coefficients `a_1 ..= a_{n_max}` of the eta product.
pub fn eta_product(spec: &EtaProductSpec, n_max: u64) -> Result<CoefficientTable> {
    match eta_product_fixed(spec, n_max) {
        Err(Error::WidthExceeded) => {
            let series: Vec<BigInt> =
                expand(spec, series_order(spec, n_max)?).expect("BigInt never overflows");
            Ok(to_table(spec, n_max, series))
        }
        other => other,
    }
}

/// Like [`eta_product`] but restricted to `i128`; fails with
/// [`Error::WidthExceeded`] rather than promoting.
pub fn eta_product_fixed(spec: &EtaProductSpec, n_max: u64) -> Result<CoefficientTable> {
    let series: Vec<i128> = expand(spec, series_order(spec, n_max)?).ok_or(Error::WidthExceeded)?;
    Ok(to_table(spec, n_max, series))
}

fn series_order(spec: &EtaProductSpec, n_max: u64) -> Result<Option<usize>> {
    if n_max == 0 {
        return Err(Error::EmptyRange(
            "truncation order must be at least 1".into(),
        ));
    }
    Ok(n_max.checked_sub(spec.leading_power()).map(|o| o as usize))
}

fn to_table<T: Into<BigInt>>(
    spec: &EtaProductSpec,
    n_max: u64,
    series: Vec<T>,
) -> CoefficientTable {
    let lead = spec.leading_power() as usize;
    let mut values = vec![BigInt::zero(); n_max as usize];
    for (i, c) in series.into_iter().enumerate() {
        // a_n sits at q^{n - lead}
        values[lead + i - 1] = c.into();
    }
    CoefficientTable::from_values(
        spec.label(),
        spec.weight(),
        spec.bad_primes().to_vec(),
        values,
    )
}

trait SeriesInt: Clone + Zero + One {
    fn add_checked(self, other: &Self) -> Option<Self>;
    fn sub_checked(self, other: &Self) -> Option<Self>;
}

impl SeriesInt for i128 {
    #[inline]
    fn add_checked(self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    #[inline]
    fn sub_checked(self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
}

impl SeriesInt for BigInt {
    fn add_checked(self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn sub_checked(self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
}

/// Coefficients of `prod_i P(q^{m_i})^{e_i}` through `q^order`, where
/// `P = prod (1 - q^n)`. `None` on overflow.
fn expand<T: SeriesInt>(spec: &EtaProductSpec, order: Option<usize>) -> Option<Vec<T>> {
    let Some(order) = order else {
        return Some(Vec::new());
    };
    let mut series = vec![T::zero(); order + 1];
    series[0] = T::one();
    for factor in spec.factors() {
        let m = factor.dilation as usize;
        // (shift, negative) for every pentagonal term past the constant 1
        let shifts: Vec<(usize, bool)> = euler_series((order / m) as u64).terms()[1..]
            .iter()
            .map(|&(g, s)| (g as usize * m, s < 0))
            .collect();
        for _ in 0..factor.exponent {
            // descending n reads only lower, not yet updated, entries
            for n in (1..=order).rev() {
                let mut acc = series[n].clone();
                for &(shift, negative) in &shifts {
                    if shift > n {
                        break;
                    }
                    acc = if negative {
                        acc.sub_checked(&series[n - shift])?
                    } else {
                        acc.add_checked(&series[n - shift])?
                    };
                }
                series[n] = acc;
            }
        }
    }
    Some(series)
}
