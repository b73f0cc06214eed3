//! Consistency of coefficient tables with the Euler product of their
//! L-function: multiplicativity over coprime indices and, at good primes, the
//! recursion `a_{p^{r+1}} = a_p a_{p^r} - p^{k-1} a_{p^{r-1}}` forced by the
//! local factor `1 - a_p p^{-s} + p^{k-1-2s}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::eta::CoefficientTable;
use crate::{Error, Result};

/// Largest index scanned by [`check_multiplicativity`].
pub const MULTIPLICATIVITY_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub indices: Vec<u64>,
    #[serde(serialize_with = "as_decimal")]
    pub expected: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub actual: BigInt,
}

fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub checked_pairs: u64,
    pub violations: Vec<Violation>,
    pub max_index: u64,
}

impl ConsistencyReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ConsistencyReport) {
        self.checked_pairs += other.checked_pairs;
        self.violations.extend(other.violations);
        self.max_index = self.max_index.max(other.max_index);
    }
}

/// Checks `a_n = prod a_{p^e}` over the prime-power factorisation of every
/// `n <= min(n_max, MULTIPLICATIVITY_CAP)` with at least two distinct prime
/// factors. Each composite index is tested once against its prime-power
/// parts, so a single corrupted coefficient yields a single violation.
pub fn check_multiplicativity(table: &CoefficientTable) -> ConsistencyReport {
    let limit = table.n_max().min(MULTIPLICATIVITY_CAP);
    let spf = smallest_prime_factors(limit);
    let mut report = ConsistencyReport {
        max_index: limit,
        ..Default::default()
    };
    for n in 2..=limit {
        let parts = prime_power_parts(n, &spf);
        if parts.len() < 2 {
            continue;
        }
        report.checked_pairs += 1;
        let expected = match table.as_i128() {
            Some(a) => product_i128(parts.iter().map(|&q| a[q as usize])),
            None => None,
        }
        .unwrap_or_else(|| parts.iter().map(|&q| table.get(q)).product());
        let actual = table.get(n);
        if expected != actual {
            report.violations.push(Violation {
                indices: parts,
                expected,
                actual,
            });
        }
    }
    report
}

fn product_i128(mut it: impl Iterator<Item = i128>) -> Option<BigInt> {
    it.try_fold(1i128, |acc, x| acc.checked_mul(x))
        .map(BigInt::from)
}

/// Checks the prime-power recursion at a good prime `p` for every
/// `p^{r+1} <= n_max`, `r >= 0`, with `a_{p^0} = 1` and `a_{p^{-1}} = 0`.
pub fn check_hecke_recursion(table: &CoefficientTable, p: u64) -> Result<ConsistencyReport> {
    if table.is_bad_prime(p) {
        return Err(Error::BadPrime(p));
    }
    let n_max = table.n_max();
    if p.checked_mul(p).is_none_or(|sq| sq > n_max) {
        return Err(Error::OutOfRange {
            index: p.saturating_mul(p),
            max: n_max,
        });
    }
    let a_p = table.get(p);
    let norm = num_traits::pow(BigInt::from(p), table.weight().saturating_sub(1) as usize);
    let mut report = ConsistencyReport::default();
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    let mut index = Some(p);
    while let Some(n) = index.filter(|&n| n <= n_max) {
        let expected = &a_p * &cur - &norm * &prev;
        let actual = table.get(n);
        report.checked_pairs += 1;
        report.max_index = n;
        if expected != actual {
            report.violations.push(Violation {
                indices: vec![p, n],
                expected,
                actual: actual.clone(),
            });
        }
        prev = std::mem::replace(&mut cur, actual);
        index = n.checked_mul(p);
    }
    Ok(report)
}

/// Runs [`check_hecke_recursion`] at every good prime with `p^2 <= n_max`.
pub fn check_all_recursions(table: &CoefficientTable) -> ConsistencyReport {
    let mut total = ConsistencyReport::default();
    let mut p = 2u64;
    while p * p <= table.n_max() {
        if crate::primes::is_prime(p) && !table.is_bad_prime(p) {
            total.merge(check_hecke_recursion(table, p).expect("good prime in range"));
        }
        p += 1;
    }
    total
}

/// Informational note on a bad prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadPrimeNote {
    pub prime: u64,
    #[serde(serialize_with = "as_decimal")]
    pub a_p: BigInt,
    /// For weight 2, whether `|a_p| <= 1`. Always `None` for other weights.
    pub within_reduction_bound: Option<bool>,
}

pub fn bad_prime_notes(table: &CoefficientTable) -> Vec<BadPrimeNote> {
    table
        .bad_primes()
        .iter()
        .filter(|&&p| p <= table.n_max())
        .map(|&p| {
            let a_p = table.get(p);
            let within_reduction_bound = (table.weight() == 2).then(|| a_p.abs() <= BigInt::one());
            BadPrimeNote {
                prime: p,
                a_p,
                within_reduction_bound,
            }
        })
        .collect()
}

/// Rebuilds `a_1 ..= a_{n_max}` from prime-indexed values alone: the Hecke
/// recursion at good primes, `a_{p^r} = a_p^r` at bad primes, and
/// multiplicativity across distinct primes.
pub fn reconstruct_from_primes(
    prime_values: &BTreeMap<u64, BigInt>,
    weight: u32,
    bad_primes: &[u64],
    n_max: u64,
) -> Result<Vec<BigInt>> {
    let spf = smallest_prime_factors(n_max);
    let mut a = vec![BigInt::zero(); n_max as usize + 1];
    if n_max >= 1 {
        a[1] = BigInt::one();
    }
    for n in 2..=n_max {
        let parts = prime_power_parts(n, &spf);
        if parts.len() >= 2 {
            a[n as usize] = parts.iter().map(|&q| a[q as usize].clone()).product();
            continue;
        }
        let p = spf[n as usize];
        let a_p = prime_values
            .get(&p)
            .ok_or(Error::OutOfRange {
                index: p,
                max: n_max,
            })?
            .clone();
        a[n as usize] = if n == p {
            a_p
        } else if bad_primes.contains(&p) {
            &a_p * &a[(n / p) as usize]
        } else {
            let norm = num_traits::pow(BigInt::from(p), weight.saturating_sub(1) as usize);
            let below = if n / p == p {
                BigInt::one()
            } else {
                a[(n / p / p) as usize].clone()
            };
            &a_p * &a[(n / p) as usize] - norm * below
        };
    }
    a.remove(0);
    Ok(a)
}

fn smallest_prime_factors(limit: u64) -> Vec<u64> {
    let len = limit as usize + 1;
    let mut spf = vec![0u64; len];
    for i in 2..len {
        if spf[i] == 0 {
            let mut j = i;
            while j < len {
                if spf[j] == 0 {
                    spf[j] = i as u64;
                }
                j += i;
            }
        }
    }
    spf
}

/// Prime-power parts of `n` in increasing prime order, e.g. 12 -> [4, 3].
fn prime_power_parts(mut n: u64, spf: &[u64]) -> Vec<u64> {
    let mut parts = Vec::new();
    while n > 1 {
        let p = spf[n as usize];
        let mut q = 1;
        while n.is_multiple_of(p) {
            n /= p;
            q *= p;
        }
        parts.push(q);
    }
    parts
}
