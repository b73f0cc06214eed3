use num_bigint::BigInt;
use serde::Serialize;

use crate::curve::{trace_ap, CurveSpec};
use crate::eta::{within_deligne_bound, CoefficientTable};
use crate::hecke::{
    bad_prime_notes, check_all_recursions, check_multiplicativity, BadPrimeNote, ConsistencyReport,
};
use crate::primes::sieve;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub prime: u64,
    pub eta: String,
    pub curve: i64,
}

/// Eta coefficients against point-count traces at good primes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub primes_checked: u64,
    /// Bad primes of the table or of the curve model, not compared.
    pub skipped_primes: Vec<u64>,
    /// In increasing prime order.
    pub mismatches: Vec<Mismatch>,
}

pub fn cross_check(
    table: &CoefficientTable,
    curve: &CurveSpec,
    primes: &[u64],
) -> CrossCheckReport {
    let (good, skipped): (Vec<u64>, Vec<u64>) = primes
        .iter()
        .copied()
        .filter(|&p| p <= table.n_max())
        .partition(|&p| !table.is_bad_prime(p) && curve.has_good_reduction(p));
    let compare = |p: u64| -> Option<Mismatch> {
        let traced = trace_ap(curve, p).expect("good reduction checked above");
        let eta = table.get(p);
        (eta != BigInt::from(traced)).then(|| Mismatch {
            prime: p,
            eta: eta.to_string(),
            curve: traced,
        })
    };
    #[cfg(feature = "parallel")]
    let mismatches: Vec<Mismatch> = {
        use rayon::prelude::*;
        good.par_iter().filter_map(|&p| compare(p)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mismatches: Vec<Mismatch> = good.iter().filter_map(|&p| compare(p)).collect();
    CrossCheckReport {
        primes_checked: good.len() as u64,
        skipped_primes: skipped,
        mismatches,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub label: String,
    pub n_max: u64,
    pub weight: u32,
    pub a_1_is_one: bool,
    pub multiplicativity: ConsistencyReport,
    pub recursion: ConsistencyReport,
    pub bound_violations: Vec<u64>,
    pub bad_primes: Vec<BadPrimeNote>,
    pub cross_check: Option<CrossCheckReport>,
}

impl VerifyOutcome {
    pub fn passes(&self) -> bool {
        self.a_1_is_one
            && self.multiplicativity.passes()
            && self.recursion.passes()
            && self.bound_violations.is_empty()
            && self
                .cross_check
                .as_ref()
                .is_none_or(|c| c.mismatches.is_empty())
    }
}

/// Hecke checks, exact bound checks at every prime index and, given a curve,
/// the eta-versus-point-count comparison.
pub fn verify(table: &CoefficientTable, curve: Option<&CurveSpec>) -> Result<VerifyOutcome> {
    let primes = if table.n_max() >= 2 {
        sieve(table.n_max())?.primes().to_vec()
    } else {
        Vec::new()
    };
    let bound_violations = primes
        .iter()
        .copied()
        .filter(|&p| !within_deligne_bound(&table.get(p), p, table.weight()))
        .collect();
    Ok(VerifyOutcome {
        label: table.label().to_string(),
        n_max: table.n_max(),
        weight: table.weight(),
        a_1_is_one: table
            .coefficient(1)
            .map(|a| a == BigInt::from(1))
            .unwrap_or(false),
        multiplicativity: check_multiplicativity(table),
        recursion: check_all_recursions(table),
        bound_violations,
        bad_primes: bad_prime_notes(table),
        cross_check: curve.map(|c| cross_check(table, c, &primes)),
    })
}
