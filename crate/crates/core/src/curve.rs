//! Point counting on Weierstrass curves over prime fields.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over the integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor: u64,
    pub label: String,
}

impl CurveSpec {
    pub fn new(label: impl Into<String>, coeffs: [i64; 5], conductor: u64) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = coeffs;
        let curve = CurveSpec {
            a1,
            a2,
            a3,
            a4,
            a6,
            conductor,
            label: label.into(),
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        let disc = self.discriminant();
        if disc.is_zero() {
            return Err(Error::InvalidCurve(format!(
                "{}: singular model (discriminant 0)",
                self.label
            )));
        }
        if self.conductor == 0 {
            return Err(Error::InvalidCurve(format!(
                "{}: conductor must be positive",
                self.label
            )));
        }
        for p in prime_factors(self.conductor) {
            if !(&disc % p).is_zero() {
                return Err(Error::InvalidCurve(format!(
                    "{}: prime {p} divides the conductor but not the discriminant {disc}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    fn b_invariants(&self) -> [BigInt; 4] {
        let [a1, a2, a3, a4, a6] = self.coefficients().map(BigInt::from);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        [b2, b4, b6, b8]
    }

    /// Discriminant of the Weierstrass model.
    pub fn discriminant(&self) -> BigInt {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        !(self.discriminant() % p).is_zero()
    }

    /// Primes dividing the discriminant.
    pub fn bad_primes(&self) -> Vec<u64> {
        let disc = self.discriminant().abs();
        match disc.to_u64() {
            Some(d) => prime_factors(d),
            None => prime_factors(self.conductor),
        }
    }
}

/// `#E(F_p)` including the point at infinity.
pub fn count_points(curve: &CurveSpec, p: u64) -> Result<u64> {
    debug_assert!(crate::primes::is_prime(p), "{p} is not prime");
    if !curve.has_good_reduction(p) {
        return Err(Error::BadReduction(p));
    }
    if p <= 3 {
        return Ok(enumerate_points(curve, p));
    }
    Ok((p as i64 + 1 + character_sum(curve, p)) as u64)
}

/// `a_p = p + 1 - #E(F_p)` at a prime of good reduction.
///
/// Panics if the result breaks the Hasse bound, which can only mean a bug in
/// the counting code.
pub fn trace_ap(curve: &CurveSpec, p: u64) -> Result<i64> {
    let count = count_points(curve, p)?;
    let a_p = p as i64 + 1 - count as i64;
    assert!(
        (a_p as i128) * (a_p as i128) <= 4 * p as i128,
        "Hasse bound broken for {} at p = {p}: a_p = {a_p}",
        curve.label
    );
    Ok(a_p)
}

fn residue(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

fn enumerate_points(curve: &CurveSpec, p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = curve.coefficients().map(|a| residue(a, p));
    let mut count = 1;
    for x in 0..p {
        let rhs = (((x + a2) * x % p + a4) * x + a6) % p;
        for y in 0..p {
            let lhs = (y * y + a1 * x % p * y + a3 * y) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

// For odd p, (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6, so the number of
// affine points is sum_x (1 + chi(g(x))) and #E = p + 1 + sum_x chi(g(x)).
fn character_sum(curve: &CurveSpec, p: u64) -> i64 {
    let [b2, b4, b6, _] = curve.b_invariants();
    let red = |b: &BigInt| -> u64 {
        let r = b % p;
        let r = if r.is_negative() { r + p } else { r };
        r.to_u64().expect("residue fits u64")
    };
    let (c2, c1, c0) = (red(&b2), (2 * red(&b4)) % p, red(&b6));

    let mut square = vec![false; p as usize];
    for y in 1..p {
        square[(y * y % p) as usize] = true;
    }
    let mut sum = 0i64;
    for x in 0..p {
        let g = (((4 * x + c2) % p * x + c1) % p * x + c0) % p;
        if g != 0 {
            sum += if square[g as usize] { 1 } else { -1 };
        }
    }
    sum
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
