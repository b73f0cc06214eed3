use std::f64::consts::PI;

use num_bigint::BigInt;
use proptest::prelude::*;
use sato_tate::angles::{st_density, unfold, UnfoldedSeries};
use sato_tate::eta::{eta_product, EtaFactor, EtaProductSpec};
use sato_tate::presets;
use sato_tate::primes::{first_n_primes, sieve};
use sato_tate::spacing::{poisson_cdf, poisson_density, spacings};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

#[test]
fn unfold_matches_quadrature_of_density() {
    for j in 0..=1000 {
        let theta = PI * j as f64 / 1000.0;
        let integral = simpson(|t| st_density(t).unwrap(), 0.0, theta, 2000);
        let closed = unfold(theta).unwrap();
        assert!(
            (closed - integral).abs() < 1e-10,
            "theta {theta}: {closed} vs {integral}"
        );
    }
}

#[test]
fn poisson_normalisation_and_mean() {
    for k in 0..=2 {
        let mass = simpson(|s| poisson_density(k, s).unwrap(), 0.0, 40.0, 40_000);
        let mean = simpson(|s| s * poisson_density(k, s).unwrap(), 0.0, 40.0, 40_000);
        assert!((1.0 - 1e-9..=1.0).contains(&mass), "k {k}: mass {mass}");
        assert!((mean - (k as f64 + 1.0)).abs() < 1e-6, "k {k}: mean {mean}");
    }
}

#[test]
fn poisson_cdf_derivative_is_density() {
    let h = 1e-5;
    for k in 0..=4 {
        for j in 1..=400 {
            let s = 0.05 * j as f64;
            let fd = (poisson_cdf(k, s + h).unwrap() - poisson_cdf(k, s - h).unwrap()) / (2.0 * h);
            assert!(
                (fd - poisson_density(k, s).unwrap()).abs() < 1e-6,
                "k {k} s {s}"
            );
        }
    }
}

#[test]
fn poisson_cdf_is_monotone_to_one() {
    for k in 0..=3 {
        let mut prev = 0.0;
        for j in 0..=600 {
            let c = poisson_cdf(k, 0.1 * j as f64).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        assert!(prev > 1.0 - 1e-15);
    }
}

// Naive spacings straight from the definition, one pair at a time.
fn naive_spacings(values: &[f64], k: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i + k + 1 < m {
        out.push((sorted[i + k + 1] - sorted[i]) * m as f64);
        i += 1;
    }
    out
}

fn unit_values(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 2..=max)
}

proptest! {
    #[test]
    fn unfold_symmetry(theta in 0.0f64..=PI) {
        let a = unfold(theta).unwrap();
        let b = unfold(PI - theta).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spacings_match_brute_force(values in unit_values(12), k in 0u32..4) {
        let series = UnfoldedSeries::from_values(values.clone()).unwrap();
        let naive = naive_spacings(&values, k as usize);
        match spacings(&series, k) {
            Ok(s) => prop_assert_eq!(s.values(), &naive[..]),
            Err(_) => prop_assert!(naive.is_empty()),
        }
    }

    #[test]
    fn spacing_telescopes_exactly(raw in prop::collection::vec(0u32..=1 << 20, 2..=1000), k in 0u32..5) {
        // multiples of 2^-20 keep every difference, product and partial sum exact
        let values: Vec<f64> = raw.iter().map(|&r| r as f64 / (1u64 << 20) as f64).collect();
        let series = UnfoldedSeries::from_values(values).unwrap();
        prop_assume!(series.sample_size() >= k as usize + 2);
        let base = spacings(&series, 0).unwrap();
        let higher = spacings(&series, k).unwrap();
        for (i, &s) in higher.values().iter().enumerate() {
            let summed: f64 = base.values()[i..=i + k as usize].iter().sum();
            prop_assert_eq!(summed, s);
        }
    }

    #[test]
    fn spacing_sum_is_scaled_range(values in unit_values(300)) {
        let series = UnfoldedSeries::from_values(values).unwrap();
        let s = spacings(&series, 0).unwrap();
        let m = series.sample_size() as f64;
        let v = series.values();
        let total: f64 = s.values().iter().sum();
        prop_assert!((total - m * (v[v.len() - 1] - v[0])).abs() <= 1e-12 * m);
        prop_assert!(s.values().iter().all(|&x| x >= 0.0));
        prop_assert_eq!(s.len(), series.sample_size() - 1);
    }

    #[test]
    fn first_n_is_prefix(n in 1usize..3000) {
        let t = first_n_primes(n).unwrap();
        prop_assert_eq!(t.count(), n);
        let s = sieve(t.limit()).unwrap();
        prop_assert_eq!(t.primes(), &s.primes()[..n]);
    }
}

#[test]
fn coprime_pairs_multiply() {
    for spec in [presets::eta_a(), presets::eta_b(), presets::eta_c()] {
        let t = eta_product(&spec, 600).unwrap();
        for m in 1..=600u64 {
            for n in m..=600 / m {
                if gcd(m, n) == 1 {
                    let lhs = t.coefficient(m * n).unwrap();
                    let rhs = t.coefficient(m).unwrap() * t.coefficient(n).unwrap();
                    assert_eq!(lhs, rhs, "{} m={m} n={n}", spec.label());
                }
            }
        }
    }
}

#[test]
fn dilation_identity_for_weight_two_factor() {
    // eta(q^5)^24 = Delta(q^5), so its a_{5n} is tau(n) and the rest vanish
    let base = eta_product(&presets::eta_c(), 80).unwrap();
    let spec = EtaProductSpec::new("d5", vec![EtaFactor::new(5, 24)], vec![]).unwrap();
    let dilated = eta_product(&spec, 400).unwrap();
    for n in 1..=400u64 {
        let want = if n % 5 == 0 {
            base.coefficient(n / 5).unwrap()
        } else {
            BigInt::from(0)
        };
        assert_eq!(dilated.coefficient(n).unwrap(), want);
    }
}
