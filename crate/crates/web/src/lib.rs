//! Browser bindings. Each operation returns a JSON string for the page to plot.
//!
//! The `*_json` functions are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use sato_tate::angles::{
    angle_series, density_histogram, st_density, unfold, unfolded_series, UnfoldedSeries,
};
use sato_tate::eta::{
    eta_product, parse_factors, within_deligne_bound, CoefficientTable, EtaProductSpec,
};
use sato_tate::histogram::Histogram;
use sato_tate::presets::preset;
use sato_tate::primes::first_n_primes;
use sato_tate::spacing::{
    chi_square_critical, chi_square_test, default_spacing_range, ks_critical, ks_test, mean_check,
    mean_tolerance, poisson_density, spacing_histogram, spacings, Level,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest sample the page will compute; Delta at this size takes a few
/// seconds in wasm.
pub const MAX_PRIMES: usize = 10_000;
const MAX_COEFFICIENTS: u32 = 5_000;
const CURVE_POINTS: usize = 200;

#[derive(Serialize)]
struct Bars {
    edges: Vec<f64>,
    counts: Vec<u64>,
    density: Vec<f64>,
}

impl From<&Histogram> for Bars {
    fn from(h: &Histogram) -> Self {
        Bars {
            edges: h.edges.clone(),
            counts: h.counts.clone(),
            density: h.density.clone(),
        }
    }
}

#[derive(Serialize)]
struct Test {
    statistic: f64,
    critical_5pct: f64,
    critical_1pct: f64,
}

#[derive(Serialize)]
struct AngleView {
    label: String,
    sample_size: usize,
    prime_limit: u64,
    histogram: Bars,
    curve: Vec<(f64, f64)>,
    chi_square: Test,
    dof: u32,
    uniformity_ks: Test,
}

#[derive(Serialize)]
struct SpacingView {
    label: String,
    k: u32,
    sample_size: usize,
    spacings: usize,
    histogram: Bars,
    curve: Vec<(f64, f64)>,
    ks: Test,
    mean: f64,
    mean_tolerance: f64,
}

#[derive(Serialize)]
struct CoefficientRow {
    n: u64,
    a_n: String,
    prime: bool,
    within_bound: Option<bool>,
}

#[derive(Serialize)]
struct CoefficientView {
    label: String,
    weight: u32,
    leading_power: u64,
    rows: Vec<CoefficientRow>,
}

fn sampled(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    (0..=CURVE_POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / CURVE_POINTS as f64;
            (x, f(x))
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn check_primes(num_primes: usize) -> Result<(), String> {
    if num_primes > MAX_PRIMES {
        return Err(format!(
            "at most {MAX_PRIMES} primes in the browser, asked for {num_primes}"
        ));
    }
    Ok(())
}

thread_local! {
    // largest table computed so far per preset; the panels share it
    static TABLES: RefCell<HashMap<String, CoefficientTable>> = RefCell::new(HashMap::new());
}

fn preset_table(name: &str, n_max: u64) -> Result<CoefficientTable, String> {
    if let Some(t) = TABLES.with(|c| c.borrow().get(name).filter(|t| t.n_max() >= n_max).cloned()) {
        return Ok(t);
    }
    let p = preset(name).map_err(|e| e.to_string())?;
    let table = eta_product(&p.eta, n_max).map_err(|e| e.to_string())?;
    TABLES.with(|c| c.borrow_mut().insert(name.to_string(), table.clone()));
    Ok(table)
}

struct Sample {
    label: String,
    prime_limit: u64,
    angles: sato_tate::angles::AngleSeries,
    unfolded: UnfoldedSeries,
}

fn sample(name: &str, num_primes: usize) -> Result<Sample, String> {
    check_primes(num_primes)?;
    let primes = first_n_primes(num_primes).map_err(|e| e.to_string())?;
    let table = preset_table(name, primes.limit())?;
    let angles = angle_series(&table, &primes).map_err(|e| e.to_string())?;
    let unfolded = unfolded_series(&angles).map_err(|e| e.to_string())?;
    Ok(Sample {
        label: table.label().to_string(),
        prime_limit: primes.limit(),
        angles,
        unfolded,
    })
}

fn ks_pair(statistic: f64, n: usize) -> Test {
    Test {
        statistic,
        critical_5pct: ks_critical(n, Level::FivePercent),
        critical_1pct: ks_critical(n, Level::OnePercent),
    }
}

/// Angle histogram of a preset against the Sato-Tate density.
pub fn angle_density_json(preset: &str, num_primes: usize, bins: usize) -> Result<String, String> {
    let s = sample(preset, num_primes)?;
    let hist = density_histogram(&s.angles, bins).map_err(|e| e.to_string())?;
    let m = s.angles.len();
    let chi = chi_square_test(&hist, m as u64, |t| unfold(t.clamp(0.0, PI)).unwrap_or(0.0))
        .map_err(|e| e.to_string())?;
    let dof = chi.degrees_of_freedom.unwrap_or(0);
    let ks = sato_tate::spacing::uniformity_ks(&s.unfolded).map_err(|e| e.to_string())?;
    let (crit5, crit1) = if dof > 0 {
        (
            chi_square_critical(dof, Level::FivePercent),
            chi_square_critical(dof, Level::OnePercent),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    to_json(&AngleView {
        label: s.label,
        sample_size: m,
        prime_limit: s.prime_limit,
        histogram: Bars::from(&hist),
        curve: sampled(0.0, PI, |t| st_density(t).unwrap_or(0.0)),
        chi_square: Test {
            statistic: chi.chi_square.unwrap_or(f64::NAN),
            critical_5pct: crit5,
            critical_1pct: crit1,
        },
        dof,
        uniformity_ks: ks_pair(ks.ks_statistic.unwrap_or(f64::NAN), m),
    })
}

/// Order-`k` spacing histogram of a preset against the Poisson law.
pub fn spacing_distribution_json(
    preset: &str,
    num_primes: usize,
    k: u32,
    bins: usize,
) -> Result<String, String> {
    if k > 10 {
        return Err(format!("k must be at most 10, got {k}"));
    }
    let s = sample(preset, num_primes)?;
    let sp = spacings(&s.unfolded, k).map_err(|e| e.to_string())?;
    let range = default_spacing_range(k);
    let hist = spacing_histogram(&sp, bins, range).map_err(|e| e.to_string())?;
    let ks = ks_test(&sp).map_err(|e| e.to_string())?;
    to_json(&SpacingView {
        label: s.label,
        k,
        sample_size: s.unfolded.sample_size(),
        spacings: sp.len(),
        histogram: Bars::from(&hist),
        curve: sampled(0.0, range, |x| poisson_density(k, x).unwrap_or(0.0)),
        ks: ks_pair(ks.ks_statistic.unwrap_or(f64::NAN), sp.len()),
        mean: mean_check(&sp),
        mean_tolerance: mean_tolerance(k, sp.len()),
    })
}

/// First `count` coefficients of an arbitrary eta product such as `"1^2,11^2"`.
pub fn eta_coefficients_json(
    factors: &str,
    bad_primes: &str,
    count: u32,
) -> Result<String, String> {
    if count == 0 || count > MAX_COEFFICIENTS {
        return Err(format!("count must be in 1..={MAX_COEFFICIENTS}"));
    }
    let factors = parse_factors(factors).map_err(|e| e.to_string())?;
    let bad = bad_primes
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| format!("bad prime {s:?} is not an integer"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spec = EtaProductSpec::new("custom", factors, bad).map_err(|e| e.to_string())?;
    let count = u64::from(count);
    let table = eta_product(&spec, count).map_err(|e| e.to_string())?;
    let rows = (1..=count)
        .map(|n| {
            let a_n = table.coefficient(n).expect("n within table");
            let prime = sato_tate::primes::is_prime(n);
            let within_bound = (prime && !table.is_bad_prime(n))
                .then(|| within_deligne_bound(&a_n, n, table.weight()));
            CoefficientRow {
                n,
                a_n: a_n.to_string(),
                prime,
                within_bound,
            }
        })
        .collect();
    to_json(&CoefficientView {
        label: spec.factors_string(),
        weight: spec.weight(),
        leading_power: spec.leading_power(),
        rows,
    })
}

#[wasm_bindgen]
pub fn angle_density(preset: &str, num_primes: usize, bins: usize) -> Result<String, JsValue> {
    angle_density_json(preset, num_primes, bins).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spacing_distribution(
    preset: &str,
    num_primes: usize,
    k: u32,
    bins: usize,
) -> Result<String, JsValue> {
    spacing_distribution_json(preset, num_primes, k, bins).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn eta_coefficients(factors: &str, bad_primes: &str, count: u32) -> Result<String, JsValue> {
    eta_coefficients_json(factors, bad_primes, count).map_err(|e| JsValue::from_str(&e))
}
