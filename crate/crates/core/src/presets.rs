//! The three worked examples: two weight-2 newforms attached to elliptic
//! curves and the discriminant `Delta = eta(q)^24`.

use serde::Serialize;

use crate::curve::CurveSpec;
use crate::eta::{EtaFactor, EtaProductSpec};
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 3] = ["a", "b", "c"];

#[derive(Debug, Clone, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub eta: EtaProductSpec,
    pub curve: Option<CurveSpec>,
    pub num_primes: usize,
}

/// `eta(q)^2 eta(q^11)^2`, level 11.
pub fn eta_a() -> EtaProductSpec {
    EtaProductSpec::new(
        "a",
        vec![EtaFactor::new(1, 2), EtaFactor::new(11, 2)],
        vec![11],
    )
    .unwrap()
}

/// `eta(q^2)^2 eta(q^10)^2`, level 20.
pub fn eta_b() -> EtaProductSpec {
    EtaProductSpec::new(
        "b",
        vec![EtaFactor::new(2, 2), EtaFactor::new(10, 2)],
        vec![2, 5],
    )
    .unwrap()
}

/// `eta(q)^24`, the weight-12 discriminant.
pub fn eta_c() -> EtaProductSpec {
    EtaProductSpec::new("c", vec![EtaFactor::new(1, 24)], vec![]).unwrap()
}

/// `y^2 + y = x^3 - x^2`.
pub fn curve_a() -> CurveSpec {
    CurveSpec::new("a", [0, -1, 1, 0, 0], 11).unwrap()
}

/// `y^2 = x^3 + x^2 - x`.
pub fn curve_b() -> CurveSpec {
    CurveSpec::new("b", [0, 1, 0, -1, 0], 20).unwrap()
}

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "a" => Ok(Preset {
            name: "a",
            eta: eta_a(),
            curve: Some(curve_a()),
            num_primes: 2000,
        }),
        "b" => Ok(Preset {
            name: "b",
            eta: eta_b(),
            curve: Some(curve_b()),
            num_primes: 2000,
        }),
        "c" => Ok(Preset {
            name: "c",
            eta: eta_c(),
            curve: None,
            num_primes: 10000,
        }),
        other => Err(Error::config(
            "preset",
            format!("unknown preset `{other}` (expected a, b or c)"),
        )),
    }
}
