use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::angles::{AngleSeries, UnfoldedSeries};
use crate::histogram::Histogram;

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn angles_csv(angles: &AngleSeries) -> String {
    let mut out = String::from("prime,a_p,cos_theta,theta\n");
    for r in &angles.records {
        writeln!(
            out,
            "{},{},{},{}",
            r.prime,
            r.a_p,
            format_float(r.cos_theta),
            format_float(r.theta)
        )
        .unwrap();
    }
    out
}

pub(crate) fn unfolded_csv(series: &UnfoldedSeries) -> String {
    let mut out = String::from("rank_i,theta_unfolded\n");
    for (i, v) in series.values().iter().enumerate() {
        writeln!(out, "{},{}", i + 1, format_float(*v)).unwrap();
    }
    out
}

/// `bin_left,bin_right,count,density,reference_density`.
pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,count,density,reference_density\n");
    for j in 0..hist.bins() {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_float(hist.edges[j]),
            format_float(hist.edges[j + 1]),
            hist.counts[j],
            format_float(hist.density[j]),
            format_float(hist.reference[j])
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn histogram_columns() {
        let h = Histogram::build(&[0.25, 0.75, 0.8], 0.0, 1.0, 2, |_| 1.0).unwrap();
        let csv = histogram_csv(&h);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "bin_left,bin_right,count,density,reference_density"
        );
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("5.0000000000000000e-1,1.0000000000000000e0,2,"));
    }

    #[test]
    fn digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
