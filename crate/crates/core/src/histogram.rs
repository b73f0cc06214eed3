use serde::Serialize;

use crate::{Error, Result};

/// Equal-width histogram with a model density evaluated at bin midpoints.
///
/// `density[j] = counts[j] / (total * width)`, where `total` includes samples
/// that fell outside `[edges[0], edges[last]]`; those are tallied in
/// `underflow` and `overflow`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub reference: Vec<f64>,
    pub underflow: u64,
    pub overflow: u64,
    pub total: u64,
}

impl Histogram {
    pub fn build(
        samples: &[f64],
        lo: f64,
        hi: f64,
        bins: usize,
        reference: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if bins == 0 {
            return Err(Error::config("bins", "need at least one bin"));
        }
        if lo.is_nan() || hi.is_nan() || hi <= lo {
            return Err(Error::config("range", format!("empty range [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|j| lo + width * j as f64).collect();
        let mut counts = vec![0u64; bins];
        let (mut underflow, mut overflow) = (0, 0);
        for &x in samples {
            if x < lo {
                underflow += 1;
            } else if x > hi {
                overflow += 1;
            } else {
                let j = (((x - lo) / width) as usize).min(bins - 1);
                counts[j] += 1;
            }
        }
        let total = samples.len() as u64;
        Ok(Self::from_counts(
            edges, counts, underflow, overflow, total, reference,
        ))
    }

    pub(crate) fn from_counts(
        edges: Vec<f64>,
        counts: Vec<u64>,
        underflow: u64,
        overflow: u64,
        total: u64,
        reference: impl Fn(f64) -> f64,
    ) -> Self {
        let density = counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, e)| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / (total as f64 * (e[1] - e[0]))
                }
            })
            .collect();
        let reference = edges
            .windows(2)
            .map(|e| reference(0.5 * (e[0] + e[1])))
            .collect();
        Histogram {
            edges,
            counts,
            density,
            reference,
            underflow,
            overflow,
            total,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self, j: usize) -> f64 {
        self.edges[j + 1] - self.edges[j]
    }

    /// `sum density_j * width_j`, the fraction of samples inside the range.
    pub fn mass(&self) -> f64 {
        (0..self.bins())
            .map(|j| self.density[j] * self.width(j))
            .sum()
    }
}
