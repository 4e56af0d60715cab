//! Monte-Carlo estimates, compensated reduction and deterministic parallel
//! sample evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::random::RandomSource;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Value with its standard error, sample count and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, n_samples: 1, seed: 0 }
    }

    pub fn new(value: f64, std_error: f64, n_samples: usize, seed: u64) -> Self {
        Self { value, std_error, n_samples, seed }
    }

    /// Deterministic quadrature result: the error is the difference to a
    /// coarser rule, floored at a few ulps of the value.
    pub fn from_refinement(fine: f64, coarse: f64, n_nodes: usize) -> Self {
        let floor = 64.0 * f64::EPSILON * fine.abs().max(1.0);
        Self { value: fine, std_error: (fine - coarse).abs().max(floor), n_samples: n_nodes, seed: 0 }
    }

    /// Sample mean with `std_error = sd / sqrt(n)` (sample standard deviation).
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { value: 0.0, std_error: 0.0, n_samples: 0, seed };
        }
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let se = if n > 1 {
            let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self { value: mean, std_error: se, n_samples: n, seed }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self { value: self.value * factor, std_error: self.std_error * factor.abs(), ..self }
    }

    /// Sum of independent estimates; standard errors add in quadrature.
    pub fn sum<I: IntoIterator<Item = Estimate>>(parts: I) -> Self {
        let parts: Vec<_> = parts.into_iter().collect();
        let value = compensated_sum(parts.iter().map(|e| e.value));
        let var = compensated_sum(parts.iter().map(|e| e.std_error * e.std_error));
        let n = parts.iter().map(|e| e.n_samples).max().unwrap_or(0);
        let seed = parts.first().map_or(0, |e| e.seed);
        Self { value, std_error: var.sqrt(), n_samples: n, seed }
    }

    /// Ratio by the delta method, treating both estimates as independent.
    pub fn ratio(self, denom: Estimate) -> Self {
        let r = self.value / denom.value;
        let rel = ((self.std_error / self.value).powi(2) + (denom.std_error / denom.value).powi(2)).sqrt();
        let se = if self.value == 0.0 {
            self.std_error / denom.value.abs()
        } else {
            (r * rel).abs()
        };
        Self { value: r, std_error: se, n_samples: self.n_samples.max(denom.n_samples), seed: self.seed }
    }

    /// `|a - b| <= k sqrt(se_a^2 + se_b^2)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.combined_se(other)
    }

    pub fn combined_se(&self, other: &Estimate) -> f64 {
        (self.std_error.powi(2) + other.std_error.powi(2)).sqrt()
    }

    /// Agreement with an exactly known value.
    pub fn agrees_with_value(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Evaluates `f(i, source_i)` for `i in 0..n`, where `source_i` is the `i`-th
/// substream of `source`. Runs on the current rayon pool; results come back in
/// index order, so any reduction over them is independent of the thread count.
pub fn map_samples<T, F>(n: usize, source: &RandomSource, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, RandomSource) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(|i| f(i, source.substream(i as u64))).collect()
}
