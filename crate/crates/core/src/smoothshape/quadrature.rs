//! Tensor-product quadrature over stratum charts.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DVector;
use rayon::prelude::*;

use super::stratum::{ChartAxis, SmoothStratum};
use crate::geomkit::{compensated_sum, Estimate};

/// Nodes and weights for one chart axis: midpoint rule on periodic axes,
/// Gauss-Legendre otherwise.
pub fn axis_rule(ax: &ChartAxis, m: usize) -> Vec<(f64, f64)> {
    let len = ax.hi - ax.lo;
    if ax.periodic {
        let h = len / m as f64;
        (0..m).map(|i| (ax.lo + h * (i as f64 + 0.5), h)).collect()
    } else {
        let gl = GaussLegendre::new(NonZeroUsize::new(m).expect("positive node count"));
        gl.iter()
            .map(|(x, w)| (ax.lo + 0.5 * len * (x + 1.0), 0.5 * len * w))
            .collect()
    }
}

/// Default per-axis node counts for a chart of the given dimension.
fn base_nodes(ax: &ChartAxis, dim: usize) -> usize {
    match (dim, ax.periodic) {
        (1, _) => 128,
        (2, true) => 96,
        (2, false) => 48,
        (_, true) => 40,
        (_, false) => 24,
    }
}

impl SmoothStratum {
    fn chart_sum<F, R>(&self, density: &F, region: &R, scale: usize) -> (f64, usize)
    where
        F: Fn(&DVector<f64>) -> f64 + Sync,
        R: Fn(&DVector<f64>) -> bool + Sync,
    {
        let axes = self.chart_axes();
        let dim = axes.len();
        let rules: Vec<Vec<(f64, f64)>> =
            axes.iter().map(|a| axis_rule(a, base_nodes(a, dim) * scale)).collect();
        let inner: usize = rules[1..].iter().map(|r| r.len()).product();
        let terms: Vec<f64> = rules[0]
            .par_iter()
            .map(|&(u0, w0)| {
                let mut acc = Vec::with_capacity(inner);
                let mut u = vec![u0; dim];
                for flat in 0..inner {
                    let mut rem = flat;
                    let mut w = w0;
                    for k in (1..dim).rev() {
                        let r = &rules[k];
                        let (x, wk) = r[rem % r.len()];
                        rem /= r.len();
                        u[k] = x;
                        w *= wk;
                    }
                    let x = self.param(&u);
                    if !region(&x) {
                        continue;
                    }
                    let j = self.param_jacobian(&u);
                    let area = (j.transpose() * &j).determinant().max(0.0).sqrt();
                    acc.push(w * area * density(&x));
                }
                compensated_sum(acc)
            })
            .collect();
        (compensated_sum(terms), rules.iter().map(|r| r.len()).product())
    }

    /// Integral of `density` over the part of the stratum where `region`
    /// holds, with respect to the Riemannian volume. The error estimate is the
    /// change under doubling the node count per axis.
    pub fn integrate_stratum<F, R>(&self, density: F, region: R) -> Estimate
    where
        F: Fn(&DVector<f64>) -> f64 + Sync,
        R: Fn(&DVector<f64>) -> bool + Sync,
    {
        let (coarse, _) = self.chart_sum(&density, &region, 1);
        let (fine, n) = self.chart_sum(&density, &region, 2);
        Estimate::from_refinement(fine, coarse, n)
    }
}
