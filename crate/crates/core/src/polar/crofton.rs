//! Cauchy-Crofton estimate of the volume of a hypersurface of `R^m` given as
//! a union of `(m-1)`-simplices.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use statrs::function::gamma::ln_gamma;

use super::types::{PieceKind, PolarSample};
use crate::error::{Error, Result};
use crate::geomkit::{ball_volume, map_samples, sample_unit_sphere, Estimate, RandomSource};

/// `E |<u, e>|` for `u` uniform on the unit sphere of `R^m`.
fn mean_abs_cosine(m: usize) -> f64 {
    let m = m as f64;
    (ln_gamma(m / 2.0) - ln_gamma((m + 1.0) / 2.0)).exp() / std::f64::consts::PI.sqrt()
}

/// Whether the line `c + s u` meets the simplex with vertices `v`.
fn line_hits_simplex(c: &DVector<f64>, u: &DVector<f64>, v: &[DVector<f64>]) -> bool {
    let m = c.len();
    // Solve c + s u = v0 + sum_i l_i (v_i - v0) for (s, l).
    let mut a = DMatrix::zeros(m, m);
    a.set_column(0, u);
    for i in 1..m {
        a.set_column(i, &(&v[0] - &v[i]));
    }
    let Some(sol) = a.lu().solve(&(&v[0] - c)) else { return false };
    let l = sol.rows(1, m - 1);
    l.iter().all(|&x| x >= 0.0) && l.sum() <= 1.0
}

/// Volume of a union of `(m-1)`-simplices in `R^m` from the number of hits by
/// `n_lines` random lines through the bounding ball. Each simplex is given by
/// its `m` vertices.
pub fn crofton_volume(simplices: &[Vec<DVector<f64>>], n_lines: usize, src: &RandomSource) -> Result<Estimate> {
    if simplices.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    let m = simplices[0][0].len();
    if m < 2 || simplices.iter().any(|s| s.len() != m || s.iter().any(|v| v.len() != m)) {
        return Err(Error::Domain(format!("crofton_volume needs (m-1)-simplices in R^m with m >= 2 (m = {m})")));
    }
    let count = simplices.len() * m;
    let center = simplices.iter().flatten().fold(DVector::zeros(m), |a, v| a + v) / count as f64;
    let radius = simplices.iter().flatten().map(|v| (v - &center).norm()).fold(0.0, f64::max) * (1.0 + 1e-9) + 1e-300;
    // Lines: uniform direction, offset uniform in the ball of the orthogonal hyperplane.
    let cross_section = ball_volume((m - 1) as i64)? * radius.powi(m as i32 - 1);
    let scale = cross_section / mean_abs_cosine(m);
    let hits: Vec<f64> = map_samples(n_lines, src, |_, sub| {
        let mut rng = sub.rng();
        let u = sample_unit_sphere(m, &mut rng);
        let dir = loop {
            let w = sample_unit_sphere(m, &mut rng);
            let w = &w - &u * u.dot(&w);
            if w.norm() > 1e-8 {
                break w.normalize();
            }
        };
        let offset = dir * (radius * rng.random::<f64>().powf(1.0 / (m - 1) as f64));
        let c = &center + offset;
        simplices.iter().filter(|s| line_hits_simplex(&c, &u, s)).count() as f64 * scale
    });
    Ok(Estimate::from_samples(&hits, src.master_seed))
}

/// The polar image of a sample as hypersurface simplices of `P`: polyline
/// segments and projected simplices.
pub fn image_simplices(sample: &PolarSample) -> Vec<Vec<DVector<f64>>> {
    let mut out = Vec::new();
    for p in &sample.pieces {
        match p.kind {
            PieceKind::Polyline => {
                for w in p.image.windows(2) {
                    out.push(w.to_vec());
                }
            }
            PieceKind::ProjectedSimplex => out.push(p.image.clone()),
            PieceKind::Point | PieceKind::ProjectedStratum => {}
        }
    }
    out
}
