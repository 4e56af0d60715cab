//! Euler characteristics of affine slices and the linear kinematic check.

use nalgebra::{DMatrix, DVector};

use super::density::{lk_measure, LkOptions};
use super::shape::{Geometry, Shape};
use crate::error::{Error, Result};
use crate::geomkit::{map_samples, sample_affine_flats_hitting_ball, AffineFlat, Estimate, RandomSource};
use crate::plstrata::StratifiedComplex;
use crate::smoothshape::{ShapeTag, SmoothShape};

const BARY_TOL: f64 = 1e-10;
const MAX_RETRIES: usize = 100;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Whether the closed simplex with vertices `pts` meets the flat, decided
/// through the basic solutions of `sum l_i = 1`, `N^T (sum l_i p_i - o) = 0`.
/// A basic solution with a vanishing weight means the flat passes through a
/// face of too small dimension, which is reported as degenerate.
fn closed_simplex_meets_flat(pts: &[DVector<f64>], normals: &DMatrix<f64>, offset: &DVector<f64>) -> Result<bool> {
    let m = normals.ncols();
    let cols = pts.len();
    let mut a = DMatrix::zeros(m + 1, cols);
    for (j, p) in pts.iter().enumerate() {
        a[(0, j)] = 1.0;
        let r = normals.transpose() * (p - offset);
        for i in 0..m {
            a[(i + 1, j)] = r[i];
        }
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs[0] = 1.0;
    if cols < m + 1 {
        // Overdetermined: meeting would be non-generic.
        let svd = a.clone().svd(true, true);
        let sol = svd.solve(&rhs, 1e-14).map_err(|e| Error::DegenerateDirection(e.to_string()))?;
        let res = (&a * sol - &rhs).norm();
        if res < 1e-9 {
            return Err(Error::DegenerateDirection("flat meets a low-dimensional cell".into()));
        }
        return Ok(false);
    }
    let mut hit = false;
    for sub in subsets(cols, m + 1) {
        let sq = DMatrix::from_fn(m + 1, m + 1, |i, j| a[(i, sub[j])]);
        let lu = sq.lu();
        if lu.determinant().abs() < 1e-14 {
            continue;
        }
        let Some(l) = lu.solve(&rhs) else { continue };
        let min = l.min();
        if min > BARY_TOL {
            hit = true;
        } else if min > -BARY_TOL {
            return Err(Error::DegenerateDirection("flat passes through a cell face".into()));
        }
    }
    Ok(hit)
}

/// `chi(K ∩ E)` for a generic affine flat: each open cell of dimension `d`
/// meeting `E` contributes an open cell of dimension `d - codim E`.
pub fn pl_slice_euler(k: &StratifiedComplex, flat: &AffineFlat) -> Result<i64> {
    let perp = flat.direction.complement();
    let normals = perp.basis().clone();
    let m = normals.ncols();
    let mut chi = 0;
    for (id, cell) in k.cells() {
        let pts = k.cell_points(id);
        if closed_simplex_meets_flat(&pts, &normals, &flat.offset)? {
            let d = cell.len() - 1;
            if d < m {
                return Err(Error::DegenerateDirection("flat meets a low-dimensional cell".into()));
            }
            chi += if (d - m) % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(chi)
}

/// Euler characteristic of a slice of a smooth catalog shape. Closed
/// surfaces meet generic planes in closed curves (`chi = 0`) and generic
/// lines in finitely many points, counted by sign changes of the implicit
/// equation; solid balls meet flats in balls or not at all.
pub fn smooth_slice_euler(s: &SmoothShape, flat: &AffineFlat) -> Result<i64> {
    let n = s.ambient_dim();
    let center = s.center();
    let foot = &flat.offset + flat.direction.project(&(center - &flat.offset));
    let dist = (center - &foot).norm();
    match s.tag {
        ShapeTag::Ball { r } => {
            if (dist - r).abs() < 1e-12 * r {
                return Err(Error::DegenerateDirection("flat tangent to the ball".into()));
            }
            Ok(i64::from(dist < r))
        }
        ShapeTag::Sphere { .. } | ShapeTag::Torus { .. } => match flat.dim() {
            d if d + 1 == n => Ok(0),
            1 => {
                let top = &s.strata[0];
                let dir = flat.direction.basis_vector(0);
                let half = s.bounding_radius() * 1.01 + 1e-9;
                let steps = 4096;
                let f = |t: f64| top.implicit(&(&foot + &dir * t))[0];
                let mut crossings = 0;
                let mut prev = f(-half);
                for i in 1..=steps {
                    let cur = f(-half + 2.0 * half * i as f64 / steps as f64);
                    if cur == 0.0 {
                        return Err(Error::DegenerateDirection("grid node on the surface".into()));
                    }
                    if (cur > 0.0) != (prev > 0.0) {
                        crossings += 1;
                    }
                    prev = cur;
                }
                Ok(crossings)
            }
            d => Err(Error::Unsupported(format!("{d}-flat slices of {}", s.name()))),
        },
        _ => Err(Error::Unsupported(format!("slices of {}", s.name()))),
    }
}

pub fn slice_euler(shape: &Shape, flat: &AffineFlat) -> Result<i64> {
    if !shape.region.is_everything() {
        return Err(Error::Unsupported("slices restricted to a region".into()));
    }
    match &shape.geometry {
        Geometry::Pl(k) => pl_slice_euler(k, flat),
        Geometry::Smooth(s) => smooth_slice_euler(s, flat),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicResult {
    /// `int_{A_n^k} chi(X ∩ E) dE` over flats hitting the bounding ball.
    pub integral: Estimate,
    /// `Lambda_{n-k}(X)`.
    pub lambda: Estimate,
    /// `integral / lambda`, absent when `lambda` is indistinguishable from 0.
    pub ratio: Option<Estimate>,
    pub rejected: usize,
}

/// Compares the flat integral of slice Euler characteristics with
/// `Lambda_{n-k}`.
pub fn kinematic_check(
    shape: &Shape,
    k: usize,
    n_flats: usize,
    opts: &LkOptions,
    src: &RandomSource,
) -> Result<KinematicResult> {
    let n = shape.ambient_dim();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("flat dimension {k} must lie in 1..{n}")));
    }
    let (center, radius) = shape.bounding_ball();
    let radius = radius * 1.001 + 1e-9;
    let flat_src = src.labelled("kinematic");
    let samples: Vec<Result<(f64, usize)>> = map_samples(n_flats, &flat_src, |_, sub| {
        let mut rng = sub.rng();
        for attempt in 0..MAX_RETRIES {
            let (flat, w) = sample_affine_flats_hitting_ball(n, k, radius, &mut rng)?;
            let moved = AffineFlat::through(flat.direction.clone(), &(&flat.offset + &center));
            match slice_euler(shape, &moved) {
                Ok(chi) => return Ok((w * chi as f64, attempt)),
                Err(Error::DegenerateDirection(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::ResampleQuota { rejected: MAX_RETRIES, attempted: MAX_RETRIES, reason: "no generic flat".into() })
    });
    let mut values = Vec::with_capacity(n_flats);
    let mut rejected = 0;
    for s in samples {
        let (v, r) = s?;
        values.push(v);
        rejected += r;
    }
    let integral = Estimate::from_samples(&values, flat_src.master_seed);
    let lambda = lk_measure(shape, n - k, opts, src)?;
    let ratio = if lambda.value.abs() > 3.0 * lambda.std_error && lambda.value.abs() > 1e-12 {
        Some(integral.ratio(lambda))
    } else {
        None
    };
    Ok(KinematicResult { integral, lambda, ratio, rejected })
}
