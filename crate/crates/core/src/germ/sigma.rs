//! Polar invariants `sigma_k`: averages of the Euler characteristic of small
//! affine slices `(H + delta v) ∩ X ∩ B_1`.

use nalgebra::{DMatrix, DVector, Vector3};

use super::cone::{ConeGerm, Link};
use crate::error::{Error, Result};
use crate::geomkit::{map_samples, sample_grassmannian, sample_unit_in, Estimate, LinearSubspace, RandomSource};
use crate::plstrata::StratifiedComplex;

/// Slice parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOptions {
    /// Initial offset `delta` (the ball radius is 1).
    pub delta: f64,
    /// Number of times `delta` may be halved while looking for a stable value.
    pub max_halvings: usize,
    /// Largest tolerated fraction of rejected samples.
    pub max_rejection: f64,
}

impl Default for SliceOptions {
    fn default() -> Self {
        Self { delta: 1e-3, max_halvings: 10, max_rejection: 0.01 }
    }
}

/// Relative size under which a barycentric coordinate counts as zero.
const GENERIC_TOL: f64 = 1e-10;

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

fn degenerate(msg: &str) -> Error {
    Error::DegenerateDirection(msg.into())
}

/// Whether `0` lies in the convex hull of the columns of `a` (`k x m`).
fn hull_contains_origin(a: &DMatrix<f64>) -> Result<bool> {
    let (k, m) = a.shape();
    if m < k + 1 {
        return Ok(false);
    }
    for s in subsets(m, k + 1) {
        let mut sq = DMatrix::zeros(k + 1, k + 1);
        for (j, &c) in s.iter().enumerate() {
            sq[(0, j)] = 1.0;
            for i in 0..k {
                sq[(i + 1, j)] = a[(i, c)];
            }
        }
        let mut rhs = DVector::zeros(k + 1);
        rhs[0] = 1.0;
        let lu = sq.lu();
        if lu.determinant().abs() < 1e-14 {
            continue;
        }
        let Some(l) = lu.solve(&rhs) else { continue };
        let min = l.min();
        if min.abs() < GENERIC_TOL {
            return Err(degenerate("slice direction meets a face of a link cone"));
        }
        if min > 0.0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Contribution of the open cone over one link cell to the slice at offset
/// `v = normals c` (scaled to `delta = 1`, ball radius `r`). `None` when the
/// slice piece is not yet well inside the ball.
fn pl_cell_slice(w: &DMatrix<f64>, normals: &DMatrix<f64>, c: &DVector<f64>, r: f64) -> Result<Option<i64>> {
    let k = normals.ncols();
    let cols = w.ncols();
    if cols < k {
        return Ok(Some(0));
    }
    let a = normals.tr_mul(w);
    let mut nonempty = false;
    let mut far = 0.0f64;
    for s in subsets(cols, k) {
        let sq = DMatrix::from_fn(k, k, |i, j| a[(i, s[j])]);
        let scale = sq.norm().max(1e-300);
        let lu = sq.lu();
        if lu.determinant().abs() < 1e-13 * scale.powi(k as i32) {
            continue;
        }
        let Some(t) = lu.solve(c) else { continue };
        let tmax = t.amax();
        if t.iter().any(|x| x.abs() < GENERIC_TOL * tmax.max(1.0)) {
            return Err(degenerate("slice passes through a lower cone"));
        }
        if t.min() > 0.0 {
            nonempty = true;
            let mut x = DVector::zeros(w.nrows());
            for (j, &col) in s.iter().enumerate() {
                x += w.column(col) * t[j];
            }
            far = far.max(x.norm());
        }
    }
    if !nonempty {
        return Ok(Some(0));
    }
    if far >= r {
        return Ok(None);
    }
    let e = cols - k;
    // Bounded pieces are open cells; unbounded ones, cut by the ball, have
    // compactly supported Euler characteristic 0.
    if hull_contains_origin(&a)? {
        Ok(Some(0))
    } else {
        Ok(Some(if e % 2 == 0 { 1 } else { -1 }))
    }
}

fn pl_slice_chi(link: &StratifiedComplex, normals: &DMatrix<f64>, c: &DVector<f64>, delta: f64) -> Result<Option<i64>> {
    let r = 1.0 / delta;
    let mut chi = 0;
    for (id, _) in link.cells() {
        let pts = link.cell_points(id);
        let w = DMatrix::from_columns(&pts);
        match pl_cell_slice(&w, normals, c, r)? {
            Some(x) => chi += x,
            None => return Ok(None),
        }
    }
    Ok(Some(chi))
}

/// Point of the round-cone link at angle `phi`.
fn circle_point(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Slice of the round cone by `H + delta v`, `H` of codimension 1 or 2.
fn circle_slice_chi(theta: f64, normals: &DMatrix<f64>, v: &Vector3<f64>, delta: f64) -> Result<Option<i64>> {
    let k = normals.ncols();
    match k {
        1 => {
            // Link points with <v, l> >= delta: an arc, the whole circle or nothing.
            let rho = (v.x * v.x + v.y * v.y).sqrt();
            let lo = v.z * theta.cos() - theta.sin() * rho;
            let hi = v.z * theta.cos() + theta.sin() * rho;
            if (lo - delta).abs() < GENERIC_TOL || (hi - delta).abs() < GENERIC_TOL {
                return Err(degenerate("slice tangent to the cone"));
            }
            Ok(Some(i64::from(lo < delta && delta < hi)))
        }
        2 => {
            // Rays of the cone in span(h, v) with <v, l> >= delta.
            let cols: Vec<Vector3<f64>> = (0..2).map(|j| Vector3::new(normals[(0, j)], normals[(1, j)], normals[(2, j)])).collect();
            let h = cols[0].cross(&cols[1]).normalize();
            let p = h.cross(v);
            let rho = (p.x * p.x + p.y * p.y).sqrt();
            let cz = -theta.cos() * p.z / (theta.sin() * rho);
            if (cz.abs() - 1.0).abs() < GENERIC_TOL {
                return Err(degenerate("slice line tangent to the cone"));
            }
            if cz.abs() > 1.0 {
                return Ok(Some(0));
            }
            let phi0 = p.y.atan2(p.x);
            let mut count = 0;
            for s in [-1.0, 1.0] {
                let l = circle_point(theta, phi0 + s * cz.acos());
                let lv = l.dot(v);
                if (lv - delta).abs() < GENERIC_TOL {
                    return Err(degenerate("slice point on the ball boundary"));
                }
                if lv >= delta {
                    count += 1;
                }
            }
            Ok(Some(count))
        }
        _ => Ok(Some(0)),
    }
}

/// `chi((H + delta v) ∩ X ∩ B_1)` with `H^perp` spanned by `normals` and
/// `v = normals c`, or `None` when `delta` is too large for the slice to be
/// stable.
pub fn slice_chi(x: &ConeGerm, normals: &DMatrix<f64>, c: &DVector<f64>, delta: f64) -> Result<Option<i64>> {
    match &x.link {
        Link::Pl(link) => pl_slice_chi(link, normals, c, delta),
        Link::Circle { theta } => {
            let v = normals * c;
            circle_slice_chi(*theta, normals, &Vector3::new(v[0], v[1], v[2]), delta)
        }
    }
}

/// The iterated limit: halve `delta` until two consecutive values agree.
pub fn stable_slice_chi(x: &ConeGerm, normals: &DMatrix<f64>, c: &DVector<f64>, opts: &SliceOptions) -> Result<i64> {
    let mut delta = opts.delta;
    let mut prev = slice_chi(x, normals, c, delta)?;
    for _ in 0..opts.max_halvings {
        delta *= 0.5;
        let cur = slice_chi(x, normals, c, delta)?;
        if let (Some(a), Some(b)) = (prev, cur) {
            if a == b {
                return Ok(a);
            }
        }
        prev = cur;
    }
    Err(degenerate("slice Euler characteristic did not stabilize"))
}

/// `sigma_k(X, 0)`: mean over `H` in `G_n^{n-k}` and unit `v ⟂ H` of the
/// stable slice Euler characteristic.
pub fn sigma_invariant(x: &ConeGerm, k: usize, n_samples: usize, opts: &SliceOptions, src: &RandomSource) -> Result<Estimate> {
    let n = x.ambient_dim();
    if k == 0 {
        return Ok(Estimate::exact(1.0));
    }
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds ambient dimension {n}")));
    }
    if k > x.dim() {
        // Slices of codimension above dim X miss the cone generically.
        return Ok(Estimate::exact(0.0));
    }
    let src = src.labelled("sigma");
    let samples: Vec<Result<(f64, usize)>> = map_samples(n_samples, &src, |_, sub| {
        let mut rng = sub.rng();
        let mut rejected = 0;
        loop {
            let h: LinearSubspace = sample_grassmannian(n, n - k, &mut rng)?;
            let perp = h.complement();
            let v = sample_unit_in(&perp, &mut rng);
            let c = perp.coords(&v);
            match stable_slice_chi(x, perp.basis(), &c, opts) {
                Ok(chi) => return Ok((chi as f64, rejected)),
                Err(Error::DegenerateDirection(_)) if rejected < 100 => rejected += 1,
                Err(e) => return Err(e),
            }
        }
    });
    let mut values = Vec::with_capacity(n_samples);
    let mut rejected = 0;
    for s in samples {
        let (v, r) = s?;
        values.push(v);
        rejected += r;
    }
    let attempted = n_samples + rejected;
    if rejected as f64 > opts.max_rejection * attempted as f64 {
        return Err(Error::ResampleQuota { rejected, attempted, reason: format!("unstable slices of {}", x.name) });
    }
    Ok(Estimate::from_samples(&values, src.master_seed))
}
