//! Critical points of linear functions on smooth strata.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::shape::SmoothShape;
use super::stratum::SmoothStratum;
use crate::error::{Error, Result};

/// A nondegenerate critical point of `<u, .>` on one stratum.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub stratum: usize,
    pub point: DVector<f64>,
    /// `(-1)^lambda`, `lambda` the Morse index of the restriction to the stratum.
    pub tangential_index: i64,
    /// `1 - chi` of the lower normal slice (1 on strata without a conormal).
    pub normal_index: i64,
}

impl CriticalPoint {
    pub fn index(&self) -> i64 {
        self.tangential_index * self.normal_index
    }
}

/// Relative tolerance below which a Hessian eigenvalue or a conormal
/// pairing counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-8;

const SEED_GRID_2D: (usize, usize) = (24, 48);
const SEED_GRID_1D: usize = 96;
const SEED_TANGENTIAL_MAX: f64 = 0.35;

fn seed_grid(s: &SmoothStratum) -> Vec<Vec<f64>> {
    let axes = s.chart_axes();
    let counts: Vec<usize> = match axes.len() {
        1 => vec![SEED_GRID_1D],
        2 => vec![SEED_GRID_2D.0, SEED_GRID_2D.1],
        _ => return vec![],
    };
    let mut pts = vec![vec![]];
    for (ax, &m) in axes.iter().zip(&counts) {
        let mut next = Vec::new();
        for p in &pts {
            for i in 0..m {
                let mut q: Vec<f64> = p.clone();
                q.push(ax.lo + (ax.hi - ax.lo) * (i as f64 + 0.5) / m as f64);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

impl SmoothStratum {
    /// Newton iteration on the Lagrange system `u = sum mu_i grad F_i`, `F = 0`.
    fn lagrange_newton(&self, u: &DVector<f64>, x0: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
        let c = self.codim();
        let mut x = x0.clone();
        let g = self.implicit_jacobian(&x);
        let mut mu = (&g * g.transpose()).lu().solve(&(&g * u))?;
        let scale = x0.norm().max(1.0);
        for _ in 0..50 {
            let g = self.implicit_jacobian(&x);
            let f = self.implicit(&x);
            let hs = self.implicit_hessians(&x);
            let mut r = DVector::zeros(3 + c);
            let grad_res = u - g.transpose() * &mu;
            r.rows_mut(0, 3).copy_from(&grad_res);
            r.rows_mut(3, c).copy_from(&f);
            if r.norm() < 1e-12 * scale {
                return Some((x, mu));
            }
            let mut jac = DMatrix::zeros(3 + c, 3 + c);
            let mut h = DMatrix::zeros(3, 3);
            for (m, hi) in mu.iter().zip(&hs) {
                h -= hi * *m;
            }
            jac.view_mut((0, 0), (3, 3)).copy_from(&h);
            jac.view_mut((0, 3), (3, c)).copy_from(&(-g.transpose()));
            jac.view_mut((3, 0), (c, 3)).copy_from(&g);
            let step = jac.lu().solve(&(-&r))?;
            x += step.rows(0, 3);
            mu += step.rows(3, c);
            if !x.iter().all(|v| v.is_finite()) || x.norm() > 1e6 * scale {
                return None;
            }
        }
        None
    }

    /// Nondegenerate critical points of `<u, .>` on this stratum, each with
    /// its tangential Morse sign. Degenerate critical points are reported as
    /// [`Error::DegenerateDirection`].
    pub fn critical_points_of_linear(&self, u: &DVector<f64>) -> Result<Vec<(DVector<f64>, i64)>> {
        if self.codim() == 0 {
            return Ok(vec![]);
        }
        let un = u.normalize();
        let mut found: Vec<(DVector<f64>, i64)> = Vec::new();
        for seed in seed_grid(self) {
            let x0 = self.param(&seed);
            let Ok((t, _)) = self.frames_at(&x0) else { continue };
            if t.project(&un).norm() > SEED_TANGENTIAL_MAX {
                continue;
            }
            let Some((x, mu)) = self.lagrange_newton(&un, &x0) else { continue };
            if !self.in_region(&x) {
                continue;
            }
            let scale = x.norm().max(1.0);
            if found.iter().any(|(y, _)| (y - &x).norm() < 1e-7 * scale) {
                continue;
            }
            let (tangent, _) = self.frames_at(&x)?;
            let mut h = DMatrix::zeros(3, 3);
            for (m, hi) in mu.iter().zip(self.implicit_hessians(&x)) {
                h -= hi * *m;
            }
            let tb = tangent.basis();
            let restricted = tb.transpose() * h * tb;
            let eig = SymmetricEigen::new(restricted).eigenvalues;
            let curv_scale = 1.0 / scale;
            if eig.iter().any(|l| l.abs() < DEGENERACY_TOL * curv_scale) {
                return Err(Error::DegenerateDirection(format!(
                    "{}: degenerate critical point at {:?}",
                    self.name,
                    x.as_slice()
                )));
            }
            let negatives = eig.iter().filter(|&&l| l < 0.0).count();
            found.push((x, if negatives % 2 == 0 { 1 } else { -1 }));
        }
        Ok(found)
    }
}

impl SmoothShape {
    /// Critical points of `<u, .>` on all strata, with stratified indices.
    pub fn critical_points(&self, u: &DVector<f64>) -> Result<Vec<CriticalPoint>> {
        let un = u.normalize();
        let mut out = Vec::new();
        for (i, s) in self.strata.iter().enumerate() {
            for (x, tg) in s.critical_points_of_linear(&un)? {
                let nor = match s.conormal_at(&x) {
                    None => 1,
                    Some(c) => {
                        let p = c.dot(&un);
                        if p.abs() < DEGENERACY_TOL {
                            return Err(Error::DegenerateDirection(format!(
                                "{}: direction tangent to the adjacent stratum",
                                s.name
                            )));
                        }
                        i64::from(p > 0.0)
                    }
                };
                out.push(CriticalPoint { stratum: i, point: x, tangential_index: tg, normal_index: nor });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomkit::{sample_unit_sphere, RandomSource};

    fn catalog() -> Vec<SmoothShape> {
        ["sphere:1", "torus:2:1", "disk:1", "hemisphere:1", "circle:1", "ellipse:2:1", "ball:1"]
            .iter()
            .map(|s| SmoothShape::parse(s).unwrap())
            .collect()
    }

    #[test]
    fn index_sums_equal_euler_characteristic() {
        let mut rng = RandomSource::new(11).rng();
        for shape in catalog() {
            for _ in 0..30 {
                let u = sample_unit_sphere(3, &mut rng);
                let cps = shape.critical_points(&u).unwrap();
                let total: i64 = cps.iter().map(|c| c.index()).sum();
                assert_eq!(total, shape.euler_characteristic(), "{} u={:?}", shape.name(), u.as_slice());
            }
        }
    }

    #[test]
    fn torus_has_four_critical_points_for_generic_u() {
        let t = SmoothShape::torus(2.0, 1.0).unwrap();
        let u = DVector::from_vec(vec![0.3, 0.4, 0.866]).normalize();
        let cps = t.critical_points(&u).unwrap();
        assert_eq!(cps.len(), 4);
        let signs: Vec<i64> = cps.iter().map(|c| c.tangential_index).collect();
        assert_eq!(signs.iter().filter(|&&s| s == 1).count(), 2);
    }

    #[test]
    fn axial_torus_direction_is_degenerate() {
        let t = SmoothShape::torus(2.0, 1.0).unwrap();
        let u = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert!(matches!(t.critical_points(&u), Err(Error::DegenerateDirection(_))));
    }

    #[test]
    fn sphere_critical_points_are_poles() {
        let s = SmoothShape::sphere(2.0).unwrap();
        let u = DVector::from_vec(vec![1.0, 2.0, 2.0]) / 3.0;
        let cps = s.critical_points(&u).unwrap();
        assert_eq!(cps.len(), 2);
        for c in cps {
            assert!((c.point.norm() - 2.0).abs() < 1e-10);
            assert!((c.point.normalize().dot(&u).abs() - 1.0).abs() < 1e-10);
        }
    }
}
