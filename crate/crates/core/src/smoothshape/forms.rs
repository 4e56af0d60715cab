//! Frames, second fundamental forms and curvature densities.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::stratum::SmoothStratum;
use crate::error::{Error, Result};
use crate::geomkit::LinearSubspace;

/// Points of the uniform rule on a normal circle.
pub const NORMAL_CIRCLE_POINTS: usize = 64;

/// Tolerance for `v` to count as normal to a stratum.
pub const NORMAL_TOL: f64 = 1e-8;

/// Second fundamental form at a point in a unit normal direction, expressed
/// in an orthonormal tangent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFormAt {
    pub point: DVector<f64>,
    pub tangent: LinearSubspace,
    pub normal: DVector<f64>,
    pub matrix: DMatrix<f64>,
}

impl SecondFormAt {
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.matrix.nrows() == 0 {
            return vec![];
        }
        let mut e: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// Elementary symmetric function `sigma_i` of the eigenvalues.
    pub fn sigma(&self, i: usize) -> f64 {
        elementary_symmetric(&self.eigenvalues(), i)
    }

    /// `II(a, b)` for ambient vectors `a`, `b` (projected to the tangent frame).
    pub fn apply(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let ca = self.tangent.coords(a);
        let cb = self.tangent.coords(b);
        (ca.transpose() * &self.matrix * cb)[(0, 0)]
    }
}

pub fn elementary_symmetric(values: &[f64], i: usize) -> f64 {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (m, &x) in values.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] += e[j - 1] * x;
        }
    }
    e.get(i).copied().unwrap_or(0.0)
}

impl SmoothStratum {
    /// Tangent and normal frames at a point of the stratum, from the implicit
    /// gradients.
    pub fn frames_at(&self, x: &DVector<f64>) -> Result<(LinearSubspace, LinearSubspace)> {
        if self.codim() == 0 {
            return Ok((LinearSubspace::full(3), LinearSubspace::zero(3)));
        }
        let g = self.implicit_jacobian(x);
        let rows: Vec<DVector<f64>> = (0..g.nrows()).map(|i| g.row(i).transpose()).collect();
        let normal = LinearSubspace::from_spanning(3, &rows)
            .map_err(|_| Error::DegenerateChart(format!("{}: implicit gradients dependent", self.name)))?;
        Ok((normal.complement(), normal))
    }

    /// Frames at a chart point; fails where the chart itself degenerates.
    pub fn chart_frames(&self, u: &[f64]) -> Result<(LinearSubspace, LinearSubspace)> {
        let j = self.param_jacobian(u);
        let sv = j.clone().svd(false, false).singular_values.min();
        if sv <= 1e-6 {
            return Err(Error::DegenerateChart(format!(
                "{}: chart rank deficient at {u:?} (min singular value {sv:.2e})",
                self.name
            )));
        }
        let cols: Vec<DVector<f64>> = j.column_iter().map(|c| c.into_owned()).collect();
        let tangent = LinearSubspace::from_spanning(3, &cols)?;
        let normal = tangent.complement();
        Ok((tangent, normal))
    }

    /// `II_{x,v}(a, b) = -sum_i c_i a^T Hess(F_i) b`, where `v = sum_i c_i grad F_i`.
    /// With this sign the unit sphere and its outward normal give `-I`.
    pub fn second_form(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<SecondFormAt> {
        let (tangent, normal) = self.frames_at(x)?;
        let off = tangent.project(v).norm();
        if off > NORMAL_TOL || (v.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormal(off.max((v.norm() - 1.0).abs())));
        }
        let d = tangent.dim();
        let mut m = DMatrix::zeros(d, d);
        if normal.dim() > 0 {
            let g = self.implicit_jacobian(x);
            let gram = &g * g.transpose();
            let c = gram
                .lu()
                .solve(&(&g * v))
                .ok_or_else(|| Error::DegenerateChart(format!("{}: singular gradient Gram", self.name)))?;
            let hs = self.implicit_hessians(x);
            let t = tangent.basis();
            for (ci, h) in c.iter().zip(&hs) {
                m -= (t.transpose() * h * t) * *ci;
            }
            m = (&m + m.transpose()) * 0.5;
        }
        Ok(SecondFormAt { point: x.clone(), tangent, normal: v.clone(), matrix: m })
    }

    /// Quadrature nodes and weights on the unit normal sphere at `x`:
    /// exact two-point rule in codimension 1, uniform circle rule in
    /// codimension 2. Empty in codimension 0.
    pub fn normal_sphere_rule(&self, x: &DVector<f64>) -> Result<Vec<(DVector<f64>, f64)>> {
        let (_, normal) = self.frames_at(x)?;
        Ok(match normal.dim() {
            0 => vec![],
            1 => {
                let n = normal.basis_vector(0);
                vec![(n.clone(), 1.0), (-n, 1.0)]
            }
            2 => {
                let (a, b) = (normal.basis_vector(0), normal.basis_vector(1));
                let w = std::f64::consts::TAU / NORMAL_CIRCLE_POINTS as f64;
                (0..NORMAL_CIRCLE_POINTS)
                    .map(|j| {
                        let (s, c) = (w * j as f64).sin_cos();
                        (&a * c + &b * s, w)
                    })
                    .collect()
            }
            k => return Err(Error::Unsupported(format!("normal sphere of dimension {}", k - 1))),
        })
    }

    /// `K_i(x) = integral over the unit normal sphere of sigma_i(II_{x,v})`.
    /// For an open stratum of full dimension the normal sphere is empty and
    /// `K_0 = 1` by convention.
    pub fn lkw_curvature(&self, x: &DVector<f64>, i: usize) -> Result<f64> {
        if i > self.dim() {
            return Err(Error::Domain(format!("curvature index {i} exceeds stratum dimension {}", self.dim())));
        }
        if self.codim() == 0 {
            return Ok(if i == 0 { 1.0 } else { 0.0 });
        }
        let mut acc = 0.0;
        for (v, w) in self.normal_sphere_rule(x)? {
            acc += w * self.second_form(x, &v)?.sigma(i);
        }
        Ok(acc)
    }
}
