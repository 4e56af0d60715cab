//! Orthonormal frames for elements of the linear and affine Grassmannians.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const ORTHO_TOL: f64 = 1e-10;

/// A `dim`-dimensional linear subspace of `R^n`, stored as an `n x dim` matrix
/// whose columns are orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspace {
    basis: DMatrix<f64>,
}

impl LinearSubspace {
    /// Orthonormalizes the given spanning vectors (modified Gram-Schmidt, two passes).
    /// Fails if they are not linearly independent.
    pub fn from_spanning(ambient_dim: usize, vectors: &[DVector<f64>]) -> Result<Self> {
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::Domain(format!(
                    "vector of length {} in R^{ambient_dim}",
                    v.len()
                )));
            }
            let scale = v.norm().max(f64::MIN_POSITIVE);
            let mut w = v.clone();
            for _ in 0..2 {
                for c in &cols {
                    let d = c.dot(&w);
                    w.axpy(-d, c, 1.0);
                }
            }
            let nw = w.norm();
            if nw <= 1e-12 * scale {
                return Err(Error::Domain("spanning vectors are linearly dependent".into()));
            }
            cols.push(w / nw);
        }
        Ok(Self::from_columns_unchecked(ambient_dim, &cols))
    }

    pub(crate) fn from_columns_unchecked(ambient_dim: usize, cols: &[DVector<f64>]) -> Self {
        let mut basis = DMatrix::zeros(ambient_dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            basis.set_column(j, c);
        }
        Self { basis }
    }

    /// Wraps a matrix with orthonormal columns, checking orthonormality to 1e-10.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        let g = basis.transpose() * &basis;
        let k = basis.ncols();
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                if (g[(i, j)] - target).abs() > ORTHO_TOL {
                    return Err(Error::Domain("basis is not orthonormal".into()));
                }
            }
        }
        Ok(Self { basis })
    }

    pub fn full(n: usize) -> Self {
        Self { basis: DMatrix::identity(n, n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { basis: DMatrix::zeros(n, 0) }
    }

    /// Span of the listed standard basis vectors.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let cols: Vec<_> = axes
            .iter()
            .map(|&a| {
                let mut e = DVector::zeros(n);
                e[a] = 1.0;
                e
            })
            .collect();
        Self::from_columns_unchecked(n, &cols)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        self.basis.column(i).into_owned()
    }

    /// Coordinates of the orthogonal projection of `x` in this frame.
    pub fn coords(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis.tr_mul(x)
    }

    /// Orthogonal projection of `x`, as a vector of the ambient space.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * self.basis.tr_mul(x)
    }

    pub fn lift(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.basis * coords
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Orthonormal basis of the orthogonal complement, completed greedily from
    /// the standard basis vectors with the largest residual.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim();
        let mut cols: Vec<DVector<f64>> =
            (0..self.dim()).map(|i| self.basis_vector(i)).collect();
        let mut out = Vec::with_capacity(n - self.dim());
        while cols.len() < n {
            let mut best: Option<(f64, DVector<f64>)> = None;
            for a in 0..n {
                let mut w = DVector::zeros(n);
                w[a] = 1.0;
                for _ in 0..2 {
                    for c in &cols {
                        let d = c.dot(&w);
                        w.axpy(-d, c, 1.0);
                    }
                }
                let nw = w.norm();
                if best.as_ref().map_or(true, |(b, _)| nw > *b) {
                    best = Some((nw, w));
                }
            }
            let (nw, w) = best.expect("n > 0");
            let w = w / nw;
            cols.push(w.clone());
            out.push(w);
        }
        Self::from_columns_unchecked(n, &out)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.tr_mul(&self.basis);
        let k = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Applies an orthogonal map to every basis vector.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Self {
        Self { basis: rotation * &self.basis }
    }
}

/// An affine flat `offset + direction`, with `offset` orthogonal to `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    pub direction: LinearSubspace,
    pub offset: DVector<f64>,
}

impl AffineFlat {
    /// Builds a flat through `point`, normalizing the offset to the foot of the
    /// perpendicular from the origin.
    pub fn through(direction: LinearSubspace, point: &DVector<f64>) -> Self {
        let offset = point - direction.project(point);
        Self { direction, offset }
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.direction.ambient_dim()
    }

    /// Orthogonal defect of the offset against the direction (0 for valid flats).
    pub fn offset_defect(&self) -> f64 {
        self.direction.coords(&self.offset).amax()
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        let rel = x - &self.offset;
        (&rel - self.direction.project(&rel)).norm() <= tol
    }
}
