//! Geometry of a single smooth stratum in R^3: implicit equations, a chart,
//! and an optional inward conormal.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};

/// The underlying local geometry of a stratum, before any rigid motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Sphere of radius `r` about the origin; `upper` keeps only `z > 0`.
    Sphere { r: f64, upper: bool },
    /// Torus of revolution about the z axis.
    Torus { big: f64, small: f64 },
    /// Open disk of radius `r` in the plane `z = 0`.
    FlatDisk { r: f64 },
    /// Circle of radius `r` in the plane `z = 0`.
    Circle { r: f64 },
    /// Ellipse `x^2/a^2 + y^2/b^2 = 1` in the plane `z = 0`.
    Ellipse { a: f64, b: f64 },
    /// Open ball of radius `r`.
    SolidBall { r: f64 },
}

/// Inward conormal of a boundary stratum: the direction, normal to the
/// stratum, in which the adjacent top stratum lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conormal {
    /// `-(x, y, 0) / |(x, y)|`.
    TowardsAxis,
    /// `-x / |x|`.
    TowardsCenter,
    /// `e_3`.
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartAxis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

fn angle() -> ChartAxis {
    ChartAxis { lo: 0.0, hi: TAU, periodic: true }
}

fn interval(lo: f64, hi: f64) -> ChartAxis {
    ChartAxis { lo, hi, periodic: false }
}

impl Piece {
    pub fn dim(&self) -> usize {
        match self {
            Piece::Sphere { .. } | Piece::Torus { .. } | Piece::FlatDisk { .. } => 2,
            Piece::Circle { .. } | Piece::Ellipse { .. } => 1,
            Piece::SolidBall { .. } => 3,
        }
    }

    fn values(&self, p: &Vector3<f64>) -> Vec<f64> {
        let (x, y, z) = (p.x, p.y, p.z);
        match *self {
            Piece::Sphere { r, .. } => vec![p.norm_squared() - r * r],
            Piece::Torus { big, small } => {
                let rho = x.hypot(y);
                vec![(rho - big).powi(2) + z * z - small * small]
            }
            Piece::FlatDisk { .. } => vec![z],
            Piece::Circle { r } => vec![x * x + y * y - r * r, z],
            Piece::Ellipse { a, b } => vec![x * x / (a * a) + y * y / (b * b) - 1.0, z],
            Piece::SolidBall { .. } => vec![],
        }
    }

    fn gradients(&self, p: &Vector3<f64>) -> Vec<Vector3<f64>> {
        let (x, y, z) = (p.x, p.y, p.z);
        let e3 = Vector3::z();
        match *self {
            Piece::Sphere { .. } => vec![2.0 * p],
            Piece::Torus { big, .. } => {
                let rho = x.hypot(y);
                let s = 2.0 * (rho - big) / rho;
                vec![Vector3::new(s * x, s * y, 2.0 * z)]
            }
            Piece::FlatDisk { .. } => vec![e3],
            Piece::Circle { .. } => vec![Vector3::new(2.0 * x, 2.0 * y, 0.0), e3],
            Piece::Ellipse { a, b } => {
                vec![Vector3::new(2.0 * x / (a * a), 2.0 * y / (b * b), 0.0), e3]
            }
            Piece::SolidBall { .. } => vec![],
        }
    }

    /// First entry of `gradients`, without allocating.
    fn first_gradient(&self, p: &Vector3<f64>) -> Option<Vector3<f64>> {
        match *self {
            Piece::Sphere { .. } => Some(2.0 * p),
            Piece::Torus { big, .. } => {
                let rho = p.x.hypot(p.y);
                let s = 2.0 * (rho - big) / rho;
                Some(Vector3::new(s * p.x, s * p.y, 2.0 * p.z))
            }
            Piece::FlatDisk { .. } => Some(Vector3::z()),
            Piece::Circle { .. } => Some(Vector3::new(2.0 * p.x, 2.0 * p.y, 0.0)),
            Piece::Ellipse { a, b } => Some(Vector3::new(2.0 * p.x / (a * a), 2.0 * p.y / (b * b), 0.0)),
            Piece::SolidBall { .. } => None,
        }
    }

    fn hessians(&self, p: &Vector3<f64>) -> Vec<Matrix3<f64>> {
        match *self {
            Piece::Sphere { .. } => vec![Matrix3::identity() * 2.0],
            Piece::Torus { big, .. } => {
                let rho = p.x.hypot(p.y);
                let u = Vector3::new(p.x / rho, p.y / rho, 0.0);
                let planar = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
                let h = 2.0 * u * u.transpose()
                    + 2.0 * (rho - big) / rho * (planar - u * u.transpose())
                    + Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 2.0));
                vec![h]
            }
            Piece::FlatDisk { .. } => vec![Matrix3::zeros()],
            Piece::Circle { .. } => {
                vec![Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 0.0)), Matrix3::zeros()]
            }
            Piece::Ellipse { a, b } => vec![
                Matrix3::from_diagonal(&Vector3::new(2.0 / (a * a), 2.0 / (b * b), 0.0)),
                Matrix3::zeros(),
            ],
            Piece::SolidBall { .. } => vec![],
        }
    }

    /// Open conditions cutting the stratum out of its implicit variety.
    fn in_region(&self, p: &Vector3<f64>) -> bool {
        match *self {
            Piece::Sphere { upper, .. } => !upper || p.z > 0.0,
            Piece::FlatDisk { r } => p.x * p.x + p.y * p.y < r * r,
            Piece::SolidBall { r } => p.norm_squared() < r * r,
            _ => true,
        }
    }

    fn chart_axes(&self) -> Vec<ChartAxis> {
        match *self {
            Piece::Sphere { upper, .. } => {
                vec![interval(0.0, if upper { PI / 2.0 } else { PI }), angle()]
            }
            Piece::Torus { .. } => vec![angle(), angle()],
            Piece::FlatDisk { r } => vec![interval(0.0, r), angle()],
            Piece::Circle { .. } | Piece::Ellipse { .. } => vec![angle()],
            Piece::SolidBall { r } => vec![interval(0.0, r), interval(0.0, PI), angle()],
        }
    }

    fn param(&self, u: &[f64]) -> Vector3<f64> {
        match *self {
            Piece::Sphere { r, .. } => {
                let (st, ct) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                r * Vector3::new(st * cp, st * sp, ct)
            }
            Piece::Torus { big, small } => {
                let (st, ct) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                let w = big + small * ct;
                Vector3::new(w * cp, w * sp, small * st)
            }
            Piece::FlatDisk { .. } => {
                let (sp, cp) = u[1].sin_cos();
                Vector3::new(u[0] * cp, u[0] * sp, 0.0)
            }
            Piece::Circle { r } => {
                let (sp, cp) = u[0].sin_cos();
                Vector3::new(r * cp, r * sp, 0.0)
            }
            Piece::Ellipse { a, b } => {
                let (sp, cp) = u[0].sin_cos();
                Vector3::new(a * cp, b * sp, 0.0)
            }
            Piece::SolidBall { .. } => {
                let (st, ct) = u[1].sin_cos();
                let (sp, cp) = u[2].sin_cos();
                u[0] * Vector3::new(st * cp, st * sp, ct)
            }
        }
    }

    fn param_jacobian(&self, u: &[f64]) -> Vec<Vector3<f64>> {
        match *self {
            Piece::Sphere { r, .. } => {
                let (st, ct) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                vec![r * Vector3::new(ct * cp, ct * sp, -st), r * Vector3::new(-st * sp, st * cp, 0.0)]
            }
            Piece::Torus { big, small } => {
                let (st, ct) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                let w = big + small * ct;
                vec![
                    Vector3::new(-small * st * cp, -small * st * sp, small * ct),
                    Vector3::new(-w * sp, w * cp, 0.0),
                ]
            }
            Piece::FlatDisk { .. } => {
                let (sp, cp) = u[1].sin_cos();
                vec![Vector3::new(cp, sp, 0.0), Vector3::new(-u[0] * sp, u[0] * cp, 0.0)]
            }
            Piece::Circle { r } => {
                let (sp, cp) = u[0].sin_cos();
                vec![Vector3::new(-r * sp, r * cp, 0.0)]
            }
            Piece::Ellipse { a, b } => {
                let (sp, cp) = u[0].sin_cos();
                vec![Vector3::new(-a * sp, b * cp, 0.0)]
            }
            Piece::SolidBall { .. } => {
                let rho = u[0];
                let (st, ct) = u[1].sin_cos();
                let (sp, cp) = u[2].sin_cos();
                vec![
                    Vector3::new(st * cp, st * sp, ct),
                    rho * Vector3::new(ct * cp, ct * sp, -st),
                    rho * Vector3::new(-st * sp, st * cp, 0.0),
                ]
            }
        }
    }

    fn scaled(&self, t: f64) -> Piece {
        match *self {
            Piece::Sphere { r, upper } => Piece::Sphere { r: r * t, upper },
            Piece::Torus { big, small } => Piece::Torus { big: big * t, small: small * t },
            Piece::FlatDisk { r } => Piece::FlatDisk { r: r * t },
            Piece::Circle { r } => Piece::Circle { r: r * t },
            Piece::Ellipse { a, b } => Piece::Ellipse { a: a * t, b: b * t },
            Piece::SolidBall { r } => Piece::SolidBall { r: r * t },
        }
    }
}

impl Conormal {
    fn at(&self, p: &Vector3<f64>) -> Vector3<f64> {
        match self {
            Conormal::TowardsAxis => -Vector3::new(p.x, p.y, 0.0).normalize(),
            Conormal::TowardsCenter => -p.normalize(),
            Conormal::Up => Vector3::z(),
        }
    }
}

fn to3(x: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(x[0], x[1], x[2])
}

fn from3(x: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

/// A smooth stratum: a [`Piece`] moved by the rigid motion `x -> rot x + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothStratum {
    pub name: String,
    pub piece: Piece,
    pub conormal: Option<Conormal>,
    rot: Matrix3<f64>,
    shift: Vector3<f64>,
}

impl SmoothStratum {
    pub fn new(name: impl Into<String>, piece: Piece, conormal: Option<Conormal>) -> Self {
        Self {
            name: name.into(),
            piece,
            conormal,
            rot: Matrix3::identity(),
            shift: Vector3::zeros(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        3
    }

    pub fn dim(&self) -> usize {
        self.piece.dim()
    }

    pub fn codim(&self) -> usize {
        3 - self.piece.dim()
    }

    fn local(&self, x: &DVector<f64>) -> Vector3<f64> {
        self.rot.transpose() * (to3(x) - self.shift)
    }

    /// Values of the implicit map at `x` (one entry per codimension).
    pub fn implicit(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.piece.values(&self.local(x)))
    }

    /// Gradients of the implicit map, one per row.
    pub fn implicit_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let g = self.piece.gradients(&self.local(x));
        let mut m = DMatrix::zeros(g.len(), 3);
        for (i, gi) in g.iter().enumerate() {
            let w = self.rot * gi;
            for j in 0..3 {
                m[(i, j)] = w[j];
            }
        }
        m
    }

    pub fn implicit_hessians(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.piece
            .hessians(&self.local(x))
            .iter()
            .map(|h| {
                let w = self.rot * h * self.rot.transpose();
                DMatrix::from_column_slice(3, 3, w.as_slice())
            })
            .collect()
    }

    /// Whether a point of the implicit variety belongs to the (open) stratum.
    pub fn in_region(&self, x: &DVector<f64>) -> bool {
        self.piece.in_region(&self.local(x))
    }

    pub fn chart_axes(&self) -> Vec<ChartAxis> {
        self.piece.chart_axes()
    }

    pub fn param(&self, u: &[f64]) -> DVector<f64> {
        from3(&(self.rot * self.piece.param(u) + self.shift))
    }

    /// Chart derivatives as columns (3 x dim).
    pub fn param_jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> =
            self.piece.param_jacobian(u).iter().map(|c| from3(&(self.rot * c))).collect();
        DMatrix::from_columns(&cols)
    }

    /// `param` without heap allocation.
    pub(crate) fn param3(&self, u: &[f64]) -> Vector3<f64> {
        self.rot * self.piece.param(u) + self.shift
    }

    /// Gradient of the first implicit equation at `x`.
    pub(crate) fn first_gradient3(&self, x: &Vector3<f64>) -> Option<Vector3<f64>> {
        let local = self.rot.transpose() * (x - self.shift);
        self.piece.first_gradient(&local).map(|g| self.rot * g)
    }

    /// Gradient and Hessian of the first implicit equation at `x`.
    pub(crate) fn first_equation3(&self, x: &Vector3<f64>) -> Option<(Vector3<f64>, Matrix3<f64>)> {
        let local = self.rot.transpose() * (x - self.shift);
        let g = *self.piece.gradients(&local).first()?;
        let h = *self.piece.hessians(&local).first()?;
        Some((self.rot * g, self.rot * h * self.rot.transpose()))
    }

    pub fn conormal_at(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        self.conormal.map(|c| from3(&(self.rot * c.at(&self.local(x)))))
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {t}")));
        }
        Ok(Self { piece: self.piece.scaled(t), shift: self.shift * t, ..self.clone() })
    }

    /// Applies `x -> a x + shift` with `a` orthogonal.
    pub fn moved(&self, a: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        if a.shape() != (3, 3) || shift.len() != 3 {
            return Err(Error::Domain("rigid motion must act on R^3".into()));
        }
        let q = Matrix3::from_iterator(a.iter().copied());
        if (q.transpose() * q - Matrix3::identity()).abs().max() > 1e-9 {
            return Err(Error::Domain("motion matrix is not orthogonal".into()));
        }
        Ok(Self { rot: q * self.rot, shift: q * self.shift + to3(shift), ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pieces() -> Vec<SmoothStratum> {
        vec![
            SmoothStratum::new("s", Piece::Sphere { r: 1.5, upper: false }, None),
            SmoothStratum::new("h", Piece::Sphere { r: 1.0, upper: true }, None),
            SmoothStratum::new("t", Piece::Torus { big: 2.0, small: 1.0 }, None),
            SmoothStratum::new("d", Piece::FlatDisk { r: 1.0 }, None),
            SmoothStratum::new("c", Piece::Circle { r: 2.0 }, None),
            SmoothStratum::new("e", Piece::Ellipse { a: 2.0, b: 1.0 }, None),
            SmoothStratum::new("b", Piece::SolidBall { r: 1.0 }, None),
        ]
    }

    fn grid(axes: &[ChartAxis], m: usize) -> Vec<Vec<f64>> {
        let mut pts = vec![vec![]];
        for ax in axes {
            let mut next = Vec::new();
            for p in &pts {
                for i in 0..m {
                    let mut q = p.clone();
                    q.push(ax.lo + (ax.hi - ax.lo) * (i as f64 + 0.5) / m as f64);
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    }

    #[test]
    fn chart_lies_on_implicit_variety_with_full_rank() {
        for s in all_pieces() {
            for u in grid(&s.chart_axes(), 20) {
                let x = s.param(&u);
                assert!(s.implicit(&x).amax() < 1e-9, "{}", s.name);
                assert!(s.in_region(&x));
                let j = s.param_jacobian(&u);
                let sv = j.clone().svd(false, false).singular_values.min();
                assert!(sv > 1e-6, "{} {u:?}", s.name);
                if s.codim() > 0 {
                    let g = s.implicit_jacobian(&x);
                    assert!(g.clone().svd(false, false).singular_values.min() > 1e-6);
                    // Gradients are normal to the chart.
                    assert!((g * j).amax() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn chart_derivatives_match_finite_differences() {
        let h = 1e-6;
        for s in all_pieces() {
            for u in grid(&s.chart_axes(), 5) {
                let j = s.param_jacobian(&u);
                for k in 0..u.len() {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[k] += h;
                    dn[k] -= h;
                    let fd = (s.param(&up) - s.param(&dn)) / (2.0 * h);
                    assert!((fd - j.column(k)).amax() < 1e-7, "{}", s.name);
                }
            }
        }
    }

    #[test]
    fn hessians_match_finite_differences() {
        let h = 1e-5;
        for s in all_pieces().into_iter().filter(|s| s.codim() > 0) {
            let x = DVector::from_vec(vec![0.7, -0.4, 0.3]);
            let hs = s.implicit_hessians(&x);
            for k in 0..3 {
                let mut e = DVector::zeros(3);
                e[k] = h;
                let fd = (s.implicit_jacobian(&(&x + &e)) - s.implicit_jacobian(&(&x - &e))) / (2.0 * h);
                for (i, hi) in hs.iter().enumerate() {
                    for j in 0..3 {
                        assert!((fd[(i, j)] - hi[(k, j)]).abs() < 1e-6, "{}", s.name);
                    }
                }
            }
        }
    }

    #[test]
    fn motion_moves_the_variety() {
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -0.5, 1.1).matrix().clone();
        let a = DMatrix::from_column_slice(3, 3, q.as_slice());
        let t = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        for s in all_pieces() {
            let m = s.moved(&a, &t).unwrap();
            for u in grid(&s.chart_axes(), 4) {
                let x = m.param(&u);
                assert!(m.implicit(&x).amax() < 1e-9);
                assert!((&x - (&a * s.param(&u) + &t)).amax() < 1e-12);
            }
        }
    }
}
