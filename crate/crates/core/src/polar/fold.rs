//! Fold curves `{x : <n(x), p> = 0}` of surface strata, traced on the chart by
//! marching squares, then refined and checked for genericity.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::types::{DegeneracyKind, DegeneracyReport};
use crate::smoothshape::{ChartAxis, Piece, SmoothStratum};

const BISECTION_STEPS: usize = 60;
const MAX_DEPTH: usize = 12;
const FD_STEP: f64 = 1e-6;

/// One traced arc of a fold, as chart points and the matching surface points.
#[derive(Debug, Clone)]
pub(crate) struct FoldArc {
    pub points: Vec<DVector<f64>>,
    pub closed: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct FoldTrace {
    pub arcs: Vec<FoldArc>,
    pub report: DegeneracyReport,
}

/// The fold function `g(u) = <n(param(u)), p>` on a surface stratum.
pub(crate) struct FoldFunction<'a> {
    pub stratum: &'a SmoothStratum,
    pub p: Vector3<f64>,
    axes: [ChartAxis; 2],
}

fn to3(x: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(x[0], x[1], x[2])
}

/// Unit normal of a codimension-one stratum at `x`.
pub(crate) fn unit_normal(st: &SmoothStratum, x: &DVector<f64>) -> Vector3<f64> {
    unit_normal3(st, &to3(x))
}

fn unit_normal3(st: &SmoothStratum, x: &Vector3<f64>) -> Vector3<f64> {
    st.first_gradient3(x).map_or(Vector3::zeros(), |g| g.normalize())
}

/// At a fold point with unit kernel direction `p` (tangent there), returns
/// `II_n(p, p)` and `|II_n(p, .)|` for the unit normal `n` along the gradient.
pub(crate) fn fold_curvatures(st: &SmoothStratum, x: &DVector<f64>, p: &Vector3<f64>) -> Option<(f64, f64)> {
    let (g, h) = st.first_equation3(&to3(x))?;
    let gn = g.norm();
    let n = g / gn;
    let hp = h * p;
    let sp = -(hp - n * n.dot(&hp)) / gn;
    Some((-p.dot(&hp) / gn, sp.norm()))
}

fn wrap(ax: &ChartAxis, v: f64) -> f64 {
    if ax.periodic {
        let w = ax.hi - ax.lo;
        ax.lo + (v - ax.lo).rem_euclid(w)
    } else {
        v
    }
}

impl<'a> FoldFunction<'a> {
    pub fn new(stratum: &'a SmoothStratum, p: Vector3<f64>) -> Self {
        let ax = stratum.chart_axes();
        Self { stratum, p, axes: [ax[0], ax[1]] }
    }

    pub fn point(&self, u: [f64; 2]) -> DVector<f64> {
        self.stratum.param(&u)
    }

    pub fn value(&self, u: [f64; 2]) -> f64 {
        unit_normal3(self.stratum, &self.stratum.param3(&u)).dot(&self.p)
    }

    fn gradient(&self, u: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (k, gk) in g.iter_mut().enumerate() {
            let mut a = u;
            let mut b = u;
            a[k] -= FD_STEP;
            b[k] += FD_STEP;
            *gk = (self.value(b) - self.value(a)) / (2.0 * FD_STEP);
        }
        g
    }

    fn hessian(&self, u: [f64; 2]) -> [[f64; 2]; 2] {
        let h = 1e-4;
        let mut m = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut a = u;
            let mut b = u;
            a[k] -= h;
            b[k] += h;
            let (ga, gb) = (self.gradient(a), self.gradient(b));
            for l in 0..2 {
                m[l][k] = (gb[l] - ga[l]) / (2.0 * h);
            }
        }
        for row in 0..2 {
            for col in row + 1..2 {
                let s = 0.5 * (m[row][col] + m[col][row]);
                m[row][col] = s;
                m[col][row] = s;
            }
        }
        m
    }

    fn wrapped(&self, u: [f64; 2]) -> [f64; 2] {
        [wrap(&self.axes[0], u[0]), wrap(&self.axes[1], u[1])]
    }

    /// Projection onto `g = 0` along the gradient at the starting point
    /// (chord Newton: the gradient is computed once).
    pub fn project(&self, mut u: [f64; 2]) -> Option<[f64; 2]> {
        let d = self.gradient(u);
        let nn = d[0] * d[0] + d[1] * d[1];
        if nn < 1e-24 {
            return None;
        }
        for _ in 0..40 {
            let g = self.value(u);
            if g.abs() < 1e-13 {
                return Some(self.wrapped(u));
            }
            u = [u[0] - g * d[0] / nn, u[1] - g * d[1] / nn];
        }
        (self.value(u).abs() < 1e-9).then(|| self.wrapped(u))
    }

    /// Chart midpoint of `a` and `b`, taking the short way round on periodic axes.
    fn chart_mid(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut m = [0.0; 2];
        for k in 0..2 {
            let ax = &self.axes[k];
            let mut d = b[k] - a[k];
            if ax.periodic {
                let w = ax.hi - ax.lo;
                d -= w * (d / w).round();
            }
            m[k] = a[k] + 0.5 * d;
        }
        m
    }
}

struct Grid {
    u0: Vec<f64>,
    u1: Vec<f64>,
    periodic: [bool; 2],
    values: Vec<f64>,
}

impl Grid {
    fn nodes(ax: &ChartAxis, m: usize) -> Vec<f64> {
        let h = (ax.hi - ax.lo) / m as f64;
        if ax.periodic {
            (0..m).map(|i| ax.lo + i as f64 * h).collect()
        } else {
            (0..m).map(|i| ax.lo + (i as f64 + 0.5) * h).collect()
        }
    }

    fn cells(&self, k: usize) -> usize {
        let n = if k == 0 { self.u0.len() } else { self.u1.len() };
        if self.periodic[k] { n } else { n - 1 }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(i % self.u0.len()) * self.u1.len() + j % self.u1.len()]
    }

    /// Chart coordinate of node `(i, j)`, unwrapped past the last node.
    fn coord(&self, i: usize, j: usize) -> [f64; 2] {
        let step = |v: &Vec<f64>, k: usize| {
            let n = v.len();
            let h = if n > 1 { v[1] - v[0] } else { 0.0 };
            v[k % n] + (k / n) as f64 * h * n as f64
        };
        [step(&self.u0, i), step(&self.u1, j)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    /// Between `(i, j)` and `(i + 1, j)`.
    A(usize, usize),
    /// Between `(i, j)` and `(i, j + 1)`.
    B(usize, usize),
}

/// For a full sphere, a copy whose chart pole is `p`, so that the fold is the
/// chart equator and stays away from the chart singularities.
pub(crate) fn tracing_stratum(st: &SmoothStratum, p: &Vector3<f64>) -> SmoothStratum {
    if !matches!(st.piece, Piece::Sphere { upper: false, .. }) {
        return st.clone();
    }
    let north = to3(&st.param(&[0.0, 0.0]));
    let south = to3(&st.param(&[std::f64::consts::PI, 0.0]));
    let center = 0.5 * (north + south);
    let d = (north - center).normalize();
    let rot = rotation_between(&d, p);
    let shift = center - rot * center;
    let a = DMatrix::from_column_slice(3, 3, rot.as_slice());
    st.moved(&a, &DVector::from_column_slice(shift.as_slice())).expect("rotation is orthogonal")
}

/// A rotation taking the unit vector `a` to the unit vector `b`.
fn rotation_between(a: &Vector3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    let c = a.dot(b);
    if c > 1.0 - 1e-12 {
        return Matrix3::identity();
    }
    if c < -1.0 + 1e-12 {
        let mut axis = a.cross(&Vector3::x());
        if axis.norm() < 0.5 {
            axis = a.cross(&Vector3::y());
        }
        let k = axis.normalize();
        return 2.0 * k * k.transpose() - Matrix3::identity();
    }
    let v = a.cross(b);
    let vx = v.cross_matrix();
    Matrix3::identity() + vx + vx * vx / (1.0 + c)
}

/// Traces the fold of a surface stratum for the kernel direction `p`.
/// `scale` is the shape diameter.
pub(crate) fn trace_fold(
    st: &SmoothStratum,
    p: &Vector3<f64>,
    grid_size: usize,
    chord_tol: f64,
    clearance: f64,
    scale: f64,
) -> FoldTrace {
    let traced = tracing_stratum(st, p);
    let f = FoldFunction::new(&traced, *p);
    let ax = f.axes;
    let u0 = Grid::nodes(&ax[0], grid_size);
    let u1 = Grid::nodes(&ax[1], grid_size);
    let mut values = Vec::with_capacity(u0.len() * u1.len());
    for &a in &u0 {
        for &b in &u1 {
            values.push(f.value([a, b]));
        }
    }
    let grid = Grid { u0, u1, periodic: [ax[0].periodic, ax[1].periodic], values };
    let mut trace = FoldTrace::default();

    let vmax = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if vmax < clearance {
        trace.report.push(DegeneracyKind::Fold, vmax, format!("{}: whole stratum is folded", st.name));
        return trace;
    }

    let positive = |i, j| grid.at(i, j) >= 0.0;
    let mut roots: HashMap<Edge, [f64; 2]> = HashMap::new();
    let mut root_of = |e: Edge| -> [f64; 2] {
        *roots.entry(e).or_insert_with(|| {
            let (a, b) = match e {
                Edge::A(i, j) => (grid.coord(i, j), grid.coord(i + 1, j)),
                Edge::B(i, j) => (grid.coord(i, j), grid.coord(i, j + 1)),
            };
            let lerp = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let (mut lo, mut hi) = (0.0, 1.0);
            let glo = f.value(a);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if (f.value(lerp(mid)) >= 0.0) == (glo >= 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            f.wrapped(lerp(0.5 * (lo + hi)))
        })
    };

    let (n0, n1) = (grid.u0.len(), grid.u1.len());
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..grid.cells(0) {
        for j in 0..grid.cells(1) {
            let s = [positive(i, j), positive(i + 1, j), positive(i + 1, j + 1), positive(i, j + 1)];
            let edges = [
                Edge::A(i % n0, j % n1),
                Edge::B((i + 1) % n0, j % n1),
                Edge::A(i % n0, (j + 1) % n1),
                Edge::B(i % n0, j % n1),
            ];
            let cut: Vec<usize> = (0..4).filter(|&k| s[k] != s[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let a = grid.coord(i, j);
                    let b = grid.coord(i + 1, j + 1);
                    let centre = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                    let h = (b[0] - a[0]).abs().max((b[1] - a[1]).abs());
                    if let Some(v) = saddle_value(&f, centre, 2.0 * h) {
                        if v.abs() < clearance {
                            trace.report.push(
                                DegeneracyKind::SingularDiscriminant,
                                v.abs(),
                                format!("{}: fold self-crossing near chart point {centre:?}", st.name),
                            );
                        }
                    }
                    if (f.value(centre) >= 0.0) == s[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    for chain in chain_segments(&segments) {
        let chart: Vec<[f64; 2]> = chain.edges.iter().map(|&e| root_of(e)).collect();
        let chart = refine(&f, chart, chain.closed, chord_tol * scale);
        let points = chart.iter().map(|&u| f.point(u)).collect();
        trace.arcs.push(FoldArc { points, closed: chain.closed });
    }
    trace
}

/// Value of `g` at the critical point of `g` near `centre` (within `radius`
/// in the chart), if Newton on the gradient finds one.
fn saddle_value(f: &FoldFunction<'_>, centre: [f64; 2], radius: f64) -> Option<f64> {
    let mut u = centre;
    for _ in 0..20 {
        let g = f.gradient(u);
        let h = f.hessian(u);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let du = [(h[1][1] * g[0] - h[0][1] * g[1]) / det, (h[0][0] * g[1] - h[1][0] * g[0]) / det];
        u = [u[0] - du[0], u[1] - du[1]];
        if (u[0] - centre[0]).hypot(u[1] - centre[1]) > radius {
            return None;
        }
        if du[0].hypot(du[1]) < 1e-12 {
            break;
        }
    }
    Some(f.value(u))
}

struct Chain {
    edges: Vec<Edge>,
    closed: bool,
}

fn chain_segments(segments: &[(Edge, Edge)]) -> Vec<Chain> {
    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(k);
        by_edge.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    let next = |e: Edge, from: usize, used: &[bool]| -> Option<usize> {
        by_edge[&e].iter().copied().find(|&k| k != from && !used[k])
    };
    // Open arcs start at edges used by a single segment.
    let mut order: Vec<usize> = (0..segments.len())
        .filter(|&k| by_edge[&segments[k].0].len() == 1 || by_edge[&segments[k].1].len() == 1)
        .collect();
    order.extend(0..segments.len());
    for start in order {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let (first, mut tip) = if by_edge[&b].len() == 1 { (b, a) } else { (a, b) };
        let mut edges = vec![first, tip];
        let mut cur = start;
        let mut closed = false;
        while let Some(k) = next(tip, cur, &used) {
            used[k] = true;
            let (x, y) = segments[k];
            tip = if x == tip { y } else { x };
            cur = k;
            if tip == first {
                closed = true;
                break;
            }
            edges.push(tip);
        }
        chains.push(Chain { edges, closed });
    }
    chains
}

/// Inserts projected midpoints until every chord is within `tol` of the curve.
fn refine(f: &FoldFunction<'_>, chart: Vec<[f64; 2]>, closed: bool, tol: f64) -> Vec<[f64; 2]> {
    let n = chart.len();
    if n < 2 {
        return chart;
    }
    let mut out = Vec::with_capacity(2 * n);
    let segs = if closed { n } else { n - 1 };
    let s = f.stratum;
    for k in 0..segs {
        let a = chart[k];
        let b = chart[(k + 1) % n];
        out.push(a);
        subdivide(f, (a, s.param3(&a)), (b, s.param3(&b)), tol, 0, &mut out);
    }
    if !closed {
        out.push(chart[n - 1]);
    }
    out
}

type ChartPoint = ([f64; 2], Vector3<f64>);

fn subdivide(f: &FoldFunction<'_>, a: ChartPoint, b: ChartPoint, tol: f64, depth: usize, out: &mut Vec<[f64; 2]>) {
    if depth >= MAX_DEPTH {
        return;
    }
    let Some(m) = f.project(f.chart_mid(a.0, b.0)) else { return };
    let xm = f.stratum.param3(&m);
    if (xm - (a.1 + b.1) * 0.5).norm() < tol {
        return;
    }
    subdivide(f, a, (m, xm), tol, depth + 1, out);
    out.push(m);
    subdivide(f, (m, xm), b, tol, depth + 1, out);
}
