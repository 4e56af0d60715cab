//! Polar pieces of smooth catalog shapes.

use nalgebra::{DVector, Vector3};

use super::fold::{fold_curvatures, trace_fold, unit_normal};
use super::slice;
use super::types::{AlphaMode, DegeneracyKind, DegeneracyReport, PieceKind, PolarOptions, PolarPiece};
use crate::error::{Error, Result};
use crate::geomkit::LinearSubspace;
use crate::lkmeasure::{Region, StratumRef};
use crate::smoothshape::{axis_rule, SmoothShape, SmoothStratum};

/// Nodes on a closed curve stratum.
pub(crate) const CURVE_NODES: usize = 1024;

/// Level offset and ball radius of the slice cross-check, relative to the diameter.
pub(crate) const SLICE_DELTA: f64 = 1e-3;
pub(crate) const SLICE_EPS: f64 = 1e-1;

const PAIRING_TOL: f64 = 1e-8;

fn v3(x: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(x[0], x[1], x[2])
}

fn dv(x: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

pub(crate) fn diameter(shape: &SmoothShape) -> f64 {
    2.0 * shape.bounding_radius()
}

/// Normal index of a direction on a stratum: 1 without a conormal, otherwise
/// whether `w` points into the adjacent stratum.
fn normal_index(st: &SmoothStratum, x: &DVector<f64>, w: &DVector<f64>) -> Option<i64> {
    match st.conormal_at(x) {
        None => Some(1),
        Some(c) => {
            let d = c.dot(w);
            (d.abs() >= PAIRING_TOL).then(|| i64::from(d > 0.0))
        }
    }
}

/// The solid whose boundary `si` is, if any.
fn solid_of(shape: &SmoothShape, si: usize) -> Option<&SmoothStratum> {
    let top = &shape.strata[0];
    (si != 0 && top.codim() == 0).then_some(top)
}

/// Kernel direction of a plane of codimension one in R^3.
fn kernel_direction(plane: &LinearSubspace) -> Vector3<f64> {
    v3(&plane.complement().basis_vector(0))
}

/// `alpha` at a critical point of `<u, .>`: the two indices of `u` and `-u`.
pub(crate) fn critical_pieces(
    shape: &SmoothShape,
    plane: &LinearSubspace,
    region: &Region,
) -> (Vec<PolarPiece>, DegeneracyReport) {
    let mut rep = DegeneracyReport::default();
    let u = plane.basis_vector(0);
    let (up, down) = match (shape.critical_points(&u), shape.critical_points(&(-&u))) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            rep.push(DegeneracyKind::CriticalPoint, 0.0, e.to_string());
            return (vec![], rep);
        }
    };
    let tol = 1e-6 * diameter(shape);
    let mut pieces = Vec::with_capacity(up.len());
    for a in &up {
        let Some(b) = down.iter().find(|b| b.stratum == a.stratum && (&b.point - &a.point).norm() < tol) else {
            rep.push(DegeneracyKind::CriticalPoint, 0.0, "critical point of u without a partner for -u");
            continue;
        };
        let alpha = 0.5 * (a.index() + b.index()) as f64;
        pieces.push(PolarPiece {
            stratum: StratumRef::Smooth(a.stratum),
            kind: PieceKind::Point,
            alpha,
            measure: if region.contains(&a.point) { 1.0 } else { 0.0 },
            image: vec![plane.coords(&a.point)],
            sources: vec![a.point.clone()],
        });
    }
    (pieces, rep)
}

/// A surface stratum seen through `P = R^3`: the whole stratum, with `alpha`
/// from the two normal indices.
pub(crate) fn surface_piece(shape: &SmoothShape, si: usize, region: &Region) -> Result<PolarPiece> {
    let st = &shape.strata[si];
    let axes = st.chart_axes();
    let mid: Vec<f64> = axes.iter().map(|a| 0.5 * (a.lo + a.hi)).collect();
    let x = st.param(&mid);
    let n = dv(&unit_normal(st, &x));
    let (a, b) = match (normal_index(st, &x, &n), normal_index(st, &x, &(-&n))) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::DegenerateDirection(format!("{}: normal tangent to the conormal", st.name))),
    };
    let area = st.integrate_stratum(|_| 1.0, |y| region.contains(y) && st.in_region(y));
    Ok(PolarPiece {
        stratum: StratumRef::Smooth(si),
        kind: PieceKind::ProjectedStratum,
        alpha: 0.5 * (a + b) as f64,
        measure: area.value,
        image: vec![x.clone()],
        sources: vec![x],
    })
}

/// Direction of `T_top ∩ Q` at a boundary-curve point, oriented into the top
/// stratum, together with the second slice direction.
fn rim_branch(
    shape: &SmoothShape,
    si: usize,
    x: &DVector<f64>,
    p: &Vector3<f64>,
    nu: &Vector3<f64>,
) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let st = &shape.strata[si];
    let c = v3(&st.conormal_at(x)?);
    let n_top = unit_normal(&shape.strata[0], x);
    let qn = p.cross(nu).normalize();
    let mut h = n_top.cross(&qn);
    if h.norm() < 1e-12 {
        return None;
    }
    h.normalize_mut();
    let hc = h.dot(&c);
    if hc.abs() < PAIRING_TOL {
        return None;
    }
    if hc < 0.0 {
        h = -h;
    }
    Some((h, qn.cross(&h).normalize()))
}

/// `alpha` at a point of a curve stratum for `q = 1`.
pub(crate) fn curve_alpha(
    shape: &SmoothShape,
    si: usize,
    x: &DVector<f64>,
    p: &Vector3<f64>,
    nu: &Vector3<f64>,
    mode: AlphaMode,
) -> Option<f64> {
    if shape.strata[si].conormal.is_none() {
        // Isolated curve: the slice is the point itself.
        return Some(1.0);
    }
    let (h, m) = rim_branch(shape, si, x, p, nu)?;
    let d = nu.dot(&h);
    if d.abs() < 1e-12 {
        return None;
    }
    match mode {
        AlphaMode::ClosedForm => Some(0.5 * (i64::from(d > 0.0) + i64::from(d < 0.0)) as f64),
        AlphaMode::SliceChi => {
            let diam = diameter(shape);
            let top = &shape.strata[0];
            let (hd, md) = (dv(&h), dv(&m));
            let idx = |w: &Vector3<f64>| {
                slice::rim_index(top, x, &hd, &md, &dv(w), SLICE_DELTA * diam, SLICE_EPS * diam)
            };
            Some(0.5 * (idx(nu) + idx(&-nu)) as f64)
        }
    }
}

/// `alpha` at a fold point of a surface stratum.
pub(crate) fn fold_alpha(shape: &SmoothShape, si: usize, x: &DVector<f64>, p: &Vector3<f64>, mode: AlphaMode) -> Option<f64> {
    let st = &shape.strata[si];
    let n = dv(&unit_normal(st, x));
    let pd = dv(p);
    match mode {
        AlphaMode::ClosedForm => {
            let (ii, _) = fold_curvatures(st, x, p)?;
            if ii.abs() * diameter(shape) < 1e-12 {
                return None;
            }
            let s = ii.signum() as i64;
            let a = normal_index(st, x, &n)?;
            let b = normal_index(st, x, &(-&n))?;
            Some(0.5 * (s * a - s * b) as f64)
        }
        AlphaMode::SliceChi => {
            let diam = diameter(shape);
            let solid = solid_of(shape, si);
            let idx = |w: &DVector<f64>| {
                slice::fold_index(st, solid, x, &pd, &n, w, SLICE_DELTA * diam, SLICE_EPS * diam)
            };
            Some(0.5 * (idx(&n) + idx(&(-&n))) as f64)
        }
    }
}

/// Groups consecutive segments of a polyline into pieces of constant `alpha`.
/// Segment `k` runs from vertex `k` to vertex `k + 1` (cyclically if closed).
fn runs_to_pieces(
    stratum: StratumRef,
    plane: &LinearSubspace,
    sources: &[DVector<f64>],
    seg_alpha: &[Option<f64>],
    seg_measure: &[f64],
    closed: bool,
) -> Vec<PolarPiece> {
    let nv = sources.len();
    let ns = seg_alpha.len();
    if ns == 0 {
        return vec![];
    }
    let start = if closed {
        (0..ns).find(|&k| seg_alpha[k] != seg_alpha[(k + ns - 1) % ns]).unwrap_or(0)
    } else {
        0
    };
    let mut pieces = Vec::new();
    let mut k = 0;
    while k < ns {
        let first = (start + k) % ns;
        let a = seg_alpha[first];
        let mut len = 1;
        while k + len < ns && seg_alpha[(start + k + len) % ns] == a {
            len += 1;
        }
        if let Some(alpha) = a {
            let verts: Vec<DVector<f64>> = (0..=len).map(|j| sources[(first + j) % nv].clone()).collect();
            let measure = crate::geomkit::compensated_sum((0..len).map(|j| seg_measure[(first + j) % ns]));
            pieces.push(PolarPiece {
                stratum,
                kind: PieceKind::Polyline,
                alpha,
                measure,
                image: verts.iter().map(|v| plane.coords(v)).collect(),
                sources: verts,
            });
        }
        k += len;
    }
    pieces
}

/// A closed curve stratum for `q = 1`: its whole image, measured by the
/// periodic midpoint rule.
pub(crate) fn curve_pieces(
    shape: &SmoothShape,
    si: usize,
    plane: &LinearSubspace,
    region: &Region,
    mode: AlphaMode,
) -> Vec<PolarPiece> {
    let st = &shape.strata[si];
    let p = kernel_direction(plane);
    let rule = axis_rule(&st.chart_axes()[0], CURVE_NODES);
    let mut sources = Vec::with_capacity(rule.len());
    let mut alpha = Vec::with_capacity(rule.len());
    let mut measure = Vec::with_capacity(rule.len());
    for &(u, w) in &rule {
        let x = st.param(&[u]);
        let t = st.param_jacobian(&[u]).column(0).into_owned();
        let tp = plane.project(&t);
        let speed = tp.norm();
        let nu = p.cross(&v3(&tp));
        alpha.push(if nu.norm() > 1e-12 { curve_alpha(shape, si, &x, &p, &nu.normalize(), mode) } else { None });
        measure.push(if region.contains(&x) { w * speed } else { 0.0 });
        sources.push(x);
    }
    runs_to_pieces(StratumRef::Smooth(si), plane, &sources, &alpha, &measure, true)
}

/// Fold pieces of a surface stratum for `q = 1`, with the tracing report.
pub(crate) fn fold_pieces(
    shape: &SmoothShape,
    si: usize,
    plane: &LinearSubspace,
    region: &Region,
    opts: &PolarOptions,
) -> (Vec<PolarPiece>, DegeneracyReport) {
    let st = &shape.strata[si];
    let p = kernel_direction(plane);
    let diam = diameter(shape);
    let trace = trace_fold(st, &p, opts.trace_grid, opts.chord_tol, opts.clearance, diam);
    let mut pieces = Vec::new();
    for arc in &trace.arcs {
        let pts = &arc.points;
        let nv = pts.len();
        let ns = if arc.closed { nv } else { nv.saturating_sub(1) };
        let mut vertex_alpha: Vec<Option<f64>> = match opts.alpha_mode {
            AlphaMode::ClosedForm => pts.iter().map(|x| fold_alpha(shape, si, x, &p, AlphaMode::ClosedForm)).collect(),
            AlphaMode::SliceChi => vec![None; nv],
        };
        if opts.alpha_mode == AlphaMode::SliceChi {
            // Alpha is constant along runs; evaluate sparsely and carry forward.
            let stride = 64;
            let mut last = None;
            for (k, x) in pts.iter().enumerate() {
                if k % stride == 0 || k + 1 == nv {
                    last = fold_alpha(shape, si, x, &p, AlphaMode::SliceChi).or(last);
                }
                vertex_alpha[k] = last;
            }
        }
        let mut seg_alpha = Vec::with_capacity(ns);
        let mut seg_measure = Vec::with_capacity(ns);
        for k in 0..ns {
            let (a, b) = (&pts[k], &pts[(k + 1) % nv]);
            seg_alpha.push(vertex_alpha[k].or(vertex_alpha[(k + 1) % nv]));
            let mid = (a + b) * 0.5;
            let inside = region.contains(&mid) && st.in_region(&mid);
            seg_measure.push(if inside { (plane.coords(b) - plane.coords(a)).norm() } else { 0.0 });
        }
        pieces.extend(runs_to_pieces(StratumRef::Smooth(si), plane, pts, &seg_alpha, &seg_measure, arc.closed));
    }
    (pieces, trace.report)
}

/// Polar pieces of a smooth shape for `P` with `dim P = q + 1 <= 3`.
pub(crate) fn smooth_polar_pieces(
    shape: &SmoothShape,
    plane: &LinearSubspace,
    region: &Region,
    opts: &PolarOptions,
) -> Result<(Vec<PolarPiece>, DegeneracyReport)> {
    let q = plane.dim() - 1;
    if q == 0 {
        return Ok(critical_pieces(shape, plane, region));
    }
    let mut pieces = Vec::new();
    let mut rep = DegeneracyReport::default();
    for (si, st) in shape.strata.iter().enumerate() {
        let d = st.dim();
        match (d, q) {
            (1, 1) => pieces.extend(curve_pieces(shape, si, plane, region, opts.alpha_mode)),
            (2, 1) => {
                let (p, r) = fold_pieces(shape, si, plane, region, opts);
                pieces.extend(p);
                rep.extend(r);
            }
            (2, 2) => match surface_piece(shape, si, region) {
                Ok(p) => pieces.push(p),
                Err(e) => rep.push(DegeneracyKind::CriticalPoint, 0.0, e.to_string()),
            },
            // Lower-dimensional strata have null images; higher ones have no
            // polar set.
            _ => {}
        }
    }
    Ok((pieces, rep))
}
