//! Clearance checks against the exceptional sets of a projection.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DVector, Vector3};

use super::fold::{fold_curvatures, unit_normal};
use super::pl::pl_rank_report;
use super::smooth::diameter;
use super::types::{DegeneracyKind, DegeneracyReport, PieceKind, PolarOptions, PolarPiece};
use crate::geomkit::LinearSubspace;
use crate::lkmeasure::{Geometry, Shape, StratumRef};
use crate::smoothshape::SmoothShape;

/// Image path length (relative to the diameter) below which two segments
/// count as one branch in the double-point check.
const BRANCH_SEPARATION: f64 = 1e-2;
/// Largest sine of the angle between image segments that counts as tangential contact.
const CONTACT_SINE: f64 = 0.1;

/// Runs the clearance checks on the pieces of one projection: fold angle,
/// tangential double points and limit-polar adjacency for smooth shapes,
/// the rank condition for PL complexes. An empty report means every
/// threshold is met.
pub fn check_genericity(shape: &Shape, plane: &LinearSubspace, pieces: &[PolarPiece], opts: &PolarOptions) -> DegeneracyReport {
    match &shape.geometry {
        Geometry::Pl(k) => pl_rank_report(k, plane, opts),
        Geometry::Smooth(s) => {
            let mut rep = DegeneracyReport::default();
            if plane.dim() != 2 {
                return rep;
            }
            let p = plane.complement().basis_vector(0);
            for piece in pieces.iter().filter(|pc| pc.kind == PieceKind::Polyline) {
                let StratumRef::Smooth(si) = piece.stratum else { continue };
                match s.strata[si].dim() {
                    2 => fold_angle_report(s, si, &piece.sources, &p, opts.clearance, &mut rep),
                    1 if s.strata[si].conormal.is_some() => {
                        adjacency_report(s, si, &piece.sources, &p, opts.clearance, &mut rep)
                    }
                    _ => {}
                }
            }
            double_point_report(pieces, diameter(s), opts.clearance, &mut rep);
            rep
        }
    }
}

/// (i) The fold tangent must stay away from the kernel direction, and the
/// second fundamental form must not vanish on it.
fn fold_angle_report(s: &SmoothShape, si: usize, pts: &[DVector<f64>], p: &DVector<f64>, clearance: f64, rep: &mut DegeneracyReport) {
    let st = &s.strata[si];
    let diam = diameter(s);
    let mut prev_small = false;
    let p3 = Vector3::new(p[0], p[1], p[2]);
    for x in pts {
        let Some((ii, sp)) = fold_curvatures(st, x, &p3) else { continue };
        if sp * diam < clearance {
            rep.push(
                DegeneracyKind::SingularDiscriminant,
                sp * diam,
                format!("{}: second fundamental form vanishes on the kernel direction", st.name),
            );
            return;
        }
        let angle = (ii.abs() / sp).min(1.0).asin();
        let small = angle < clearance;
        if small && prev_small {
            rep.push(DegeneracyKind::Fold, angle, format!("{}: fold tangent to the kernel direction", st.name));
            return;
        }
        prev_small = small;
    }
}

/// (iii) The top stratum's fold must meet a boundary curve transversally:
/// `g = <n_top, p>` along the curve may not vanish to second order.
fn adjacency_report(s: &SmoothShape, si: usize, pts: &[DVector<f64>], p: &DVector<f64>, clearance: f64, rep: &mut DegeneracyReport) {
    let top = &s.strata[0];
    if top.dim() != 2 {
        return;
    }
    let diam = diameter(s);
    let p3 = Vector3::new(p[0], p[1], p[2]);
    let g: Vec<f64> = pts.iter().map(|x| unit_normal(top, x).dot(&p3)).collect();
    for k in 0..pts.len().saturating_sub(1) {
        let ds = (&pts[k + 1] - &pts[k]).norm();
        if ds == 0.0 {
            continue;
        }
        let slope = (g[k + 1] - g[k]).abs() / ds * diam;
        if g[k].abs() < clearance && slope < clearance {
            rep.push(
                DegeneracyKind::LimitPolar,
                g[k].abs().max(slope),
                format!("{}: fold of {} tangent to the boundary", s.strata[si].name, top.name),
            );
            return;
        }
    }
}

type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(u: P2, v: P2) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn norm(u: P2) -> f64 {
    u[0].hypot(u[1])
}

fn segment_distance(a: P2, b: P2, c: P2, d: P2) -> f64 {
    let point_seg = |p: P2, a: P2, b: P2| {
        let ab = sub(b, a);
        let ap = sub(p, a);
        let l2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if l2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
        norm([ap[0] - t * ab[0], ap[1] - t * ab[1]])
    };
    let (r, s) = (sub(b, a), sub(d, c));
    let den = cross(r, s);
    if den != 0.0 {
        let t = cross(sub(c, a), s) / den;
        let u = cross(sub(c, a), r) / den;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return 0.0;
        }
    }
    point_seg(a, c, d).min(point_seg(b, c, d)).min(point_seg(c, a, b)).min(point_seg(d, a, b))
}

/// (ii) Images of distinct branches of one stratum may cross but not touch
/// tangentially. Two nearby parallel segments joined by a short path along the
/// image belong to one branch (the two sides of a cusp) and are allowed.
fn double_point_report(pieces: &[PolarPiece], diam: f64, clearance: f64, rep: &mut DegeneracyReport) {
    let mut by_stratum: BTreeMap<usize, Vec<(P2, P2)>> = BTreeMap::new();
    for piece in pieces.iter().filter(|p| p.kind == PieceKind::Polyline && p.image.first().map_or(0, |v| v.len()) == 2) {
        let StratumRef::Smooth(si) = piece.stratum else { continue };
        let segs = by_stratum.entry(si).or_default();
        for w in piece.image.windows(2) {
            segs.push(([w[0][0], w[0][1]], [w[1][0], w[1][1]]));
        }
    }
    let reach = clearance * diam;
    let separation = BRANCH_SEPARATION * diam;
    for (si, segs) in by_stratum {
        let cell = segs.iter().map(|s| norm(sub(s.1, s.0))).fold(reach, f64::max);
        let mut entries: Vec<((i64, i64), usize)> = Vec::with_capacity(4 * segs.len());
        for (i, (a, b)) in segs.iter().enumerate() {
            let lo = |k: usize| ((a[k].min(b[k]) - reach) / cell).floor() as i64;
            let hi = |k: usize| ((a[k].max(b[k]) + reach) / cell).floor() as i64;
            for bx in lo(0)..=hi(0) {
                for by in lo(1)..=hi(1) {
                    entries.push(((bx, by), i));
                }
            }
        }
        entries.sort_unstable();
        let mut candidates = Vec::new();
        for group in entries.chunk_by(|x, y| x.0 == y.0) {
            for (x, &(_, i)) in group.iter().enumerate() {
                for &(_, j) in &group[x + 1..] {
                    let ((a, b), (c, d)) = (segs[i], segs[j]);
                    let dist = segment_distance(a, b, c, d);
                    if dist >= reach {
                        continue;
                    }
                    let (u, v) = (sub(b, a), sub(d, c));
                    let sine = cross(u, v).abs() / (norm(u) * norm(v)).max(f64::MIN_POSITIVE);
                    if sine < CONTACT_SINE {
                        candidates.push((i.min(j), i.max(j), dist));
                    }
                }
            }
        }
        if candidates.is_empty() {
            continue;
        }
        // Segments meet at bitwise-equal vertices.
        let key = |p: P2| (p[0].to_bits(), p[1].to_bits());
        let mut at_vertex: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
        for (i, &(a, b)) in segs.iter().enumerate() {
            at_vertex.entry(key(a)).or_default().push(i);
            at_vertex.entry(key(b)).or_default().push(i);
        }
        let linked = |i: usize, j: usize| -> bool {
            let mut best: HashMap<usize, f64> = HashMap::from([(i, 0.0)]);
            let mut stack = vec![(i, 0.0)];
            while let Some((k, d)) = stack.pop() {
                if k == j {
                    return true;
                }
                for v in [segs[k].0, segs[k].1] {
                    for &m in &at_vertex[&key(v)] {
                        let dm = d + norm(sub(segs[m].1, segs[m].0));
                        if dm <= separation && best.get(&m).is_none_or(|&old| dm < old) {
                            best.insert(m, dm);
                            stack.push((m, dm));
                        }
                    }
                }
            }
            false
        };
        candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
        candidates.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
        let worst = candidates.iter().filter(|c| !linked(c.0, c.1)).map(|c| c.2 / diam).fold(None, |w: Option<f64>, r| {
            Some(w.map_or(r, |w| w.min(r)))
        });
        if let Some(w) = worst {
            rep.push(DegeneracyKind::DoublePoint, w, format!("stratum {si}: tangential double point of the image"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> P2 {
        [x, y]
    }

    #[test]
    fn segment_distances() {
        assert_eq!(segment_distance(v(0.0, 0.0), v(1.0, 0.0), v(0.5, -1.0), v(0.5, 1.0)), 0.0);
        assert!((segment_distance(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 0.5), v(1.0, 0.5)) - 0.5).abs() < 1e-15);
        assert!((segment_distance(v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0), v(3.0, 0.0)) - 1.0).abs() < 1e-15);
    }
}
