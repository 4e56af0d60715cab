//! One projection: polar pieces, their indices and the genericity report.

use nalgebra::{DVector, Vector3};

use super::checks::check_genericity;
use super::fold::unit_normal;
use super::pl::{pl_alpha, pl_polar_pieces};
use super::smooth::{curve_alpha, fold_alpha, smooth_polar_pieces};
use super::types::{AlphaMode, PolarOptions, PolarPiece, PolarSample};
use crate::error::{Error, Result};
use crate::geomkit::{LinearSubspace, RandomSource};
use crate::lkmeasure::{Geometry, Shape, StratumRef};

fn check_plane(shape: &Shape, plane: &LinearSubspace) -> Result<()> {
    let n = shape.ambient_dim();
    if plane.ambient_dim() != n || plane.dim() == 0 {
        return Err(Error::Domain(format!(
            "projection plane must be a nonzero subspace of R^{n}, got dim {} in R^{}",
            plane.dim(),
            plane.ambient_dim()
        )));
    }
    Ok(())
}

/// All polar pieces for `P` (including those with `alpha = 0`) together with
/// the report of the checks done while tracing.
fn raw_pieces(
    shape: &Shape,
    plane: &LinearSubspace,
    opts: &PolarOptions,
    src: &RandomSource,
) -> Result<(Vec<PolarPiece>, super::types::DegeneracyReport)> {
    check_plane(shape, plane)?;
    match &shape.geometry {
        Geometry::Pl(k) => pl_polar_pieces(k, plane, &shape.region, opts, src),
        Geometry::Smooth(s) => {
            let (pieces, mut rep) = smooth_polar_pieces(s, plane, &shape.region, opts)?;
            rep.extend(check_genericity(shape, plane, &pieces, opts));
            Ok((pieces, rep))
        }
    }
}

/// Polar pieces of one stratum for `P`, with `q = dim P - 1`. For PL cells
/// these are the `q`-cells; for smooth strata the critical points (`q = 0`),
/// the fold curves of surfaces (`q = 1`), or the whole stratum when its
/// dimension is `q`. Pieces carry their `alpha`, which may be zero.
pub fn polar_variety(shape: &Shape, stratum: StratumRef, plane: &LinearSubspace, opts: &PolarOptions) -> Result<Vec<PolarPiece>> {
    let (pieces, _) = raw_pieces(shape, plane, opts, &RandomSource::new(0).labelled("polar-variety"))?;
    Ok(pieces.into_iter().filter(|p| p.stratum == stratum).collect())
}

/// Builds the polar sample for `P`. A sample with a non-empty report has no
/// pieces; otherwise pieces with `alpha = 0` are dropped.
pub fn polar_sample(shape: &Shape, plane: &LinearSubspace, opts: &PolarOptions, src: &RandomSource) -> Result<PolarSample> {
    let q = plane.dim().saturating_sub(1);
    let (mut pieces, report) = raw_pieces(shape, plane, opts, src)?;
    if !report.is_empty() {
        return Ok(PolarSample::degenerate(plane.clone(), q, report));
    }
    pieces.retain(|p| p.alpha != 0.0);
    Ok(PolarSample { plane: plane.clone(), q, pieces, report })
}

/// `m_{S,q}(P, U)`: the integral of `alpha` over the polar image of one stratum.
pub fn polar_image_integral(
    shape: &Shape,
    stratum: StratumRef,
    plane: &LinearSubspace,
    opts: &PolarOptions,
    src: &RandomSource,
) -> Result<f64> {
    let s = polar_sample(shape, plane, opts, src)?;
    if s.is_degenerate() {
        let kinds: Vec<String> = s.report.flags.iter().map(|f| f.kind.to_string()).collect();
        return Err(Error::DegenerateDirection(format!("non-generic projection ({})", kinds.join(", "))));
    }
    Ok(s.stratum_total(stratum))
}

/// `alpha` of the projection onto `P` at the polar point `x` of a stratum.
pub fn alpha_index(shape: &Shape, stratum: StratumRef, x: &DVector<f64>, plane: &LinearSubspace, mode: AlphaMode) -> Result<f64> {
    check_plane(shape, plane)?;
    let q = plane.dim() - 1;
    match (&shape.geometry, stratum) {
        (Geometry::Pl(k), StratumRef::Cell(c)) => pl_alpha(k, c, plane),
        (Geometry::Smooth(s), StratumRef::Smooth(si)) => {
            let st = s.strata.get(si).ok_or_else(|| Error::Lookup(format!("no stratum {si}")))?;
            let undefined = || Error::DegenerateDirection(format!("{}: alpha undefined at this point", st.name));
            let not_polar = || Error::Domain(format!("{}: point is not on the polar set for q = {q}", st.name));
            if q == 0 {
                let u = plane.basis_vector(0);
                let tol = 1e-6 * 2.0 * s.bounding_radius();
                let find = |v: &DVector<f64>| -> Result<i64> {
                    s.critical_points(v)?
                        .into_iter()
                        .find(|c| c.stratum == si && (&c.point - x).norm() < tol)
                        .map(|c| c.index())
                        .ok_or_else(not_polar)
                };
                return Ok(0.5 * (find(&u)? + find(&(-&u))?) as f64);
            }
            if plane.dim() == 3 && st.dim() == 2 {
                let n = DVector::from_column_slice(unit_normal(st, x).as_slice());
                let idx = |w: &DVector<f64>| match st.conormal_at(x) {
                    None => Ok(1),
                    Some(c) if c.dot(w).abs() > 1e-8 => Ok(i64::from(c.dot(w) > 0.0)),
                    Some(_) => Err(undefined()),
                };
                return Ok(0.5 * (idx(&n)? + idx(&(-&n))?) as f64);
            }
            if q != 1 {
                return Err(not_polar());
            }
            let pv = plane.complement().basis_vector(0);
            let p = Vector3::new(pv[0], pv[1], pv[2]);
            match st.dim() {
                1 => {
                    let (tangent, _) = st.frames_at(x)?;
                    let t = plane.project(&tangent.basis_vector(0));
                    let nu = p.cross(&Vector3::new(t[0], t[1], t[2]));
                    if nu.norm() < 1e-12 {
                        return Err(undefined());
                    }
                    curve_alpha(s, si, x, &p, &nu.normalize(), mode).ok_or_else(undefined)
                }
                2 => {
                    if unit_normal(st, x).dot(&p).abs() > 1e-6 {
                        return Err(not_polar());
                    }
                    fold_alpha(s, si, x, &p, mode).ok_or_else(undefined)
                }
                _ => Err(not_polar()),
            }
        }
        _ => Err(Error::Lookup("stratum reference does not match the shape geometry".into())),
    }
}
