//! Polar images of PL complexes: the `q`-cells, projected.

use nalgebra::{DMatrix, DVector};

use super::types::{DegeneracyKind, DegeneracyReport, PieceKind, PolarOptions, PolarPiece};
use crate::error::{Error, Result};
use crate::geomkit::{LinearSubspace, RandomSource};
use crate::lkmeasure::{pl_cell_volume_in, Region, StratumRef};
use crate::plstrata::{CellId, StratifiedComplex};

/// Singular values of `pi_P` restricted to `span(cell)`, largest first.
fn projected_singular_values(k: &StratifiedComplex, cell: CellId, plane: &LinearSubspace) -> Vec<f64> {
    let frame = k.cell_frame(cell);
    if frame.dim() == 0 {
        return vec![];
    }
    let m = plane.basis().tr_mul(frame.basis());
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Rank check (iv): `pi_P` must have rank `min(d, q+1)` on every cell.
pub fn pl_rank_report(k: &StratifiedComplex, plane: &LinearSubspace, opts: &PolarOptions) -> DegeneracyReport {
    let mut rep = DegeneracyReport::default();
    let q1 = plane.dim();
    for (id, c) in k.cells() {
        let d = c.len() - 1;
        let r = d.min(q1);
        if r == 0 {
            continue;
        }
        let sv = projected_singular_values(k, id, plane);
        let smin = sv[r - 1];
        if smin < opts.rank_tol {
            rep.push(
                DegeneracyKind::PlRank,
                smin,
                format!("cell {c:?}: projection has rank < {r} (singular value {smin:.2e})"),
            );
        }
    }
    rep
}

/// Unit normal of `pi_P(span C)` inside `P`, as a vector of `R^n`.
fn image_normal(k: &StratifiedComplex, cell: CellId, plane: &LinearSubspace) -> Result<DVector<f64>> {
    let q1 = plane.dim();
    let frame = k.cell_frame(cell);
    let cols: Vec<DVector<f64>> = (0..frame.dim()).map(|j| plane.coords(&frame.basis_vector(j))).collect();
    let image = LinearSubspace::from_spanning(q1, &cols)?;
    let nu = image.complement();
    if nu.dim() != 1 {
        return Err(Error::DegenerateDirection(format!(
            "image of cell has codimension {} in P",
            nu.dim()
        )));
    }
    Ok(plane.lift(&nu.basis_vector(0)))
}

/// `alpha` at an interior point of a `q`-cell.
pub fn pl_alpha(k: &StratifiedComplex, cell: CellId, plane: &LinearSubspace) -> Result<f64> {
    if k.cell_dim(cell) + 1 != plane.dim() {
        return Err(Error::Domain(format!(
            "cell of dimension {} is not a polar cell for dim P = {}",
            k.cell_dim(cell),
            plane.dim()
        )));
    }
    let nu = image_normal(k, cell, plane)?;
    let link = k.normal_link(cell)?;
    let a = link.morse_index(&nu)?;
    let b = link.morse_index(&(-&nu))?;
    Ok(0.5 * (a + b) as f64)
}

/// `vol_q` of the projected simplex, by the Gram determinant.
fn projected_volume(k: &StratifiedComplex, cell: CellId, plane: &LinearSubspace) -> f64 {
    let d = k.cell_dim(cell);
    if d == 0 {
        return 1.0;
    }
    let e: DMatrix<f64> = plane.basis().tr_mul(&k.edge_matrix(cell));
    let g = e.tr_mul(&e);
    let fact: f64 = (1..=d).map(|i| i as f64).product();
    g.determinant().max(0.0).sqrt() / fact
}

/// Polar pieces of a PL complex for the plane `P` (`q = dim P - 1`), with the
/// rank report. Cells of dimension below `q` have null images and are left out;
/// cells above `q` have empty polar sets once the rank check passes.
pub fn pl_polar_pieces(
    k: &StratifiedComplex,
    plane: &LinearSubspace,
    region: &Region,
    opts: &PolarOptions,
    src: &RandomSource,
) -> Result<(Vec<PolarPiece>, DegeneracyReport)> {
    let q = plane.dim() - 1;
    let mut rep = pl_rank_report(k, plane, opts);
    let mut pieces = Vec::new();
    if !rep.is_empty() {
        return Ok((pieces, rep));
    }
    for (id, c) in k.cells() {
        if c.len() - 1 != q {
            continue;
        }
        let alpha = match pl_alpha(k, id, plane) {
            Ok(a) => a,
            Err(Error::DegenerateDirection(msg)) => {
                rep.push(DegeneracyKind::CriticalPoint, 0.0, format!("cell {c:?}: {msg}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let full = k.cell_volume(id);
        let inside = pl_cell_volume_in(k, id, region, opts.region_samples, &src.substream(id as u64)).value;
        let fraction = if full > 0.0 { inside / full } else { 0.0 };
        let measure = projected_volume(k, id, plane) * fraction;
        let sources = k.cell_points(id);
        let image = sources.iter().map(|x| plane.coords(x)).collect();
        pieces.push(PolarPiece {
            stratum: StratumRef::Cell(id),
            kind: if q == 0 { PieceKind::Point } else { PieceKind::ProjectedSimplex },
            alpha,
            measure,
            image,
            sources,
        });
    }
    Ok((pieces, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plstrata::catalog;

    #[test]
    fn facet_alpha_is_half() {
        let k = catalog::solid_cube();
        let full = LinearSubspace::full(3);
        let mut facets = 0;
        for (id, c) in k.cells() {
            if c.len() != 3 {
                continue;
            }
            let a = pl_alpha(&k, id, &full).unwrap();
            if k.star(id).len() == 1 {
                assert_eq!(a, 0.5);
                facets += 1;
            } else {
                assert_eq!(a, 0.0);
            }
        }
        assert_eq!(facets, 12);
    }

    #[test]
    fn edge_parallel_kernel_is_flagged() {
        let k = catalog::solid_cube();
        let plane = LinearSubspace::coordinate(3, &[0, 1]);
        let rep = pl_rank_report(&k, &plane, &PolarOptions::default());
        assert!(rep.has(DegeneracyKind::PlRank));
    }
}
