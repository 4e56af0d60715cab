//! Normal links and stratified (PL) Morse indices of linear functions.

use std::collections::BTreeMap;

use nalgebra::DVector;

use super::complex::{CellId, StratifiedComplex};
use crate::error::{Error, Result};
use crate::geomkit::LinearSubspace;

/// Angle tolerance between a direction and the walls `<v, d> = 0`.
pub const DIRECTION_TOL: f64 = 1e-8;

/// The link of a cell, realized by unit directions in the normal space of the cell.
#[derive(Debug, Clone)]
pub struct NormalLink {
    pub base_cell: CellId,
    /// Unit vectors in `span(base_cell)^perp`, one per link vertex.
    pub directions: Vec<DVector<f64>>,
    /// Link simplices as index tuples into `directions`.
    pub link_cells: Vec<Vec<usize>>,
    /// Tangent frame of the base cell.
    pub tangent: LinearSubspace,
}

impl NormalLink {
    pub fn is_empty(&self) -> bool {
        self.link_cells.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.link_cells.iter().map(|c| if c.len() % 2 == 1 { 1 } else { -1 }).sum()
    }

    /// `1 - chi` of the part of the link where `<v, .> < 0`.
    ///
    /// `v` must be normal to the base cell and must not be orthogonal to any
    /// link direction (within [`DIRECTION_TOL`]).
    pub fn morse_index(&self, v: &DVector<f64>) -> Result<i64> {
        let tangential = self.tangent.project(v).norm();
        if tangential > DIRECTION_TOL * v.norm().max(1.0) {
            return Err(Error::NotNormal(tangential));
        }
        let mut lower = Vec::with_capacity(self.directions.len());
        for d in &self.directions {
            let s = d.dot(v);
            if s.abs() < DIRECTION_TOL {
                return Err(Error::DegenerateDirection(format!(
                    "direction orthogonal to a link vertex (|<v,d>| = {:.2e})",
                    s.abs()
                )));
            }
            lower.push(s < 0.0);
        }
        Ok(1 - self.sublevel_chi(&lower))
    }

    fn sublevel_chi(&self, lower: &[bool]) -> i64 {
        self.link_cells
            .iter()
            .filter(|c| c.iter().all(|&i| lower[i]))
            .map(|c| if c.len() % 2 == 1 { 1 } else { -1 })
            .sum()
    }
}

impl StratifiedComplex {
    /// Normal link of a cell: unit projections of the link vertices onto the
    /// normal space at the cell.
    pub fn normal_link(&self, cell: CellId) -> Result<NormalLink> {
        if cell >= self.n_cells() {
            return Err(Error::Lookup(format!("cell id {cell} out of range")));
        }
        let base = self.cell(cell).to_vec();
        let tangent = self.cell_frame(cell);
        let x0 = self.vertex(base[0]).clone();
        let mut vertex_slot: BTreeMap<usize, usize> = BTreeMap::new();
        let mut directions = Vec::new();
        let mut link_cells = Vec::new();
        for &tau in self.star(cell) {
            let rest: Vec<usize> =
                self.cell(tau).iter().copied().filter(|v| !base.contains(v)).collect();
            let mut idx = Vec::with_capacity(rest.len());
            for w in rest {
                let slot = *vertex_slot.entry(w).or_insert_with(|| {
                    let rel = self.vertex(w) - &x0;
                    let d = &rel - tangent.project(&rel);
                    directions.push(d.normalize());
                    directions.len() - 1
                });
                idx.push(slot);
            }
            link_cells.push(idx);
        }
        Ok(NormalLink { base_cell: cell, directions, link_cells, tangent })
    }

    /// Normal Morse index `1 - chi(lower normal link)` of the linear function
    /// `<v, .>` at `cell`.
    pub fn normal_morse_index(&self, cell: CellId, v: &DVector<f64>) -> Result<i64> {
        self.normal_link(cell)?.morse_index(v)
    }

    /// Stratified Morse indices of `<v, .>` at every vertex whose index is
    /// nonzero. For generic `v` all critical points are vertices.
    pub fn pl_morse_indices(&self, v: &DVector<f64>) -> Result<BTreeMap<usize, i64>> {
        let verts = self.vertices();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                let d = &verts[i] - &verts[j];
                if v.dot(&d).abs() <= 1e-10 * d.norm() {
                    return Err(Error::DegenerateDirection(format!(
                        "v is orthogonal to vertex difference {i}-{j}"
                    )));
                }
            }
        }
        let mut out = BTreeMap::new();
        for i in 0..verts.len() {
            let id = self.vertex_cell(i);
            let ind = self.normal_morse_index(id, v)?;
            if ind != 0 {
                out.insert(i, ind);
            }
        }
        Ok(out)
    }
}
