use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geomkit::LinearSubspace;

pub type CellId = usize;

const NONDEGENERACY_TOL: f64 = 1e-10;

/// An embedded simplicial complex whose open cells are the strata.
///
/// Cells are stored as sorted vertex tuples of every dimension; the complex is
/// closed under taking faces.
#[derive(Debug, Clone)]
pub struct StratifiedComplex {
    ambient_dim: usize,
    vertices: Vec<DVector<f64>>,
    cells: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, CellId>,
    /// For every cell, the cells strictly containing it.
    star: Vec<Vec<CellId>>,
}

fn faces_of(cell: &[usize]) -> Vec<Vec<usize>> {
    let m = cell.len();
    let mut out = Vec::with_capacity((1 << m) - 1);
    for mask in 1u32..(1u32 << m) {
        let f: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| cell[i]).collect();
        out.push(f);
    }
    out
}

impl StratifiedComplex {
    /// Builds the complex generated by `facets` (all their faces are added).
    pub fn from_facets(vertices: Vec<DVector<f64>>, facets: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() {
                return Err(Error::InvalidComplex(format!("repeated vertex in cell {f:?}")));
            }
            for face in faces_of(&s) {
                all.insert(face);
            }
        }
        Self::build(vertices, all.into_iter().collect())
    }

    /// Builds the complex from an explicit cell list, which must already be
    /// closed under faces.
    pub fn from_cells(vertices: Vec<DVector<f64>>, cells: &[Vec<usize>]) -> Result<Self> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in cells {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != c.len() || s.is_empty() {
                return Err(Error::InvalidComplex(format!("malformed cell {c:?}")));
            }
            set.insert(s);
        }
        for c in &set {
            for f in faces_of(c) {
                if !set.contains(&f) {
                    return Err(Error::InvalidComplex(format!(
                        "not closed under faces: {f:?} (face of {c:?}) is missing"
                    )));
                }
            }
        }
        Self::build(vertices, set.into_iter().collect())
    }

    fn build(vertices: Vec<DVector<f64>>, mut cells: Vec<Vec<usize>>) -> Result<Self> {
        let ambient_dim = vertices.first().map_or(0, |v| v.len());
        if vertices.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::InvalidComplex("vertices of mixed dimension".into()));
        }
        cells.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if let Some(&v) = c.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidComplex(format!("vertex index {v} out of range")));
            }
            index.insert(c.clone(), i);
        }
        let mut star = vec![Vec::new(); cells.len()];
        for (i, c) in cells.iter().enumerate() {
            for f in faces_of(c) {
                if f.len() < c.len() {
                    star[index[&f]].push(i);
                }
            }
        }
        let k = Self { ambient_dim, vertices, cells, index, star };
        for id in 0..k.cells.len() {
            if k.cells[id].len() > 1 {
                let sv = k.edge_singular_min(id);
                let scale = k.cell_diameter(id).max(1e-300);
                if sv <= NONDEGENERACY_TOL * scale {
                    return Err(Error::InvalidComplex(format!(
                        "cell {:?} is affinely degenerate",
                        k.cells[id]
                    )));
                }
            }
        }
        Ok(k)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &DVector<f64> {
        &self.vertices[i]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, id: CellId) -> &[usize] {
        &self.cells[id]
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellId, &[usize])> {
        self.cells.iter().enumerate().map(|(i, c)| (i, c.as_slice()))
    }

    pub fn cell_dim(&self, id: CellId) -> usize {
        self.cells[id].len() - 1
    }

    pub fn dim(&self) -> usize {
        self.cells.iter().map(|c| c.len() - 1).max().unwrap_or(0)
    }

    pub fn find_cell(&self, verts: &[usize]) -> Result<CellId> {
        let mut s = verts.to_vec();
        s.sort_unstable();
        self.index
            .get(&s)
            .copied()
            .ok_or_else(|| Error::Lookup(format!("cell {verts:?} is not in the complex")))
    }

    pub fn vertex_cell(&self, v: usize) -> CellId {
        self.index[&vec![v]]
    }

    /// Cells strictly containing `id`.
    pub fn star(&self, id: CellId) -> &[CellId] {
        &self.star[id]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if (c.len() - 1) % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// Edge vectors `v_i - v_0` of a cell, as matrix columns.
    pub fn edge_matrix(&self, id: CellId) -> DMatrix<f64> {
        let c = &self.cells[id];
        let v0 = &self.vertices[c[0]];
        let mut m = DMatrix::zeros(self.ambient_dim, c.len() - 1);
        for (j, &v) in c[1..].iter().enumerate() {
            m.set_column(j, &(&self.vertices[v] - v0));
        }
        m
    }

    fn edge_singular_min(&self, id: CellId) -> f64 {
        let m = self.edge_matrix(id);
        m.singular_values().min()
    }

    fn cell_diameter(&self, id: CellId) -> f64 {
        let c = &self.cells[id];
        let mut d: f64 = 0.0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                d = d.max((&self.vertices[c[i]] - &self.vertices[c[j]]).norm());
            }
        }
        d
    }

    /// Orthonormal frame of the linear span of the cell's edge vectors.
    pub fn cell_frame(&self, id: CellId) -> LinearSubspace {
        if self.cells[id].len() == 1 {
            return LinearSubspace::zero(self.ambient_dim);
        }
        let m = self.edge_matrix(id);
        let cols: Vec<_> = m.column_iter().map(|c| c.into_owned()).collect();
        LinearSubspace::from_spanning(self.ambient_dim, &cols).expect("cells are nondegenerate")
    }

    /// `d`-dimensional volume of a `d`-cell (1 for vertices).
    pub fn cell_volume(&self, id: CellId) -> f64 {
        let d = self.cell_dim(id);
        if d == 0 {
            return 1.0;
        }
        let m = self.edge_matrix(id);
        let g = m.tr_mul(&m);
        let fact: f64 = (1..=d).map(|i| i as f64).product();
        g.determinant().max(0.0).sqrt() / fact
    }

    pub fn barycenter(&self, id: CellId) -> DVector<f64> {
        let c = &self.cells[id];
        let mut b = DVector::zeros(self.ambient_dim);
        for &v in c {
            b += &self.vertices[v];
        }
        b / c.len() as f64
    }

    pub fn cell_points(&self, id: CellId) -> Vec<DVector<f64>> {
        self.cells[id].iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Same combinatorics, vertices mapped by `x -> a x + shift`.
    pub fn transformed(&self, a: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        let verts = self.vertices.iter().map(|v| a * v + shift).collect();
        Self::build(verts, self.cells.clone())
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        let n = self.ambient_dim;
        self.transformed(&(DMatrix::identity(n, n) * t), &DVector::zeros(n))
    }

    /// Radius of the smallest origin-centered ball containing all vertices.
    pub fn bounding_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plstrata::catalog;

    #[test]
    fn euler_characteristics() {
        assert_eq!(catalog::octahedron_boundary().euler_characteristic(), 2);
        assert_eq!(catalog::torus7().euler_characteristic(), 0);
        assert_eq!(catalog::point(3).euler_characteristic(), 1);
        assert_eq!(catalog::solid_cube().euler_characteristic(), 1);
        assert_eq!(catalog::cube_boundary().euler_characteristic(), 2);
        assert_eq!(catalog::segment(2).euler_characteristic(), 1);
    }

    #[test]
    fn closure_is_validated() {
        let v = vec![DVector::from_vec(vec![0.0, 0.0]), DVector::from_vec(vec![1.0, 0.0])];
        let err = StratifiedComplex::from_cells(v, &[vec![0, 1], vec![0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidComplex(_)));
    }

    #[test]
    fn degenerate_simplex_rejected() {
        let v = vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0]),
        ];
        assert!(StratifiedComplex::from_facets(v, &[vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn solid_cube_volumes() {
        let k = catalog::solid_cube();
        let vol: f64 = k.cells().filter(|(_, c)| c.len() == 4).map(|(i, _)| k.cell_volume(i)).sum();
        assert!((vol - 1.0).abs() < 1e-12);
    }
}
