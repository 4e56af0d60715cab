//! Small complexes used as fixtures and by the command line tool.

use nalgebra::DVector;

use super::complex::StratifiedComplex;

fn pt(c: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(c)
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// A single vertex at the origin of R^n.
pub fn point(n: usize) -> StratifiedComplex {
    StratifiedComplex::from_facets(vec![DVector::zeros(n)], &[vec![0]]).expect("valid point")
}

/// The segment from the origin to `e_1` in R^n.
pub fn segment(n: usize) -> StratifiedComplex {
    StratifiedComplex::from_facets(vec![DVector::zeros(n), unit(n, 0)], &[vec![0, 1]])
        .expect("valid segment")
}

/// Boundary of the unit square in R^2.
pub fn square_boundary() -> StratifiedComplex {
    let v = vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[1.0, 1.0]), pt(&[0.0, 1.0])];
    let e = [vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]];
    StratifiedComplex::from_facets(v, &e).expect("valid square")
}

/// Boundary of the cross-polytope with vertices `+-e_i` in R^3.
pub fn octahedron_boundary() -> StratifiedComplex {
    let mut v = Vec::new();
    for i in 0..3 {
        v.push(unit(3, i));
        v.push(-unit(3, i));
    }
    let mut f = Vec::new();
    for sx in 0..2 {
        for sy in 0..2 {
            for sz in 0..2 {
                f.push(vec![sx, 2 + sy, 4 + sz]);
            }
        }
    }
    StratifiedComplex::from_facets(v, &f).expect("valid octahedron")
}

fn cube_vertices() -> Vec<DVector<f64>> {
    (0..8usize)
        .map(|i| pt(&[(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]))
        .collect()
}

/// Kuhn triangulation of the unit cube: one tetrahedron per coordinate order.
fn kuhn_tetrahedra() -> Vec<Vec<usize>> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p| {
            let mut idx = 0usize;
            let mut t = vec![0];
            for &axis in p {
                idx |= 1 << axis;
                t.push(idx);
            }
            t.sort_unstable();
            t
        })
        .collect()
}

/// The solid unit cube `[0,1]^3`, triangulated into six tetrahedra.
/// Vertex `i` has coordinates given by the bits of `i` (x is the lowest bit).
pub fn solid_cube() -> StratifiedComplex {
    StratifiedComplex::from_facets(cube_vertices(), &kuhn_tetrahedra()).expect("valid cube")
}

/// Boundary of the unit cube, using the facet triangles of [`solid_cube`].
pub fn cube_boundary() -> StratifiedComplex {
    let verts = cube_vertices();
    let mut tris = Vec::new();
    for t in kuhn_tetrahedra() {
        for skip in 0..4 {
            let tri: Vec<usize> =
                t.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let on_facet = (0..3).any(|axis| {
                let bits: Vec<usize> = tri.iter().map(|&v| (v >> axis) & 1).collect();
                bits.iter().all(|&b| b == bits[0])
            });
            if on_facet && !tris.contains(&tri) {
                tris.push(tri);
            }
        }
    }
    StratifiedComplex::from_facets(verts, &tris).expect("valid cube boundary")
}

/// Moebius' 7-vertex torus, realized with vertices `0, e_1, ..., e_6` in R^6.
pub fn torus7() -> StratifiedComplex {
    let mut v = vec![DVector::zeros(6)];
    for i in 0..6 {
        v.push(unit(6, i));
    }
    let mut f = Vec::new();
    for i in 0..7 {
        let mut a = vec![i, (i + 1) % 7, (i + 3) % 7];
        let mut b = vec![i, (i + 2) % 7, (i + 3) % 7];
        a.sort_unstable();
        b.sort_unstable();
        f.push(a);
        f.push(b);
    }
    StratifiedComplex::from_facets(v, &f).expect("valid torus")
}

/// Looks up a complex by catalog name.
pub fn by_name(name: &str) -> Option<StratifiedComplex> {
    Some(match name {
        "point" => point(3),
        "segment" => segment(3),
        "square" => square_boundary(),
        "octahedron" => octahedron_boundary(),
        "cube" => solid_cube(),
        "cube-boundary" => cube_boundary(),
        "torus7" => torus7(),
        _ => return None,
    })
}

pub const NAMES: &[&str] =
    &["point", "segment", "square", "octahedron", "cube", "cube-boundary", "torus7"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_boundary_has_twelve_triangles() {
        let k = cube_boundary();
        assert_eq!(k.cells().filter(|(_, c)| c.len() == 3).count(), 12);
        assert_eq!(k.cells().filter(|(_, c)| c.len() == 2).count(), 18);
    }

    #[test]
    fn torus_is_a_closed_surface() {
        let k = torus7();
        for (id, c) in k.cells() {
            if c.len() == 2 {
                let tris = k.star(id).iter().filter(|&&t| k.cell_dim(t) == 2).count();
                assert_eq!(tris, 2);
            }
        }
        assert_eq!(k.cells().filter(|(_, c)| c.len() == 3).count(), 14);
    }

    #[test]
    fn names_resolve() {
        for n in NAMES {
            assert!(by_name(n).is_some());
        }
        assert!(by_name("nope").is_none());
    }
}
