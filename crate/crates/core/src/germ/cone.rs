//! Conical germs: the cone over a link in the unit sphere, with its apex.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geomkit::constants::b;
use crate::plstrata::{parse_plstrat, CellId, StratifiedComplex};

const UNIT_TOL: f64 = 1e-10;

/// Link of a conical germ.
#[derive(Debug, Clone)]
pub enum Link {
    /// Simplicial complex with vertices on `S^{n-1}`. A cell stands for the
    /// radial projection of its simplex, so its cone is the cone over the chord
    /// simplex.
    Pl(StratifiedComplex),
    /// Circle at angular radius `theta` about `e_3` on `S^2` (one nappe).
    Circle { theta: f64 },
}

/// Germ at the origin of the cone over a link; `X ∩ B_eps` is the `eps`-scaled
/// copy of the truncated unit cone. Strata are the apex and the cones over the
/// open link cells.
#[derive(Debug, Clone)]
pub struct ConeGerm {
    pub name: String,
    pub link: Link,
}

/// Stratum of a germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GermStratum {
    Apex,
    /// Cone over the link cell with this id.
    Cone(CellId),
    /// The smooth sheet of the round cone.
    Sheet,
}

impl fmt::Display for ConeGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Smallest distance from the origin to the convex hull of `pts`, by
/// enumerating faces (the hulls here have at most a handful of vertices).
pub(crate) fn hull_distance(pts: &[DVector<f64>]) -> f64 {
    let m = pts.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        let face: Vec<&DVector<f64>> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| &pts[i]).collect();
        let j = face.len();
        // Minimize |sum l_i p_i| subject to sum l_i = 1 via the KKT system.
        let mut a = DMatrix::zeros(j + 1, j + 1);
        let mut rhs = DVector::zeros(j + 1);
        for r in 0..j {
            for c in 0..j {
                a[(r, c)] = face[r].dot(face[c]);
            }
            a[(r, j)] = 1.0;
            a[(j, r)] = 1.0;
        }
        rhs[j] = 1.0;
        let Some(sol) = a.lu().solve(&rhs) else { continue };
        if (0..j).any(|i| sol[i] < -1e-12) {
            continue;
        }
        let x = face.iter().zip(sol.iter()).fold(DVector::zeros(pts[0].len()), |acc, (p, l)| acc + *p * *l);
        best = best.min(x.norm());
    }
    best
}

/// Fraction of the unit sphere of `span(vs)` covered by the cone over `vs`
/// (the density of that simplicial cone at its apex). Cones of dimension
/// above 3 are not supported.
pub fn solid_angle_fraction(vs: &[DVector<f64>]) -> Result<f64> {
    let u: Vec<DVector<f64>> = vs.iter().map(|v| v.normalize()).collect();
    match u.len() {
        0 => Ok(1.0),
        1 => Ok(0.5),
        2 => Ok(u[0].dot(&u[1]).clamp(-1.0, 1.0).acos() / (2.0 * PI)),
        3 => {
            // Van Oosterom-Strackee, with the triple product taken in the span.
            let g = DMatrix::from_fn(3, 3, |i, j| u[i].dot(&u[j]));
            let triple = g.determinant().max(0.0).sqrt();
            let den = 1.0 + g[(0, 1)] + g[(1, 2)] + g[(0, 2)];
            let omega = 2.0 * triple.atan2(den);
            Ok(omega / (4.0 * PI))
        }
        d => Err(Error::Unsupported(format!("solid angle of a {d}-dimensional cone"))),
    }
}

impl ConeGerm {
    /// Germ over a PL link; vertices are normalized onto the unit sphere.
    pub fn from_link(name: impl Into<String>, link: &StratifiedComplex) -> Result<Self> {
        let verts: Vec<DVector<f64>> = link
            .vertices()
            .iter()
            .map(|v| {
                let r = v.norm();
                if r < UNIT_TOL {
                    Err(Error::InvalidComplex("link vertex at the origin".into()))
                } else {
                    Ok(v / r)
                }
            })
            .collect::<Result<_>>()?;
        let cells: Vec<Vec<usize>> = link.cells().map(|(_, c)| c.to_vec()).collect();
        let k = StratifiedComplex::from_cells(verts, &cells)?;
        for (id, c) in k.cells() {
            if c.len() > 1 && hull_distance(&k.cell_points(id)) < 1e-6 {
                return Err(Error::InvalidComplex(format!("link cell {c:?} spans a cone through the origin")));
            }
        }
        Ok(Self { name: name.into(), link: Link::Pl(k) })
    }

    /// `m` equally spaced half-lines in `R^2`.
    pub fn rays(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("rays:m needs m >= 1".into()));
        }
        let verts: Vec<DVector<f64>> = (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect();
        let cells: Vec<Vec<usize>> = (0..m).map(|j| vec![j]).collect();
        Self::from_link(format!("rays:{m}"), &StratifiedComplex::from_cells(verts, &cells)?)
    }

    /// The half-plane `{x_2 >= 0, x_3 = .. = x_n = 0}` in `R^n`. Its link is the
    /// half circle through `-e_1, e_2, e_1`.
    pub fn halfplane(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("halfplane:n needs n >= 2".into()));
        }
        let verts = vec![-unit(n, 0), unit(n, 1), unit(n, 0)];
        let k = StratifiedComplex::from_facets(verts, &[vec![0, 1], vec![1, 2]])?;
        Self::from_link(format!("halfplane:{n}"), &k)
    }

    /// Round cone in `R^3` over the circle of angular radius `theta`.
    pub fn cone_circle(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI / 2.0) {
            return Err(Error::Domain(format!("cone-circle needs 0 < theta < pi/2, got {theta}")));
        }
        Ok(Self { name: format!("cone-circle:{theta}"), link: Link::Circle { theta } })
    }

    /// `rays:m`, `halfplane:n`, `cone-circle:theta` or `cone-link:<path>`.
    pub fn from_catalog(name: &str) -> Result<Self> {
        let bad = || Error::UnknownCatalog(name.to_string());
        let (kind, arg) = name.split_once(':').ok_or_else(bad)?;
        match kind {
            "rays" => Self::rays(arg.parse().map_err(|_| bad())?),
            "halfplane" => Self::halfplane(arg.parse().map_err(|_| bad())?),
            "cone-circle" => Self::cone_circle(arg.parse().map_err(|_| bad())?),
            "cone-link" => {
                let text = std::fs::read_to_string(arg)
                    .map_err(|e| Error::Lookup(format!("cannot read link file {arg}: {e}")))?;
                Self::from_link(name, &parse_plstrat(&text)?)
            }
            _ => Err(bad()),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.link {
            Link::Pl(k) => k.ambient_dim(),
            Link::Circle { .. } => 3,
        }
    }

    /// Dimension of the germ (the apex alone has dimension 0).
    pub fn dim(&self) -> usize {
        match &self.link {
            Link::Pl(k) if k.n_cells() == 0 => 0,
            Link::Pl(k) => k.dim() + 1,
            Link::Circle { .. } => 2,
        }
    }

    pub fn strata(&self) -> Vec<GermStratum> {
        let mut out = vec![GermStratum::Apex];
        match &self.link {
            Link::Pl(k) => out.extend(k.cells().map(|(id, _)| GermStratum::Cone(id))),
            Link::Circle { .. } => out.push(GermStratum::Sheet),
        }
        out
    }

    pub fn stratum_dim(&self, s: GermStratum) -> usize {
        match (s, &self.link) {
            (GermStratum::Apex, _) => 0,
            (GermStratum::Cone(id), Link::Pl(k)) => k.cell_dim(id) + 1,
            _ => 2,
        }
    }

    /// The cone truncated by the chord simplices of the link scaled by
    /// `radius`, as a PL complex with the apex as vertex 0. `radius` must
    /// exceed `1 / min_chord_distance` for the unit ball to lie inside it.
    pub fn cone_complex(&self, radius: f64) -> Result<StratifiedComplex> {
        let Link::Pl(k) = &self.link else {
            return Err(Error::Unsupported(format!("{} has no PL link", self.name)));
        };
        let mut verts = vec![DVector::zeros(k.ambient_dim())];
        verts.extend(k.vertices().iter().map(|v| v * radius));
        let mut cells = vec![vec![0]];
        for (_, c) in k.cells() {
            cells.push(c.iter().map(|&v| v + 1).collect());
            cells.push(std::iter::once(0).chain(c.iter().map(|&v| v + 1)).collect());
        }
        StratifiedComplex::from_cells(verts, &cells)
    }

    /// Radius for [`cone_complex`] such that the closed unit ball meets no
    /// outer face, with a 25% margin.
    pub fn safe_radius(&self) -> f64 {
        let Link::Pl(k) = &self.link else { return 1.0 };
        let d = k.cells().map(|(id, _)| hull_distance(&k.cell_points(id))).fold(1.0, f64::min);
        1.25 / d
    }

    /// Cone cell of the complex of [`cone_complex`] over a link cell.
    pub fn cone_cell_of(&self, complex: &StratifiedComplex, link_cell: &[usize]) -> Result<CellId> {
        let verts: Vec<usize> = std::iter::once(0).chain(link_cell.iter().map(|&v| v + 1)).collect();
        complex.find_cell(&verts)
    }

    /// `Theta_k(X, 0) = vol_k(X ∩ B_1) / b_k`, exactly. `Theta_0 = 1` (the apex).
    pub fn density(&self, k: usize) -> Result<f64> {
        let n = self.ambient_dim();
        if k > n {
            return Err(Error::Domain(format!("k = {k} exceeds ambient dimension {n}")));
        }
        if k == 0 {
            return Ok(1.0);
        }
        match &self.link {
            Link::Pl(link) => {
                let mut acc = 0.0;
                for (id, c) in link.cells() {
                    if c.len() == k {
                        acc += solid_angle_fraction(&link.cell_points(id))?;
                    }
                }
                Ok(acc)
            }
            // Lateral area pi sin(theta) of the unit-slant cone over pi.
            Link::Circle { theta } => Ok(if k == 2 { theta.sin() } else { 0.0 }),
        }
    }

    /// `vol_k(X ∩ B_1)`, the unnormalized density.
    pub fn ball_volume(&self, k: usize) -> Result<f64> {
        Ok(self.density(k)? * b(k))
    }
}

/// `Theta_k(X, 0)`.
pub fn density(x: &ConeGerm, k: usize) -> Result<f64> {
    x.density(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities() {
        assert!((density(&ConeGerm::rays(3).unwrap(), 1).unwrap() - 1.5).abs() < 1e-15);
        assert!((density(&ConeGerm::halfplane(3).unwrap(), 2).unwrap() - 0.5).abs() < 1e-15);
        let t = 0.7;
        assert!((density(&ConeGerm::cone_circle(t).unwrap(), 2).unwrap() - t.sin()).abs() < 1e-15);
        assert_eq!(density(&ConeGerm::rays(3).unwrap(), 2).unwrap(), 0.0);
    }

    #[test]
    fn octant_solid_angle() {
        let e = |i| unit(3, i);
        let f = solid_angle_fraction(&[e(0), e(1), e(2)]).unwrap();
        assert!((f - 0.125).abs() < 1e-14);
    }

    #[test]
    fn catalog_and_complex() {
        let g = ConeGerm::from_catalog("halfplane:3").unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.strata().len(), 6);
        let r = g.safe_radius();
        assert!((r - 1.25 * 2f64.sqrt()).abs() < 1e-12);
        let k = g.cone_complex(r).unwrap();
        assert_eq!(k.euler_characteristic(), 1);
        assert!(ConeGerm::from_catalog("rays:x").is_err());
        assert!(ConeGerm::from_catalog("blob:1").is_err());
    }

    #[test]
    fn antipodal_edge_is_rejected() {
        let v = vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![-1.0, 1e-9])];
        let k = StratifiedComplex::from_facets(v, &[vec![0, 1]]).unwrap();
        assert!(ConeGerm::from_link("bad", &k).is_err());
    }
}
