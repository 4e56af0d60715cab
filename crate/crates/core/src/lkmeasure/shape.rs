//! Input shapes `(X, U)`: a PL complex or a smooth catalog shape, together
//! with an open region.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::plstrata::{catalog, StratifiedComplex};
use crate::smoothshape::SmoothShape;

#[derive(Debug, Clone)]
pub enum Geometry {
    Pl(StratifiedComplex),
    Smooth(SmoothShape),
}

/// Open subset `U` of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Everything,
    OpenBall { center: DVector<f64>, radius: f64 },
    /// `{x : <normal, x> > offset}`.
    HalfSpace { normal: DVector<f64>, offset: f64 },
}

impl Region {
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        match self {
            Region::Everything => true,
            Region::OpenBall { center, radius } => (x - center).norm() < *radius,
            Region::HalfSpace { normal, offset } => normal.dot(x) > *offset,
        }
    }

    pub fn is_everything(&self) -> bool {
        matches!(self, Region::Everything)
    }
}

#[derive(Debug, Clone)]
pub struct Shape {
    pub label: String,
    pub geometry: Geometry,
    pub region: Region,
}

impl Shape {
    pub fn pl(label: impl Into<String>, k: StratifiedComplex) -> Self {
        Self { label: label.into(), geometry: Geometry::Pl(k), region: Region::Everything }
    }

    pub fn smooth(s: SmoothShape) -> Self {
        Self { label: s.name(), geometry: Geometry::Smooth(s), region: Region::Everything }
    }

    /// A PL catalog name (`cube`, `octahedron`, ...) or a smooth catalog
    /// string (`sphere:1`, `torus:2:1`, ...).
    pub fn from_catalog(name: &str) -> Result<Self> {
        if let Some(k) = catalog::by_name(name) {
            return Ok(Self::pl(name, k));
        }
        match SmoothShape::parse(name) {
            Ok(s) => Ok(Self::smooth(s)),
            Err(Error::UnknownCatalog(_)) => Err(Error::UnknownCatalog(name.to_string())),
            Err(e) => Err(e),
        }
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.geometry {
            Geometry::Pl(k) => k.ambient_dim(),
            Geometry::Smooth(s) => s.ambient_dim(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.geometry {
            Geometry::Pl(k) => k.dim(),
            Geometry::Smooth(s) => s.dim(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        match &self.geometry {
            Geometry::Pl(k) => k.euler_characteristic(),
            Geometry::Smooth(s) => s.euler_characteristic(),
        }
    }

    /// Center and radius of a ball containing the shape.
    pub fn bounding_ball(&self) -> (DVector<f64>, f64) {
        match &self.geometry {
            Geometry::Pl(k) => {
                let n = k.vertices().len() as f64;
                let c = k.vertices().iter().fold(DVector::zeros(k.ambient_dim()), |a, v| a + v) / n;
                let r = k.vertices().iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
                (c, r)
            }
            Geometry::Smooth(s) => (s.center().clone(), s.bounding_radius()),
        }
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        let geometry = match &self.geometry {
            Geometry::Pl(k) => Geometry::Pl(k.scaled(t)?),
            Geometry::Smooth(s) => Geometry::Smooth(s.scaled(t)?),
        };
        let region = match &self.region {
            Region::Everything => Region::Everything,
            Region::OpenBall { center, radius } => Region::OpenBall { center: center * t, radius: radius * t },
            Region::HalfSpace { normal, offset } => Region::HalfSpace { normal: normal.clone(), offset: offset * t },
        };
        Ok(Self { label: format!("{}*{t}", self.label), geometry, region })
    }

    /// Applies the rigid motion `x -> a x + shift` to the shape and its region.
    pub fn moved(&self, a: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        let geometry = match &self.geometry {
            Geometry::Pl(k) => Geometry::Pl(k.transformed(a, shift)?),
            Geometry::Smooth(s) => Geometry::Smooth(s.moved(a, shift)?),
        };
        let region = match &self.region {
            Region::Everything => Region::Everything,
            Region::OpenBall { center, radius } => Region::OpenBall { center: a * center + shift, radius: *radius },
            Region::HalfSpace { normal, offset } => {
                let m = a * normal;
                Region::HalfSpace { offset: offset + m.dot(shift), normal: m }
            }
        };
        Ok(Self { label: self.label.clone(), geometry, region })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lookup() {
        assert!(matches!(Shape::from_catalog("cube").unwrap().geometry, Geometry::Pl(_)));
        assert!(matches!(Shape::from_catalog("torus:2:1").unwrap().geometry, Geometry::Smooth(_)));
        assert!(matches!(Shape::from_catalog("blob"), Err(Error::UnknownCatalog(_))));
        assert!(matches!(Shape::from_catalog("torus:1:3"), Err(Error::Domain(_))));
    }

    #[test]
    fn moved_region_follows_the_motion() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let t = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let region = Region::HalfSpace { normal: DVector::from_vec(vec![1.0, 0.0, 0.0]), offset: 0.5 };
        let s = Shape::from_catalog("cube").unwrap().with_region(region.clone());
        let m = s.moved(&a, &t).unwrap();
        let x = DVector::from_vec(vec![0.7, 0.2, 0.1]);
        assert_eq!(region.contains(&x), m.region.contains(&(&a * &x + &t)));
        let y = DVector::from_vec(vec![0.3, 0.2, 0.1]);
        assert_eq!(region.contains(&y), m.region.contains(&(&a * &y + &t)));
    }
}
