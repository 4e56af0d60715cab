//! Named catalog shapes, each a list of smooth strata.

use nalgebra::{DMatrix, DVector};

use super::stratum::{Conormal, Piece, SmoothStratum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeTag {
    Sphere { r: f64 },
    Torus { big: f64, small: f64 },
    Disk { r: f64 },
    Hemisphere { r: f64 },
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
    Ball { r: f64 },
}

/// A catalog shape in R^3. The first stratum is the top-dimensional one.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothShape {
    pub tag: ShapeTag,
    pub strata: Vec<SmoothStratum>,
    scale: f64,
    center: DVector<f64>,
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {x}")))
    }
}

impl SmoothShape {
    fn build(tag: ShapeTag, strata: Vec<SmoothStratum>, scale: f64) -> Self {
        Self { tag, strata, scale, center: DVector::zeros(3) }
    }

    pub fn sphere(r: f64) -> Result<Self> {
        let r = positive("radius", r)?;
        Ok(Self::build(
            ShapeTag::Sphere { r },
            vec![SmoothStratum::new("sphere", Piece::Sphere { r, upper: false }, None)],
            r,
        ))
    }

    pub fn torus(big: f64, small: f64) -> Result<Self> {
        let (big, small) = (positive("major radius", big)?, positive("minor radius", small)?);
        if small >= big {
            return Err(Error::Domain(format!("torus needs r < R, got R={big}, r={small}")));
        }
        Ok(Self::build(
            ShapeTag::Torus { big, small },
            vec![SmoothStratum::new("torus", Piece::Torus { big, small }, None)],
            big + small,
        ))
    }

    pub fn disk(r: f64) -> Result<Self> {
        let r = positive("radius", r)?;
        Ok(Self::build(
            ShapeTag::Disk { r },
            vec![
                SmoothStratum::new("disk", Piece::FlatDisk { r }, None),
                SmoothStratum::new("rim", Piece::Circle { r }, Some(Conormal::TowardsAxis)),
            ],
            r,
        ))
    }

    pub fn hemisphere(r: f64) -> Result<Self> {
        let r = positive("radius", r)?;
        Ok(Self::build(
            ShapeTag::Hemisphere { r },
            vec![
                SmoothStratum::new("cap", Piece::Sphere { r, upper: true }, None),
                SmoothStratum::new("rim", Piece::Circle { r }, Some(Conormal::Up)),
            ],
            r,
        ))
    }

    pub fn circle(r: f64) -> Result<Self> {
        let r = positive("radius", r)?;
        Ok(Self::build(
            ShapeTag::Circle { r },
            vec![SmoothStratum::new("circle", Piece::Circle { r }, None)],
            r,
        ))
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        let (a, b) = (positive("semi-axis a", a)?, positive("semi-axis b", b)?);
        Ok(Self::build(
            ShapeTag::Ellipse { a, b },
            vec![SmoothStratum::new("ellipse", Piece::Ellipse { a, b }, None)],
            a.max(b),
        ))
    }

    pub fn ball(r: f64) -> Result<Self> {
        let r = positive("radius", r)?;
        Ok(Self::build(
            ShapeTag::Ball { r },
            vec![
                SmoothStratum::new("interior", Piece::SolidBall { r }, None),
                SmoothStratum::new("boundary", Piece::Sphere { r, upper: false }, Some(Conormal::TowardsCenter)),
            ],
            r,
        ))
    }

    /// Parses `sphere:R`, `torus:R:r`, `disk:R`, `hemisphere:R`, `circle:R`,
    /// `ellipse:a:b` or `ball:R`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(':');
        let kind = parts.next().unwrap_or("");
        let args: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| Error::Domain(format!("bad number `{p}` in `{spec}`"))))
            .collect::<Result<_>>()?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Domain(format!("`{kind}` takes {n} parameter(s), got {}", args.len())))
            }
        };
        match kind {
            "sphere" => arity(1).and_then(|_| Self::sphere(args[0])),
            "torus" => arity(2).and_then(|_| Self::torus(args[0], args[1])),
            "disk" => arity(1).and_then(|_| Self::disk(args[0])),
            "hemisphere" => arity(1).and_then(|_| Self::hemisphere(args[0])),
            "circle" => arity(1).and_then(|_| Self::circle(args[0])),
            "ellipse" => arity(2).and_then(|_| Self::ellipse(args[0], args[1])),
            "ball" => arity(1).and_then(|_| Self::ball(args[0])),
            _ => Err(Error::UnknownCatalog(spec.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self.tag {
            ShapeTag::Sphere { r } => format!("sphere:{r}"),
            ShapeTag::Torus { big, small } => format!("torus:{big}:{small}"),
            ShapeTag::Disk { r } => format!("disk:{r}"),
            ShapeTag::Hemisphere { r } => format!("hemisphere:{r}"),
            ShapeTag::Circle { r } => format!("circle:{r}"),
            ShapeTag::Ellipse { a, b } => format!("ellipse:{a}:{b}"),
            ShapeTag::Ball { r } => format!("ball:{r}"),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        3
    }

    pub fn dim(&self) -> usize {
        self.strata.iter().map(|s| s.dim()).max().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        match self.tag {
            ShapeTag::Sphere { .. } => 2,
            ShapeTag::Torus { .. } | ShapeTag::Circle { .. } | ShapeTag::Ellipse { .. } => 0,
            ShapeTag::Disk { .. } | ShapeTag::Hemisphere { .. } | ShapeTag::Ball { .. } => 1,
        }
    }

    /// Whether every stratum is closed (no boundary strata).
    pub fn is_closed(&self) -> bool {
        self.strata.len() == 1 && self.dim() < 3
    }

    /// Radius of a ball about [`Self::center`] containing the shape.
    pub fn bounding_radius(&self) -> f64 {
        self.scale
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        let strata = self.strata.iter().map(|s| s.scaled(t)).collect::<Result<_>>()?;
        let tag = match self.tag {
            ShapeTag::Sphere { r } => ShapeTag::Sphere { r: r * t },
            ShapeTag::Torus { big, small } => ShapeTag::Torus { big: big * t, small: small * t },
            ShapeTag::Disk { r } => ShapeTag::Disk { r: r * t },
            ShapeTag::Hemisphere { r } => ShapeTag::Hemisphere { r: r * t },
            ShapeTag::Circle { r } => ShapeTag::Circle { r: r * t },
            ShapeTag::Ellipse { a, b } => ShapeTag::Ellipse { a: a * t, b: b * t },
            ShapeTag::Ball { r } => ShapeTag::Ball { r: r * t },
        };
        Ok(Self { tag, strata, scale: self.scale * t, center: &self.center * t })
    }

    /// Applies the rigid motion `x -> a x + shift`.
    pub fn moved(&self, a: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        let strata = self.strata.iter().map(|s| s.moved(a, shift)).collect::<Result<_>>()?;
        Ok(Self { strata, center: a * &self.center + shift, ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["sphere:1", "torus:2:1", "disk:1.5", "hemisphere:1", "circle:3", "ellipse:2:1", "ball:1"] {
            assert_eq!(SmoothShape::parse(s).unwrap().name(), s);
        }
        assert!(matches!(SmoothShape::parse("cone:1"), Err(Error::UnknownCatalog(_))));
        assert!(matches!(SmoothShape::parse("torus:1:2"), Err(Error::Domain(_))));
        assert!(matches!(SmoothShape::parse("sphere"), Err(Error::Domain(_))));
        assert!(matches!(SmoothShape::parse("sphere:-1"), Err(Error::Domain(_))));
    }

    #[test]
    fn boundary_strata_lie_in_the_frontier() {
        // Points of the top stratum approach each rim point.
        for shape in [SmoothShape::disk(1.0).unwrap(), SmoothShape::hemisphere(1.0).unwrap(), SmoothShape::ball(1.0).unwrap()] {
            let top = &shape.strata[0];
            let rim = &shape.strata[1];
            let x = rim.param(&vec![0.7; rim.dim()]);
            let c = rim.conormal_at(&x).unwrap();
            assert!(!top.in_region(&x));
            // Step along the conormal, then pull back onto the top variety.
            let mut y = &x + &c * 1e-4;
            if top.codim() == 1 {
                let g = top.implicit_jacobian(&y).row(0).transpose();
                let f = top.implicit(&y)[0];
                y -= &g * (f / g.norm_squared());
            }
            assert!(top.in_region(&y), "{}", shape.name());
            assert!(top.implicit(&y).amax() < 1e-7);
            assert!((&y - &x).norm() < 2e-4);
        }
    }

    #[test]
    fn bounding_radius_contains_chart_points() {
        for s in ["sphere:1", "torus:2:1", "disk:1", "hemisphere:1", "ellipse:2:1", "ball:1"] {
            let shape = SmoothShape::parse(s).unwrap().scaled(2.0).unwrap();
            for st in &shape.strata {
                let axes = st.chart_axes();
                let u: Vec<f64> = axes.iter().map(|a| 0.3 * a.lo + 0.7 * a.hi).collect();
                assert!((st.param(&u) - shape.center()).norm() <= shape.bounding_radius() + 1e-12);
            }
        }
    }
}
