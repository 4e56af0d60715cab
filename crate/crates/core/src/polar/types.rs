//! Data carried by one sampled projection.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::geomkit::LinearSubspace;
use crate::lkmeasure::StratumRef;

/// How `alpha` is evaluated on smooth strata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AlphaMode {
    /// Signs of second fundamental forms and conormal pairings.
    #[default]
    ClosedForm,
    /// Euler characteristics of explicit sublevel sets of the slice.
    SliceChi,
}

impl std::str::FromStr for AlphaMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed-form" => Ok(AlphaMode::ClosedForm),
            "slice-chi" => Ok(AlphaMode::SliceChi),
            _ => Err(format!("unknown alpha mode `{s}` (expected closed-form or slice-chi)")),
        }
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaMode::ClosedForm => "closed-form",
            AlphaMode::SliceChi => "slice-chi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarOptions {
    pub alpha_mode: AlphaMode,
    /// Grid resolution per chart axis for fold tracing.
    pub trace_grid: usize,
    /// Polyline refinement target, relative to the shape diameter.
    pub chord_tol: f64,
    /// Clearance threshold shared by the fold, double-point and adjacency checks.
    pub clearance: f64,
    /// Singular value threshold for the PL rank check.
    pub rank_tol: f64,
    /// Largest tolerated fraction of rejected planes.
    pub max_rejection: f64,
    /// Points per PL cell used to estimate `vol(C ∩ U)` when `U` is not everything.
    pub region_samples: usize,
}

impl Default for PolarOptions {
    fn default() -> Self {
        Self {
            alpha_mode: AlphaMode::ClosedForm,
            trace_grid: 256,
            chord_tol: 1e-6,
            clearance: 1e-4,
            rank_tol: 1e-8,
            max_rejection: 0.01,
            region_samples: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DegeneracyKind {
    /// Polar set tangent to the projection kernel along an arc.
    Fold,
    /// Tangential contact of projected polar pieces.
    DoublePoint,
    /// Polar set of a top stratum touching a boundary stratum tangentially.
    LimitPolar,
    /// Singular point of the polar set (crossing branches).
    SingularDiscriminant,
    /// `span(cell)` meets the projection kernel in too large a subspace.
    PlRank,
    /// Degenerate critical point, or a direction orthogonal to a link vertex.
    CriticalPoint,
}

impl fmt::Display for DegeneracyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegeneracyKind::Fold => "fold",
            DegeneracyKind::DoublePoint => "double-point",
            DegeneracyKind::LimitPolar => "limit-polar",
            DegeneracyKind::SingularDiscriminant => "singular-discriminant",
            DegeneracyKind::PlRank => "pl-rank",
            DegeneracyKind::CriticalPoint => "critical-point",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyFlag {
    pub kind: DegeneracyKind,
    /// Offending distance, angle or singular value.
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub flags: Vec<DegeneracyFlag>,
}

impl DegeneracyReport {
    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn push(&mut self, kind: DegeneracyKind, value: f64, detail: impl Into<String>) {
        self.flags.push(DegeneracyFlag { kind, value, detail: detail.into() });
    }

    pub fn has(&self, kind: DegeneracyKind) -> bool {
        self.flags.iter().any(|f| f.kind == kind)
    }

    pub fn extend(&mut self, other: DegeneracyReport) {
        self.flags.extend(other.flags);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceKind {
    Point,
    Polyline,
    ProjectedSimplex,
    /// Image of a whole stratum of dimension `q`.
    ProjectedStratum,
}

/// One polar piece with constant `alpha`. Geometry is in coordinates of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPiece {
    pub stratum: StratumRef,
    pub kind: PieceKind,
    pub alpha: f64,
    /// `q`-volume of the image inside `pi_P(U)` (1 for points).
    pub measure: f64,
    /// Image points (vertices of the simplex, polyline vertices, or the point).
    pub image: Vec<DVector<f64>>,
    /// Corresponding source points on the stratum.
    pub sources: Vec<DVector<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarSample {
    pub plane: LinearSubspace,
    pub q: usize,
    pub pieces: Vec<PolarPiece>,
    pub report: DegeneracyReport,
}

impl PolarSample {
    pub fn is_degenerate(&self) -> bool {
        !self.report.is_empty()
    }

    /// `sum_S m_{S,q}(P, U)`.
    pub fn total(&self) -> f64 {
        crate::geomkit::compensated_sum(self.pieces.iter().map(|p| p.alpha * p.measure))
    }

    /// `m_{S,q}(P, U)` for one stratum.
    pub fn stratum_total(&self, s: StratumRef) -> f64 {
        crate::geomkit::compensated_sum(self.pieces.iter().filter(|p| p.stratum == s).map(|p| p.alpha * p.measure))
    }

    pub(crate) fn degenerate(plane: LinearSubspace, q: usize, report: DegeneracyReport) -> Self {
        Self { plane, q, pieces: vec![], report }
    }
}
