//! Monte-Carlo polar lengths `L_q(X, U)` over uniformly sampled planes.

use std::collections::BTreeMap;

use super::sample::polar_sample;
use super::types::{DegeneracyKind, PolarOptions};
use crate::error::{Error, Result};
use crate::geomkit::{beta_coeff, map_samples, sample_grassmannian, Estimate, RandomSource};
use crate::lkmeasure::{pl_cell_volume_in, Geometry, Shape, StratumRef};

/// Attempts per plane slot before the slot gives up.
const MAX_ATTEMPTS: usize = 64;

/// One attempted plane, accepted or not.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRecord {
    pub slot: usize,
    pub attempt: usize,
    /// Orthonormal basis of `P`, column-major (`n x (q+1)`).
    pub frame: Vec<f64>,
    /// `m_{S,q}(P, U)` per stratum with a nonzero contribution.
    pub per_stratum: Vec<(StratumRef, f64)>,
    /// `sum_S m_{S,q}(P, U)`; zero for rejected planes.
    pub total: f64,
    pub flags: Vec<DegeneracyKind>,
}

impl PlaneRecord {
    pub fn accepted(&self) -> bool {
        self.flags.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarLength {
    pub q: usize,
    pub estimate: Estimate,
    /// `beta(1, n - q) / beta(q + 1, n)`.
    pub constant: f64,
    pub attempted: usize,
    pub rejected: usize,
    pub flag_counts: BTreeMap<DegeneracyKind, usize>,
    pub planes: Vec<PlaneRecord>,
}

impl PolarLength {
    pub fn rejection_rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.rejected as f64 / self.attempted as f64
        }
    }

    fn exact(q: usize, estimate: Estimate) -> Self {
        Self { q, estimate, constant: 1.0, attempted: 0, rejected: 0, flag_counts: BTreeMap::new(), planes: vec![] }
    }
}

/// `beta(1, n - q) / beta(q + 1, n)`, the normalization of the polar length.
pub fn polar_constant(n: usize, q: usize) -> Result<f64> {
    if q >= n {
        return Err(Error::Domain(format!("polar constant needs q < n, got q = {q}, n = {n}")));
    }
    Ok(beta_coeff((n - q) as i64, 1)? / beta_coeff(n as i64, (q + 1) as i64)?)
}

/// `vol_n(X ∩ U)` from the full-dimensional strata.
fn top_volume(shape: &Shape, src: &RandomSource, opts: &PolarOptions) -> Estimate {
    let n = shape.ambient_dim();
    match &shape.geometry {
        Geometry::Pl(k) => Estimate::sum(
            k.cells()
                .filter(|(_, c)| c.len() == n + 1)
                .map(|(id, _)| pl_cell_volume_in(k, id, &shape.region, opts.region_samples, &src.substream(id as u64)))
                .collect::<Vec<_>>(),
        ),
        Geometry::Smooth(s) => Estimate::sum(
            s.strata
                .iter()
                .filter(|st| st.dim() == n)
                .map(|st| st.integrate_stratum(|_| 1.0, |x| shape.region.contains(x) && st.in_region(x)))
                .collect::<Vec<_>>(),
        ),
    }
}

/// Estimates `L_q(X, U)` as the normalized mean of `sum_S m_{S,q}(P, U)` over
/// `n_planes` uniform planes of dimension `q + 1`. Non-generic planes are
/// redrawn from the same substream; the run fails if more than
/// `opts.max_rejection` of all attempts were rejected.
pub fn polar_length(shape: &Shape, q: usize, n_planes: usize, opts: &PolarOptions, src: &RandomSource) -> Result<PolarLength> {
    let n = shape.ambient_dim();
    if q > n {
        return Err(Error::Domain(format!("q = {q} exceeds the ambient dimension {n}")));
    }
    if q == n {
        return Ok(PolarLength::exact(q, top_volume(shape, &src.labelled("volume"), opts)));
    }
    if q > shape.dim() {
        return Ok(PolarLength::exact(q, Estimate::exact(0.0)));
    }
    let constant = polar_constant(n, q)?;
    // The Grassmannian of hyperplanes-plus-one is a point: one plane suffices.
    let slots = if q + 1 == n { 1 } else { n_planes.max(1) };

    let per_slot: Vec<Result<(f64, Vec<PlaneRecord>)>> = map_samples(slots, src, |slot, sub| {
        let mut rng = sub.rng();
        let mut records = Vec::new();
        for attempt in 0..MAX_ATTEMPTS {
            let plane = sample_grassmannian(n, q + 1, &mut rng)?;
            let pieces_src = sub.labelled("pieces").substream(attempt as u64);
            let sample = polar_sample(shape, &plane, opts, &pieces_src)?;
            let mut strata: BTreeMap<String, (StratumRef, f64)> = BTreeMap::new();
            for p in &sample.pieces {
                let key = format!("{:?}", p.stratum);
                strata.entry(key).or_insert((p.stratum, 0.0)).1 += p.alpha * p.measure;
            }
            let total = sample.total();
            records.push(PlaneRecord {
                slot,
                attempt,
                frame: plane.basis().as_slice().to_vec(),
                per_stratum: strata.into_values().collect(),
                total,
                flags: sample.report.flags.iter().map(|f| f.kind).collect(),
            });
            if !sample.is_degenerate() {
                return Ok((total, records));
            }
        }
        Err(Error::ResampleQuota {
            rejected: MAX_ATTEMPTS,
            attempted: MAX_ATTEMPTS,
            reason: format!("plane slot {slot} found no generic plane"),
        })
    });

    let mut values = Vec::with_capacity(slots);
    let mut planes = Vec::new();
    for r in per_slot {
        let (v, recs) = r?;
        values.push(constant * v);
        planes.extend(recs);
    }
    let attempted = planes.len();
    let rejected = planes.iter().filter(|r| !r.accepted()).count();
    let mut flag_counts = BTreeMap::new();
    for r in &planes {
        for &f in &r.flags {
            *flag_counts.entry(f).or_insert(0) += 1;
        }
    }
    if rejected as f64 > opts.max_rejection * attempted as f64 && rejected > 0 {
        let hist: Vec<String> = flag_counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        return Err(Error::ResampleQuota {
            rejected,
            attempted,
            reason: format!("non-generic planes [{}]", hist.join(", ")),
        });
    }
    let estimate = if slots == 1 {
        Estimate::from_refinement(values[0], values[0], 1)
    } else {
        Estimate::from_samples(&values, src.master_seed)
    };
    Ok(PolarLength { q, estimate, constant, attempted, rejected, flag_counts, planes })
}
