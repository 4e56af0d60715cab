//! `Lambda_0` from averaged Morse index sums of linear functions.

use super::shape::{Geometry, Shape};
use crate::error::{Error, Result};
use crate::geomkit::{map_samples, sample_unit_sphere, Estimate, RandomSource};

/// Retries per sample before a direction stream is declared stuck.
const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeResult {
    pub estimate: Estimate,
    /// Non-generic directions that were redrawn.
    pub rejected: usize,
}

/// Index sum `sum_{x in U} ind(<v, .>, X, x)` for one direction.
pub fn morse_index_sum(shape: &Shape, v: &nalgebra::DVector<f64>) -> Result<i64> {
    match &shape.geometry {
        Geometry::Pl(k) => {
            let idx = k.pl_morse_indices(v)?;
            Ok(idx
                .iter()
                .filter(|(&vert, _)| shape.region.contains(k.vertex(vert)))
                .map(|(_, &i)| i)
                .sum())
        }
        Geometry::Smooth(s) => Ok(s
            .critical_points(v)?
            .iter()
            .filter(|c| shape.region.contains(&c.point))
            .map(|c| c.index())
            .sum()),
    }
}

/// Mean over uniform unit `v` of the index sum of `<v, .>` over `U`.
pub fn exchange_lambda0(shape: &Shape, n_dirs: usize, src: &RandomSource) -> Result<ExchangeResult> {
    if n_dirs == 0 {
        return Err(Error::Domain("at least one direction is required".into()));
    }
    let n = shape.ambient_dim();
    let src = src.labelled("exchange");
    let results: Vec<Result<(f64, usize)>> = map_samples(n_dirs, &src, |_, sub| {
        let mut rng = sub.rng();
        for attempt in 0..MAX_RETRIES {
            let v = sample_unit_sphere(n, &mut rng);
            match morse_index_sum(shape, &v) {
                Ok(total) => return Ok((total as f64, attempt)),
                Err(Error::DegenerateDirection(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::ResampleQuota {
            rejected: MAX_RETRIES,
            attempted: MAX_RETRIES,
            reason: "no generic direction found".into(),
        })
    });
    let mut values = Vec::with_capacity(n_dirs);
    let mut rejected = 0;
    for r in results {
        let (v, rej) = r?;
        values.push(v);
        rejected += rej;
    }
    Ok(ExchangeResult { estimate: Estimate::from_samples(&values, src.master_seed), rejected })
}
