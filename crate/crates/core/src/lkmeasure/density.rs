//! Curvature densities `lambda_k^S` and the measures `Lambda_k(X, U)`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DVector;
use rand::Rng;

use super::shape::{Geometry, Region, Shape};
use crate::error::{Error, Result};
use crate::geomkit::constants::s;
use crate::geomkit::{map_samples, sample_unit_in, Estimate, RandomSource};
use crate::plstrata::{CellId, StratifiedComplex};
use crate::smoothshape::SmoothStratum;

/// Nodes of the Gauss-Legendre rule on the half normal circle.
pub const HALF_CIRCLE_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LkOptions {
    /// Normal directions sampled per PL cell.
    pub directions_per_cell: usize,
    /// Points per PL cell used to estimate `vol(C ∩ U)` when `U` is not everything.
    pub region_samples: usize,
    /// Largest tolerated fraction of rejected (non-generic) directions.
    pub max_rejection: f64,
}

impl Default for LkOptions {
    fn default() -> Self {
        Self { directions_per_cell: 4000, region_samples: 4000, max_rejection: 0.05 }
    }
}

/// Stratum of a shape: an open cell of a PL complex or a smooth stratum index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StratumRef {
    Cell(CellId),
    Smooth(usize),
}

fn product(a: Estimate, b: Estimate) -> Estimate {
    let se = ((a.value * b.std_error).powi(2) + (b.value * a.std_error).powi(2)).sqrt();
    Estimate::new(a.value * b.value, se, a.n_samples.max(b.n_samples), a.seed)
}

/// Mean of `ind_nor(v)` over the unit normal sphere of a PL cell.
pub fn pl_mean_normal_index(
    k: &StratifiedComplex,
    cell: CellId,
    n_dirs: usize,
    max_rejection: f64,
    src: &RandomSource,
) -> Result<Estimate> {
    let link = k.normal_link(cell)?;
    if link.is_empty() {
        return Ok(Estimate::exact(1.0));
    }
    let normal = link.tangent.complement();
    let samples: Vec<Result<(f64, usize)>> = map_samples(n_dirs, src, |_, sub| {
        let mut rng = sub.rng();
        let mut rejected = 0;
        loop {
            let v = sample_unit_in(&normal, &mut rng);
            match link.morse_index(&v) {
                Ok(i) => return Ok((i as f64, rejected)),
                Err(Error::DegenerateDirection(_)) if rejected < 100 => rejected += 1,
                Err(e) => return Err(e),
            }
        }
    });
    let mut values = Vec::with_capacity(n_dirs);
    let mut rejected = 0;
    for s in samples {
        let (v, r) = s?;
        values.push(v);
        rejected += r;
    }
    let attempted = n_dirs + rejected;
    if rejected as f64 > max_rejection * attempted as f64 {
        return Err(Error::ResampleQuota {
            rejected,
            attempted,
            reason: format!("non-generic normal directions at cell {:?}", k.cell(cell)),
        });
    }
    Ok(Estimate::from_samples(&values, src.master_seed))
}

/// `vol_d(C ∩ U)` for a PL cell (counting measure for vertices).
pub fn pl_cell_volume_in(
    k: &StratifiedComplex,
    cell: CellId,
    region: &Region,
    n: usize,
    src: &RandomSource,
) -> Estimate {
    let vol = k.cell_volume(cell);
    if region.is_everything() {
        return Estimate::exact(vol);
    }
    let pts = k.cell_points(cell);
    if pts.len() == 1 {
        return Estimate::exact(if region.contains(&pts[0]) { 1.0 } else { 0.0 });
    }
    if pts.iter().all(|p| region.contains(p)) && matches!(region, Region::OpenBall { .. } | Region::HalfSpace { .. }) {
        // Both region types are convex.
        return Estimate::exact(vol);
    }
    let hits: Vec<f64> = map_samples(n, src, |_, sub| {
        let mut rng = sub.rng();
        let w: Vec<f64> = (0..pts.len()).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = w.iter().sum();
        let x = pts.iter().zip(&w).fold(DVector::zeros(pts[0].len()), |a, (p, wi)| a + p * (wi / total));
        if region.contains(&x) { vol } else { 0.0 }
    });
    Estimate::from_samples(&hits, src.master_seed)
}

/// `lambda_k` of a PL cell: the mean normal index if `k` is the cell
/// dimension, 1 for top cells of full dimension, and 0 otherwise.
pub fn pl_lambda_density(
    k: &StratifiedComplex,
    cell: CellId,
    order: usize,
    opts: &LkOptions,
    src: &RandomSource,
) -> Result<Estimate> {
    let d = k.cell_dim(cell);
    if order != d {
        return Ok(Estimate::exact(0.0));
    }
    if d == k.ambient_dim() {
        return Ok(Estimate::exact(1.0));
    }
    pl_mean_normal_index(k, cell, opts.directions_per_cell, opts.max_rejection, src)
}

fn half_circle_rule() -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(HALF_CIRCLE_NODES).expect("nonzero"));
    let h = std::f64::consts::FRAC_PI_2;
    gl.iter().map(|(x, w)| (h * x, h * w)).collect()
}

/// `lambda_k^S(x)` on a smooth stratum. On strata with an inward conormal
/// `c` only normals with `<v, c> > 0` carry a nonzero normal index.
pub fn smooth_lambda_density(st: &SmoothStratum, x: &DVector<f64>, order: usize) -> Result<f64> {
    let n = st.ambient_dim();
    let d = st.dim();
    if order > d {
        return Ok(0.0);
    }
    if d == n {
        return Ok(if order == n { 1.0 } else { 0.0 });
    }
    let j = d - order;
    let norm = s(n - order - 1);
    let Some(c) = st.conormal_at(x) else {
        let mut acc = 0.0;
        for (v, w) in st.normal_sphere_rule(x)? {
            acc += w * st.second_form(x, &v)?.sigma(j);
        }
        return Ok(acc / norm);
    };
    match st.codim() {
        1 => Ok(st.second_form(x, &c)?.sigma(j) / norm),
        2 => {
            // Unit normal orthogonal to c inside the normal plane.
            let (_, normal) = st.frames_at(x)?;
            let e = (0..2)
                .map(|i| normal.basis_vector(i) - &c * normal.basis_vector(i).dot(&c))
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .expect("normal plane")
                .normalize();
            let mut acc = 0.0;
            for (t, w) in half_circle_rule() {
                let v = &c * t.cos() + &e * t.sin();
                acc += w * st.second_form(x, &v)?.sigma(j);
            }
            Ok(acc / norm)
        }
        k => Err(Error::Unsupported(format!("conormal rule in codimension {k}"))),
    }
}

/// Density of `Lambda_k` at a point of a stratum.
pub fn lambda_density(
    shape: &Shape,
    stratum: StratumRef,
    x: &DVector<f64>,
    order: usize,
    opts: &LkOptions,
    src: &RandomSource,
) -> Result<Estimate> {
    if order > shape.ambient_dim() {
        return Err(Error::Domain(format!("k = {order} exceeds ambient dimension {}", shape.ambient_dim())));
    }
    match (&shape.geometry, stratum) {
        (Geometry::Pl(k), StratumRef::Cell(c)) => pl_lambda_density(k, c, order, opts, src),
        (Geometry::Smooth(sm), StratumRef::Smooth(i)) => {
            let st = sm.strata.get(i).ok_or_else(|| Error::Lookup(format!("stratum {i}")))?;
            Ok(Estimate::exact(smooth_lambda_density(st, x, order)?))
        }
        _ => Err(Error::Lookup("stratum kind does not match the shape".into())),
    }
}

/// `Lambda_k(X, U)`: the sum over strata of the integrated densities.
pub fn lk_measure(shape: &Shape, order: usize, opts: &LkOptions, src: &RandomSource) -> Result<Estimate> {
    let n = shape.ambient_dim();
    if order > n {
        return Err(Error::Domain(format!("k = {order} exceeds ambient dimension {n}")));
    }
    let src = src.labelled("lk-measure");
    match &shape.geometry {
        Geometry::Pl(k) => {
            let mut parts = Vec::new();
            for (id, cell) in k.cells() {
                if cell.len() != order + 1 {
                    continue;
                }
                let cell_src = src.substream(id as u64);
                let vol = pl_cell_volume_in(k, id, &shape.region, opts.region_samples, &cell_src.labelled("volume"));
                if vol.value == 0.0 && vol.std_error == 0.0 {
                    continue;
                }
                let dens = pl_lambda_density(k, id, order, opts, &cell_src.labelled("normal"))?;
                parts.push(product(vol, dens));
            }
            let mut e = Estimate::sum(parts);
            e.seed = src.master_seed;
            Ok(e)
        }
        Geometry::Smooth(sm) => {
            let mut parts = Vec::new();
            for st in &sm.strata {
                if order > st.dim() {
                    continue;
                }
                // Surface errors with their cause before integrating.
                smooth_lambda_density(st, &st.param(&chart_midpoint(st)), order)?;
                let e = st.integrate_stratum(
                    |x| smooth_lambda_density(st, x, order).unwrap_or(f64::NAN),
                    |x| shape.region.contains(x),
                );
                if !e.value.is_finite() {
                    return Err(Error::DegenerateChart(format!("{}: density failed on the chart", st.name)));
                }
                parts.push(e);
            }
            Ok(Estimate::sum(parts))
        }
    }
}

fn chart_midpoint(st: &SmoothStratum) -> Vec<f64> {
    st.chart_axes().iter().map(|a| 0.5 * (a.lo + a.hi) + 0.1 * (a.hi - a.lo)).collect()
}

/// `(Lambda_0, ..., Lambda_n)`.
pub fn lk_vector(shape: &Shape, opts: &LkOptions, src: &RandomSource) -> Result<Vec<Estimate>> {
    (0..=shape.ambient_dim()).map(|k| lk_measure(shape, k, opts, src)).collect()
}
