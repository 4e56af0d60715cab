//! Independent oracle for convex bodies: fit the volume of epsilon-dilations
//! by a polynomial in epsilon, whose coefficients are `b_{n-k} Lambda_k`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::shape::{Geometry, Shape};
use crate::error::{Error, Result};
use crate::geomkit::{compensated_sum, map_samples, Estimate, RandomSource};
use crate::plstrata::StratifiedComplex;
use crate::smoothshape::ShapeTag;

/// Largest accepted condition number of the weighted fit.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerFit {
    /// `c_k` multiplies `eps^(n-k)`; `c_k ≈ b_{n-k} Lambda_k`.
    pub coefficients: Vec<Estimate>,
    pub volumes: Vec<Estimate>,
    pub epsilons: Vec<f64>,
    pub condition: f64,
}

/// Distance from `x` to a union of closed simplices (all faces present).
fn distance_to_complex(frames: &[CellFrame], x: &DVector<f64>) -> f64 {
    let mut best = f64::INFINITY;
    for f in frames {
        let y = x - &f.origin;
        let coords = &f.pinv * &y;
        let first = 1.0 - coords.sum();
        if first < 0.0 || coords.iter().any(|&c| c < 0.0) {
            continue;
        }
        let d = (&y - &f.edges * coords).norm();
        best = best.min(d);
    }
    best
}

struct CellFrame {
    origin: DVector<f64>,
    edges: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

fn cell_frames(k: &StratifiedComplex) -> Vec<CellFrame> {
    k.cells()
        .map(|(id, _)| {
            let pts = k.cell_points(id);
            let edges = k.edge_matrix(id);
            let pinv = if edges.ncols() == 0 {
                DMatrix::zeros(0, k.ambient_dim())
            } else {
                (edges.transpose() * &edges).try_inverse().expect("nondegenerate cell") * edges.transpose()
            };
            CellFrame { origin: pts[0].clone(), edges, pinv }
        })
        .collect()
}

/// Fits `vol(X + eps B) = sum_k c_k eps^(n-k)` from jittered stratified
/// samples of the bounding box, divided into `cells_per_axis^n` boxes.
pub fn steiner_oracle(
    shape: &Shape,
    epsilons: &[f64],
    cells_per_axis: usize,
    src: &RandomSource,
) -> Result<SteinerFit> {
    let n = shape.ambient_dim();
    if epsilons.len() < n + 1 {
        return Err(Error::Domain(format!("need at least {} dilation radii", n + 1)));
    }
    if epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("dilation radii must be positive".into()));
    }
    for (i, a) in epsilons.iter().enumerate() {
        if epsilons[..i].contains(a) {
            return Err(Error::Domain("dilation radii must be distinct".into()));
        }
    }
    if cells_per_axis == 0 {
        return Err(Error::Domain("cells_per_axis must be positive".into()));
    }
    let eps_max = epsilons.iter().copied().fold(0.0, f64::max);
    let frames;
    let distance: Box<dyn Fn(&DVector<f64>) -> f64 + Sync> = match &shape.geometry {
        Geometry::Pl(k) => {
            frames = cell_frames(k);
            Box::new(move |x| distance_to_complex(&frames, x))
        }
        Geometry::Smooth(s) => match s.tag {
            ShapeTag::Ball { r } => {
                let c = s.center().clone();
                Box::new(move |x| ((x - &c).norm() - r).max(0.0))
            }
            _ => return Err(Error::Unsupported(format!("dilation oracle for {}", s.name()))),
        },
    };
    let (lo, hi) = match &shape.geometry {
        Geometry::Pl(k) => {
            let mut lo = DVector::from_element(n, f64::INFINITY);
            let mut hi = DVector::from_element(n, f64::NEG_INFINITY);
            for v in k.vertices() {
                lo = lo.inf(v);
                hi = hi.sup(v);
            }
            (lo, hi)
        }
        Geometry::Smooth(_) => {
            let (c, r) = shape.bounding_ball();
            (c.add_scalar(-r), c.add_scalar(r))
        }
    };
    let lo = lo.add_scalar(-eps_max * 1.0001);
    let hi = hi.add_scalar(eps_max * 1.0001);
    let side = &hi - &lo;
    let cell_vol: f64 = side.iter().map(|s| s / cells_per_axis as f64).product();
    let n_cells = cells_per_axis.pow(n as u32);

    let src = src.labelled("steiner");
    let h = side.norm() / cells_per_axis as f64 / 2.0;
    let sub = 1usize << n;
    // Per box and epsilon: (mean hit fraction, variance of that mean). The
    // distance is 1-Lipschitz, so boxes whose center is farther than the
    // half-diagonal from the level are decided exactly; the others are
    // split into 2^n sub-boxes with two jittered points each.
    let per_box: Vec<Vec<(f64, f64)>> = map_samples(n_cells, &src, |i, stream| {
        let mut idx = i;
        let mut corner = DVector::zeros(n);
        for a in 0..n {
            corner[a] = (idx % cells_per_axis) as f64;
            idx /= cells_per_axis;
        }
        let at = |offs: &DVector<f64>| {
            DVector::from_fn(n, |a, _| lo[a] + side[a] * (corner[a] + offs[a]) / cells_per_axis as f64)
        };
        let dc = distance(&at(&DVector::from_element(n, 0.5)));
        let mut samples: Option<Vec<[f64; 2]>> = None;
        epsilons
            .iter()
            .map(|&e| {
                if dc - e > h {
                    return (0.0, 0.0);
                }
                if e - dc > h {
                    return (1.0, 0.0);
                }
                let d = samples.get_or_insert_with(|| {
                    let mut rng = stream.rng();
                    (0..sub)
                        .map(|s| {
                            let mut pair = [0.0; 2];
                            for p in &mut pair {
                                let offs = DVector::from_fn(n, |a, _| {
                                    0.5 * (((s >> a) & 1) as f64 + rng.random::<f64>())
                                });
                                *p = distance(&at(&offs));
                            }
                            pair
                        })
                        .collect()
                });
                let mut mean = 0.0;
                let mut var = 0.0;
                for pair in d.iter() {
                    let h0 = f64::from(u8::from(pair[0] <= e));
                    let h1 = f64::from(u8::from(pair[1] <= e));
                    mean += 0.5 * (h0 + h1);
                    // Two-point sub-box mean: variance estimate (h0 - h1)^2 / 4.
                    var += 0.25 * (h0 - h1) * (h0 - h1);
                }
                let w = 1.0 / sub as f64;
                (mean * w, var * w * w)
            })
            .collect()
    });
    let volumes: Vec<Estimate> = (0..epsilons.len())
        .map(|j| {
            let mean = compensated_sum(per_box.iter().map(|b| b[j].0)) * cell_vol;
            // Variance of a two-point box mean: s^2 / 2 with s^2 = (h0 - h1)^2 / 2.
            let var = compensated_sum(per_box.iter().map(|b| b[j].1)) * cell_vol * cell_vol;
            Estimate::new(mean, var.sqrt(), n_cells, src.master_seed)
        })
        .collect();

    // Weighted least squares for c_0..c_n with design eps^(n-k).
    let m = epsilons.len();
    let sigma: Vec<f64> = volumes.iter().map(|v| v.std_error.max(1e-12 * v.value.abs().max(1.0))).collect();
    let a = DMatrix::from_fn(m, n + 1, |i, k| epsilons[i].powi((n - k) as i32) / sigma[i]);
    let y = DVector::from_fn(m, |i, _| volumes[i].value / sigma[i]);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let coef = svd.solve(&y, 0.0).map_err(|_| Error::IllConditioned(condition))?;
    let cov = (a.transpose() * &a).try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
    let coefficients = (0..=n)
        .map(|k| Estimate::new(coef[k], cov[(k, k)].max(0.0).sqrt(), n_cells, src.master_seed))
        .collect();
    Ok(SteinerFit { coefficients, volumes, epsilons: epsilons.to_vec(), condition })
}
