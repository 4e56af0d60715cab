//! Localized curvatures `lim Lambda_k(X, X ∩ B_eps) / (b_k eps^k)` and
//! localized polar lengths `L_k^loc`.

use nalgebra::{DVector, Vector3};

use super::cone::{solid_angle_fraction, ConeGerm, GermStratum, Link};
use crate::error::{Error, Result};
use crate::geomkit::constants::b;
use crate::geomkit::{map_samples, sample_grassmannian, sample_unit_sphere, Estimate, LinearSubspace, RandomSource};
use crate::lkmeasure::{lk_measure, LkOptions, Region, Shape};
use crate::polar::{pl_alpha, pl_rank_report, PolarOptions};

/// Result of [`local_lambda`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLambda {
    pub estimate: Estimate,
    /// `(eps, Lambda_k(X, X ∩ B_eps) / (b_k eps^k))` per ladder step.
    pub ladder: Vec<(f64, Estimate)>,
    /// The ladder values agree within 5 standard errors.
    pub converged: bool,
}

/// `1 - chi` of the part of the round-cone link where `<u, .> < 0`: an arc
/// (`chi = 1`) when the plane `u^perp` cuts the circle, otherwise the whole
/// circle or nothing (`chi = 0`).
fn circle_lower_chi(theta: f64, u: &Vector3<f64>) -> i64 {
    let rho = (u.x * u.x + u.y * u.y).sqrt();
    i64::from(u.z.abs() * theta.cos() < theta.sin() * rho)
}

/// Value of `Lambda_k(X, X ∩ B_eps) / (b_k eps^k)` at one scale.
fn lambda_at_scale(x: &ConeGerm, k: usize, eps: f64, opts: &LkOptions, src: &RandomSource) -> Result<Estimate> {
    match &x.link {
        Link::Pl(_) => {
            let complex = x.cone_complex(x.safe_radius() * eps)?;
            let n = complex.ambient_dim();
            let shape = Shape::pl(x.name.clone(), complex)
                .with_region(Region::OpenBall { center: DVector::zeros(n), radius: eps });
            Ok(lk_measure(&shape, k, opts, src)?.scale(1.0 / (b(k) * eps.powi(k as i32))))
        }
        Link::Circle { theta } => match k {
            // The apex: mean of 1 - chi(lower link) over directions.
            0 => {
                let vals: Vec<f64> = map_samples(opts.directions_per_cell, src, |_, sub| {
                    let u = sample_unit_sphere(3, &mut sub.rng());
                    (1 - circle_lower_chi(*theta, &Vector3::new(u[0], u[1], u[2]))) as f64
                });
                Ok(Estimate::from_samples(&vals, src.master_seed))
            }
            // The sheet is flat along rulings; the odd curvature term cancels
            // between the two normals.
            1 | 3 => Ok(Estimate::exact(0.0)),
            2 => Ok(Estimate::exact(theta.sin())),
            _ => Err(Error::Domain(format!("k = {k} exceeds ambient dimension 3"))),
        },
    }
}

/// `lim_eps Lambda_k(X, X ∩ B_eps) / (b_k eps^k)` from the ladder `eps_ladder`
/// (`U` is the open ball, so the spherical boundary never enters). Cones are
/// scale invariant, so the ladder must be flat; the estimate is the
/// inverse-variance mean when it is, and the Richardson extrapolation from the
/// two finest scales otherwise.
pub fn local_lambda(x: &ConeGerm, k: usize, eps_ladder: &[f64], opts: &LkOptions, src: &RandomSource) -> Result<LocalLambda> {
    let n = x.ambient_dim();
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds ambient dimension {n}")));
    }
    if eps_ladder.is_empty() || eps_ladder.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("epsilon ladder must be non-empty and positive".into()));
    }
    let src = src.labelled("local-lambda");
    let mut ladder = Vec::with_capacity(eps_ladder.len());
    for (i, &eps) in eps_ladder.iter().enumerate() {
        ladder.push((eps, lambda_at_scale(x, k, eps, opts, &src.substream(i as u64))?));
    }
    let mut converged = true;
    for (i, (_, a)) in ladder.iter().enumerate() {
        for (_, b) in &ladder[i + 1..] {
            let tol = 5.0 * a.combined_se(b) + 1e-12 * a.value.abs().max(1.0);
            if (a.value - b.value).abs() > tol {
                converged = false;
            }
        }
    }
    let estimate = if converged {
        weighted_mean(ladder.iter().map(|(_, e)| *e))
    } else {
        let mut sorted = ladder.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        match sorted.as_slice() {
            [(e0, f0), (e1, f1), ..] => {
                // Linear model f(eps) = L + c eps.
                let r = e1 / e0;
                let w = 1.0 / (r - 1.0);
                let value = f0.value + w * (f0.value - f1.value);
                let se = ((1.0 + w) * f0.std_error).hypot(w * f1.std_error);
                Estimate::new(value, se, f0.n_samples, f0.seed)
            }
            _ => sorted[0].1,
        }
    };
    Ok(LocalLambda { estimate, ladder, converged })
}

fn weighted_mean(parts: impl Iterator<Item = Estimate>) -> Estimate {
    let parts: Vec<Estimate> = parts.collect();
    if parts.iter().any(|e| e.std_error == 0.0) {
        let exact: Vec<&Estimate> = parts.iter().filter(|e| e.std_error == 0.0).collect();
        let mut e = *exact[0];
        e.n_samples = parts.iter().map(|p| p.n_samples).sum();
        return e;
    }
    let w: Vec<f64> = parts.iter().map(|e| 1.0 / (e.std_error * e.std_error)).collect();
    let total: f64 = w.iter().sum();
    let value = parts.iter().zip(&w).map(|(e, w)| e.value * w).sum::<f64>() / total;
    let n = parts.iter().map(|e| e.n_samples).sum();
    Estimate::new(value, total.sqrt().recip(), n, parts[0].seed)
}

/// One cone component `Y_j` of the projected polar germ.
#[derive(Debug, Clone, PartialEq)]
pub struct GermComponent {
    pub stratum: GermStratum,
    /// Multiplicity `lambda_j`, the index `alpha` of its sources.
    pub lambda: f64,
    /// `Theta_k(Y_j, 0)` inside `P`.
    pub density: f64,
}

/// Projection of a germ to `P` (`k = dim P - 1`), split into cone components.
#[derive(Debug, Clone, PartialEq)]
pub struct GermPolarDecomposition {
    pub plane: LinearSubspace,
    pub components: Vec<GermComponent>,
}

impl GermPolarDecomposition {
    /// `sum_j lambda_j Theta_k(Y_j, 0)`.
    pub fn weighted_density(&self) -> f64 {
        self.components.iter().map(|c| c.lambda * c.density).sum()
    }
}

/// Polar components of the germ for the plane `P`. Each cone cell of
/// dimension `k` is its own polar set and its image is one component; cells
/// of higher dimension have no polar points for generic `P`. Non-generic
/// planes give `DegenerateDirection`.
pub fn germ_polar_decomposition(x: &ConeGerm, plane: &LinearSubspace) -> Result<GermPolarDecomposition> {
    let n = x.ambient_dim();
    if plane.ambient_dim() != n || plane.dim() == 0 {
        return Err(Error::Domain("plane must be a nonzero subspace of the ambient space".into()));
    }
    let k = plane.dim() - 1;
    let mut components = Vec::new();
    match &x.link {
        Link::Pl(link) => {
            let complex = x.cone_complex(x.safe_radius())?;
            let rep = pl_rank_report(&complex, plane, &PolarOptions::default());
            if !rep.is_empty() {
                return Err(Error::DegenerateDirection(format!("projection of {}: {}", x.name, rep.flags[0].detail)));
            }
            if k == 0 {
                let apex = complex.vertex_cell(0);
                components.push(GermComponent { stratum: GermStratum::Apex, lambda: pl_alpha(&complex, apex, plane)?, density: 1.0 });
            }
            for (id, c) in link.cells() {
                if c.len() != k {
                    continue;
                }
                let cell = x.cone_cell_of(&complex, c)?;
                let lambda = pl_alpha(&complex, cell, plane)?;
                let image: Vec<DVector<f64>> = link.cell_points(id).iter().map(|w| plane.coords(w)).collect();
                components.push(GermComponent { stratum: GermStratum::Cone(id), lambda, density: solid_angle_fraction(&image)? });
            }
        }
        Link::Circle { theta } => match k {
            0 => {
                let u = plane.basis_vector(0);
                let u = Vector3::new(u[0], u[1], u[2]);
                let lower = circle_lower_chi(*theta, &u);
                // Both half-links have the same chi.
                let lambda = 0.5 * ((1 - lower) + (1 - lower)) as f64;
                components.push(GermComponent { stratum: GermStratum::Apex, lambda, density: 1.0 });
            }
            1 => {
                // Fold rays of the sheet: alpha = 0 on a stratum without boundary.
                let w = plane.complement().basis_vector(0);
                let rho = (w[0] * w[0] + w[1] * w[1]).sqrt();
                if theta.cos() * rho > theta.sin() * w[2].abs() {
                    for _ in 0..2 {
                        components.push(GermComponent { stratum: GermStratum::Sheet, lambda: 0.0, density: 0.5 });
                    }
                }
            }
            2 => components.push(GermComponent { stratum: GermStratum::Sheet, lambda: 1.0, density: theta.sin() }),
            _ => {}
        },
    }
    Ok(GermPolarDecomposition { plane: plane.clone(), components })
}

/// Result of [`local_polar_length`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolarLength {
    pub estimate: Estimate,
    pub attempted: usize,
    pub rejected: usize,
}

/// `L_k^loc(X, 0)`: mean over `P` in `G_n^{k+1}` of `sum_j lambda_j Theta_k(Y_j)`.
/// For `k = n` it is the density `Theta_n`.
pub fn local_polar_length(
    x: &ConeGerm,
    k: usize,
    n_planes: usize,
    max_rejection: f64,
    src: &RandomSource,
) -> Result<LocalPolarLength> {
    let n = x.ambient_dim();
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds ambient dimension {n}")));
    }
    if k == n {
        return Ok(LocalPolarLength { estimate: Estimate::exact(x.density(n)?), attempted: 1, rejected: 0 });
    }
    if k + 1 == n {
        let d = germ_polar_decomposition(x, &LinearSubspace::full(n))?;
        return Ok(LocalPolarLength { estimate: Estimate::exact(d.weighted_density()), attempted: 1, rejected: 0 });
    }
    let src = src.labelled("local-polar");
    let samples: Vec<Result<(f64, usize)>> = map_samples(n_planes, &src, |_, sub| {
        let mut rng = sub.rng();
        let mut rejected = 0;
        loop {
            let plane = sample_grassmannian(n, k + 1, &mut rng)?;
            match germ_polar_decomposition(x, &plane) {
                Ok(d) => return Ok((d.weighted_density(), rejected)),
                Err(Error::DegenerateDirection(_)) if rejected < 100 => rejected += 1,
                Err(e) => return Err(e),
            }
        }
    });
    let mut values = Vec::with_capacity(n_planes);
    let mut rejected = 0;
    for s in samples {
        let (v, r) = s?;
        values.push(v);
        rejected += r;
    }
    let attempted = n_planes + rejected;
    if rejected as f64 > max_rejection * attempted as f64 {
        return Err(Error::ResampleQuota { rejected, attempted, reason: format!("non-generic projections of {}", x.name) });
    }
    Ok(LocalPolarLength { estimate: Estimate::from_samples(&values, src.master_seed), attempted, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rays_in_the_plane() {
        let x = ConeGerm::rays(3).unwrap();
        let d = germ_polar_decomposition(&x, &LinearSubspace::full(2)).unwrap();
        assert_eq!(d.components.len(), 3);
        assert!(d.components.iter().all(|c| c.lambda == 1.0 && c.density == 0.5));
        assert!((d.weighted_density() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn halfplane_sheet_components() {
        let x = ConeGerm::halfplane(3).unwrap();
        let d = germ_polar_decomposition(&x, &LinearSubspace::full(3)).unwrap();
        assert!((d.weighted_density() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn round_cone_apex_alpha() {
        let x = ConeGerm::cone_circle(0.4).unwrap();
        let steep = LinearSubspace::coordinate(3, &[0]);
        let flat = LinearSubspace::coordinate(3, &[2]);
        assert_eq!(germ_polar_decomposition(&x, &steep).unwrap().weighted_density(), 0.0);
        assert_eq!(germ_polar_decomposition(&x, &flat).unwrap().weighted_density(), 1.0);
    }
}
