//! Seeded random streams and uniform samplers on spheres, Grassmannians and
//! affine flats.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::constants::b;
use super::frame::{AffineFlat, LinearSubspace};
use crate::error::{Error, Result};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible random stream identified by `(master_seed, stream_id)`.
///
/// Substreams are derived by hashing, so per-sample generators depend only on
/// the master seed and the sample index, never on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, stream_id: 0 }
    }

    pub fn with_stream(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Child stream `i` of this stream.
    pub fn substream(&self, i: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    /// Child stream keyed by a label, for separating estimator phases.
    pub fn labelled(&self, label: &str) -> Self {
        let mut h = 0xCBF2_9CE4_8422_2325u64;
        for byte in label.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01B3);
        }
        self.substream(h)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        let mut z = self.master_seed ^ 0xA076_1D64_78BD_642F;
        for (i, chunk) in seed.chunks_mut(8).enumerate() {
            z = splitmix64(z ^ self.stream_id.rotate_left(17 * i as u32 + 1));
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

pub fn standard_normal_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| StandardNormal.sample(rng)))
}

/// Uniform point on the unit sphere `S^{dim-1}` of `R^dim`.
pub fn sample_unit_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    assert!(dim >= 1, "sample_unit_sphere needs dim >= 1");
    loop {
        let g = standard_normal_vector(dim, rng);
        let n = g.norm();
        if n > 1e-300 {
            return g / n;
        }
    }
}

/// Uniform unit vector inside the given subspace.
pub fn sample_unit_in<R: Rng + ?Sized>(space: &LinearSubspace, rng: &mut R) -> DVector<f64> {
    let c = sample_unit_sphere(space.dim(), rng);
    space.lift(&c)
}

/// Uniform (O(n)-invariant) random `k`-plane: orthonormalized Gaussian vectors.
pub fn sample_grassmannian<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<LinearSubspace> {
    if k > n {
        return Err(Error::Domain(format!("G({n},{k}) is empty")));
    }
    if k == n {
        return Ok(LinearSubspace::full(n));
    }
    loop {
        let vs: Vec<_> = (0..k).map(|_| standard_normal_vector(n, rng)).collect();
        if let Ok(l) = LinearSubspace::from_spanning(n, &vs) {
            return Ok(l);
        }
    }
}

/// Uniform point of the closed unit ball of `R^m` scaled by `radius`.
fn sample_ball<R: Rng + ?Sized>(m: usize, radius: f64, rng: &mut R) -> DVector<f64> {
    let dir = sample_unit_sphere(m, rng);
    let u: f64 = rng.random();
    dir * (radius * u.powf(1.0 / m as f64))
}

/// Random affine `k`-flat meeting the ball `B(0, radius)` of `R^n`.
///
/// The returned weight `b_{n-k} radius^{n-k}` turns the sample mean of any
/// `f(E)` into an estimate of the integral of `f` over flats meeting the ball,
/// with the Grassmannian factor normalized to a probability measure.
pub fn sample_affine_flats_hitting_ball<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    radius: f64,
    rng: &mut R,
) -> Result<(AffineFlat, f64)> {
    if k >= n {
        return Err(Error::Domain(format!("affine {k}-flats of R^{n} have no offset space")));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    let direction = sample_grassmannian(n, k, rng)?;
    let perp = direction.complement();
    let c = sample_ball(n - k, radius, rng);
    let offset = perp.lift(&c);
    let weight = b(n - k) * radius.powi((n - k) as i32);
    Ok((AffineFlat { direction, offset }, weight))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = RandomSource::with_stream(7, 3);
        let x: Vec<u64> = (0..4).map(|_| 0).scan(a.rng(), |r, _| Some(r.random())).collect();
        let y: Vec<u64> = (0..4).map(|_| 0).scan(a.rng(), |r, _| Some(r.random())).collect();
        assert_eq!(x, y);
        let z: Vec<u64> =
            (0..4).map(|_| 0).scan(a.substream(1).rng(), |r, _| Some(r.random())).collect();
        assert_ne!(x, z);
        assert_ne!(a.substream(1), a.substream(2));
    }

    #[test]
    fn sphere_samples_are_unit() {
        let mut rng = RandomSource::new(1).rng();
        for d in 1..7 {
            let v = sample_unit_sphere(d, &mut rng);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_grassmannian_is_a_point() {
        let mut rng = RandomSource::new(2).rng();
        let l = sample_grassmannian(3, 3, &mut rng).unwrap();
        assert_eq!(l.projector(), nalgebra::DMatrix::identity(3, 3));
    }

    #[test]
    fn flat_weight_formula() {
        let mut rng = RandomSource::new(3).rng();
        let (f, w) = sample_affine_flats_hitting_ball(3, 1, 2.0, &mut rng).unwrap();
        assert!((w - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(f.offset.norm() <= 2.0);
        assert!(f.offset_defect() < 1e-12);
        assert!(sample_affine_flats_hitting_ball(3, 3, 1.0, &mut rng).is_err());
    }
}
