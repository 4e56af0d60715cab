use nalgebra::{DMatrix, DVector};
use stratlk::geomkit::{
    sample_affine_flats_hitting_ball, sample_grassmannian, sample_unit_sphere, RandomSource,
};

/// Two-sided Kolmogorov-Smirnov p-value (asymptotic series).
fn ks_pvalue(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for j in 1..100 {
        let j = j as f64;
        p += 2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

fn unit_normal_of_plane(basis: &DMatrix<f64>) -> DVector<f64> {
    let a = basis.column(0);
    let b = basis.column(1);
    let n = DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]);
    let n = n.normalize();
    // Fix the sign so the normal is a point of S^2 chosen uniformly from {n, -n}.
    n
}

#[test]
fn sphere_samples_are_centered_and_symmetric() {
    let mut rng = RandomSource::new(100).rng();
    let n = 100_000;
    let mut mean = DVector::zeros(3);
    let mut positive = 0usize;
    for _ in 0..n {
        let v = sample_unit_sphere(3, &mut rng);
        if v[0] > 0.0 {
            positive += 1;
        }
        mean += v;
    }
    mean /= n as f64;
    // Each coordinate has variance 1/3.
    let sigma = (1.0f64 / 3.0 / n as f64).sqrt();
    for i in 0..3 {
        assert!(mean[i].abs() < 4.0 * sigma, "coordinate {i}: {}", mean[i]);
    }
    let frac = positive as f64 / n as f64;
    assert!((frac - 0.5).abs() < 0.01);
}

#[test]
fn plane_normals_are_uniform_on_the_sphere() {
    // Archimedes: each coordinate of a uniform point of S^2 is uniform on [-1, 1].
    let mut rng = RandomSource::new(101).rng();
    let mut sign_rng = RandomSource::new(102).rng();
    let mut coords = vec![Vec::new(), Vec::new(), Vec::new()];
    for _ in 0..10_000 {
        let p = sample_grassmannian(3, 2, &mut rng).unwrap();
        let mut nrm = unit_normal_of_plane(p.basis());
        if rand::Rng::random::<bool>(&mut sign_rng) {
            nrm = -nrm;
        }
        for i in 0..3 {
            coords[i].push(nrm[i]);
        }
    }
    for c in coords {
        let p = ks_pvalue(c, |x| ((x + 1.0) / 2.0).clamp(0.0, 1.0));
        assert!(p > 0.001, "KS p-value {p}");
    }
}

#[test]
fn line_angles_are_uniform() {
    let mut rng = RandomSource::new(103).rng();
    let bins = 20;
    let n = 10_000;
    let mut counts = vec![0usize; bins];
    for _ in 0..n {
        let l = sample_grassmannian(2, 1, &mut rng).unwrap();
        let v = l.basis_vector(0);
        let mut ang = v[1].atan2(v[0]);
        if ang < 0.0 {
            ang += std::f64::consts::PI;
        }
        if ang >= std::f64::consts::PI {
            ang -= std::f64::consts::PI;
        }
        let b = ((ang / std::f64::consts::PI) * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let e = n as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // 19 degrees of freedom, p = 0.001 critical value.
    assert!(chi2 < 43.82, "chi^2 = {chi2}");
}

#[test]
fn grassmannian_sampling_is_rotation_invariant() {
    // Statistic: |first coordinate of the plane normal|, for sampled planes and
    // for planes rotated by a fixed rotation. Both must be Uniform(0, 1).
    let theta: f64 = 0.7;
    let rot = DMatrix::from_row_slice(3, 3, &[
        theta.cos(), -theta.sin(), 0.0,
        theta.sin(), theta.cos(), 0.0,
        0.0, 0.0, 1.0,
    ]) * DMatrix::from_row_slice(3, 3, &[
        1.0, 0.0, 0.0,
        0.0, 0.3f64.cos(), -0.3f64.sin(),
        0.0, 0.3f64.sin(), 0.3f64.cos(),
    ]);
    let mut rng = RandomSource::new(104).rng();
    let mut plain = Vec::new();
    let mut rotated = Vec::new();
    for _ in 0..10_000 {
        let p = sample_grassmannian(3, 2, &mut rng).unwrap();
        plain.push(unit_normal_of_plane(p.basis())[0].abs());
        rotated.push(unit_normal_of_plane(p.rotated(&rot).basis())[0].abs());
    }
    assert!(ks_pvalue(plain, |x| x.clamp(0.0, 1.0)) > 0.001);
    assert!(ks_pvalue(rotated, |x| x.clamp(0.0, 1.0)) > 0.001);
}

#[test]
fn determinism_of_streams() {
    let s = RandomSource::with_stream(5, 9);
    let a: Vec<_> = {
        let mut r = s.rng();
        (0..10).map(|_| sample_grassmannian(4, 2, &mut r).unwrap()).collect()
    };
    let b: Vec<_> = {
        let mut r = s.rng();
        (0..10).map(|_| sample_grassmannian(4, 2, &mut r).unwrap()).collect()
    };
    assert_eq!(a, b);
}

#[test]
fn crofton_for_the_unit_disk() {
    // Integral over lines of the chord length through the unit disk equals its
    // area pi (lines parametrized by a probability measure on directions and
    // Lebesgue measure on offsets).
    let mut rng = RandomSource::new(105).rng();
    let n = 40_000;
    let mut total = 0.0;
    let mut weight = 0.0;
    for _ in 0..n {
        let (flat, w) = sample_affine_flats_hitting_ball(2, 1, 1.0, &mut rng).unwrap();
        assert!(flat.offset.norm() <= 1.0 + 1e-12);
        let d = flat.offset.norm();
        total += 2.0 * (1.0 - d * d).max(0.0).sqrt();
        weight = w;
    }
    let est = weight * total / n as f64;
    assert!((est / std::f64::consts::PI - 1.0).abs() < 0.02, "estimate {est}");
}
