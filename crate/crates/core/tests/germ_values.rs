use nalgebra::DVector;
use stratlk::germ::{
    density, local_lambda, local_polar_length, sigma_invariant, verify_local_identities, ConeGerm, GermBudget,
    SliceOptions,
};
use stratlk::lkmeasure::LkOptions;
use stratlk::plstrata::{write_plstrat, StratifiedComplex};
use stratlk::RandomSource;

const LADDER: [f64; 3] = [1.0, 0.5, 0.25];

fn near(e: &stratlk::Estimate, target: f64) -> bool {
    (e.value - target).abs() <= 3.0 * e.std_error + 1e-12
}

#[test]
fn density_examples() {
    assert!((density(&ConeGerm::rays(3).unwrap(), 1).unwrap() - 1.5).abs() < 1e-15);
    assert!((density(&ConeGerm::halfplane(3).unwrap(), 2).unwrap() - 0.5).abs() < 1e-15);
    let t = 0.9;
    assert!((density(&ConeGerm::cone_circle(t).unwrap(), 2).unwrap() - t.sin()).abs() < 1e-15);
}

#[test]
fn sigma_examples() {
    let src = RandomSource::new(5);
    let opts = SliceOptions::default();
    let rays = ConeGerm::rays(3).unwrap();
    let s1 = sigma_invariant(&rays, 1, 4000, &opts, &src).unwrap();
    assert!(near(&s1, 1.5), "{s1:?}");
    assert_eq!(sigma_invariant(&rays, 2, 100, &opts, &src).unwrap().value, 0.0);
    assert_eq!(sigma_invariant(&rays, 0, 1, &opts, &src).unwrap().value, 1.0);
    let half = ConeGerm::halfplane(2).unwrap();
    // A shifted line always crosses the boundary line; a shifted point lies on
    // the open side half of the time.
    assert_eq!(sigma_invariant(&half, 1, 1000, &opts, &src).unwrap().value, 1.0);
    let h2 = sigma_invariant(&half, 2, 4000, &opts, &src).unwrap();
    assert!(near(&h2, 0.5), "{h2:?}");
    let h3 = ConeGerm::halfplane(3).unwrap();
    let vals: Vec<f64> = (1..=3).map(|k| sigma_invariant(&h3, k, 4000, &opts, &src).unwrap().value).collect();
    assert_eq!(vals[0], 1.0);
    assert!((vals[1] - 0.5).abs() < 0.04, "{vals:?}");
    assert_eq!(vals[2], 0.0);
    let t = 0.6f64;
    let cone = ConeGerm::cone_circle(t).unwrap();
    for k in [1, 2] {
        let s = sigma_invariant(&cone, k, 4000, &opts, &src).unwrap();
        assert!(near(&s, t.sin()), "k = {k}: {s:?}");
    }
}

#[test]
fn local_lambda_examples() {
    let src = RandomSource::new(8);
    let opts = LkOptions::default();
    let rays = ConeGerm::rays(3).unwrap();
    let l1 = local_lambda(&rays, 1, &LADDER, &opts, &src).unwrap();
    assert!(l1.converged && near(&l1.estimate, 1.5), "{l1:?}");
    let l0 = local_lambda(&rays, 0, &LADDER, &opts, &src).unwrap();
    assert!(l0.converged && near(&l0.estimate, -0.5), "{l0:?}");
    let half = ConeGerm::halfplane(3).unwrap();
    let l2 = local_lambda(&half, 2, &LADDER, &opts, &src).unwrap();
    assert!(l2.converged && near(&l2.estimate, 0.5), "{l2:?}");
}

#[test]
fn local_polar_length_examples() {
    let src = RandomSource::new(13);
    let rays = ConeGerm::rays(3).unwrap();
    let l1 = local_polar_length(&rays, 1, 10, 0.01, &src).unwrap();
    assert_eq!(l1.estimate.value, 1.5);
    let half = ConeGerm::halfplane(3).unwrap();
    let l2 = local_polar_length(&half, 2, 10, 0.01, &src).unwrap();
    assert!((l2.estimate.value - 0.5).abs() < 1e-12);
    // No 2-dimensional part: empty polar germ.
    assert_eq!(local_polar_length(&rays, 2, 10, 0.01, &src).unwrap().estimate.value, 0.0);
}

fn check_report(x: &ConeGerm, ks: &[usize], expected: &[f64], seed: u64) {
    let budget = GermBudget::default();
    let rep = verify_local_identities(x, ks, &budget, &RandomSource::new(seed)).unwrap();
    for (row, &want) in rep.rows.iter().zip(expected) {
        assert!(row.pass, "{}: {row:?}", x.name);
        for e in [&row.sigma_diff, &row.l_loc, &row.lambda_loc] {
            assert!(near(e, want), "{} k = {}: {e:?} vs {want}", x.name, row.k);
        }
    }
    for c in &rep.checks {
        assert!(c.pass, "{}: {c:?}", x.name);
    }
}

#[test]
fn rays_identities() {
    for m in [2usize, 3, 5] {
        let x = ConeGerm::rays(m).unwrap();
        let h = m as f64 / 2.0;
        check_report(&x, &[0, 1, 2], &[1.0 - h, h, 0.0], 21);
    }
}

#[test]
fn halfplane_identities() {
    check_report(&ConeGerm::halfplane(3).unwrap(), &[0, 1, 2, 3], &[0.0, 0.5, 0.5, 0.0], 22);
}

#[test]
fn round_cone_identities() {
    let t = 0.5f64;
    check_report(&ConeGerm::cone_circle(t).unwrap(), &[0, 1, 2, 3], &[1.0 - t.sin(), 0.0, t.sin(), 0.0], 23);
}

#[test]
fn smooth_point_sanity() {
    // The plane {x_3 = 0} in R^3 as the cone over a square link.
    let v = |c: [f64; 3]| DVector::from_vec(c.to_vec());
    let verts = vec![v([1.0, 0.0, 0.0]), v([0.0, 1.0, 0.0]), v([-1.0, 0.0, 0.0]), v([0.0, -1.0, 0.0])];
    let link = StratifiedComplex::from_facets(verts, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
    let x = ConeGerm::from_link("plane", &link).unwrap();
    check_report(&x, &[0, 1, 2, 3], &[0.0, 0.0, 1.0, 0.0], 24);
}

#[test]
fn octant_link_file() {
    let v = |c: [f64; 3]| DVector::from_vec(c.to_vec());
    let verts = vec![v([1.0, 0.0, 0.0]), v([0.0, 2.0, 0.0]), v([0.0, 0.0, 1.0])];
    let link = StratifiedComplex::from_facets(verts, &[vec![0, 1, 2]]).unwrap();
    let path = std::env::temp_dir().join(format!("octant-link-{}.plstrat", std::process::id()));
    std::fs::write(&path, write_plstrat(&link)).unwrap();
    let x = ConeGerm::from_catalog(&format!("cone-link:{}", path.display())).unwrap();
    std::fs::remove_file(&path).ok();
    assert!((density(&x, 3).unwrap() - 0.125).abs() < 1e-14);
    // Solid octant: external angles 1/8, 1/4 (edges), 1/2 (faces).
    check_report(&x, &[0, 1, 2, 3], &[0.125, 0.375, 0.375, 0.125], 25);
}
