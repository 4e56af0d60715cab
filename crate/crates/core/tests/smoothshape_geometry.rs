use nalgebra::{DMatrix, DVector};
use rand::Rng;
use stratlk::geomkit::{sample_unit_in, sphere_volume, RandomSource};
use stratlk::smoothshape::{SmoothShape, SmoothStratum};

fn shapes() -> Vec<SmoothShape> {
    ["sphere:1", "sphere:2.5", "torus:2:1", "torus:3:0.5", "disk:1", "hemisphere:1", "circle:2", "ellipse:2:1", "ball:1"]
        .iter()
        .map(|s| SmoothShape::parse(s).unwrap())
        .collect()
}

fn random_chart_point(s: &SmoothStratum, rng: &mut impl Rng) -> Vec<f64> {
    s.chart_axes()
        .iter()
        .map(|a| {
            let len = a.hi - a.lo;
            a.lo + len * (0.05 + 0.9 * rng.random::<f64>())
        })
        .collect()
}

/// Normal field near the base point: the fixed vector `v0` projected to the
/// normal space and renormalized.
fn normal_field(s: &SmoothStratum, u: &[f64], v0: &DVector<f64>) -> DVector<f64> {
    let x = s.param(u);
    let (_, n) = s.frames_at(&x).unwrap();
    n.project(v0).normalize()
}

#[test]
fn second_form_matches_normal_field_derivatives() {
    let mut rng = RandomSource::new(21).rng();
    let h = 1e-5;
    for shape in shapes() {
        for s in shape.strata.iter().filter(|s| s.codim() > 0) {
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let u = random_chart_point(s, &mut rng);
                let x = s.param(&u);
                let (_, normal) = s.frames_at(&x).unwrap();
                let v0 = sample_unit_in(&normal, &mut rng);
                let form = s.second_form(&x, &v0).unwrap();
                let j = s.param_jacobian(&u);
                let c = form.tangent.basis().transpose() * &j;
                let expected = c.transpose() * &form.matrix * &c;
                let d = u.len();
                let mut fd = DMatrix::zeros(d, d);
                for i in 0..d {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[i] += h;
                    dn[i] -= h;
                    let dv = (normal_field(s, &up, &v0) - normal_field(s, &dn, &v0)) / (2.0 * h);
                    for k in 0..d {
                        fd[(i, k)] = -dv.dot(&j.column(k));
                    }
                }
                worst = worst.max((&fd - &expected).amax());
            }
            assert!(worst <= 1e-5, "{} / {}: {worst:e}", shape.name(), s.name);
        }
    }
}

#[test]
fn second_form_is_symmetric_and_odd() {
    let mut rng = RandomSource::new(22).rng();
    for shape in shapes() {
        for s in shape.strata.iter().filter(|s| s.codim() > 0) {
            let u = random_chart_point(s, &mut rng);
            let x = s.param(&u);
            let (_, normal) = s.frames_at(&x).unwrap();
            let v = sample_unit_in(&normal, &mut rng);
            let a = s.second_form(&x, &v).unwrap();
            let b = s.second_form(&x, &(-&v)).unwrap();
            assert!((&a.matrix - a.matrix.transpose()).amax() < 1e-9);
            assert!((&a.matrix + &b.matrix).amax() < 1e-12);
        }
    }
}

#[test]
fn gauss_bonnet() {
    let s2 = sphere_volume(2).unwrap();
    for r in [0.5, 1.0, 3.0] {
        let shape = SmoothShape::sphere(r).unwrap();
        let s = &shape.strata[0];
        let e = s.integrate_stratum(|x| s.lkw_curvature(x, 2).unwrap(), |_| true);
        assert!((e.value / s2 - 2.0).abs() < 1e-6, "r={r}: {}", e.value / s2);
    }
    let torus = SmoothShape::torus(2.0, 1.0).unwrap();
    let t = &torus.strata[0];
    let e = t.integrate_stratum(|x| t.lkw_curvature(x, 2).unwrap(), |_| true);
    assert!((e.value / s2).abs() < 1e-6);
}

#[test]
fn odd_curvatures_vanish_on_closed_strata() {
    let mut rng = RandomSource::new(23).rng();
    for shape in shapes() {
        for s in shape.strata.iter().filter(|s| s.codim() > 0) {
            let x = s.param(&random_chart_point(s, &mut rng));
            for i in (1..=s.dim()).step_by(2) {
                assert!(s.lkw_curvature(&x, i).unwrap().abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sphere_eigenvalues_scale_inversely_with_radius() {
    for r in [0.5, 2.0] {
        let shape = SmoothShape::sphere(1.0).unwrap().scaled(r).unwrap();
        let s = &shape.strata[0];
        let x = s.param(&[0.9, 2.0]);
        let v = x.normalize();
        for l in s.second_form(&x, &v).unwrap().eigenvalues() {
            assert!((l + 1.0 / r).abs() < 1e-12);
        }
    }
}
