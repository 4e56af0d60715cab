//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use stratlk::geomkit::{ball_volume, sample_unit_sphere, LinearSubspace};
use stratlk::germ::{verify_local_identities, ConeGerm, GermBudget};
use stratlk::lkmeasure::{exchange_lambda0, kinematic_check, lk_measure, morse_index_sum, steiner_oracle, LkOptions, Shape};
use stratlk::plstrata::{catalog, write_plstrat, StratifiedComplex};
use stratlk::polar::{polar_length, polar_sample, PolarOptions};
use stratlk::{Error, Estimate, RandomSource};

type Outcome = Result<Vec<String>, String>;

struct Criterion {
    id: usize,
    title: &'static str,
    limit_seconds: f64,
    run: fn() -> Outcome,
}

fn shape(name: &str) -> Shape {
    Shape::from_catalog(name).unwrap()
}

fn lk_opts() -> LkOptions {
    LkOptions { directions_per_cell: 4000, region_samples: 4000, ..LkOptions::default() }
}

fn fail_if(bad: bool, detail: String, out: &mut Vec<String>, failures: &mut Vec<String>) {
    if bad {
        failures.push(detail);
    } else {
        out.push(detail);
    }
}

fn finish(out: Vec<String>, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(failures.join("; "))
    }
}

fn pl_morse() -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    for (name, chi) in [("octahedron", 2i64), ("torus7", 0), ("cube-boundary", 2)] {
        let s = shape(name);
        let mut rng = RandomSource::new(101).labelled(name).rng();
        let mut generic = 0;
        let mut redrawn = 0;
        let mut wrong = 0;
        while generic < 100 {
            let v = sample_unit_sphere(s.ambient_dim(), &mut rng);
            match morse_index_sum(&s, &v) {
                Ok(total) => {
                    generic += 1;
                    wrong += usize::from(total != chi);
                }
                Err(Error::DegenerateDirection(_)) => redrawn += 1,
                Err(e) => return Err(format!("{name}: {e}")),
            }
        }
        fail_if(wrong > 0, format!("{name}: {wrong}/100 sums differ from chi = {chi} ({redrawn} redrawn)"), &mut out, &mut failures);
    }
    finish(out, failures)
}

fn exchange() -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    for (name, chi) in [("sphere:1", 2.0), ("torus:2:1", 0.0), ("octahedron", 2.0)] {
        let r = exchange_lambda0(&shape(name), 2000, &RandomSource::new(202)).map_err(|e| e.to_string())?;
        let e = &r.estimate;
        let ok = (e.value - chi).abs() <= 3.0 * e.std_error + 1e-12;
        fail_if(!ok, format!("{name}: {:.6} ± {:.2e} vs {chi}", e.value, e.std_error), &mut out, &mut failures);
    }
    finish(out, failures)
}

fn cube_oracle() -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    let cube = shape("cube");
    let src = RandomSource::new(303);
    let opts = LkOptions { directions_per_cell: 20_000, ..lk_opts() };
    let mut lambda = vec![];
    for (k, want) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
        let e = lk_measure(&cube, k, &opts, &src.substream(k as u64)).map_err(|e| e.to_string())?;
        let ok = (e.value - want).abs() <= (0.01 * want).max(3.0 * e.std_error) + 1e-12;
        fail_if(!ok, format!("Lambda_{k} = {:.5} ± {:.1e}", e.value, e.std_error), &mut out, &mut failures);
        lambda.push(e);
    }
    let eps: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
    let fit = steiner_oracle(&cube, &eps, 48, &src.labelled("steiner")).map_err(|e| e.to_string())?;
    for (k, (c, l)) in fit.coefficients.iter().zip(&lambda).enumerate() {
        let target = l.value * ball_volume(3 - k as i64).unwrap();
        let rel = (c.value - target).abs() / target;
        fail_if(rel > 0.02, format!("Steiner c_{k} off by {:.2}%", 100.0 * rel), &mut out, &mut failures);
    }
    finish(out, failures)
}

fn two_routes(name: &str, targets: &[f64]) -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    let s = shape(name);
    let src = RandomSource::new(404).labelled(name);
    let opts = PolarOptions::default();
    for (q, &want) in targets.iter().enumerate() {
        let t = Instant::now();
        let l = polar_length(&s, q, 1000, &opts, &src.substream(q as u64)).map_err(|e| e.to_string())?;
        let lam = lk_measure(&s, q, &lk_opts(), &src.labelled("lambda").substream(q as u64)).map_err(|e| e.to_string())?;
        let (a, b) = (&l.estimate, &lam);
        let slack = 1e-9 * want.abs().max(1.0);
        let pair = (a.value - b.value).abs() <= 3.0 * a.combined_se(b) + slack;
        let closed = (a.value - want).abs() <= 3.0 * a.std_error + slack;
        fail_if(
            !(pair && closed),
            format!(
                "{name} q={q}: L = {:.5} ± {:.1e}, Lambda = {:.5} ± {:.1e}, exact {want:.5} ({:.1}s)",
                a.value,
                a.std_error,
                b.value,
                b.std_error,
                t.elapsed().as_secs_f64()
            ),
            &mut out,
            &mut failures,
        );
    }
    finish(out, failures)
}

fn main_theorem_cube() -> Outcome {
    two_routes("cube", &[1.0, 3.0, 3.0, 1.0])
}

fn main_theorem_disk() -> Outcome {
    two_routes("disk:1", &[1.0, PI, PI])
}

fn main_theorem_sphere() -> Outcome {
    two_routes("sphere:1", &[2.0, 0.0, 4.0 * PI])
}

fn main_theorem_torus() -> Outcome {
    two_routes("torus:2:1", &[0.0, 0.0, 8.0 * PI * PI])
}

fn kinematic() -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    let shapes = [("cube", shape("cube")), ("ball:1", shape("ball:1")), ("ball:1 x1.7", shape("ball:1").scaled(1.7).unwrap())];
    for k in [1, 2] {
        let mut ratios: Vec<(String, Estimate)> = vec![];
        for (name, s) in &shapes {
            let r = kinematic_check(s, k, 20_000, &lk_opts(), &RandomSource::new(505).labelled(name)).map_err(|e| e.to_string())?;
            let ratio = r.ratio.ok_or(format!("{name} k={k}: Lambda is zero"))?;
            ratios.push((name.to_string(), ratio));
        }
        let lo = ratios.iter().map(|r| r.1.value).fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().map(|r| r.1.value).fold(f64::NEG_INFINITY, f64::max);
        let spread = hi / lo - 1.0;
        let listed: Vec<String> = ratios.iter().map(|(n, e)| format!("{n} {:.4}", e.value)).collect();
        fail_if(spread > 0.05, format!("k={k}: {} (spread {:.2}%)", listed.join(", "), 100.0 * spread), &mut out, &mut failures);
    }
    finish(out, failures)
}

fn octant_link() -> ConeGerm {
    let v = |c: [f64; 3]| DVector::from_vec(c.to_vec());
    let link = StratifiedComplex::from_facets(vec![v([1.0, 0.0, 0.0]), v([0.0, 1.0, 0.0]), v([0.0, 0.0, 1.0])], &[vec![0, 1, 2]]).unwrap();
    let path = std::env::temp_dir().join(format!("acceptance-octant-{}.plstrat", std::process::id()));
    fs::write(&path, write_plstrat(&link)).unwrap();
    let x = ConeGerm::from_catalog(&format!("cone-link:{}", path.display())).unwrap();
    fs::remove_file(&path).ok();
    x
}

fn local_identities() -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    let budget = GermBudget::default();
    let src = RandomSource::new(606);
    for m in [2usize, 3, 5] {
        let x = ConeGerm::rays(m).unwrap();
        let h = m as f64 / 2.0;
        let rep = verify_local_identities(&x, &[0, 1], &budget, &src.labelled(&x.name)).map_err(|e| e.to_string())?;
        for (row, want) in rep.rows.iter().zip([1.0 - h, h]) {
            let closed = [&row.sigma_diff, &row.l_loc, &row.lambda_loc]
                .iter()
                .all(|e| (e.value - want).abs() <= 3.0 * e.std_error + 1e-12);
            fail_if(
                !(row.pass && closed),
                format!("rays:{m} k={}: {:.4} / {:.4} / {:.4} vs {want}", row.k, row.sigma_diff.value, row.l_loc.value, row.lambda_loc.value),
                &mut out,
                &mut failures,
            );
        }
    }
    let half = ConeGerm::halfplane(3).unwrap();
    let rep = verify_local_identities(&half, &[2], &budget, &src.labelled("halfplane:3")).map_err(|e| e.to_string())?;
    let row = &rep.rows[0];
    let closed = [&row.sigma_diff, &row.l_loc, &row.lambda_loc].iter().all(|e| (e.value - 0.5).abs() <= 3.0 * e.std_error + 1e-12);
    fail_if(!(row.pass && closed), format!("halfplane:3 k=2: {:.4} / {:.4} / {:.4}", row.sigma_diff.value, row.l_loc.value, row.lambda_loc.value), &mut out, &mut failures);

    let germs = [
        ConeGerm::rays(2).unwrap(),
        ConeGerm::rays(3).unwrap(),
        ConeGerm::rays(5).unwrap(),
        ConeGerm::halfplane(2).unwrap(),
        ConeGerm::halfplane(3).unwrap(),
        ConeGerm::cone_circle(0.5).unwrap(),
        octant_link(),
    ];
    for x in &germs {
        let t = Instant::now();
        let rep = verify_local_identities(x, &[0], &budget, &src.labelled(&x.name).labelled("refined")).map_err(|e| e.to_string())?;
        let c = rep.checks.iter().find(|c| c.name.starts_with("L_0^loc")).ok_or("missing refined check")?;
        fail_if(
            !c.pass || t.elapsed().as_secs_f64() > 120.0,
            format!("{}: L_0^loc = {:.4}, 1 - sigma_1 = {:.4}", x.name, c.lhs.value, c.rhs.value),
            &mut out,
            &mut failures,
        );
    }
    finish(out, failures)
}

fn plane(cols: &[[f64; 3]]) -> LinearSubspace {
    let vs: Vec<DVector<f64>> = cols.iter().map(|c| DVector::from_vec(c.to_vec())).collect();
    LinearSubspace::from_spanning(3, &vs).unwrap()
}

fn degeneracy() -> Outcome {
    let mut out = vec![];
    let mut failures = vec![];
    let mut names: Vec<String> = catalog::NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(["sphere:1", "torus:2:1", "disk:1", "hemisphere:1", "circle:1", "ellipse:2:1", "ball:1"].map(String::from));
    let opts = PolarOptions::default();
    for name in &names {
        let s = shape(name);
        let (mut attempted, mut rejected) = (0, 0);
        for q in 0..=s.dim() {
            let l = polar_length(&s, q, 500, &opts, &RandomSource::new(707).labelled(name).substream(q as u64)).map_err(|e| format!("{name}: {e}"))?;
            attempted += l.attempted;
            rejected += l.rejected;
        }
        let rate = rejected as f64 / attempted.max(1) as f64;
        fail_if(rate >= 0.01, format!("{name}: rejection {:.3}%", 100.0 * rate), &mut out, &mut failures);
    }
    let cube = shape("cube");
    let axis_planes = [
        plane(&[[1.0, 0.0, 0.0]]),
        plane(&[[0.0, 1.0, 0.0]]),
        plane(&[[0.0, 0.0, 1.0]]),
        plane(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        plane(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        plane(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
    ];
    let flagged = axis_planes
        .iter()
        .filter(|p| polar_sample(&cube, p, &opts, &RandomSource::new(708)).map(|s| s.is_degenerate()).unwrap_or(false))
        .count();
    fail_if(flagged != axis_planes.len(), format!("cube axis-aligned: {flagged}/{} flagged", axis_planes.len()), &mut out, &mut failures);
    let torus = shape("torus:2:1");
    let axial: Vec<LinearSubspace> = (0..12)
        .map(|i| {
            let phi = 0.37 + i as f64 * PI / 6.0;
            plane(&[[0.0, 0.0, 1.0], [phi.cos(), phi.sin(), 0.0]])
        })
        .chain(std::iter::once(plane(&[[0.0, 0.0, 1.0]])))
        .collect();
    let flagged = axial
        .iter()
        .filter(|p| polar_sample(&torus, p, &opts, &RandomSource::new(709)).map(|s| s.is_degenerate()).unwrap_or(false))
        .count();
    fail_if(flagged != axial.len(), format!("torus axial: {flagged}/{} flagged", axial.len()), &mut out, &mut failures);
    finish(out, failures)
}

fn fingerprint() -> Vec<u64> {
    let src = RandomSource::new(808);
    let mut v = vec![];
    let mut push = |e: &Estimate| v.extend([e.value.to_bits(), e.std_error.to_bits()]);
    push(&exchange_lambda0(&shape("torus:2:1"), 200, &src).unwrap().estimate);
    push(&lk_measure(&shape("cube"), 1, &LkOptions { directions_per_cell: 300, region_samples: 300, ..LkOptions::default() }, &src).unwrap());
    push(&polar_length(&shape("sphere:1"), 1, 100, &PolarOptions::default(), &src).unwrap().estimate);
    push(&polar_length(&shape("cube"), 2, 100, &PolarOptions::default(), &src).unwrap().estimate);
    let kin = kinematic_check(&shape("ball:1"), 1, 300, &LkOptions::default(), &src).unwrap();
    push(&kin.integral);
    let budget = GermBudget { sigma_samples: 300, planes: 100, ..GermBudget::default() };
    let rep = verify_local_identities(&ConeGerm::rays(3).unwrap(), &[0, 1], &budget, &src).unwrap();
    for r in &rep.rows {
        push(&r.sigma_diff);
        push(&r.lambda_loc);
    }
    v
}

fn determinism() -> Outcome {
    let in_pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(fingerprint);
    let serial = in_pool(1);
    let again = in_pool(1);
    let parallel = in_pool(4);
    if serial == again && serial == parallel {
        Ok(vec![format!("{} values bitwise equal across reruns and 1 vs 4 threads", serial.len())])
    } else {
        Err("values differ between runs".into())
    }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "PL Morse index sums equal chi", limit_seconds: 10.0, run: pl_morse },
        Criterion { id: 2, title: "exchange formula for Lambda_0", limit_seconds: 60.0, run: exchange },
        Criterion { id: 3, title: "cube intrinsic volumes and Steiner fit", limit_seconds: 120.0, run: cube_oracle },
        Criterion { id: 4, title: "L_q = Lambda_q, cube", limit_seconds: 180.0, run: main_theorem_cube },
        Criterion { id: 4, title: "L_q = Lambda_q, disk", limit_seconds: 180.0, run: main_theorem_disk },
        Criterion { id: 4, title: "L_q = Lambda_q, sphere", limit_seconds: 180.0, run: main_theorem_sphere },
        Criterion { id: 4, title: "L_q = Lambda_q, torus", limit_seconds: 180.0, run: main_theorem_torus },
        Criterion { id: 5, title: "kinematic ratio constancy", limit_seconds: 180.0, run: kinematic },
        Criterion { id: 6, title: "local identities of germs", limit_seconds: 120.0 * 10.0, run: local_identities },
        Criterion { id: 7, title: "degeneracy discipline", limit_seconds: f64::INFINITY, run: degeneracy },
        Criterion { id: 8, title: "determinism", limit_seconds: f64::INFINITY, run: determinism },
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut all_pass = true;
    for c in criteria.iter().filter(|c| filter.is_none_or(|f| f == c.id)) {
        let t = Instant::now();
        let outcome = (c.run)();
        let secs = t.elapsed().as_secs_f64();
        let (pass, details) = match outcome {
            Ok(d) if secs <= c.limit_seconds => (true, d),
            Ok(d) => (false, [d, vec![format!("over time limit {}s", c.limit_seconds)]].concat()),
            Err(e) => (false, vec![e]),
        };
        all_pass &= pass;
        println!("criterion {}: {} - {} ({secs:.1}s)", c.id, if pass { "PASS" } else { "FAIL" }, c.title);
        for d in details {
            println!("    {d}");
        }
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
