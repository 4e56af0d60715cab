use std::process::Command as Proc;

use stratlk_cli::{emit_plot_data, execute, Command, RunConfig, VerificationReport};

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_stratlk"))
}

fn config(command: Command, shape: &str, samples: usize) -> RunConfig {
    RunConfig { command, shape: Some(shape.into()), samples, seed: 7, ..RunConfig::default() }
}

#[test]
fn cube_verify_plot_has_reference_column() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    let report = dir.path().join("report.json");
    let status = bin()
        .args(["verify", "--shape", "cube", "--samples", "300", "--seed", "3"])
        .arg("--plot")
        .arg(&plot)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = std::fs::read_to_string(&plot).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,k,value,se,reference"));
    let body: Vec<&str> = lines.collect();
    // Lambda and L for q = 0..3.
    assert_eq!(body.len(), 8);
    for line in body {
        let reference: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(reference > 0.99);
    }
    let rep: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.config.seed, 3);
}

#[test]
fn local_rays_passes() {
    let out = bin().args(["local", "--germ", "rays:3", "--samples", "1000"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS local identity k=1"));
}

#[test]
fn torus_euler_characteristic_is_exact() {
    let out = execute(&RunConfig { ks: vec![0], ..config(Command::Measure, "torus:2:1", 1) }).unwrap();
    let side = &out.report.rows[0].sides[0];
    assert_eq!((side.value, side.std_error), (0.0, 0.0));
    assert!(out.report.pass);
}

#[test]
fn thread_count_does_not_change_values() {
    for cmd in [Command::Verify, Command::Kinematic] {
        let base = config(cmd, "cube", 200);
        let serial = execute(&RunConfig { threads: Some(1), ..base.clone() }).unwrap();
        let parallel = execute(&RunConfig { threads: Some(4), ..base }).unwrap();
        for (a, b) in serial.report.rows.iter().zip(&parallel.report.rows) {
            for (x, y) in a.sides.iter().zip(&b.sides) {
                assert_eq!(x.value.to_bits(), y.value.to_bits(), "{cmd} {}", x.name);
                assert_eq!(x.std_error.to_bits(), y.std_error.to_bits());
            }
        }
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "measure", "shape": "sphere:1", "ks": [0], "seed": 9}"#).unwrap();
    let report = dir.path().join("r.json");
    let status = bin().arg("measure").arg("--config").arg(&cfg).arg("--seed").arg("11").arg("--report").arg(&report).output().unwrap().status;
    assert!(status.success());
    let rep: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep.config.seed, 11);
    assert_eq!(rep.config.shape.as_deref(), Some("sphere:1"));
    assert_eq!(rep.rows[0].sides[0].value, 2.0);
}

#[test]
fn usage_errors_exit_2() {
    let out = bin().args(["polar"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["measure", "--shape", "dodecahedron"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn empty_plot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.csv");
    let out = execute(&RunConfig::default()).unwrap();
    emit_plot_data(&out.report, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn doubling_samples_shrinks_standard_errors() {
    let se = |samples| {
        let out = execute(&RunConfig { ks: vec![1, 2], ..config(Command::Measure, "cube", samples) }).unwrap();
        out.report.rows.iter().map(|r| r.sides[0].std_error).collect::<Vec<_>>()
    };
    for (a, b) in se(1000).into_iter().zip(se(2000)) {
        let factor = a / b;
        assert!((1.2..=1.7).contains(&factor), "{a} -> {b}");
    }
}
