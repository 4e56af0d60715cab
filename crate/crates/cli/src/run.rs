//! Executes a [`RunConfig`].

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use stratlk::germ::{verify_local_identities, ConeGerm, GermBudget, SliceOptions};
use stratlk::lkmeasure::{kinematic_check, lk_measure, Geometry, LkOptions, Shape, StratumRef};
use stratlk::plstrata::catalog;
use stratlk::polar::{polar_length, AlphaMode, PlaneRecord, PolarOptions};
use stratlk::{Estimate, RandomSource};

use crate::config::{Command, RunConfig};
use crate::reference::{germ_local, shape_lambda};
use crate::report::{Row, Side, VerificationReport};
use crate::CliError;

/// Flat measure constant of the kinematic formula for lines and planes in R^3.
pub const KINEMATIC_CONSTANT: f64 = 0.5;

/// A report plus the per-plane records of polar runs.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: VerificationReport,
    pub planes: Vec<(usize, PlaneRecord)>,
}

fn agree(a: &Estimate, b: &Estimate, tol: f64) -> bool {
    stratlk::germ::agree(a, b, tol)
}

fn lk_options(cfg: &RunConfig) -> LkOptions {
    LkOptions { directions_per_cell: cfg.samples, region_samples: cfg.samples, ..LkOptions::default() }
}

fn polar_options(cfg: &RunConfig) -> Result<PolarOptions, CliError> {
    let alpha_mode = AlphaMode::from_str(&cfg.alpha_mode).map_err(CliError::Usage)?;
    Ok(PolarOptions { alpha_mode, ..PolarOptions::default() })
}

fn ks_or(cfg: &RunConfig, default: impl Iterator<Item = usize>) -> Vec<usize> {
    if cfg.ks.is_empty() {
        default.collect()
    } else {
        cfg.ks.clone()
    }
}

/// `Lambda_k`, with `Lambda_0 = chi` taken exactly on the whole shape.
fn lambda(shape: &Shape, k: usize, cfg: &RunConfig, src: &RandomSource) -> Result<(Estimate, String), CliError> {
    if k == 0 && shape.region.is_everything() {
        let method = match shape.geometry {
            Geometry::Smooth(_) => "exact Gauss-Bonnet route",
            Geometry::Pl(_) => "exact Euler characteristic",
        };
        return Ok((Estimate::exact(shape.euler_characteristic() as f64), method.into()));
    }
    let method = match shape.geometry {
        Geometry::Smooth(_) => "curvature quadrature",
        Geometry::Pl(_) => "normal Morse index Monte-Carlo",
    };
    Ok((lk_measure(shape, k, &lk_options(cfg), src)?, method.into()))
}

fn reference_pass(e: &Estimate, reference: Option<f64>, tol: f64) -> bool {
    reference.is_none_or(|r| agree(e, &Estimate::exact(r), tol))
}

fn measure(cfg: &RunConfig, name: &str, src: &RandomSource) -> Result<Vec<Row>, CliError> {
    let shape = Shape::from_catalog(name)?;
    let mut rows = Vec::new();
    for k in ks_or(cfg, 0..=shape.ambient_dim()) {
        let t = Instant::now();
        let (e, method) = lambda(&shape, k, cfg, &src.substream(k as u64))?;
        let reference = shape_lambda(&shape, name, k);
        rows.push(Row {
            quantity: "Lambda".into(),
            k,
            pass: reference_pass(&e, reference, cfg.tolerance),
            sides: vec![Side::new("Lambda", &e)],
            reference,
            resampled: 0,
            wall_seconds: t.elapsed().as_secs_f64(),
            note: Some(method),
        });
    }
    Ok(rows)
}

fn polar(cfg: &RunConfig, name: &str, src: &RandomSource, verify: bool) -> Result<(Vec<Row>, Vec<(usize, PlaneRecord)>), CliError> {
    let shape = Shape::from_catalog(name)?;
    let opts = polar_options(cfg)?;
    let mut rows = Vec::new();
    let mut planes = Vec::new();
    for q in ks_or(cfg, 0..=shape.dim()) {
        let t = Instant::now();
        let sub = src.substream(q as u64);
        let l = polar_length(&shape, q, cfg.samples, &opts, &sub.labelled("polar"))?;
        let reference = shape_lambda(&shape, name, q);
        let side = Side::new("L", &l.estimate);
        let (sides, pass) = if verify {
            let (lam, _) = lambda(&shape, q, cfg, &sub.labelled("lambda"))?;
            let pass = agree(&lam, &l.estimate, cfg.tolerance);
            (vec![Side::new("Lambda", &lam), side], pass)
        } else {
            (vec![side], reference_pass(&l.estimate, reference, cfg.tolerance))
        };
        let note = (l.rejected > 0).then(|| {
            let counts: Vec<String> = l.flag_counts.iter().map(|(k, c)| format!("{k}: {c}")).collect();
            format!("rejection rate {:.4} ({})", l.rejection_rate(), counts.join(", "))
        });
        rows.push(Row {
            quantity: if verify { "Lambda vs L".into() } else { "L".into() },
            k: q,
            sides,
            reference,
            pass,
            resampled: l.rejected,
            wall_seconds: t.elapsed().as_secs_f64(),
            note,
        });
        planes.extend(l.planes.into_iter().map(|p| (q, p)));
    }
    Ok((rows, planes))
}

fn local(cfg: &RunConfig, name: &str, src: &RandomSource) -> Result<Vec<Row>, CliError> {
    let x = ConeGerm::from_catalog(name)?;
    let budget = GermBudget {
        sigma_samples: cfg.samples,
        planes: cfg.samples,
        lk: lk_options(cfg),
        slice: SliceOptions::default(),
        tolerance: cfg.tolerance,
        ..GermBudget::default()
    };
    let ks = ks_or(cfg, 0..=x.ambient_dim());
    let t = Instant::now();
    let rep = verify_local_identities(&x, &ks, &budget, src)?;
    let per_row = t.elapsed().as_secs_f64() / (rep.rows.len() + rep.checks.len()).max(1) as f64;
    let mut rows: Vec<Row> = rep
        .rows
        .iter()
        .map(|r| Row {
            quantity: "local identity".into(),
            k: r.k,
            sides: vec![Side::new("sigma_diff", &r.sigma_diff), Side::new("L_loc", &r.l_loc), Side::new("lambda_loc", &r.lambda_loc)],
            reference: germ_local(&x, r.k),
            pass: r.pass,
            resampled: r.rejected,
            wall_seconds: per_row,
            note: None,
        })
        .collect();
    for (c, k) in rep.checks.iter().zip([x.ambient_dim(), 0]) {
        rows.push(Row {
            quantity: c.name.clone(),
            k,
            sides: vec![Side::new("lhs", &c.lhs), Side::new("rhs", &c.rhs)],
            reference: None,
            pass: c.pass,
            resampled: 0,
            wall_seconds: per_row,
            note: None,
        });
    }
    Ok(rows)
}

fn kinematic(cfg: &RunConfig, name: &str, src: &RandomSource) -> Result<Vec<Row>, CliError> {
    let shape = Shape::from_catalog(name)?;
    let n = shape.ambient_dim();
    let mut rows = Vec::new();
    for k in ks_or(cfg, 1..n) {
        let t = Instant::now();
        let r = kinematic_check(&shape, k, cfg.samples, &lk_options(cfg), &src.substream(k as u64))?;
        let mut sides = vec![];
        let pass = match &r.ratio {
            Some(ratio) => {
                sides.push(Side::new("ratio", ratio));
                agree(ratio, &Estimate::exact(KINEMATIC_CONSTANT), cfg.tolerance)
            }
            None => false,
        };
        sides.push(Side::new("slice_integral", &r.integral));
        sides.push(Side::new("Lambda_n-k", &r.lambda));
        rows.push(Row {
            quantity: "kinematic ratio".into(),
            k,
            sides,
            reference: Some(KINEMATIC_CONSTANT),
            pass,
            resampled: r.rejected,
            wall_seconds: t.elapsed().as_secs_f64(),
            note: r.ratio.is_none().then(|| "Lambda_{n-k} is zero; ratio undefined".to_string()),
        });
    }
    Ok(rows)
}

/// Catalog listing, one entry per line.
pub fn catalog_listing() -> String {
    let mut out = String::from("shapes (PL):");
    for n in catalog::NAMES {
        out += &format!(" {n}");
    }
    out += "\nshapes (smooth): sphere:R torus:R:r disk:R hemisphere:R circle:R ellipse:a:b ball:R\n";
    out += "germs: rays:m halfplane:n cone-circle:theta cone-link:<file>\n";
    out
}

/// Runs the configured command on the current thread pool.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let src = RandomSource::new(cfg.seed);
    let mut planes = Vec::new();
    let rows = match cfg.command {
        Command::Measure => measure(cfg, cfg.shape.as_deref().unwrap_or_default(), &src)?,
        Command::Polar | Command::Verify => {
            let (rows, p) = polar(cfg, cfg.shape.as_deref().unwrap_or_default(), &src, cfg.command == Command::Verify)?;
            planes = p;
            rows
        }
        Command::Local => local(cfg, cfg.germ.as_deref().unwrap_or_default(), &src)?,
        Command::Kinematic => kinematic(cfg, cfg.shape.as_deref().unwrap_or_default(), &src)?,
        Command::Catalog => vec![],
    };
    let report = VerificationReport::new(cfg.clone(), rows, start.elapsed().as_secs_f64());
    Ok(RunOutput { report, planes })
}

/// Runs on a pool of `cfg.threads` workers (all cores when unset).
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            pool.install(|| run(cfg))
        }
        None => run(cfg),
    }
}

fn stratum_label(s: &StratumRef) -> String {
    match s {
        StratumRef::Cell(c) => format!("cell{c}"),
        StratumRef::Smooth(i) => format!("stratum{i}"),
    }
}

/// Column order of the per-plane CSV.
pub const PLANE_COLUMNS: [&str; 8] = ["q", "slot", "attempt", "accepted", "total", "frame", "per_stratum", "flags"];

/// Per-plane audit CSV: the plane frame (column-major, space separated),
/// `m_{S,q}(P, U)` per stratum (`label=value`, `;` separated) and the
/// degeneracy flags of rejected planes.
pub fn write_plane_csv(planes: &[(usize, PlaneRecord)], path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(PLANE_COLUMNS).map_err(io)?;
    for (q, p) in planes {
        let frame: Vec<String> = p.frame.iter().map(|x| x.to_string()).collect();
        let per: Vec<String> = p.per_stratum.iter().map(|(s, v)| format!("{}={v}", stratum_label(s))).collect();
        let flags: Vec<String> = p.flags.iter().map(|f| f.to_string()).collect();
        w.write_record([
            q.to_string(),
            p.slot.to_string(),
            p.attempt.to_string(),
            p.accepted().to_string(),
            p.total.to_string(),
            frame.join(" "),
            per.join(";"),
            flags.join(";"),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
