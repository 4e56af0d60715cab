use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use stratlk_cli::{catalog_listing, emit_plot_data, execute, parse_list, write_plane_csv, Command, RunConfig};

/// Lipschitz-Killing measures and polar lengths of stratified sets.
#[derive(Debug, Parser)]
#[command(name = "stratlk", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Catalog shape, e.g. `cube`, `sphere:1`, `torus:2:1`.
    #[arg(long)]
    shape: Option<String>,
    /// Catalog germ, e.g. `rays:3`, `halfplane:3`, `cone-circle:0.5`.
    #[arg(long)]
    germ: Option<String>,
    /// Comma-separated k values.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated q values (same as --k).
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// `closed-form` or `slice-chi`.
    #[arg(long)]
    alpha_mode: Option<String>,
    /// Pass threshold in combined standard errors.
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-plane CSV path (polar and verify).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Plot CSV path: quantity,k,value,se,reference.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(a: Args) -> Result<RunConfig, stratlk_cli::CliError> {
    let mut c = match &a.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    c.command = a.command;
    if let Some(s) = a.shape {
        c.shape = Some(s);
    }
    if let Some(g) = a.germ {
        c.germ = Some(g);
    }
    if let Some(list) = a.k.or(a.q) {
        c.ks = parse_list(&list)?;
    }
    if let Some(n) = a.samples {
        c.samples = n;
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if a.threads.is_some() {
        c.threads = a.threads;
    }
    if let Some(m) = a.alpha_mode {
        c.alpha_mode = m;
    }
    if let Some(t) = a.tolerance {
        c.tolerance = t;
    }
    c.report = a.report.or(c.report);
    c.csv = a.csv.or(c.csv);
    c.plot = a.plot.or(c.plot);
    Ok(c)
}

fn main() -> ExitCode {
    let cfg = match build_config(Args::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.command == Command::Catalog {
        print!("{}", catalog_listing());
    }
    let out = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for row in &out.report.rows {
        let sides: Vec<String> =
            row.sides.iter().map(|s| format!("{} = {:.6} ± {:.2e}", s.name, s.value, s.std_error)).collect();
        let reference = row.reference.map(|r| format!(" (reference {r:.6})")).unwrap_or_default();
        let verdict = if row.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {} k={}: {}{reference}", row.quantity, row.k, sides.join(", "));
    }
    let written = (|| {
        if let Some(p) = &cfg.report {
            out.report.write_json(p)?;
        }
        if let Some(p) = &cfg.plot {
            emit_plot_data(&out.report, p)?;
        }
        if let Some(p) = &cfg.csv {
            write_plane_csv(&out.planes, p)?;
        }
        Ok::<_, stratlk_cli::CliError>(())
    })();
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if out.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
