use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use chow_slope::cli::{run, write_outputs, Mode, RunConfig};

/// Slope of the Aubin-Yau energy along Bergman geodesics on toric surfaces:
/// exact Newton-polytope face formula, direct numeric oracle, or both.
#[derive(Parser, Debug)]
#[command(name = "chow-slope", version, about)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Override the config's mode (formula | oracle | both).
    #[arg(long)]
    mode: Option<Mode>,

    /// Override the config's quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,

    /// Override the config's u grid, comma separated (e.g. 8,10,12,14,16).
    #[arg(long, value_parser = parse_u_grid)]
    u_grid: Option<std::vec::Vec<f64>>,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write the oracle sample table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Print progress to stderr.
    #[arg(long)]
    verbose: bool,
}

fn parse_u_grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad u value {t:?}: {e}")))
        .collect()
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> chow_slope::Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(tol) = args.rel_tol {
        config.rel_tol = tol;
    }
    if let Some(grid) = &args.u_grid {
        config.u_grid = grid.clone();
    }
    if args.verbose {
        eprintln!(
            "running mode {:?} at rel_tol {} on {} polygon vertices",
            config.mode,
            config.rel_tol,
            config.polygon_vertices.len()
        );
    }
    let report = run(&config)?;
    if args.verbose {
        if let Some(f) = &report.formula {
            eprintln!("formula slope {}", f.mu);
        }
        if let Some(o) = &report.oracle {
            eprintln!("oracle slope {}", o.fitted_slope);
        }
    }
    write_outputs(&report, args.out.as_deref(), args.csv.as_deref())?;
    if args.out.is_none() {
        println!("{}", chow_slope::cli::report_json(&report)?);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
