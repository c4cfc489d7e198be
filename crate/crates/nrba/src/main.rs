use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nrba::export::{num, write_json, Table};
use nrba::pipeline::{run_patterns, run_pipeline, write_synthetic_bundle};
use nrba::{NrbaConfig, NrbaError, Result};
use nrba_core::simlab::{
    bias_contrast, ppmm_recovery, run_cell, variance_contrast, Cell, Method, RecoveryConfig,
    ComparisonConfig,
};
use nrba_core::simlab::synth::ECLS_LIKE_N;

#[derive(Parser)]
#[command(name = "nrba", version, about = "Survey nonresponse bias analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full ten-step analysis.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated sensitivity grid, e.g. 0,0.5,1.
        #[arg(long, value_delimiter = ',')]
        phi: Option<Vec<f64>>,
    },
    /// Missing-data patterns only.
    Patterns {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulation study of complete-case, IPW and MI estimators, plus the
    /// pattern-mixture recovery check.
    Simulate {
        /// Cells to run, e.g. LLL,HHL (default: all eight).
        #[arg(long, value_delimiter = ',')]
        cells: Option<Vec<String>>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Replicates for the recovery check; 0 skips it.
        #[arg(long, default_value_t = 200)]
        recovery_reps: usize,
        #[arg(long, default_value = "nrba_sim")]
        out: PathBuf,
    },
    /// Write the synthetic example dataset and its configuration.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value_t = ECLS_LIKE_N)]
        n: usize,
    },
}

fn load_config(path: &Path, out: Option<PathBuf>) -> Result<NrbaConfig> {
    let mut cfg = NrbaConfig::load(path)?;
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    Ok(cfg)
}

fn simulate(
    cells: Option<Vec<String>>,
    reps: Option<usize>,
    n: Option<usize>,
    seed: Option<u64>,
    recovery_reps: usize,
    out: &Path,
) -> Result<()> {
    let mut cfg = ComparisonConfig::default();
    if let Some(r) = reps {
        cfg.reps = r;
    }
    if let Some(n) = n {
        cfg.n = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let cells = match cells {
        Some(labels) => labels
            .iter()
            .map(|l| Cell::parse(l.trim()))
            .collect::<nrba_core::Result<Vec<_>>>()?,
        None => Cell::all(),
    };
    std::fs::create_dir_all(out).map_err(|e| NrbaError::io(out, e))?;

    let mut t = Table::new([
        "cell",
        "method",
        "bias",
        "bias_mcse",
        "variance",
        "variance_mcse",
        "bias_z_vs_cc",
        "variance_z_vs_cc",
    ]);
    let mut reports = Vec::new();
    for cell in cells {
        let r = run_cell(cell, &cfg)?;
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        for res in &r.results {
            let (bz, vz) = if res.method == Method::CompleteCase {
                ("NA".to_string(), "NA".to_string())
            } else {
                let b = bias_contrast(&r, res.method, Method::CompleteCase);
                let v = variance_contrast(&r, res.method, Method::CompleteCase);
                (num(b.z()), num(v.z()))
            };
            t.push(vec![
                r.cell.clone(),
                res.method.as_str().into(),
                num(res.bias),
                num(res.mcse),
                num(res.variance),
                num(res.variance_mcse),
                bz,
                vz,
            ]);
        }
        println!("cell {} done", r.cell);
        reports.push(r);
    }
    t.write(&out.join("simulation.csv"))?;
    write_json(&out.join("simulation.json"), &reports)?;

    if recovery_reps > 0 {
        let rc = RecoveryConfig {
            reps: recovery_reps,
            ..RecoveryConfig::default()
        };
        let mut t = Table::new(["phi_star", "phi", "bias", "mcse", "mean_se"]);
        let mut results = Vec::new();
        for phi_star in [0.0, 0.5, 1.0] {
            let r = ppmm_recovery(phi_star, &rc)?;
            for row in &r.rows {
                t.push(vec![
                    num(phi_star),
                    num(row.phi),
                    num(row.bias),
                    num(row.mcse),
                    num(row.mean_se),
                ]);
            }
            results.push(r);
        }
        t.write(&out.join("ppmm_recovery.csv"))?;
        write_json(&out.join("ppmm_recovery.json"), &results)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            config,
            out,
            seed,
            phi,
        } => {
            let mut cfg = load_config(&config, out)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(p) = phi {
                cfg.phis = p;
            }
            cfg.validate(&config)?;
            let report = run_pipeline(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: step {} [{}] {}", w.step, w.code, w.message);
            }
            println!(
                "wrote {} artifacts to {}",
                report.artifacts.len(),
                cfg.output_dir.display()
            );
        }
        Command::Patterns { config, out } => {
            let cfg = load_config(&config, out)?;
            let s = run_patterns(&cfg)?;
            println!(
                "{} units, {} respondents, {} patterns, monotone: {}",
                s.n,
                s.respondents,
                s.patterns.len(),
                s.monotone
            );
        }
        Command::Simulate {
            cells,
            reps,
            n,
            seed,
            recovery_reps,
            out,
        } => simulate(cells, reps, n, seed, recovery_reps, &out)?,
        Command::Synth { out, seed, n } => {
            let path = write_synthetic_bundle(&out, n, seed)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
