//! `qcurrent`: runs the verification suites and writes reports.
//!
//! Settings are resolved as defaults, then the `--config` JSON file, then
//! individual flags. Exit status: 0 when every check passes, 1 when a check
//! fails, 2 on configuration or I/O errors.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Parser, Subcommand};
use qcurrent::irreps::Spin;

use config::{parse_spin, ConfigError, Format, RunConfig};
use report::FullReport;
use suites::SuiteOutput;

#[derive(Debug, Parser)]
#[command(name = "qcurrent", version, about = "Numerical checks for q-deformed current algebras on the disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Commutation relations of the deformed spin irreps and current generators.
    VerifyAlgebra,
    /// Cocycle identity, homomorphism and pseudo-unitarity of the Möbius action.
    VerifyCocycle,
    /// Coherent-vector representation: isometry, generators, dense cross-check.
    VerifyRep,
    /// Highest-weight property of the vacuum.
    HighestWeight,
    /// Every suite, one combined report.
    ReportAll,
    /// Print the resolved configuration as JSON and exit.
    ShowConfig,
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run a single deformation parameter instead of the configured grid.
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Largest spin, e.g. `8`, `12.5` or `25/2`.
    #[arg(long, global = true, value_parser = parse_spin)]
    spin_max: Option<Spin>,
    /// Bergman truncation degree for the cocycle suite.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    radial_order: Option<usize>,
    #[arg(long, global = true)]
    angular_order: Option<usize>,
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it the JSON report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write mesh nodes, weights and sampled test functions as CSV.
    #[arg(long, global = true)]
    dump_mesh: Option<PathBuf>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(q) = self.q {
            cfg.q_values = vec![q];
        }
        if let Some(j) = self.spin_max {
            cfg.spin_max = j;
        }
        if let Some(n) = self.degree {
            cfg.bergman_degree = n;
        }
        if let Some(r) = self.radial_order {
            cfg.radial_order = r;
        }
        if let Some(a) = self.angular_order {
            cfg.angular_order = a;
        }
        if let Some(s) = self.fd_step {
            cfg.fd_step = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(command: &Command, cfg: &RunConfig) -> Vec<SuiteOutput> {
    match command {
        Command::VerifyAlgebra => vec![suites::verify_algebra(cfg)],
        Command::VerifyCocycle => vec![suites::verify_cocycle(cfg)],
        Command::VerifyRep => vec![suites::verify_rep(cfg)],
        Command::HighestWeight => vec![suites::highest_weight(cfg)],
        Command::ReportAll => vec![
            suites::verify_algebra(cfg),
            suites::verify_cocycle(cfg),
            suites::verify_rep(cfg),
            suites::highest_weight(cfg),
        ],
        Command::ShowConfig => Vec::new(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Command::ShowConfig = cli.command {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    if let Some(path) = &cli.flags.dump_mesh {
        if let Err(e) = suites::dump_mesh(&cfg, path) {
            eprintln!("error: cannot write mesh dump {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }

    let started = SystemTime::now();
    let clock = Instant::now();
    let outputs = run(&cli.command, &cfg);
    let report = FullReport::new(cfg.clone(), outputs, started, clock.elapsed());

    for suite in &report.suites {
        for c in &suite.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            eprintln!(
                "{status} {}: {}  residual {:.3e}  tolerance {:.1e}{}",
                suite.suite,
                c.name,
                c.residual,
                c.tolerance,
                c.error.as_ref().map(|e| format!("  ({e})")).unwrap_or_default()
            );
        }
    }

    match &cfg.out_dir {
        Some(dir) => match report.write(dir, cfg.format) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: cannot write report to {}: {e}", dir.display());
                return ExitCode::from(2);
            }
        },
        None => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }

    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
