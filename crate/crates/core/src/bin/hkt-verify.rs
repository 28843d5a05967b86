use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hkt_core::report::Tolerances;
use hkt_core::suites::{run_suite, ScenarioConfig, Suite};

/// Numerical verification of quaternionic Dolbeault identities and HKT constructions.
///
/// Exit status: 0 if every record passes, 1 if any record fails, 2 on usage or
/// configuration errors.
#[derive(Parser)]
#[command(name = "hkt-verify", version)]
struct Cli {
    #[command(subcommand)]
    suite: SuiteCommand,
}

#[derive(Subcommand)]
enum SuiteCommand {
    /// sl(2) relations, weight dimensions and the (1,1) invariance criterion.
    Algebra(Options),
    /// ∂, ∂_J identities and the d₊ ladder on random polynomial fields.
    Bicomplex(Options),
    /// Metric ↔ Ω round trips and strict q-positivity.
    Qpos(Options),
    /// Hyperholomorphic checks for a catalog connection.
    Bundle(Options),
    /// HKT structure on the total space of the bundle.
    Totspace(Options),
    /// HKT structure on the Hopf-type quotient.
    Hopf(Options),
    /// Every suite in turn.
    All(Options),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Options {
    /// Quaternionic dimension of the base.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Catalog connection: flat, tangent, bpst, direct-sum(F,F*), nonholo-demo.
    #[arg(long, default_value = "bpst")]
    bundle: String,
    /// Scale of the Hopf quotient; |q| must not be 0 or 1.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Random probe vectors per point for positivity checks.
    #[arg(long, default_value_t = 16)]
    probes: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    tol_algebra: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tol_sl2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tol_bicomplex: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tol_second_order: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tol_positivity: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time in the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

impl Options {
    fn config(&self) -> ScenarioConfig {
        let d = Tolerances::default();
        ScenarioConfig {
            n: self.n,
            bundle: self.bundle.clone(),
            q: self.q,
            samples: self.samples,
            probes: self.probes,
            seed: self.seed,
            tolerances: Tolerances {
                algebra: self.tol_algebra.unwrap_or(d.algebra),
                sl2: self.tol_sl2.unwrap_or(d.sl2),
                bicomplex: self.tol_bicomplex.unwrap_or(d.bicomplex),
                second_order: self.tol_second_order.unwrap_or(d.second_order),
                positivity: self.tol_positivity.unwrap_or(d.positivity),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, opts) = match &cli.suite {
        SuiteCommand::Algebra(o) => (Suite::Algebra, o),
        SuiteCommand::Bicomplex(o) => (Suite::Bicomplex, o),
        SuiteCommand::Qpos(o) => (Suite::Qpos, o),
        SuiteCommand::Bundle(o) => (Suite::Bundle, o),
        SuiteCommand::Totspace(o) => (Suite::Totspace, o),
        SuiteCommand::Hopf(o) => (Suite::Hopf, o),
        SuiteCommand::All(o) => (Suite::All, o),
    };
    let start = Instant::now();
    let mut report = match run_suite(&opts.config(), suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hkt-verify: {e}");
            return ExitCode::from(2);
        }
    };
    if opts.timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    let body = match opts.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    match &opts.out {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("hkt-verify: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
