use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use acns::harness::{self, analyze, diag, Quantity, RunDir, SweepConfig};
use acns::mollify::{verify_approx_inequality, verify_young_inequality, VerifyConfig};
use acns::waveprobe::{strichartz_ensemble, StrichartzVariant};
use acns::Result;

#[derive(Parser)]
#[command(name = "acns", version, about = "Artificial-compressibility Navier-Stokes experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    S1,
    S3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagQuantity {
    Energy,
    Qnorm,
    Shift,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate every eps of the configuration and store the snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run every eps and the incompressible oracle, then write the report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Strichartz ratios over random radial data.
    ProbeWave {
        #[arg(long, value_enum)]
        variant: Variant,
        #[arg(long, default_value_t = 20)]
        samples: u64,
        #[arg(long, num_args = 1.., default_values_t = [1.0, 2.0, 4.0, 8.0])]
        horizon: Vec<f64>,
        #[arg(long, default_value_t = 4096)]
        nr: usize,
    },
    /// Mollifier inequalities over a random ensemble.
    ProbeMollify {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check the Young-type bound with smoothness `s` and exponent `q` instead.
        #[arg(long, num_args = 2, value_names = ["S", "Q"])]
        young: Option<Vec<f64>>,
    },
    /// Per-snapshot diagnostics of one stored run, as CSV.
    Diag {
        #[arg(long)]
        run: PathBuf,
        #[arg(long, value_enum)]
        quantity: DiagQuantity,
    },
    /// Report over the runs stored under a directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { config } => {
            let cfg = SweepConfig::load(&config)?;
            for run in harness::run(&cfg)? {
                println!("{}\t{:?}", run.path.display(), run.meta.status);
            }
            Ok(true)
        }
        Command::Sweep { config } => {
            let report = harness::sweep(&SweepConfig::load(&config)?)?;
            print!("{}", report.to_text());
            Ok(report.passed())
        }
        Command::ProbeWave {
            variant,
            samples,
            horizon,
            nr,
        } => {
            let wanted = match variant {
                Variant::S1 => StrichartzVariant::S1,
                Variant::S3 => StrichartzVariant::S3,
            };
            let seeds: Vec<u64> = (0..samples).collect();
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for row in strichartz_ensemble(&seeds, &horizon, nr)?.into_iter().filter(|r| r.variant == wanted) {
                w.serialize(row).map_err(|e| acns::AcnsError::Config(e.to_string()))?;
            }
            w.flush().map_err(|e| acns::AcnsError::Io { path: "stdout".into(), source: e })?;
            Ok(true)
        }
        Command::ProbeMollify { p, dim, seed, young } => {
            let cfg = VerifyConfig::new(dim, seed);
            let report = match young.as_deref() {
                Some([s, q]) => verify_young_inequality(&cfg, *s, *q, p)?,
                _ => verify_approx_inequality(&cfg, p)?,
            };
            let summary = serde_json::json!({
                "dim": report.dim,
                "s": report.s,
                "q": report.q,
                "p": report.p,
                "stated_exponent": report.stated_exponent,
                "scaling_exponent": report.scaling_exponent,
                "fitted_slope": report.rate.fitted_slope,
                "max_constant": report.max_constant,
                "under_resolved": report.under_resolved,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Command::Diag { run, quantity } => {
            let quantity = match quantity {
                DiagQuantity::Energy => Quantity::Energy,
                DiagQuantity::Qnorm => Quantity::QNorm,
                DiagQuantity::Shift => Quantity::Shift,
            };
            print!("{}", diag(&RunDir::open(&run)?, quantity)?);
            Ok(true)
        }
        Command::Report { dir, format } => {
            let report = analyze(&dir)?;
            match format {
                Format::Csv => print!("{}", report.to_csv()?),
                Format::Json => println!("{}", report.to_json()?),
                Format::Text => print!("{}", report.to_text()),
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
