use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matreg::commands::{self, Family, Report};
use matreg::formats::parse_k_range;

/// Matrix regularizations of Poisson algebras: fuzzy sphere and torus tables,
/// Moyal checks, defect scans, the matrix model and the full pipeline.
///
/// Exit status: 0 when every verdict passes, 1 when one fails, 2 on bad input.
#[derive(Parser, Debug)]
#[command(name = "matreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Seed for every random input.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the main table as CSV instead of the JSON report.
    #[arg(long)]
    csv: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON configuration document.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Casimir, defect, span and kernel tables of the fuzzy sphere.
    FuzzySphere {
        /// Matrix sizes: `a..b`, `a,b,c` or `a`.
        #[arg(long, default_value = "2..6")]
        k: String,
        /// Degree bound for kernel dimensions.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// Skip the generated-algebra span above this k.
        #[arg(long, default_value_t = 16)]
        span_max_k: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Clock-and-shift identities and spans of the fuzzy torus.
    FuzzyTorus {
        #[arg(long, default_value = "1..8")]
        k: String,
        #[command(flatten)]
        out: Output,
    },
    /// Associativity of random Moyal products and intertwiner defects.
    Moyal {
        #[command(flatten)]
        out: Output,
    },
    /// Log-log fit of a defect norm against hbar.
    DefectScan {
        #[arg(long, default_value = "4..40")]
        k: String,
        #[arg(long, value_enum, default_value_t = Family::Sphere)]
        family: Family,
        #[command(flatten)]
        out: Output,
    },
    /// Solve the matrix model from su(2) or random starts and classify the solutions.
    MatrixModel {
        /// Matrix sizes N.
        #[arg(long, default_value = "3")]
        k: String,
        #[command(flatten)]
        out: Output,
    },
    /// The five-stage reconstruction of a classical limit.
    Pipeline {
        #[arg(long, default_value = "2..5")]
        k: String,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[command(flatten)]
        out: Output,
    },
}

fn run(cmd: Command) -> anyhow::Result<(Report, Output)> {
    let cfg = |o: &Output| o.config.clone();
    Ok(match cmd {
        Command::FuzzySphere { k, degree, span_max_k, out } => {
            (commands::fuzzy_sphere(&parse_k_range(&k)?, degree, span_max_k)?, out)
        }
        Command::FuzzyTorus { k, out } => (commands::fuzzy_torus(&parse_k_range(&k)?)?, out),
        Command::Moyal { out } => {
            let c = commands::read_config(cfg(&out).as_deref())?;
            (commands::moyal(&c, out.seed)?, out)
        }
        Command::DefectScan { k, family, out } => {
            let c = commands::read_config(cfg(&out).as_deref())?;
            (commands::defect_scan(family, &parse_k_range(&k)?, &c)?, out)
        }
        Command::MatrixModel { k, out } => {
            let c = commands::read_config(cfg(&out).as_deref())?;
            (commands::matrix_model(&parse_k_range(&k)?, &c, out.seed)?, out)
        }
        Command::Pipeline { k, degree, out } => {
            let c = commands::read_config(cfg(&out).as_deref())?;
            (commands::pipeline(&parse_k_range(&k)?, degree, &c)?, out)
        }
    })
}

fn emit(report: &Report, csv: bool, path: Option<&Path>) -> anyhow::Result<()> {
    let text = if csv {
        report.csv.clone()
    } else {
        let mut s = serde_json::to_string_pretty(&report.json)?;
        s.push('\n');
        s
    };
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, out)) => {
            if let Err(e) = emit(&report, out.csv, out.out.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more verdicts failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
