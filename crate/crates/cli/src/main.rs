use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use foliate::oracle::HolonomyConfig;
use foliate_cli::{
    cmd_gv, cmd_melnikov, cmd_oracle, read_spec, verify_all, CliError, OracleRequest, RunReport,
};

/// Melnikov functions, Godbillon-Vey sequences and holonomy checks for
/// polynomial deformations of dF = 0 with F = x^2 + y^2.
#[derive(Parser)]
#[command(name = "foliate", version)]
struct Cli {
    /// Run every built-in fixture (same as the verify-all subcommand).
    #[arg(long)]
    verify_all: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Melnikov functions and relative-exactness pairs.
    Melnikov {
        spec: PathBuf,
        #[arg(long, value_name = "N")]
        max_order: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Godbillon-Vey data of order k, or the obstruction.
    Gv {
        spec: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 0)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Numeric displacement table and first-order estimates.
    Oracle {
        spec: PathBuf,
        /// Comma-separated levels.
        #[arg(
            long,
            value_name = "LIST",
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        t: Option<Vec<f64>>,
        /// Comma-separated perturbation sizes.
        #[arg(
            long,
            value_name = "LIST",
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        eps: Option<Vec<f64>>,
        /// Also write the table as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// RK4 steps per revolution.
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Check the built-in fixtures plus any given files or directories.
    VerifyAll { paths: Vec<PathBuf> },
}

fn emit(report: &RunReport, out: &Output) -> Result<u8, CliError> {
    let text = report.to_json();
    match &out.json {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn collect_docs(paths: &[PathBuf]) -> Result<Vec<(String, String)>, CliError> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|source| CliError::Read {
            path: p.to_owned(),
            source,
        })
    };
    let mut docs = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|source| CliError::Read {
                    path: path.clone(),
                    source,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            for f in files {
                docs.push((f.display().to_string(), read(&f)?));
            }
        } else {
            docs.push((path.display().to_string(), read(path)?));
        }
    }
    Ok(docs)
}

fn run_verify(paths: &[PathBuf]) -> Result<u8, CliError> {
    let outcomes = verify_all(&collect_docs(paths)?);
    for o in &outcomes {
        if o.passed() {
            println!("[ok] {}", o.name);
        } else {
            println!("[FAIL] {}", o.name);
            for f in &o.failures {
                println!("  {f}");
            }
        }
    }
    Ok(if outcomes.iter().all(|o| o.passed()) {
        0
    } else {
        3
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        _ if cli.verify_all => run_verify(&[]),
        None => Err(CliError::Invalid("no command given; see --help".into())),
        Some(Command::VerifyAll { paths }) => run_verify(&paths),
        Some(Command::Melnikov {
            spec,
            max_order,
            out,
        }) => emit(&cmd_melnikov(&read_spec(&spec)?, max_order)?, &out),
        Some(Command::Gv { spec, k, out }) => emit(&cmd_gv(&read_spec(&spec)?, k)?, &out),
        Some(Command::Oracle {
            spec,
            t,
            eps,
            csv,
            steps,
            out,
        }) => {
            let mut config = HolonomyConfig::default();
            if let Some(n) = steps {
                config.step_count = n;
            }
            config
                .validate()
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let req = OracleRequest {
                t,
                eps,
                csv,
                config,
            };
            emit(&cmd_oracle(&read_spec(&spec)?, &req)?, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
