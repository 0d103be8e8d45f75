//! Thin command-line shell over the library runners: parse, dispatch,
//! print the report to stdout, and optionally write `report.json` plus the
//! CSV tables to a directory. Exit status: 0 on pass, 2 on a tolerance
//! failure, 1 on any error.

use clap::{Parser, Subcommand};
use minsing::cli_reports::problem::{parse_problem, Problem};
use minsing::cli_reports::report::{
    render_report, run_box, run_envelope, run_integral, run_vhat, run_zariski, RunOutput,
};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "minsing",
    version,
    about = "Singularity structure of extremal metrics on fibered spaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Directory for report.json and the CSV tables; stdout-only when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pass/fail threshold for the command's verification checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for commands that draw random samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact exponent polytope from cone and class data.
    Box { file: PathBuf },
    /// Blow-up model pipeline for a given point count.
    Zariski {
        /// Number of blown-up points.
        #[arg(long)]
        n: u32,
    },
    /// Fiber integral against its closed form.
    Integral { file: PathBuf },
    /// Slope-constrained envelope and its kernel approximants.
    Envelope { file: PathBuf },
    /// Certified lower bound for the global envelope.
    Vhat { file: PathBuf },
}

type DynError = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool, DynError> {
    match &cli.cmd {
        Cmd::Zariski { n } => {
            let input = format!("zariski n={n}");
            let out = run_zariski(*n)?;
            emit(cli, &format!("zariski --n {n}"), input.as_bytes(), out)
        }
        Cmd::Box { file } => {
            let (bytes, problem) = load(file)?;
            let Problem::Box(p) = problem else {
                return Err(wrong_kind(file, "box"));
            };
            let out = run_box(&p)?;
            emit(cli, &format!("box {}", file.display()), &bytes, out)
        }
        Cmd::Integral { file } => {
            let (bytes, problem) = load(file)?;
            let Problem::Integral(p) = problem else {
                return Err(wrong_kind(file, "integral"));
            };
            let out = run_integral(&p, cli.tol, cli.seed)?;
            emit(cli, &format!("integral {}", file.display()), &bytes, out)
        }
        Cmd::Envelope { file } => {
            let (bytes, problem) = load(file)?;
            let Problem::Envelope(p) = problem else {
                return Err(wrong_kind(file, "envelope"));
            };
            let out = run_envelope(&p, cli.tol)?;
            emit(cli, &format!("envelope {}", file.display()), &bytes, out)
        }
        Cmd::Vhat { file } => {
            let (bytes, problem) = load(file)?;
            let Problem::Vhat(p) = problem else {
                return Err(wrong_kind(file, "vhat"));
            };
            let out = run_vhat(&p, cli.tol)?;
            emit(cli, &format!("vhat {}", file.display()), &bytes, out)
        }
    }
}

fn load(file: &Path) -> Result<(Vec<u8>, Problem), DynError> {
    let bytes = fs::read(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| format!("{} is not UTF-8: {e}", file.display()))?;
    let problem = parse_problem(text)?;
    Ok((bytes, problem))
}

fn wrong_kind(file: &Path, expected: &str) -> DynError {
    format!(
        "{} does not hold a '{expected}' problem; run the command matching its kind",
        file.display()
    )
    .into()
}

fn emit<R: Serialize>(
    cli: &Cli,
    command: &str,
    input: &[u8],
    out: RunOutput<R>,
) -> Result<bool, DynError> {
    let report = render_report(command, input, &out.results);
    print!("{report}");
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        write_atomic(&dir.join("report.json"), &report)?;
        for table in &out.tables {
            write_atomic(&dir.join(format!("{}.csv", table.name)), &table.to_csv())?;
        }
    }
    Ok(out.pass)
}

/// Write via a sibling temp file and rename, so readers never see a partial
/// file.
fn write_atomic(path: &Path, data: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, data)?;
    fs::rename(&tmp, path)
}
