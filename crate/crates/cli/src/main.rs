use clap::{Args, Parser, Subcommand};
use hkreduce_cli::report::{emit_report, read_report, VerificationReport};
use hkreduce_cli::spec::parse_spec;
use hkreduce_cli::verify::{run_verify, RunOptions, Stage};
use hkreduce_cli::CliError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hkreduce", version, about = "Numerical checks for hyperkähler quotients and hyperholomorphic line bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Problem spec file.
    #[arg(long, global = true, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Random seed; falls back to the spec, then to HKREDUCE_SEED.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory for report.toml and summary.csv.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Tolerance used in place of every per-check default.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check the spec requests.
    Verify,
    /// Run only the prequantization payloads.
    Prequant,
    /// Solve for the level-set point or Nahm path and write it out.
    Solve,
    /// Print a previously written report from --out.
    Report,
}

const DEFAULT_OUT: &str = "hkreduce-out";

fn seed(flag: Option<u64>, spec: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(spec) {
        return Ok(s);
    }
    match std::env::var("HKREDUCE_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Schema { line: None, field: "HKREDUCE_SEED".into(), message: format!("{v:?} is not an unsigned integer") }),
        Err(_) => Err(CliError::Schema { line: None, field: "seed".into(), message: "no --seed, no seed in the spec and HKREDUCE_SEED is unset".into() }),
    }
}

fn print_report(r: &VerificationReport) {
    for c in &r.checks {
        println!("{:<4} {:<34} {:>12.3e} <= {:<9.1e} {}", if c.pass { "ok" } else { "FAIL" }, c.id, c.violation, c.tol, c.note);
    }
    let failed = r.failures().count();
    println!("{} checks, {} failed", r.checks.len(), failed);
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let c = &cli.common;
    if let Some(t) = c.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Schema { line: None, field: "--tol".into(), message: format!("{t} is not a non-negative number") });
        }
    }
    if let Command::Report = cli.command {
        let dir = c.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let r = read_report(&dir)?;
        if !c.quiet || !r.pass {
            print_report(&r);
        }
        return Ok(r.pass);
    }
    let path = c.spec.as_deref().ok_or_else(|| CliError::Schema { line: None, field: "--spec".into(), message: "a spec file is required".into() })?;
    let (spec, bytes) = parse_spec(path)?;
    let stage = match cli.command {
        Command::Verify => Stage::Verify,
        Command::Prequant => Stage::Prequant,
        Command::Solve => Stage::Solve,
        Command::Report => unreachable!(),
    };
    let opts = RunOptions { seed: seed(c.seed, spec.seed)?, tol: c.tol, stage };
    let out = run_verify(&spec, &bytes, &opts);
    let dir = c
        .out
        .clone()
        .or_else(|| spec.output.as_ref().and_then(|o| o.dir.as_ref()).map(|d| relative_to(path, d)))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let (toml_path, csv_path) = emit_report(&out.report, &dir)?;
    if let Some(sol) = &out.solution {
        if stage == Stage::Solve {
            let p = dir.join("solution.csv");
            std::fs::write(&p, sol).map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
        }
    }
    if !c.quiet || !out.report.pass {
        print_report(&out.report);
        println!("wrote {} and {}", toml_path.display(), csv_path.display());
    }
    Ok(out.report.pass)
}

fn relative_to(spec: &Path, dir: &str) -> PathBuf {
    let d = Path::new(dir);
    if d.is_absolute() {
        d.to_path_buf()
    } else {
        spec.parent().unwrap_or(Path::new(".")).join(d)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hkreduce: {e}");
            ExitCode::from(2)
        }
    }
}
