use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;
use onshell::{export_structconst, run, validate_config, RayonExecutor};

/// Exit status when every check passes.
const EXIT_OK: u8 = 0;
/// A check failed or a numeric step did not converge.
const EXIT_FAILED: u8 = 1;
/// The configuration or arguments are invalid.
const EXIT_INVALID: u8 = 2;
/// Reading or writing files failed.
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "onshell",
    version,
    about = "On-shell multiple-scattering verification"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log progress and per-check results.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a scenario and write report.json, summary.csv and plotdata/.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// Export structure constants g_{lm;l'm'}(k0, R) as CSV.
    Structconst {
        #[arg(long)]
        k0: f64,
        /// Separation vector `x,y,z`, or a distance along z.
        #[arg(long = "R", value_parser = parse_vector, allow_hyphen_values = true)]
        r: [f64; 3],
        #[arg(long)]
        lmax: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_vector(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    match parts.as_slice() {
        [d] => Ok([0.0, 0.0, *d]),
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err("expected one value or three comma-separated values".into()),
    }
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        error!("cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_IO)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            error!("thread pool: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    match cli.command {
        Command::Validate { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match validate_config(&text) {
                Ok(v) => {
                    for w in &v.warnings {
                        println!("warning: {w}");
                    }
                    for (j, h, g) in &v.gaps {
                        let note = if *g <= 0.0 { " (overlapping)" } else { "" };
                        println!("gap[{j},{h}] = {g:.6}{note}");
                    }
                    println!("{}: valid", config.display());
                    ExitCode::from(EXIT_OK)
                }
                Err(e) => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_INVALID)
                }
            }
        }
        Command::Run { config, out } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let v = match validate_config(&text) {
                Ok(v) => v,
                Err(e) => {
                    eprint!("{e}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            match run(&v, out.as_deref(), &RayonExecutor) {
                Ok(outcome) => {
                    let failed: Vec<_> =
                        outcome.report.checks.iter().filter(|c| !c.passed).collect();
                    for c in &failed {
                        let detail = c
                            .detail
                            .clone()
                            .unwrap_or_else(|| format!("{:.3e} >= {:.1e}", c.value, c.tolerance));
                        let note = if c.gating { "" } else { " (not gating)" };
                        eprintln!("FAIL {}: {detail}{note}", c.name);
                    }
                    println!(
                        "{} checks, {} failed; artifacts in {}",
                        outcome.report.checks.len(),
                        failed.len(),
                        outcome.out_dir.display()
                    );
                    ExitCode::from(if outcome.passed { EXIT_OK } else { EXIT_FAILED })
                }
                Err(e) => {
                    error!("{e:#}");
                    ExitCode::from(EXIT_IO)
                }
            }
        }
        Command::Structconst { k0, r, lmax, out } => match export_structconst(k0, r, lmax, &out) {
            Ok(n) => {
                println!("{n} rows written to {}", out.display());
                ExitCode::from(EXIT_OK)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_INVALID)
            }
        },
    }
}
