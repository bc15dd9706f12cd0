use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use bqtau::cli::{parse_complex, render, run, run_batch, JobOptions, JobSpec};

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "kebab-case")]
enum Command {
    Validate,
    Normalize,
    RhToRep,
    RhFromRep,
    Tensor,
    Dual,
    Hom,
    Kernel,
    Cokernel,
    Decompose,
    K0,
    Kmap,
    DivisorEq,
    PsiStar,
    Extension,
    StdBundle,
    Phase,
    Nori,
    AthetaCheck,
    Wd,
    ReduceTau,
}

/// Equivariant regular-singular connections: normal forms, Riemann-Hilbert,
/// tensor structure, K-theory and the noncommutative torus.
#[derive(Debug, Parser)]
#[command(name = "bqtau", version)]
struct Args {
    /// Operation to run (omit with --batch).
    #[arg(value_enum, required_unless_present = "batch")]
    command: Option<Command>,
    /// Input files, inline JSON, or scalar arguments (put values starting
    /// with `-` after `--`).
    inputs: Vec<String>,
    /// Lattice parameter as re,im [default: 1,-1].
    #[arg(long, allow_hyphen_values = true, value_parser = parse_tau)]
    tau: Option<[f64; 2]>,
    /// Rotation number theta in (0, 1) [default: (sqrt 5 - 1) / 2].
    #[arg(long)]
    theta: Option<f64>,
    /// Strip offset a in a <= Re(z/tau) < a + 1 [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    transversal_offset: Option<f64>,
    /// Gauge truncation order K [default: 16].
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    tol_spec: Option<f64>,
    #[arg(long)]
    tol_res: Option<f64>,
    #[arg(long)]
    tol_key: Option<f64>,
    /// Seed for randomized searches [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Largest root-of-unity order accepted by `nori` [default: 64].
    #[arg(long)]
    d_max: Option<u64>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Run the jobs of a manifest in parallel.
    #[arg(long, conflicts_with = "command")]
    batch: Option<PathBuf>,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_tau(s: &str) -> Result<[f64; 2], String> {
    parse_complex(s).map(|z| [z.re, z.im]).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let options = JobOptions {
        tau: args.tau,
        theta: args.theta,
        transversal_offset: args.transversal_offset,
        truncation: args.truncation,
        tol_spec: args.tol_spec,
        tol_res: args.tol_res,
        tol_key: args.tol_key,
        seed: args.seed,
        d_max: args.d_max,
    };
    let (code, text) = match (&args.batch, args.command) {
        (Some(manifest), _) => match run_batch(manifest, &options) {
            Ok((code, outcomes)) => {
                let reports: Vec<_> = outcomes.iter().map(|o| &o.report).collect();
                (code, render(&reports, args.json, true))
            }
            Err(e) => {
                eprintln!("bqtau: {e}");
                return ExitCode::from(2);
            }
        },
        (None, Some(cmd)) => {
            let name = cmd.to_possible_value().expect("named command").get_name().to_string();
            let out = run(&JobSpec {
                command: name,
                inputs: args.inputs,
                options,
            });
            (out.exit_code, render(&[&out.report], args.json, false))
        }
        (None, None) => unreachable!("clap requires a command"),
    };
    match &args.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("bqtau: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
