use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use reftorsion::cli::{run, Command, Format, JobConfig, THREADS_ENV};
use reftorsion::Error;

/// Refined analytic torsion and its spectral building blocks.
#[derive(Parser, Debug)]
#[command(name = "reftorsion", version)]
struct Args {
    command: Command,
    /// JSON job file, or `-` for stdin.
    #[arg(long)]
    config: String,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Override a tolerance, e.g. `--tol closedForm=1e-6`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Record wall time in the result.
    #[arg(long)]
    timing: bool,
}

fn fail(e: Error) -> ExitCode {
    eprintln!("{}: {e}", e.code());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return fail(Error::Schema(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        }
    }
    let text = if args.config == "-" {
        let mut s = String::new();
        if let Err(e) = std::io::stdin().read_to_string(&mut s) {
            return fail(Error::Schema(format!("reading stdin: {e}")));
        }
        s
    } else {
        match std::fs::read_to_string(&args.config) {
            Ok(s) => s,
            Err(e) => return fail(Error::Schema(format!("reading {}: {e}", args.config))),
        }
    };
    let mut config = match JobConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    for t in &args.tol {
        if let Err(msg) = config.tolerances.apply_override(t) {
            return fail(Error::Schema(msg));
        }
    }

    let start = Instant::now();
    let mut result = run(args.command, &config);
    if args.timing {
        result.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    let body = match args.format {
        Format::Json => result.to_json(),
        Format::Csv => match result.to_csv() {
            Ok(s) => s,
            Err(e) => return fail(e),
        },
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                return fail(Error::Schema(format!("writing {}: {e}", path.display())));
            }
        }
        None => print!("{body}"),
    }
    if let Some(err) = &result.error {
        eprintln!("{}: {}", err.code, err.message);
    }
    ExitCode::from(result.exit_code() as u8)
}
