use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use brw_cli::modelfile::Document;
use brw_cli::presets::list_presets;
use brw_cli::run::describe_files;
use brw_cli::scenario::all_keys;
use brw_cli::{run, CliError, Scenario};

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "BRWLAB_THREADS";

#[derive(Parser)]
#[command(name = "brwlab", version, about = "Branching random walk experiments: rate conditions, renewal functions, population traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the rate conditions and write a key=value report.
    Analyze(RunArgs),
    /// Estimate V(x) for walks or V_a(x) for branching models, with predictions.
    Renewal(RunArgs),
    /// Simulate population traces and the two-series diagnostics.
    Brw(RunArgs),
    /// Run the acceptance suite.
    Verify(RunArgs),
    /// List the built-in models.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in model, see `brwlab presets`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exponential rate.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Comma-separated evaluation points.
    #[arg(long)]
    grid: Option<String>,
}

fn scenario(task: &str, args: RunArgs) -> Result<Scenario, CliError> {
    let mut doc = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Document::parse(&text, &all_keys())?
        }
        None => Document::default(),
    };
    doc.set_flag("task", task);
    let flags = [
        ("preset", args.preset),
        ("seed", args.seed.map(|v| v.to_string())),
        ("out", args.out.map(|p| p.display().to_string())),
        ("a", args.a.map(|v| v.to_string())),
        ("samples", args.samples.map(|v| v.to_string())),
        ("paths", args.paths.map(|v| v.to_string())),
        ("horizon", args.horizon.map(|v| v.to_string())),
        ("replicates", args.replicates.map(|v| v.to_string())),
        ("cap", args.cap.map(|v| v.to_string())),
        ("n_max", args.n_max.map(|v| v.to_string())),
        ("grid", args.grid),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            doc.set_flag(key, v);
        }
    }
    Ok(Scenario::from_document(&doc)?)
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (task, args) = match cli.command {
        Command::Presets => {
            for p in list_presets() {
                println!("{:<20} a={:<22} {}", p.name, p.default_a, p.description);
            }
            return ExitCode::SUCCESS;
        }
        Command::Analyze(a) => ("analyze", a),
        Command::Renewal(a) => ("renewal", a),
        Command::Brw(a) => ("brw", a),
        Command::Verify(a) => ("verify", a),
    };
    let result = scenario(task, args).and_then(|s| run(&s).map(|o| (s, o)));
    match result {
        Ok((s, outcome)) => {
            eprintln!("wrote {}", describe_files(&outcome.files, &s.out));
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
