//! Command-line front end for config-driven experiment runs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphsig::experiment::{
    run, summarize, ExperimentConfig, GraphConfig, GraphFormat, RunError, RunResult, SignalConfig, TaskKind,
};

#[derive(Parser)]
#[command(name = "graphsig", version, about = "Graph signal representation experiments")]
struct Cli {
    /// Worker threads for per-seed and per-trial fan-out.
    #[arg(long, global = true, env = "GRAPHSIG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier basis spectrum, and coefficients of any given signals.
    Gft(RunArgs),
    /// Localization measures of every basis vector.
    Localize(RunArgs),
    /// K-term approximation error per representation.
    Approx(RunArgs),
    /// Greedy sampling designs, one plan per objective.
    DesignSample(RunArgs),
    /// Recovery error per sampling strategy and sample count.
    Recover(RunArgs),
    /// Detection decisions and rejection rates.
    Detect(RunArgs),
    /// SIS simulation and incidence estimation.
    Epidemics(RunArgs),
    /// Merge the results of several runs on the same graph.
    Summarize {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Write the merged CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// edge-list or adjacency.
    #[arg(long)]
    format: Option<GraphFormat>,
    /// CSV of signals, one per column.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Repeat for several seeds.
    #[arg(long)]
    seed: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(kind: TaskKind, args: RunArgs) -> RunResult<(ExperimentConfig, PathBuf)> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::for_task(kind),
    };
    if config.task.kind() != kind {
        return Err(RunError::Config(format!(
            "config describes a `{}` task, not `{}`",
            config.task.kind().name(),
            kind.name()
        )));
    }
    if let Some(path) = args.graph {
        config.graph = Some(GraphConfig { path: Some(path), format: args.format.unwrap_or_default(), generate: None });
    } else if let (Some(format), Some(graph)) = (args.format, config.graph.as_mut()) {
        graph.format = format;
    }
    if let Some(path) = args.signal {
        config.signal = Some(SignalConfig { path: Some(path), synthesize: None, count: 1 });
    }
    if !args.seed.is_empty() {
        config.seeds = args.seed;
    }
    if let Some(out) = args.out {
        config.out = Some(out);
    }
    let out = config.out.clone().ok_or_else(|| RunError::Config("no output directory (use --out)".into()))?;
    Ok((config, out))
}

fn execute(command: Command) -> RunResult<()> {
    let (kind, args) = match command {
        Command::Summarize { runs, out } => {
            let dirs: Vec<&Path> = runs.iter().map(PathBuf::as_path).collect();
            let csv = summarize(&dirs)?.to_csv();
            return match out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| RunError::Io { path, source: e }),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            };
        }
        Command::Gft(a) => (TaskKind::Gft, a),
        Command::Localize(a) => (TaskKind::Localize, a),
        Command::Approx(a) => (TaskKind::Approx, a),
        Command::DesignSample(a) => (TaskKind::DesignSample, a),
        Command::Recover(a) => (TaskKind::Recover, a),
        Command::Detect(a) => (TaskKind::Detect, a),
        Command::Epidemics(a) => (TaskKind::Epidemics, a),
    };
    let (config, out) = build_config(kind, args)?;
    let report = run(&config, &out)?;
    eprintln!("wrote {} files to {}", report.manifest.files.len() + 1, report.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
