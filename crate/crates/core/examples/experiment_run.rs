//! Runs the bundled configs through the library entry point the CLI uses, then merges
//! the two results tables that share a graph.
//!
//!     cargo run --release --example experiment_run [OUT_DIR]

use std::path::{Path, PathBuf};

use graphsig::experiment::{run, summarize, ExperimentConfig, RunResult};

fn main() -> RunResult<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("graphsig-runs"), PathBuf::from);
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");

    for name in ["approx", "recover"] {
        let config = ExperimentConfig::load(&configs.join(format!("{name}.toml")))?;
        let report = run(&config, &out.join(name))?;
        println!("{name}: {} result rows in {}", report.results.len(), report.out_dir.display());
    }

    // The recover config reused as a second run on the same grid, at a larger noise level.
    let mut noisy = ExperimentConfig::load(&configs.join("recover.toml"))?;
    if let graphsig::experiment::TaskConfig::Recover(p) = &mut noisy.task {
        p.noise = 0.5;
    }
    run(&noisy, &out.join("recover-noisy"))?;
    let merged = summarize(&[&out.join("recover"), &out.join("recover-noisy")])?;
    println!("merged {} rows", merged.len());
    for row in merged.rows().iter().filter(|r| r[6] == "nmse" && r[5] == "0").step_by(2) {
        println!("  {:<14} {:<34} m={:<4} nmse {}", row[0], row[2], row[4], row[7]);
    }
    Ok(())
}
