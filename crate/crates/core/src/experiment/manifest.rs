use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::io::Table;
use super::{RunError, RunResult};

pub const RESULTS_HEADER: [&str; 7] = ["task", "method", "param_name", "param", "seed", "metric", "value"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
}

/// Provenance of a run. Holds no timestamps, so identical runs give identical manifests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub task: String,
    pub crate_version: String,
    pub seeds: Vec<u64>,
    pub config_sha256: String,
    /// Hash of the graph's canonical edge list.
    pub graph_sha256: String,
    pub num_nodes: usize,
    pub files: Vec<OutputFile>,
}

impl Manifest {
    pub fn read(dir: &Path) -> RunResult<Self> {
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|e| RunError::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| RunError::Parse { path, line: e.line(), message: e.to_string() })
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Concatenates the `results.csv` tables of runs made on the same graph, with a leading
/// `run` column holding each run directory's name.
pub fn summarize(dirs: &[&Path]) -> RunResult<Table> {
    if dirs.is_empty() {
        return Err(RunError::Config("no run directories given".into()));
    }
    let mut header = vec!["run"];
    header.extend(RESULTS_HEADER);
    let mut table = Table::new(&header);
    let mut graph: Option<(String, &Path)> = None;
    for &dir in dirs {
        let manifest = Manifest::read(dir)?;
        match &graph {
            None => graph = Some((manifest.graph_sha256.clone(), dir)),
            Some((hash, first)) if *hash != manifest.graph_sha256 => {
                return Err(RunError::IncompatibleRuns(format!(
                    "{} and {} were run on different graphs",
                    first.display(),
                    dir.display()
                )));
            }
            Some(_) => {}
        }
        let run = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
        let path = dir.join("results.csv");
        let mut reader = csv::Reader::from_path(&path).map_err(|e| csv_error(&path, e))?;
        let header = reader.headers().map_err(|e| csv_error(&path, e))?.clone();
        if header.iter().ne(RESULTS_HEADER) {
            return Err(RunError::Parse { path, line: 1, message: "unexpected results header".into() });
        }
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(&path, e))?;
            table.push(std::iter::once(run.clone()).chain(record.iter().map(str::to_string)).collect());
        }
    }
    Ok(table)
}

fn csv_error(path: &Path, e: csv::Error) -> RunError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => RunError::io(path, source),
        kind => RunError::Parse { path: path.into(), line, message: format!("{kind:?}") },
    }
}
