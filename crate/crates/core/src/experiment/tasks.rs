use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::config::*;
use super::io::{format_value, load_graph, load_signals, Table};
use super::manifest::{sha256_hex, Manifest, OutputFile, RESULTS_HEADER};
use super::{RunError, RunResult};
use crate::approx::{nonlinear_approx, normalized_mse, omp};
use crate::detection::{detect, rejection_rate, DetectionResult};
use crate::dictionary::{
    generators, lsps_dictionary, lspc_dictionary, lspc_wavelet_basis, polynomial_dictionary, synthesize, Dictionary,
    LspsModel,
};
use crate::epidemics::{estimate_random, estimate_with_leaves, simulate_sis, success_rate, SisParams};
use crate::graph::{generators as graphs, Graph};
use crate::partition::{build_tree, LocalSetTree, PartitionMethod, StopRule};
use crate::sampling::{
    center_assign_recover, default_bandwidth, design_sampling, harmonic_recover, leaf_sampling, pls_recover,
    random_sampling, trend_filter_recover, SamplingPlan,
};
use crate::spectral::{graph_fourier_basis, variation, FourierBasis, Localizer};
use crate::Error;

/// What a finished run wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    /// The long-format results table also written to `results.csv`.
    pub results: Table,
}

/// Collects output files so they are written in one place, in a fixed order.
struct Outputs {
    files: Vec<(String, String)>,
    results: Table,
    task: &'static str,
}

impl Outputs {
    fn new(task: &'static str) -> Self {
        Outputs { files: Vec::new(), results: Table::new(&RESULTS_HEADER), task }
    }

    fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    fn result(&mut self, method: &str, param: Option<(&str, String)>, seed: Option<u64>, metric: &str, value: f64) {
        let (param_name, param) = param.unwrap_or_default();
        self.results.push(vec![
            self.task.to_string(),
            method.to_string(),
            param_name.to_string(),
            param,
            seed.map(|s| s.to_string()).unwrap_or_default(),
            metric.to_string(),
            format_value(value),
        ]);
    }
}

fn build_graph(config: &GraphConfig) -> RunResult<Graph> {
    if let Some(path) = &config.path {
        return load_graph(path, config.format);
    }
    let gen = config.generate.as_ref().ok_or_else(|| RunError::Config("graph has no source".into()))?;
    let positive = |n: usize| if n == 0 { Err(RunError::Config("generated graph needs nodes".into())) } else { Ok(n) };
    Ok(match *gen {
        GraphGenerator::Path { nodes } => graphs::path(positive(nodes)?),
        GraphGenerator::Cycle { nodes } => graphs::cycle(positive(nodes)?),
        GraphGenerator::Star { nodes } => graphs::star(positive(nodes)?),
        GraphGenerator::Grid { rows, cols } => graphs::grid(positive(rows)?, positive(cols)?),
        GraphGenerator::RandomConnected { nodes, p, weighted, seed } => {
            graphs::random_connected(positive(nodes)?, p, weighted, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        GraphGenerator::RandomGeometric { nodes, radius, seed } => {
            graphs::random_geometric(positive(nodes)?, radius, &mut ChaCha8Rng::seed_from_u64(seed))
        }
    })
}

/// Signals for one seed: the file's columns, or fresh synthesized draws.
struct Signals {
    loaded: Option<Vec<Vec<f64>>>,
    recipe: Option<(SignalRecipe, usize)>,
}

impl Signals {
    fn new(config: Option<&SignalConfig>, graph: &Graph) -> RunResult<Self> {
        let Some(config) = config else { return Ok(Signals { loaded: None, recipe: None }) };
        if let Some(path) = &config.path {
            return Ok(Signals { loaded: Some(load_signals(path, graph.num_nodes())?), recipe: None });
        }
        Ok(Signals { loaded: None, recipe: config.synthesize.clone().map(|r| (r, config.count)) })
    }

    fn is_empty(&self) -> bool {
        self.loaded.is_none() && self.recipe.is_none()
    }

    fn for_seed(&self, graph: &Graph, seed: u64) -> RunResult<Vec<Vec<f64>>> {
        if let Some(s) = &self.loaded {
            return Ok(s.clone());
        }
        let Some((recipe, count)) = &self.recipe else { return Ok(Vec::new()) };
        // Offset the stream so signal draws differ from the sampling draws of the same seed.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157_4E41_4C53);
        let mut out = Vec::with_capacity(*count);
        let basis = match recipe {
            SignalRecipe::Bandlimited { kind, .. } => Some(graph_fourier_basis(graph, *kind)?),
            _ => None,
        };
        for _ in 0..*count {
            let x = match recipe {
                SignalRecipe::PiecewiseConstant { pieces } => {
                    synthesize(graph, &generators::piecewise_constant(graph, *pieces, &mut rng)?)?
                }
                SignalRecipe::PiecewisePolynomial { pieces, degree } => {
                    synthesize(graph, &generators::piecewise_polynomial(graph, *pieces, *degree, &mut rng)?)?
                }
                SignalRecipe::PiecewiseBandlimited { pieces, bandwidth } => {
                    synthesize(graph, &generators::piecewise_bandlimited(graph, *pieces, *bandwidth, &mut rng)?)?
                }
                SignalRecipe::Bandlimited { bandwidth, .. } => {
                    let basis = basis.as_ref().expect("built above");
                    if *bandwidth == 0 || *bandwidth > basis.len() {
                        return Err(Error::BandOutOfRange { band: *bandwidth, max: basis.len() }.into());
                    }
                    generators::unit_bandlimited(basis, *bandwidth, &mut rng)
                }
            };
            out.push(x);
        }
        Ok(out)
    }
}

/// Seeds to iterate over; deterministic tasks without seeds run once unseeded.
fn seed_list(config: &ExperimentConfig) -> Vec<Option<u64>> {
    if config.seeds.is_empty() {
        vec![None]
    } else {
        config.seeds.iter().copied().map(Some).collect()
    }
}

/// Runs the task and writes every artifact into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> RunResult<RunReport> {
    config.validate()?;
    let graph = build_graph(config.graph.as_ref().expect("validated"))?;
    let signals = Signals::new(config.signal.as_ref(), &graph)?;
    let kind = config.task.kind();
    let mut out = Outputs::new(kind.name());
    match &config.task {
        TaskConfig::Gft(p) => run_gft(p, &graph, &signals, config, &mut out)?,
        TaskConfig::Localize(p) => run_localize(p, &graph, &mut out)?,
        TaskConfig::Approx(p) => run_approx(p, &graph, &signals, config, &mut out)?,
        TaskConfig::DesignSample(p) => run_design(p, &graph, &mut out)?,
        TaskConfig::Recover(p) => run_recover(p, &graph, &signals, config, &mut out)?,
        TaskConfig::Detect(p) => run_detect(p, &graph, &signals, config, &mut out)?,
        TaskConfig::Epidemics(p) => run_epidemics(p, &graph, config, &mut out)?,
    }
    fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    // The output location is not part of the experiment, so it stays out of the hash.
    let resolved = serde_json::to_string_pretty(&ExperimentConfig { out: None, ..config.clone() }).expect("config serializes");
    out.file("config.json", resolved.clone());
    out.file("results.csv", out.results.to_csv());
    let mut files = Vec::new();
    for (name, contents) in &out.files {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| RunError::io(&path, e))?;
        files.push(OutputFile { name: name.clone(), sha256: sha256_hex(contents.as_bytes()) });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        task: kind.name().into(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        seeds: config.seeds.clone(),
        config_sha256: sha256_hex(resolved.as_bytes()),
        graph_sha256: sha256_hex(graph.to_edge_list().as_bytes()),
        num_nodes: graph.num_nodes(),
        files,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| RunError::io(&path, e))?;
    Ok(RunReport { out_dir: out_dir.to_path_buf(), manifest, results: out.results })
}

fn run_gft(p: &GftParams, graph: &Graph, signals: &Signals, config: &ExperimentConfig, out: &mut Outputs) -> RunResult<()> {
    let basis = graph_fourier_basis(graph, p.kind)?;
    let matrix = crate::graph::build_matrix(graph, p.kind)?;
    let mut spectrum = Table::new(&["index", "eigenvalue", "variation"]);
    for i in 0..basis.len() {
        let var = variation(&basis.vector(i), &matrix, p.kind)?;
        spectrum.push(vec![i.to_string(), format_value(basis.eigenvalues[i]), format_value(var)]);
        out.result(p.kind.name(), Some(("index", i.to_string())), None, "eigenvalue", basis.eigenvalues[i]);
    }
    out.file("spectrum.csv", spectrum.to_csv());
    if signals.is_empty() {
        return Ok(());
    }
    let mut coeffs = Table::new(&["seed", "signal", "index", "coefficient"]);
    for seed in seed_list(config) {
        for (s, x) in signals.for_seed(graph, seed.unwrap_or(0))?.iter().enumerate() {
            for (i, c) in basis.transform(x).into_iter().enumerate() {
                coeffs.push(vec![seed_label(seed), s.to_string(), i.to_string(), format_value(c)]);
            }
        }
    }
    out.file("coefficients.csv", coeffs.to_csv());
    Ok(())
}

fn seed_label(seed: Option<u64>) -> String {
    seed.map(|s| s.to_string()).unwrap_or_default()
}

fn run_localize(p: &LocalizeParams, graph: &Graph, out: &mut Outputs) -> RunResult<()> {
    let localizer = Localizer::with_threshold(graph, p.threshold);
    let mut table = Table::new(&["kind", "index", "eigenvalue", "ipr", "ecr", "ngd", "support_size"]);
    for &kind in &p.kinds {
        let basis = graph_fourier_basis(graph, kind)?;
        let reports: Vec<_> = (0..basis.len())
            .into_par_iter()
            .map(|i| localizer.report(&basis.vector(i)))
            .collect::<crate::Result<_>>()?;
        let mut sums = [0.0; 3];
        for (i, r) in reports.iter().enumerate() {
            table.push(vec![
                kind.name().into(),
                i.to_string(),
                format_value(basis.eigenvalues[i]),
                format_value(r.ipr),
                format_value(r.ecr),
                if r.ngd_defined { format_value(r.ngd) } else { "nan".into() },
                r.support_size.to_string(),
            ]);
            sums[0] += r.ipr;
            sums[1] += r.ecr;
            sums[2] += r.ngd;
        }
        let n = reports.len() as f64;
        let threshold = Some(("threshold", format_value(p.threshold)));
        out.result(kind.name(), threshold.clone(), None, "mean_ipr", sums[0] / n);
        out.result(kind.name(), threshold.clone(), None, "mean_ecr", sums[1] / n);
        out.result(kind.name(), threshold, None, "mean_ngd", sums[2] / n);
    }
    out.file("localization.csv", table.to_csv());
    Ok(())
}

enum Approximator {
    Fourier(FourierBasis),
    Basis(Dictionary),
    Greedy(Dictionary),
}

impl Approximator {
    fn approximate(&self, x: &[f64], k: usize) -> crate::Result<Vec<f64>> {
        match self {
            Approximator::Fourier(b) => Ok(nonlinear_approx(b, x, k)?.0),
            Approximator::Basis(d) => Ok(nonlinear_approx(d, x, k)?.0),
            Approximator::Greedy(d) => {
                let code = omp(d, x, k)?;
                Ok(d.synthesize(&code.coefficients))
            }
        }
    }
}

fn full_tree(graph: &Graph, method: &PartitionMethod) -> crate::Result<LocalSetTree> {
    build_tree(graph, method, StopRule::FullDepth)
}

fn approximator(rep: &Representation, graph: &Graph, tree: &mut Option<LocalSetTree>, method: &PartitionMethod) -> crate::Result<Approximator> {
    let mut tree = || -> crate::Result<LocalSetTree> {
        if tree.is_none() {
            *tree = Some(full_tree(graph, method)?);
        }
        Ok(tree.clone().expect("just built"))
    };
    Ok(match rep {
        Representation::Fourier { kind } => Approximator::Fourier(graph_fourier_basis(graph, *kind)?),
        Representation::Polynomial { degree } => Approximator::Greedy(polynomial_dictionary(graph, *degree)?),
        Representation::LspcWavelet => Approximator::Basis(lspc_wavelet_basis(&tree()?)?),
        Representation::Lspc => Approximator::Greedy(lspc_dictionary(&tree()?)?),
        Representation::LspsPolynomial { degree } => {
            Approximator::Greedy(lsps_dictionary(graph, &tree()?, LspsModel::Polynomial { degree: *degree })?)
        }
        Representation::LspsBandlimited { bandwidth } => {
            Approximator::Greedy(lsps_dictionary(graph, &tree()?, LspsModel::Bandlimited { bandwidth: *bandwidth })?)
        }
    })
}

fn default_ks(n: usize) -> Vec<usize> {
    let steps = 20.min(n);
    let mut ks: Vec<usize> = (1..=steps).map(|i| (i * n).div_ceil(steps)).collect();
    ks.dedup();
    ks
}

fn run_approx(p: &ApproxParams, graph: &Graph, signals: &Signals, config: &ExperimentConfig, out: &mut Outputs) -> RunResult<()> {
    let n = graph.num_nodes();
    let ks = if p.ks.is_empty() { default_ks(n) } else { p.ks.clone() };
    if let Some(&k) = ks.iter().find(|&&k| k > n) {
        return Err(RunError::Config(format!("k = {k} exceeds the {n} nodes")));
    }
    let mut tree = None;
    let reps: Vec<(String, Approximator)> = p
        .representations
        .iter()
        .map(|r| Ok((r.label(), approximator(r, graph, &mut tree, &p.partition)?)))
        .collect::<crate::Result<_>>()?;
    let mut table = Table::new(&["representation", "k", "seed", "signal", "nmse"]);
    for seed in seed_list(config) {
        let xs = signals.for_seed(graph, seed.unwrap_or(0))?;
        for (label, approx) in &reps {
            let grid: Vec<(usize, usize)> = ks.iter().flat_map(|&k| (0..xs.len()).map(move |s| (k, s))).collect();
            let errors: Vec<f64> = grid
                .par_iter()
                .map(|&(k, s)| normalized_mse(&xs[s], &approx.approximate(&xs[s], k)?))
                .collect::<crate::Result<_>>()?;
            for (&(k, s), e) in grid.iter().zip(&errors) {
                table.push(vec![label.clone(), k.to_string(), seed_label(seed), s.to_string(), format_value(*e)]);
            }
            for &k in &ks {
                let mine: Vec<f64> = grid.iter().zip(&errors).filter(|((kk, _), _)| *kk == k).map(|(_, e)| *e).collect();
                let mean = mine.iter().sum::<f64>() / mine.len() as f64;
                out.result(label, Some(("k", k.to_string())), seed, "nmse", mean);
            }
        }
    }
    out.file("approx_error.csv", table.to_csv());
    Ok(())
}

fn split_band(basis: &FourierBasis, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = basis.len();
    (basis.v.columns(0, k).into_owned(), basis.v.columns(k, n - k).into_owned())
}

fn resolve_band(samples: usize, bandwidth: Option<usize>, n: usize) -> RunResult<usize> {
    let k = bandwidth.unwrap_or_else(|| default_bandwidth(samples)).min(n);
    if k == 0 {
        return Err(RunError::Config("bandwidth must be at least 1".into()));
    }
    Ok(k)
}

fn run_design(p: &DesignParams, graph: &Graph, out: &mut Outputs) -> RunResult<()> {
    let n = graph.num_nodes();
    let m = p.samples.unwrap_or(n.div_ceil(4));
    let k = resolve_band(m, p.bandwidth, n)?;
    let basis = graph_fourier_basis(graph, p.kind)?;
    let (inband, outband) = split_band(&basis, k);
    let mut table = Table::new(&["objective", "samples", "bandwidth", "objective_value", "indices"]);
    for &objective in &p.objectives {
        let mut plan = design_sampling(&inband, Some(&outband), m, objective, p.c_tradeoff)?;
        plan.basis = Some(format!("{} low band {k}", p.kind.name()));
        let indices: Vec<String> = plan.indices.iter().map(|i| i.to_string()).collect();
        table.push(vec![
            objective.name().into(),
            m.to_string(),
            k.to_string(),
            format_value(plan.objective_value),
            indices.join(" "),
        ]);
        out.result(objective.name(), Some(("m", m.to_string())), None, "objective_value", plan.objective_value);
        out.file(format!("plan_{}.json", objective.name()), plan.to_json());
    }
    out.file("design.csv", table.to_csv());
    Ok(())
}

fn noisy(x: &[f64], idx: &[usize], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    idx.iter()
        .map(|&i| {
            if sigma > 0.0 {
                let z: f64 = StandardNormal.sample(rng);
                x[i] + sigma * z
            } else {
                x[i]
            }
        })
        .collect()
}

/// Sampled indices and the recovery for one strategy, sample count and signal.
fn recover_one(
    strategy: &RecoveryStrategy,
    m: usize,
    x: &[f64],
    graph: &Graph,
    designed: &Designed,
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> crate::Result<Vec<f64>> {
    let n = graph.num_nodes();
    match strategy {
        RecoveryStrategy::Pls { .. } | RecoveryStrategy::Plan { .. } => {
            let (plan, inband) = designed.plan.as_ref().expect("designed up front");
            let y = noisy(x, &plan.indices, noise, rng);
            pls_recover(&y, plan, inband)
        }
        RecoveryStrategy::RandomPls { .. } => {
            let inband = designed.inband.as_ref().expect("designed up front");
            let idx = random_sampling(n, m, rng);
            let plan = SamplingPlan {
                indices: idx,
                objective: crate::sampling::SamplingObjective::NoiseWorst,
                c_tradeoff: 1.0,
                objective_value: f64::NAN,
                seed: None,
                basis: None,
            };
            let y = noisy(x, &plan.indices, noise, rng);
            pls_recover(&y, &plan, inband)
        }
        RecoveryStrategy::Harmonic { mu } => {
            let idx = random_sampling(n, m, rng);
            let y = noisy(x, &idx, noise, rng);
            harmonic_recover(&y, &idx, graph, *mu)
        }
        RecoveryStrategy::TrendFilter { mu } => {
            let idx = random_sampling(n, m, rng);
            let y = noisy(x, &idx, noise, rng);
            Ok(trend_filter_recover(&y, &idx, graph, *mu)?.signal)
        }
        RecoveryStrategy::CenterAssign { .. } => {
            let leaves = designed.leaves.as_ref().expect("designed up front");
            let y = noisy(x, &leaves.centers, noise, rng);
            center_assign_recover(&y, leaves)
        }
    }
}

/// Seed-independent preparation for one strategy at one sample count.
#[derive(Default)]
struct Designed {
    plan: Option<(SamplingPlan, DMatrix<f64>)>,
    inband: Option<DMatrix<f64>>,
    leaves: Option<crate::sampling::LeafSampling>,
}

fn prepare(strategy: &RecoveryStrategy, m: usize, graph: &Graph) -> crate::Result<(usize, Designed)> {
    let n = graph.num_nodes();
    let band = |bandwidth: Option<usize>| bandwidth.unwrap_or_else(|| default_bandwidth(m)).clamp(1, n);
    Ok(match strategy {
        RecoveryStrategy::Pls { objective, kind, bandwidth, c_tradeoff } => {
            let basis = graph_fourier_basis(graph, *kind)?;
            let (inband, outband) = split_band(&basis, band(*bandwidth).min(m));
            let plan = design_sampling(&inband, Some(&outband), m, *objective, *c_tradeoff)?;
            (m, Designed { plan: Some((plan, inband)), ..Default::default() })
        }
        RecoveryStrategy::RandomPls { kind, bandwidth } => {
            let basis = graph_fourier_basis(graph, *kind)?;
            let (inband, _) = split_band(&basis, band(*bandwidth).min(m));
            (m, Designed { inband: Some(inband), ..Default::default() })
        }
        RecoveryStrategy::Plan { path, kind, bandwidth } => {
            let text = fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
            let plan = SamplingPlan::from_json(&text)?;
            let basis = graph_fourier_basis(graph, *kind)?;
            let (inband, _) = split_band(&basis, (*bandwidth).clamp(1, n));
            (plan.indices.len(), Designed { plan: Some((plan, inband)), ..Default::default() })
        }
        RecoveryStrategy::CenterAssign { partition } => {
            (m, Designed { leaves: Some(leaf_sampling(graph, partition, m)?), ..Default::default() })
        }
        RecoveryStrategy::Harmonic { .. } | RecoveryStrategy::TrendFilter { .. } => (m, Designed::default()),
    })
}

fn run_recover(p: &RecoverParams, graph: &Graph, signals: &Signals, config: &ExperimentConfig, out: &mut Outputs) -> RunResult<()> {
    let n = graph.num_nodes();
    let ms = if p.samples.is_empty() { vec![n.div_ceil(4)] } else { p.samples.clone() };
    if let Some(&m) = ms.iter().find(|&&m| m == 0 || m > n) {
        return Err(RunError::Config(format!("sample count {m} outside 1..={n}")));
    }
    let mut table = Table::new(&["strategy", "m", "seed", "signal", "nmse"]);
    for (si, strategy) in p.strategies.iter().enumerate() {
        let label = strategy.label();
        let counts: Vec<usize> = if matches!(strategy, RecoveryStrategy::Plan { .. }) { vec![0] } else { ms.clone() };
        for &requested in &counts {
            let (m, designed) = prepare(strategy, requested, graph)?;
            for seed in seed_list(config) {
                let xs = signals.for_seed(graph, seed.unwrap_or(0))?;
                let errors: Vec<f64> = xs
                    .par_iter()
                    .enumerate()
                    .map(|(s, x)| {
                        let stream = seed.unwrap_or(0) ^ ((si as u64) << 48) ^ ((m as u64) << 24) ^ s as u64;
                        let mut rng = ChaCha8Rng::seed_from_u64(stream);
                        match recover_one(strategy, m, x, graph, &designed, p.noise, &mut rng) {
                            Ok(rec) => normalized_mse(x, &rec),
                            // A random draw can miss the band; report it instead of aborting the run.
                            Err(Error::RankDeficient | Error::SingularSystem) => Ok(f64::NAN),
                            Err(e) => Err(e),
                        }
                    })
                    .collect::<crate::Result<_>>()?;
                for (s, e) in errors.iter().enumerate() {
                    table.push(vec![label.clone(), m.to_string(), seed_label(seed), s.to_string(), format_value(*e)]);
                }
                let finite: Vec<f64> = errors.iter().copied().filter(|e| e.is_finite()).collect();
                let mean = if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 };
                out.result(&label, Some(("m", m.to_string())), seed, "nmse", mean);
                out.result(&label, Some(("m", m.to_string())), seed, "failures", (errors.len() - finite.len()) as f64);
            }
        }
    }
    out.file("recovery_error.csv", table.to_csv());
    Ok(())
}

#[derive(Serialize)]
struct DetectionRecord {
    seed: u64,
    signal: Option<usize>,
    #[serde(flatten)]
    result: DetectionResult,
}

fn run_detect(p: &DetectParams, graph: &Graph, signals: &Signals, config: &ExperimentConfig, out: &mut Outputs) -> RunResult<()> {
    let tree = full_tree(graph, &p.partition)?;
    let dict = lsps_dictionary(graph, &tree, p.model)?;
    let budget = p.budget.unwrap_or(2 * dict.order.max(1) * dict.depth.max(1) * p.pieces.saturating_sub(1).max(1));
    let n = graph.num_nodes();
    let label = match p.model {
        LspsModel::Polynomial { degree } => format!("lsps-polynomial-{degree}"),
        LspsModel::Bandlimited { bandwidth } => format!("lsps-bandlimited-{bandwidth}"),
    };
    let mut records = Vec::new();
    for seed in config.seeds.iter().copied() {
        let xs = signals.for_seed(graph, seed)?;
        let cases: Vec<(Option<usize>, Vec<f64>)> = if xs.is_empty() {
            vec![(None, vec![0.0; n])]
        } else {
            xs.into_iter().enumerate().map(|(i, x)| (Some(i), x)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (signal, x) in cases {
            let y = noisy(&x, &(0..n).collect::<Vec<_>>(), p.sigma, &mut rng);
            let result = detect(&y, &dict, budget, p.sigma, p.delta)?;
            let method = format!("{label}-{}", signal.map_or("null".into(), |s| format!("signal-{s}")));
            out.result(&method, Some(("budget", budget.to_string())), Some(seed), "statistic", result.statistic);
            out.result(&method, Some(("budget", budget.to_string())), Some(seed), "reject", result.reject as u8 as f64);
            if p.trials > 0 {
                let rate = rejection_rate(&x, &dict, budget, p.sigma, p.delta, p.trials, seed)?;
                out.result(&method, Some(("budget", budget.to_string())), Some(seed), "rejection_rate", rate);
            }
            records.push(DetectionRecord { seed, signal, result });
        }
    }
    out.file("detection.json", serde_json::to_string_pretty(&records).expect("records serialize"));
    Ok(())
}

fn reseed(method: &PartitionMethod, seed: u64) -> PartitionMethod {
    match method {
        PartitionMethod::TwoMeans { seed: base } => PartitionMethod::TwoMeans { seed: base.wrapping_add(seed) },
        other => *other,
    }
}

struct EpidemicRun {
    seed: u64,
    trajectory: crate::epidemics::SisTrajectory,
    truth: Vec<f64>,
    local: Vec<f64>,
    random_mean: Vec<f64>,
    rates: crate::epidemics::SuccessRate,
    components: Vec<(usize, f64)>,
}

fn run_epidemics(p: &EpidemicsParams, graph: &Graph, config: &ExperimentConfig, out: &mut Outputs) -> RunResult<()> {
    let n = graph.num_nodes();
    if p.initial == 0 || p.initial > n {
        return Err(RunError::Config(format!("initial infected count {} outside 1..={n}", p.initial)));
    }
    if p.random_trials == 0 {
        return Err(RunError::Config("random_trials must be at least 1".into()));
    }
    let m = ((p.sample_fraction * n as f64).round() as usize).clamp(1, n);
    let runs: Vec<EpidemicRun> = config
        .seeds
        .par_iter()
        .map(|&seed| -> crate::Result<EpidemicRun> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seeds = random_sampling(n, p.initial, &mut rng);
            let params = SisParams { beta: p.beta, gamma: p.gamma, seeds, days: p.days, reinfection: p.reinfection };
            let trajectory = simulate_sis(graph, &params, seed)?;
            let truth = trajectory.incidences();
            let leaves = leaf_sampling(graph, &reseed(&p.partition, seed), m)?;
            let local = trajectory
                .states
                .iter()
                .map(|s| Ok(estimate_with_leaves(s, &leaves)?.0))
                .collect::<crate::Result<Vec<f64>>>()?;
            let random = (0..p.random_trials)
                .map(|_| trajectory.states.iter().map(|s| estimate_random(s, m, &mut rng)).collect())
                .collect::<crate::Result<Vec<Vec<f64>>>>()?;
            let random_mean = (0..truth.len())
                .map(|d| random.iter().map(|r| r[d]).sum::<f64>() / random.len() as f64)
                .collect();
            let rates = success_rate(&truth, &local, &random)?;
            let components = (0..trajectory.days())
                .map(|d| {
                    let c = trajectory.infected_components(graph, d);
                    let mean = if c.is_empty() { 0.0 } else { c.iter().map(Vec::len).sum::<usize>() as f64 / c.len() as f64 };
                    (c.len(), mean)
                })
                .collect();
            Ok(EpidemicRun { seed, trajectory, truth, local, random_mean, rates, components })
        })
        .collect::<crate::Result<_>>()?;
    let mut incidence = Table::new(&["seed", "day", "truth", "local_set", "random_mean"]);
    let mut success = Table::new(&["seed", "day", "success_rate"]);
    let mut comps = Table::new(&["seed", "day", "components", "mean_component_size"]);
    for r in &runs {
        for d in 0..r.truth.len() {
            let (seed, day) = (r.seed.to_string(), (d + 1).to_string());
            incidence.push(vec![
                seed.clone(),
                day.clone(),
                format_value(r.truth[d]),
                format_value(r.local[d]),
                format_value(r.random_mean[d]),
            ]);
            success.push(vec![seed.clone(), day.clone(), format_value(r.rates.per_day[d])]);
            comps.push(vec![seed, day, r.components[d].0.to_string(), format_value(r.components[d].1)]);
        }
        out.file(format!("trajectory_seed{}.csv", r.seed), r.trajectory.to_csv());
        let param = Some(("m", m.to_string()));
        out.result("local-set", param.clone(), Some(r.seed), "success_aggregate", r.rates.aggregate);
        let mae = r.truth.iter().zip(&r.local).map(|(a, b)| (a - b).abs()).sum::<f64>() / r.truth.len() as f64;
        out.result("local-set", param, Some(r.seed), "mean_abs_error", mae);
    }
    out.file("incidence.csv", incidence.to_csv());
    out.file("success_rate.csv", success.to_csv());
    out.file("components.csv", comps.to_csv());
    Ok(())
}
