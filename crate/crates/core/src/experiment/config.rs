use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{RunError, RunResult};
use crate::dictionary::LspsModel;
use crate::epidemics::ReinfectionRule;
use crate::graph::StructureMatrixKind;
use crate::partition::PartitionMethod;
use crate::sampling::SamplingObjective;

pub const SCHEMA_VERSION: u32 = 1;

/// One experiment, usually read from a TOML file.
///
/// ```toml
/// schema_version = 1
/// seeds = [0, 1, 2]
///
/// [graph]
/// path = "road.edges"
///
/// [signal.synthesize]
/// class = "piecewise-constant"
/// pieces = 3
///
/// [task]
/// name = "approx"
/// ks = [1, 2, 4, 8]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalConfig>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub task: TaskConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    /// `src dst [weight]` lines with an optional `directed` header.
    #[default]
    EdgeList,
    /// Square CSV weight matrix.
    Adjacency,
}

impl std::str::FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edge-list" => Ok(GraphFormat::EdgeList),
            "adjacency" => Ok(GraphFormat::Adjacency),
            _ => Err(format!("unknown graph format `{s}` (expected edge-list or adjacency)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: GraphFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GraphGenerator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphGenerator {
    Path { nodes: usize },
    Cycle { nodes: usize },
    Star { nodes: usize },
    Grid { rows: usize, cols: usize },
    RandomConnected { nodes: usize, p: f64, #[serde(default)] weighted: bool, seed: u64 },
    RandomGeometric { nodes: usize, radius: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    /// CSV with one signal per column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesize: Option<SignalRecipe>,
    /// Synthesized signals per seed.
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

/// Random signal classes; each seed draws fresh pieces and coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalRecipe {
    PiecewiseConstant { pieces: usize },
    PiecewisePolynomial { pieces: usize, degree: usize },
    PiecewiseBandlimited { pieces: usize, bandwidth: usize },
    /// Unit-norm signal in the span of the first `bandwidth` basis vectors.
    Bandlimited { #[serde(default = "default_kind")] kind: StructureMatrixKind, bandwidth: usize },
}

fn default_kind() -> StructureMatrixKind {
    StructureMatrixKind::LaplacianUnnormalized
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Gft,
    Localize,
    Approx,
    DesignSample,
    Recover,
    Detect,
    Epidemics,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Gft => "gft",
            TaskKind::Localize => "localize",
            TaskKind::Approx => "approx",
            TaskKind::DesignSample => "design-sample",
            TaskKind::Recover => "recover",
            TaskKind::Detect => "detect",
            TaskKind::Epidemics => "epidemics",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum TaskConfig {
    Gft(GftParams),
    Localize(LocalizeParams),
    Approx(ApproxParams),
    DesignSample(DesignParams),
    Recover(RecoverParams),
    Detect(DetectParams),
    Epidemics(EpidemicsParams),
}

impl TaskConfig {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskConfig::Gft(_) => TaskKind::Gft,
            TaskConfig::Localize(_) => TaskKind::Localize,
            TaskConfig::Approx(_) => TaskKind::Approx,
            TaskConfig::DesignSample(_) => TaskKind::DesignSample,
            TaskConfig::Recover(_) => TaskKind::Recover,
            TaskConfig::Detect(_) => TaskKind::Detect,
            TaskConfig::Epidemics(_) => TaskKind::Epidemics,
        }
    }

    /// The task with every parameter at its default.
    pub fn default_for(kind: TaskKind) -> Self {
        match kind {
            TaskKind::Gft => TaskConfig::Gft(GftParams::default()),
            TaskKind::Localize => TaskConfig::Localize(LocalizeParams::default()),
            TaskKind::Approx => TaskConfig::Approx(ApproxParams::default()),
            TaskKind::DesignSample => TaskConfig::DesignSample(DesignParams::default()),
            TaskKind::Recover => TaskConfig::Recover(RecoverParams::default()),
            TaskKind::Detect => TaskConfig::Detect(DetectParams::default()),
            TaskKind::Epidemics => TaskConfig::Epidemics(EpidemicsParams::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GftParams {
    pub kind: StructureMatrixKind,
}

impl Default for GftParams {
    fn default() -> Self {
        GftParams { kind: default_kind() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizeParams {
    pub kinds: Vec<StructureMatrixKind>,
    /// Energy fraction that defines the support for NGD and ECR.
    pub threshold: f64,
}

impl Default for LocalizeParams {
    fn default() -> Self {
        LocalizeParams {
            kinds: vec![
                StructureMatrixKind::Adjacency,
                StructureMatrixKind::Transition,
                StructureMatrixKind::LaplacianUnnormalized,
            ],
            threshold: crate::spectral::Localizer::DEFAULT_THRESHOLD,
        }
    }
}

/// A basis or dictionary to approximate with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Representation {
    Fourier { kind: StructureMatrixKind },
    Polynomial { degree: usize },
    LspcWavelet,
    Lspc,
    LspsPolynomial { degree: usize },
    LspsBandlimited { bandwidth: usize },
}

impl Representation {
    pub fn label(&self) -> String {
        match self {
            Representation::Fourier { kind } => format!("fourier-{}", kind.name()),
            Representation::Polynomial { degree } => format!("polynomial-{degree}"),
            Representation::LspcWavelet => "lspc-wavelet".into(),
            Representation::Lspc => "lspc".into(),
            Representation::LspsPolynomial { degree } => format!("lsps-polynomial-{degree}"),
            Representation::LspsBandlimited { bandwidth } => format!("lsps-bandlimited-{bandwidth}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproxParams {
    pub representations: Vec<Representation>,
    /// Numbers of coefficients; empty means up to 20 evenly spaced values in `1..=N`.
    pub ks: Vec<usize>,
    /// Partition used by the local-set representations.
    pub partition: PartitionMethod,
}

impl Default for ApproxParams {
    fn default() -> Self {
        ApproxParams {
            representations: vec![
                Representation::Fourier { kind: default_kind() },
                Representation::LspcWavelet,
                Representation::LspsPolynomial { degree: 2 },
            ],
            ks: Vec::new(),
            partition: PartitionMethod::SpanningTree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignParams {
    pub kind: StructureMatrixKind,
    /// Sample count; defaults to `⌈N/4⌉`.
    pub samples: Option<usize>,
    /// In-band size; defaults to `⌈0.65·M⌉`.
    pub bandwidth: Option<usize>,
    pub objectives: Vec<SamplingObjective>,
    pub c_tradeoff: f64,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            kind: default_kind(),
            samples: None,
            bandwidth: None,
            objectives: vec![SamplingObjective::NoiseWorst],
            c_tradeoff: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RecoveryStrategy {
    /// Greedy designed samples, partial least squares over the low band.
    Pls {
        #[serde(default = "default_objective")]
        objective: SamplingObjective,
        #[serde(default = "default_kind")]
        kind: StructureMatrixKind,
        #[serde(default)]
        bandwidth: Option<usize>,
        #[serde(default = "default_c")]
        c_tradeoff: f64,
    },
    /// Uniformly random samples, partial least squares over the low band.
    RandomPls {
        #[serde(default = "default_kind")]
        kind: StructureMatrixKind,
        #[serde(default)]
        bandwidth: Option<usize>,
    },
    /// Samples from a saved plan; runs once at the plan's sample count.
    Plan {
        path: PathBuf,
        #[serde(default = "default_kind")]
        kind: StructureMatrixKind,
        bandwidth: usize,
    },
    /// Random samples, ℓ₂ variation penalty.
    Harmonic { mu: f64 },
    /// Random samples, ℓ₁ variation penalty.
    TrendFilter { mu: f64 },
    /// One sample per leaf center, piecewise-constant extension.
    CenterAssign {
        #[serde(default = "default_partition")]
        partition: PartitionMethod,
    },
}

fn default_objective() -> SamplingObjective {
    SamplingObjective::NoiseWorst
}

fn default_c() -> f64 {
    1.0
}

fn default_partition() -> PartitionMethod {
    PartitionMethod::SpanningTree
}

impl RecoveryStrategy {
    pub fn label(&self) -> String {
        match self {
            RecoveryStrategy::Pls { objective, .. } => format!("pls-{}", objective.name()),
            RecoveryStrategy::RandomPls { .. } => "pls-random".into(),
            RecoveryStrategy::Plan { .. } => "pls-plan".into(),
            RecoveryStrategy::Harmonic { .. } => "harmonic".into(),
            RecoveryStrategy::TrendFilter { .. } => "trend-filter".into(),
            RecoveryStrategy::CenterAssign { partition } => format!("center-assign-{}", partition.name()),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self,
            RecoveryStrategy::RandomPls { .. } | RecoveryStrategy::Harmonic { .. } | RecoveryStrategy::TrendFilter { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoverParams {
    /// Sample counts; empty means `⌈N/4⌉`.
    pub samples: Vec<usize>,
    pub strategies: Vec<RecoveryStrategy>,
    /// Standard deviation of Gaussian noise added to the samples.
    pub noise: f64,
}

impl Default for RecoverParams {
    fn default() -> Self {
        RecoverParams {
            samples: Vec::new(),
            strategies: vec![
                RecoveryStrategy::Pls {
                    objective: default_objective(),
                    kind: default_kind(),
                    bandwidth: None,
                    c_tradeoff: 1.0,
                },
                RecoveryStrategy::Harmonic { mu: 1.0 },
                RecoveryStrategy::CenterAssign { partition: default_partition() },
            ],
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectParams {
    pub model: LspsModel,
    pub partition: PartitionMethod,
    pub sigma: f64,
    pub delta: f64,
    /// Matching pursuit steps; defaults to `2·K·T·max(pieces − 1, 1)`.
    pub budget: Option<usize>,
    /// Declared piece count of the sought signal, used only for the default budget.
    pub pieces: usize,
    /// Monte Carlo trials for empirical rejection rates; 0 skips them.
    pub trials: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            model: LspsModel::Bandlimited { bandwidth: 2 },
            partition: PartitionMethod::SpanningTree,
            sigma: 1.0,
            delta: 0.05,
            budget: None,
            pieces: 2,
            trials: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpidemicsParams {
    pub beta: f64,
    pub gamma: f64,
    /// Number of initially infected nodes, drawn per seed.
    pub initial: usize,
    pub days: usize,
    /// Sampled nodes as a fraction of `N`.
    pub sample_fraction: f64,
    pub random_trials: usize,
    /// Partition for the leaf sampling; a two-means seed is offset by the run seed.
    pub partition: PartitionMethod,
    pub reinfection: ReinfectionRule,
}

impl Default for EpidemicsParams {
    fn default() -> Self {
        EpidemicsParams {
            beta: 0.6,
            gamma: 0.1,
            initial: 3,
            days: 49,
            sample_fraction: 0.25,
            random_trials: 100,
            partition: PartitionMethod::TwoMeans { seed: 0 },
            reinfection: ReinfectionRule::Blocked,
        }
    }
}

impl ExperimentConfig {
    /// A config with default parameters for `kind` and nothing else set.
    pub fn for_task(kind: TaskKind) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            graph: None,
            signal: None,
            seeds: Vec::new(),
            out: None,
            task: TaskConfig::default_for(kind),
        }
    }

    pub fn from_toml(text: &str) -> RunResult<Self> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    /// Reads a TOML file; relative paths inside it are taken relative to the file.
    pub fn load(path: &Path) -> RunResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.graph.as_mut().and_then(|g| g.path.as_mut()) {
            fix(p);
        }
        if let Some(p) = self.signal.as_mut().and_then(|s| s.path.as_mut()) {
            fix(p);
        }
        if let Some(p) = self.out.as_mut() {
            fix(p);
        }
        if let TaskConfig::Recover(r) = &mut self.task {
            for s in &mut r.strategies {
                if let RecoveryStrategy::Plan { path, .. } = s {
                    fix(path);
                }
            }
        }
    }

    fn needs_seeds(&self) -> bool {
        let synthesized = self.signal.as_ref().is_some_and(|s| s.synthesize.is_some());
        let task = match &self.task {
            TaskConfig::Recover(r) => r.noise > 0.0 || r.strategies.iter().any(RecoveryStrategy::is_random),
            TaskConfig::Detect(_) | TaskConfig::Epidemics(_) => true,
            _ => false,
        };
        synthesized || task
    }

    /// Checks everything that can be checked without loading the graph.
    pub fn validate(&self) -> RunResult<()> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        let Some(graph) = &self.graph else { return bad("no graph given".into()) };
        match (&graph.path, &graph.generate) {
            (Some(p), None) => {
                if !p.exists() {
                    return bad(format!("graph file {} does not exist", p.display()));
                }
            }
            (None, Some(_)) => {}
            _ => return bad("graph needs exactly one of `path` or `generate`".into()),
        }
        if let Some(signal) = &self.signal {
            match (&signal.path, &signal.synthesize) {
                (Some(p), None) => {
                    if !p.exists() {
                        return bad(format!("signal file {} does not exist", p.display()));
                    }
                }
                (None, Some(_)) => {
                    if signal.count == 0 {
                        return bad("signal count must be at least 1".into());
                    }
                }
                _ => return bad("signal needs exactly one of `path` or `synthesize`".into()),
            }
        }
        if self.needs_seeds() && self.seeds.is_empty() {
            return bad(format!("task `{}` is stochastic and needs `seeds`", self.task.kind().name()));
        }
        let needs_signal = matches!(self.task, TaskConfig::Approx(_) | TaskConfig::Recover(_));
        if needs_signal && self.signal.is_none() {
            return bad(format!("task `{}` needs a signal", self.task.kind().name()));
        }
        match &self.task {
            TaskConfig::Localize(p) if !(p.threshold > 0.0 && p.threshold <= 1.0) => {
                bad(format!("threshold {} outside (0, 1]", p.threshold))
            }
            TaskConfig::Recover(r) => {
                for s in &r.strategies {
                    if let RecoveryStrategy::Plan { path, .. } = s {
                        if !path.exists() {
                            return bad(format!("plan file {} does not exist", path.display()));
                        }
                    }
                }
                if r.noise < 0.0 {
                    return bad("noise must be nonnegative".into());
                }
                Ok(())
            }
            TaskConfig::Epidemics(p) if !(p.sample_fraction > 0.0 && p.sample_fraction <= 1.0) => {
                bad(format!("sample_fraction {} outside (0, 1]", p.sample_fraction))
            }
            _ => Ok(()),
        }
    }
}
