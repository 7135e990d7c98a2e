use thiserror::Error;

/// Failures raised by the library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node index {node} out of range for {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) has a zero or non-finite weight")]
    InvalidWeight(usize, usize),
    #[error("node {0} has zero degree")]
    ZeroDegreeNode(usize),
    #[error("operation requires an undirected graph")]
    DirectedGraph,
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("matrix is not symmetric (or not reversible) for this structure kind")]
    AsymmetricInput,
    #[error("eigensolver did not converge")]
    NonConvergedEigensolve,
    #[error("matrix has zero spectral radius")]
    ZeroSpectralRadius,
    #[error("expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("band size {band} outside 1..={max}")]
    BandOutOfRange { band: usize, max: usize },
    #[error("signal is identically zero")]
    ZeroSignal,
    #[error("node or band set is empty")]
    EmptySet,
    #[error("signal is not unit norm (norm {0})")]
    NotUnitNorm(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("local set has fewer than two nodes")]
    DegenerateSet,
    #[error("local set does not induce a connected subgraph")]
    DisconnectedInput,
    #[error("leaf count {requested} outside 1..={num_nodes}")]
    LeafCountOutOfRange { requested: usize, num_nodes: usize },
    #[error("tree is not a full-depth decomposition")]
    PartialTree,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid signal model: {0}")]
    InvalidModel(String),
    #[error("sparsity {requested} outside 0..={max}")]
    KOutOfRange { requested: usize, max: usize },
    #[error("reference signal is zero")]
    ZeroReference,
    #[error("dictionary has no atoms")]
    EmptyDictionary,
    #[error("representation is not a basis")]
    NotABasis,
    #[error("sample count {requested} is invalid for {available} nodes and bandwidth {bandwidth}")]
    InvalidSampleCount { requested: usize, available: usize, bandwidth: usize },
    #[error("{samples} samples cannot determine {bandwidth} coefficients")]
    InsufficientSamples { samples: usize, bandwidth: usize },
    #[error("no sampling set gives a left-invertible design")]
    SingularDesign,
    #[error("sampled rows of the basis are rank deficient")]
    RankDeficient,
    #[error("linear system is singular (a component has no sample)")]
    SingularSystem,
    #[error("objective requires the complementary basis block")]
    MissingComplement,
    #[error("expected {expected} samples, got {found}")]
    SampleCountMismatch { expected: usize, found: usize },
    #[error("noise level must be positive")]
    InvalidNoise,
    #[error("significance level must lie in (0, 1)")]
    InvalidLevel,
    #[error("invalid epidemic parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
