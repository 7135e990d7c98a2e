//! Testing for a piecewise-smooth signal buried in white Gaussian noise.
//!
//! The test codes the observation with matching pursuit over a local-set dictionary and
//! rejects the noise-only hypothesis when the largest coefficient exceeds a union-bound
//! threshold `τ = σ √(2 ln(K·N·T / δ))`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::matching_pursuit;
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::graph::{build_matrix, Graph, StructureMatrixKind};
use crate::partition::LocalSet;
use crate::spectral::MAX_EIGEN_ITERATIONS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// Largest absolute matching-pursuit coefficient.
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub budget: usize,
    /// Atom holding the largest coefficient, if any coefficient is nonzero.
    pub top_atom: Option<usize>,
}

/// `σ √(2 ln(K·N·T / δ))`, with `K` and `T` clamped to at least 1.
pub fn detection_threshold(sigma: f64, delta: f64, order: usize, num_nodes: usize, depth: usize) -> f64 {
    let count = order.max(1) as f64 * num_nodes as f64 * depth.max(1) as f64;
    sigma * (2.0 * (count / delta).ln()).sqrt()
}

fn check_levels(sigma: f64, delta: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidNoise);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidLevel);
    }
    Ok(())
}

/// Runs the test on one observation. `K` and `T` are read from the dictionary.
pub fn detect(y: &[f64], dict: &Dictionary, budget: usize, sigma: f64, delta: f64) -> Result<DetectionResult> {
    check_levels(sigma, delta)?;
    if dict.num_atoms() == 0 {
        return Err(Error::EmptyDictionary);
    }
    if budget == 0 {
        return Err(Error::InvalidParameter("detection budget must be at least 1".into()));
    }
    let threshold = detection_threshold(sigma, delta, dict.order, dict.num_nodes(), dict.depth);
    let code = matching_pursuit(dict, y, budget)?;
    let top_atom = code
        .support
        .iter()
        .copied()
        .max_by(|&a, &b| code.coefficients[a].abs().total_cmp(&code.coefficients[b].abs()).then(b.cmp(&a)));
    let statistic = code.sup_norm();
    Ok(DetectionResult { statistic, threshold, reject: statistic > threshold, budget, top_atom })
}

/// Fraction of `trials` observations `x + σ·noise` that are rejected. Trial `i` draws its
/// noise from a generator seeded with `seed + i`, so results do not depend on thread count.
pub fn rejection_rate(
    x: &[f64],
    dict: &Dictionary,
    budget: usize,
    sigma: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_levels(sigma, delta)?;
    if x.len() != dict.num_nodes() {
        return Err(Error::DimensionMismatch { expected: dict.num_nodes(), found: x.len() });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let rejected = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let y: Vec<f64> = x
                .iter()
                .map(|v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    v + sigma * z
                })
                .collect();
            detect(&y, dict, budget, sigma, delta).map(|r| r.reject as usize)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(rejected as f64 / trials as f64)
}

/// Largest spectral norm over all column subsets of size `size`. Enumerates every subset,
/// so it refuses more than `max_subsets` of them.
pub fn restricted_spectral_norm(dict: &Dictionary, size: usize, max_subsets: u64) -> Result<f64> {
    let m = dict.num_atoms();
    if m == 0 {
        return Err(Error::EmptyDictionary);
    }
    let size = size.min(m);
    if size == 0 {
        return Ok(0.0);
    }
    let mut count: u64 = 1;
    for i in 0..size as u64 {
        count = count.saturating_mul(m as u64 - i) / (i + 1);
        if count > max_subsets {
            return Err(Error::InvalidParameter(format!(
                "more than {max_subsets} supports of size {size} among {m} atoms"
            )));
        }
    }
    let mut subset: Vec<usize> = (0..size).collect();
    let mut best = 0.0f64;
    loop {
        let columns = dict.atoms.select_columns(&subset);
        best = best.max(spectral_norm(&columns));
        // Advance to the next subset in lexicographic order.
        let Some(i) = (0..size).rev().find(|&i| subset[i] < m - size + i) else { break };
        subset[i] += 1;
        for j in i + 1..size {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(best)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    crate::linalg::singular_values(m).into_iter().fold(0.0, f64::max)
}

/// `‖D‖₂ / (1 − √ε)`, an upper bound on the signal-strength constant that holds for every
/// support size because a column subset never has a larger spectral norm.
pub fn strength_constant_upper_bound(dict: &Dictionary, eps_par: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps_par) {
        return Err(Error::InvalidParameter(format!("partition error must lie in [0, 1), got {eps_par}")));
    }
    Ok(spectral_norm(&dict.atoms) / (1.0 - eps_par.sqrt()))
}

/// Signal strength `‖x‖₂/σ` above which the test is guaranteed power: `C √s √(8 ln(KNT/δ))`
/// for a support budget `s`.
pub fn strength_requirement(constant: f64, budget: usize, delta: f64, order: usize, num_nodes: usize, depth: usize) -> f64 {
    let count = order.max(1) as f64 * num_nodes as f64 * depth.max(1) as f64;
    constant * (budget as f64).sqrt() * (8.0 * (count / delta).ln()).sqrt()
}

/// Per-signal partition error for a bandlimited model with `bandwidth` local eigenvectors:
/// `(λ_K xᵀx − xᵀL_cut x) / (min_S λ^{(S)}_{K+1} · xᵀx)`, clamped at zero. Sets with at most
/// `K` nodes are represented exactly and do not enter the minimum.
pub fn partition_epsilon(graph: &Graph, sets: &[LocalSet], x: &[f64], bandwidth: usize) -> Result<f64> {
    let n = graph.num_nodes();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if bandwidth == 0 || bandwidth > n {
        return Err(Error::BandOutOfRange { band: bandwidth, max: n });
    }
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let laplacian = build_matrix(graph, StructureMatrixKind::LaplacianUnnormalized)?;
    let mut global = SymmetricEigen::try_new(laplacian, 1e-14, MAX_EIGEN_ITERATIONS)
        .ok_or(Error::NonConvergedEigensolve)?
        .eigenvalues
        .as_slice()
        .to_vec();
    global.sort_by(f64::total_cmp);
    let lambda_k = global[bandwidth - 1];
    let mut owner = vec![usize::MAX; n];
    for (c, s) in sets.iter().enumerate() {
        for &v in s.nodes() {
            owner[v] = c;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::InvalidParameter("sets do not cover every node".into()));
    }
    let cut: f64 = graph
        .edges()
        .iter()
        .filter(|e| owner[e.src] != owner[e.dst])
        .map(|e| e.weight * (x[e.src] - x[e.dst]).powi(2))
        .sum();
    let mut floor = f64::INFINITY;
    for s in sets.iter().filter(|s| s.len() > bandwidth) {
        let local = graph.induced_subgraph(s.nodes());
        let lap = build_matrix(&local, StructureMatrixKind::LaplacianUnnormalized)?;
        let mut ev = SymmetricEigen::try_new(lap, 1e-14, MAX_EIGEN_ITERATIONS)
            .ok_or(Error::NonConvergedEigensolve)?
            .eigenvalues
            .as_slice()
            .to_vec();
        ev.sort_by(f64::total_cmp);
        floor = floor.min(ev[bandwidth]);
    }
    if floor.is_infinite() {
        return Ok(0.0);
    }
    Ok(((lambda_k * energy - cut) / (floor * energy)).max(0.0))
}
