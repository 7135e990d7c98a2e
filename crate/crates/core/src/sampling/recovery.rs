use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::SamplingPlan;
use crate::error::{Error, Result};
use crate::linalg;
use crate::graph::{build_matrix, components_of, difference_operator, Graph, StructureMatrixKind};

/// Fits in-band coefficients to the samples and reconstructs through `d_omega`.
pub fn pls_recover(y_samples: &[f64], plan: &SamplingPlan, d_omega: &DMatrix<f64>) -> Result<Vec<f64>> {
    if y_samples.len() != plan.indices.len() {
        return Err(Error::SampleCountMismatch { expected: plan.indices.len(), found: y_samples.len() });
    }
    if let Some(&v) = plan.indices.iter().find(|&&v| v >= d_omega.nrows()) {
        return Err(Error::NodeOutOfRange { node: v, num_nodes: d_omega.nrows() });
    }
    let a = d_omega.select_rows(&plan.indices);
    let svd = linalg::svd(&a);
    let sv = svd.sigma.as_slice();
    let smax = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    if sv.len() < d_omega.ncols() || sv.iter().any(|&s| s <= 1e-10 * smax.max(1.0)) {
        return Err(Error::RankDeficient);
    }
    let coeffs = svd.solve(&DVector::from_column_slice(y_samples));
    Ok((d_omega * coeffs).as_slice().to_vec())
}

fn check_recovery_inputs(y: &[f64], sampled: &[usize], graph: &Graph, mu: f64) -> Result<Vec<bool>> {
    if graph.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("regularization weight must be positive, got {mu}")));
    }
    if y.len() != sampled.len() {
        return Err(Error::SampleCountMismatch { expected: sampled.len(), found: y.len() });
    }
    let n = graph.num_nodes();
    let mut mask = vec![false; n];
    for &v in sampled {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, num_nodes: n });
        }
        mask[v] = true;
    }
    // Every component needs a sample or the system has a free constant on it.
    let all: Vec<usize> = (0..n).collect();
    if components_of(graph, &all).iter().any(|c| c.iter().all(|&v| !mask[v])) {
        return Err(Error::SingularSystem);
    }
    Ok(mask)
}

fn extended(y: &[f64], sampled: &[usize], n: usize) -> DVector<f64> {
    let mut ext = DVector::zeros(n);
    for (&v, &val) in sampled.iter().zip(y) {
        ext[v] = val;
    }
    ext
}

/// Minimizes `‖t_M − y‖² + μ tᵀLt` by solving `(S + μL) t = S y`.
pub fn harmonic_recover(y_samples: &[f64], sampled: &[usize], graph: &Graph, mu: f64) -> Result<Vec<f64>> {
    let mask = check_recovery_inputs(y_samples, sampled, graph, mu)?;
    let n = graph.num_nodes();
    let mut system = build_matrix(graph, StructureMatrixKind::LaplacianUnnormalized)? * mu;
    for (v, &s) in mask.iter().enumerate() {
        if s {
            system[(v, v)] += 1.0;
        }
    }
    let chol = system.cholesky().ok_or(Error::SingularSystem)?;
    Ok(chol.solve(&extended(y_samples, sampled, n)).as_slice().to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFilterResult {
    pub signal: Vec<f64>,
    /// `‖t_M − y‖² + μ‖Δt‖₁` at `signal`.
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; `signal` is then the last iterate.
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

pub const TREND_FILTER_TOL: f64 = 1e-6;
pub const TREND_FILTER_MAX_ITERATIONS: usize = 10_000;

/// `‖t_M − y‖² + μ‖Δt‖₁`.
pub fn trend_filter_objective(y_samples: &[f64], sampled: &[usize], graph: &Graph, mu: f64, t: &[f64]) -> f64 {
    let fit: f64 = sampled.iter().zip(y_samples).map(|(&v, &y)| (t[v] - y).powi(2)).sum();
    let tv: f64 = difference_operator(graph).apply(t).iter().map(|v| v.abs()).sum();
    fit + mu * tv
}

/// Minimizes `‖t_M − y‖² + μ‖Δt‖₁` by the alternating direction method of multipliers on
/// the split `z = Δt` with penalty `ρ = μ`.
pub fn trend_filter_recover(
    y_samples: &[f64],
    sampled: &[usize],
    graph: &Graph,
    mu: f64,
) -> Result<TrendFilterResult> {
    let mask = check_recovery_inputs(y_samples, sampled, graph, mu)?;
    let n = graph.num_nodes();
    let delta = difference_operator(graph);
    let rho = mu;
    let mut system = build_matrix(graph, StructureMatrixKind::LaplacianUnnormalized)? * rho;
    for (v, &s) in mask.iter().enumerate() {
        if s {
            system[(v, v)] += 2.0;
        }
    }
    let chol = system.cholesky().ok_or(Error::SingularSystem)?;
    let data = extended(y_samples, sampled, n) * 2.0;
    let edges = delta.num_rows();
    let mut z = vec![0.0; edges];
    let mut u = vec![0.0; edges];
    let mut t = vec![0.0; n];
    let threshold = mu / rho;
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < TREND_FILTER_MAX_ITERATIONS {
        iterations += 1;
        let target: Vec<f64> = z.iter().zip(&u).map(|(a, b)| a - b).collect();
        let rhs = &data + DVector::from_vec(delta.apply_transpose(&target)) * rho;
        t = chol.solve(&rhs).as_slice().to_vec();
        let dt = delta.apply(&t);
        let z_old = std::mem::take(&mut z);
        z = dt
            .iter()
            .zip(&u)
            .map(|(d, w)| {
                let v = d + w;
                v.signum() * (v.abs() - threshold).max(0.0)
            })
            .collect();
        for ((ui, di), zi) in u.iter_mut().zip(&dt).zip(&z) {
            *ui += di - zi;
        }
        primal = dt.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dz: Vec<f64> = z.iter().zip(&z_old).map(|(a, b)| a - b).collect();
        dual = rho * delta.apply_transpose(&dz).iter().map(|v| v * v).sum::<f64>().sqrt();
        if primal <= TREND_FILTER_TOL && dual <= TREND_FILTER_TOL {
            converged = true;
            break;
        }
    }
    let objective = trend_filter_objective(y_samples, sampled, graph, mu, &t);
    Ok(TrendFilterResult { signal: t, objective, iterations, converged, primal_residual: primal, dual_residual: dual })
}
