//! Graph Fourier bases ordered by variation, bandlimited projection,
//! localization metrics and the vertex/spectrum uncertainty bound.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, build_matrix, Graph, StructureMatrixKind};

/// Eigenbasis of a structure matrix ordered from low to high frequency.
///
/// `v` holds basis vectors as columns (inverse transform) and `u = v⁻¹` is
/// the forward transform. For symmetric kinds `u = vᵀ`.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    pub v: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub kind: StructureMatrixKind,
}

impl FourierBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.v.column(i).iter().copied().collect()
    }

    /// Forward transform `U x`.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        (&self.u * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    /// Inverse transform `V a`.
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        (&self.v * DVector::from_column_slice(coeffs)).as_slice().to_vec()
    }

    /// The first `k` columns of `V`.
    pub fn low_band(&self, k: usize) -> DMatrix<f64> {
        self.v.columns(0, k).into_owned()
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }
}

pub(crate) const MAX_EIGEN_ITERATIONS: usize = 1_000_000;

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let tol = 1e-12 * max_abs(m).max(1.0);
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Recovers a positive vector `d` with `d_i P_ij = d_j P_ji` (reversibility), up to
/// one scale per connected block.
fn reversible_weights(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    let mut d = vec![0.0; n];
    for root in 0..n {
        if d[root] != 0.0 {
            continue;
        }
        d[root] = 1.0;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i == j || (p[(i, j)] == 0.0 && p[(j, i)] == 0.0) {
                    continue;
                }
                if p[(i, j)] == 0.0 || p[(j, i)] == 0.0 {
                    return Err(Error::AsymmetricInput);
                }
                let dj = d[i] * p[(i, j)] / p[(j, i)];
                if dj <= 0.0 {
                    return Err(Error::AsymmetricInput);
                }
                if d[j] == 0.0 {
                    d[j] = dj;
                    stack.push(j);
                } else if (d[j] - dj).abs() > 1e-9 * d[j].max(dj) {
                    return Err(Error::AsymmetricInput);
                }
            }
        }
    }
    Ok(d)
}

fn symmetric_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or(Error::NonConvergedEigensolve)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergedEigensolve);
    }
    Ok((eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors))
}

/// Sorts eigenpairs by frequency, orders degenerate eigenspaces by the position of
/// each vector's largest entry and makes the first nonzero entry positive.
fn order_columns(values: &[f64], vectors: &DMatrix<f64>, ascending: bool) -> (Vec<f64>, Vec<usize>, Vec<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let c = values[a].total_cmp(&values[b]);
        if ascending { c } else { c.reverse() }
    });
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;
    let peak = |c: usize| {
        let col = vectors.column(c);
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() * (1.0 + 1e-9) {
                best = i;
            }
        }
        best
    };
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[order[end]] - values[order[end - 1]]).abs() <= tol {
            end += 1;
        }
        order[start..end].sort_by_key(|&c| peak(c));
        start = end;
    }
    let sorted_values = order.iter().map(|&c| values[c]).collect();
    let signs = order
        .iter()
        .map(|&c| {
            let col = vectors.column(c);
            let cutoff = 1e-10 * col.amax();
            match col.iter().find(|v| v.abs() > cutoff) {
                Some(v) if *v < 0.0 => -1.0,
                _ => 1.0,
            }
        })
        .collect();
    (sorted_values, order, signs)
}

/// Eigendecomposition of a structure matrix with low-to-high frequency ordering.
///
/// Transition kinds are decomposed through the symmetric matrix similar to `P`.
pub fn fourier_basis(matrix: &DMatrix<f64>, kind: StructureMatrixKind) -> Result<FourierBasis> {
    use StructureMatrixKind::*;
    let n = matrix.nrows();
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
    }
    let ascending = kind.is_laplacian();
    if kind.is_transition() {
        let p = if kind == Transition { matrix.clone() } else { DMatrix::identity(n, n) - matrix };
        let d = reversible_weights(&p)?;
        let root: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| root[i] * p[(i, j)] / root[j]);
        let s = (&s + s.transpose()) * 0.5;
        let (mut values, q) = symmetric_eigen(s)?;
        if kind == LaplacianTransition {
            values.iter_mut().for_each(|l| *l = 1.0 - *l);
        }
        // Right eigenvectors of P are D^{-1/2} q; rescale them to unit norm.
        let raw = DMatrix::from_fn(n, n, |i, c| q[(i, c)] / root[i]);
        let (values, order, signs) = order_columns(&values, &raw, ascending);
        let mut v = DMatrix::zeros(n, n);
        let mut u = DMatrix::zeros(n, n);
        for (k, &c) in order.iter().enumerate() {
            let norm = raw.column(c).norm();
            for i in 0..n {
                v[(i, k)] = signs[k] * raw[(i, c)] / norm;
                u[(k, i)] = signs[k] * q[(i, c)] * root[i] * norm;
            }
        }
        return Ok(FourierBasis { v, u, eigenvalues: values, kind });
    }
    if !is_symmetric(matrix) {
        return Err(Error::AsymmetricInput);
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let (values, q) = symmetric_eigen(sym)?;
    let (values, order, signs) = order_columns(&values, &q, ascending);
    let v = DMatrix::from_fn(n, n, |i, k| signs[k] * q[(i, order[k])]);
    let u = v.transpose();
    Ok(FourierBasis { v, u, eigenvalues: values, kind })
}

/// Builds the structure matrix of an undirected graph and returns its Fourier basis.
pub fn graph_fourier_basis(graph: &Graph, kind: StructureMatrixKind) -> Result<FourierBasis> {
    if graph.is_directed() {
        return Err(Error::DirectedGraph);
    }
    fourier_basis(&build_matrix(graph, kind)?, kind)
}

/// Largest eigenvalue magnitude of a square matrix.
///
/// Matrices similar to a symmetric one through a diagonal scaling (transition matrices of
/// undirected graphs) use the symmetric solver. nalgebra's unbounded Schur iteration can
/// spin forever on such inputs, so the general path runs with an iteration cap.
pub fn spectral_radius(matrix: &DMatrix<f64>) -> Result<f64> {
    let largest = |values: &[f64]| values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if is_symmetric(matrix) {
        return Ok(largest(&symmetric_eigen(matrix.clone())?.0));
    }
    if let Ok(d) = reversible_weights(matrix) {
        let root: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
        let s = DMatrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| root[i] * matrix[(i, j)] / root[j]);
        return Ok(largest(&symmetric_eigen((&s + s.transpose()) * 0.5)?.0));
    }
    let cap = 1000 * matrix.nrows().max(1);
    [matrix.clone(), matrix.transpose()]
        .into_iter()
        .find_map(|m| Schur::try_new(m, f64::EPSILON, cap))
        .map(|schur| schur.complex_eigenvalues().iter().fold(0.0f64, |m, v| m.max(v.norm())))
        .ok_or(Error::NonConvergedEigensolve)
}

/// Total variation of `x` with respect to a structure matrix.
pub fn variation(x: &[f64], matrix: &DMatrix<f64>, kind: StructureMatrixKind) -> Result<f64> {
    let radius = if kind.is_laplacian() { 1.0 } else { spectral_radius(matrix)? };
    variation_with_radius(x, matrix, kind, radius)
}

/// Same as [`variation`] with a precomputed spectral radius for shift kinds.
pub fn variation_with_radius(
    x: &[f64],
    matrix: &DMatrix<f64>,
    kind: StructureMatrixKind,
    radius: f64,
) -> Result<f64> {
    if x.len() != matrix.ncols() {
        return Err(Error::DimensionMismatch { expected: matrix.ncols(), found: x.len() });
    }
    let xv = DVector::from_column_slice(x);
    let mx = matrix * &xv;
    if kind.is_laplacian() {
        return Ok(xv.dot(&mx).max(0.0));
    }
    if radius == 0.0 {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok((xv - mx / radius).norm_squared())
}

/// Projection onto the span of the first `k` basis vectors.
pub fn bandlimited_project(basis: &FourierBasis, k: usize, x: &[f64]) -> Result<Vec<f64>> {
    let n = basis.len();
    if k == 0 || k > n {
        return Err(Error::BandOutOfRange { band: k, max: n });
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let coeffs = basis.u.rows(0, k) * DVector::from_column_slice(x);
    Ok((basis.v.columns(0, k) * coeffs).as_slice().to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    /// Inverse participation ratio.
    pub ipr: f64,
    /// Fraction of nodes needed to hold the energy threshold.
    pub ecr: f64,
    /// Normalized mean pairwise distance over the energy-holding nodes.
    pub ngd: f64,
    pub support_size: usize,
    /// False when fewer than two nodes hold the energy, in which case `ngd` is 0.
    pub ngd_defined: bool,
}

/// Reusable distance data for computing many localization reports on one graph.
#[derive(Debug, Clone)]
pub struct Localizer {
    distances: DMatrix<f64>,
    diameter: f64,
    threshold: f64,
}

impl Localizer {
    pub const DEFAULT_THRESHOLD: f64 = 0.95;

    pub fn new(graph: &Graph) -> Self {
        Self::with_threshold(graph, Self::DEFAULT_THRESHOLD)
    }

    pub fn with_threshold(graph: &Graph, threshold: f64) -> Self {
        let distances = all_pairs_distances(graph);
        let diameter = distances.iter().filter(|d| d.is_finite()).fold(0.0f64, |m, &d| m.max(d));
        Localizer { distances, diameter, threshold }
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn report(&self, x: &[f64]) -> Result<LocalizationReport> {
        let n = self.distances.nrows();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let energy: f64 = x.iter().map(|v| v * v).sum();
        if energy == 0.0 {
            return Err(Error::ZeroSignal);
        }
        let ipr = x.iter().map(|v| v.powi(4)).sum::<f64>() / (energy * energy);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
        let target = self.threshold * energy * (1.0 - 1e-12);
        let mut cumulative = 0.0;
        let mut support = n;
        for (k, &i) in order.iter().enumerate() {
            cumulative += x[i] * x[i];
            if cumulative >= target {
                support = k + 1;
                break;
            }
        }
        let members = &order[..support];
        let (ngd, ngd_defined) = if support < 2 {
            (0.0, false)
        } else if self.diameter == 0.0 {
            (0.0, true)
        } else {
            let mut total = 0.0;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let d = self.distances[(i, j)];
                    total += if d.is_finite() { d } else { self.diameter };
                }
            }
            let pairs = (support * (support - 1) / 2) as f64;
            (total / pairs / self.diameter, true)
        };
        Ok(LocalizationReport {
            ipr,
            ecr: support as f64 / n as f64,
            ngd,
            support_size: support,
            ngd_defined,
        })
    }
}

pub fn localization_report(graph: &Graph, x: &[f64]) -> Result<LocalizationReport> {
    Localizer::new(graph).report(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyCheck {
    /// Energy outside the node set.
    pub eps_vertex: f64,
    /// Energy outside the band.
    pub eps_spectrum: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of the vertex/spectrum uncertainty inequality.
pub fn uncertainty_check(
    basis: &FourierBasis,
    nodes: &[usize],
    band: &[usize],
    x: &[f64],
) -> Result<UncertaintyCheck> {
    let n = basis.len();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if nodes.is_empty() || band.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&bad) = nodes.iter().chain(band).find(|&&i| i >= n) {
        return Err(Error::NodeOutOfRange { node: bad, num_nodes: n });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnitNorm(norm));
    }
    let mut in_nodes = vec![false; n];
    nodes.iter().for_each(|&i| in_nodes[i] = true);
    let eps_vertex: f64 = (0..n).filter(|&i| !in_nodes[i]).map(|i| x[i] * x[i]).sum();

    let xv = DVector::from_column_slice(x);
    let mut projected = DVector::zeros(n);
    let mut peak = 0.0f64;
    for &k in band {
        let row = basis.u.row(k);
        peak = row.iter().fold(peak, |m, v| m.max(v.abs()));
        projected += basis.v.column(k) * row.dot(&xv.transpose());
    }
    let eps_spectrum = (xv - projected).norm_squared();

    let lhs = (nodes.len() * band.len()) as f64;
    let slack = 1.0 - (eps_vertex + eps_spectrum);
    let rhs = if slack > 0.0 { slack * slack / (peak * peak) } else { 0.0 };
    // Relative tolerance absorbs rounding in the equality case.
    let holds = lhs >= rhs * (1.0 - 1e-12);
    Ok(UncertaintyCheck { eps_vertex, eps_spectrum, lhs, rhs, holds })
}
