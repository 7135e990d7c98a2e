//! K-term approximation in orthonormal or biorthonormal bases, and greedy sparse coding
//! (orthogonal and plain matching pursuit) over redundant dictionaries.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dictionary::{AtomFamily, Dictionary};
use crate::error::{Error, Result};
use crate::spectral::FourierBasis;

/// Why a greedy solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The sparsity budget was used up.
    Budget,
    /// The signal was reproduced exactly before the budget ran out.
    ZeroResidual,
    /// The next selected atom was linearly dependent on the support.
    RankDeficientSupport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCode {
    /// One coefficient per atom; zero off the support.
    pub coefficients: Vec<f64>,
    /// Atoms in the order they were selected.
    pub support: Vec<usize>,
    pub residual_norm: f64,
    pub termination: Termination,
}

impl SparseCode {
    /// Support values in selection order.
    pub fn values(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.coefficients[i]).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A complete expansion `x = synthesize(analyze(x))`.
pub trait Basis {
    fn dimension(&self) -> usize;
    fn analyze(&self, x: &[f64]) -> Vec<f64>;
    fn synthesize(&self, coefficients: &[f64]) -> Vec<f64>;
    fn check_basis(&self) -> Result<()> {
        Ok(())
    }
}

impl Basis for FourierBasis {
    fn dimension(&self) -> usize {
        self.len()
    }

    fn analyze(&self, x: &[f64]) -> Vec<f64> {
        self.transform(x)
    }

    fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        self.inverse(coefficients)
    }
}

/// Only the wavelet family of dictionaries is an orthonormal basis.
impl Basis for Dictionary {
    fn dimension(&self) -> usize {
        self.num_nodes()
    }

    fn analyze(&self, x: &[f64]) -> Vec<f64> {
        Dictionary::analyze(self, x)
    }

    fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        Dictionary::synthesize(self, coefficients)
    }

    fn check_basis(&self) -> Result<()> {
        if self.family == AtomFamily::LspcWavelet && self.num_atoms() == self.num_nodes() {
            Ok(())
        } else {
            Err(Error::NotABasis)
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Keeps the `k` largest-magnitude expansion coefficients (ties to the lower index).
pub fn nonlinear_approx<B: Basis + ?Sized>(basis: &B, x: &[f64], k: usize) -> Result<(Vec<f64>, SparseCode)> {
    basis.check_basis()?;
    let n = basis.dimension();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if k > n {
        return Err(Error::KOutOfRange { requested: k, max: n });
    }
    let full = basis.analyze(x);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| full[b].abs().total_cmp(&full[a].abs()).then(a.cmp(&b)));
    let mut coefficients = vec![0.0; n];
    let support: Vec<usize> = order[..k].iter().copied().filter(|&i| full[i] != 0.0).collect();
    support.iter().for_each(|&i| coefficients[i] = full[i]);
    let approx = basis.synthesize(&coefficients);
    let residual_norm = norm(&x.iter().zip(&approx).map(|(a, b)| a - b).collect::<Vec<_>>());
    let termination = if support.len() < k { Termination::ZeroResidual } else { Termination::Budget };
    Ok((approx, SparseCode { coefficients, support, residual_norm, termination }))
}

fn check_inputs(dict: &Dictionary, x: &[f64], k: usize) -> Result<()> {
    if dict.num_atoms() == 0 {
        return Err(Error::EmptyDictionary);
    }
    if x.len() != dict.num_nodes() {
        return Err(Error::DimensionMismatch { expected: dict.num_nodes(), found: x.len() });
    }
    if k == 0 {
        return Err(Error::KOutOfRange { requested: 0, max: dict.num_atoms() });
    }
    Ok(())
}

/// Index maximizing `|⟨r, d_j⟩| / ‖d_j‖` over atoms not excluded, with its raw inner
/// product. Scores equal up to rounding count as ties and go to the lower index.
fn select(dict: &Dictionary, norms: &[f64], r: &DVector<f64>, excluded: &[bool]) -> Option<(usize, f64)> {
    let corr = dict.atoms.tr_mul(r);
    let mut best: Option<(usize, f64)> = None;
    for j in 0..dict.num_atoms() {
        if excluded[j] {
            continue;
        }
        let score = corr[j].abs() / norms[j];
        if best.is_none_or(|(_, s)| score > s * (1.0 + TIE_TOL)) {
            best = Some((j, score));
        }
    }
    best.map(|(j, _)| (j, corr[j]))
}

const TIE_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-10;
const EXACT_TOL: f64 = 1e-12;

/// Orthogonal matching pursuit with a least-squares refit after every selection.
///
/// The refit is kept as an incremental QR factorization of the selected atoms.
pub fn omp(dict: &Dictionary, x: &[f64], k: usize) -> Result<SparseCode> {
    check_inputs(dict, x, k)?;
    let n = dict.num_nodes();
    let norms = dict.atom_norms();
    let xv = DVector::from_column_slice(x);
    let scale = xv.norm();
    let mut residual = xv.clone();
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut r = DMatrix::<f64>::zeros(k, k);
    let mut support = Vec::new();
    let mut used = vec![false; dict.num_atoms()];
    let mut termination = Termination::Budget;
    while support.len() < k.min(n) {
        if residual.norm() <= EXACT_TOL * scale {
            termination = Termination::ZeroResidual;
            break;
        }
        let Some((j, _)) = select(dict, &norms, &residual, &used) else { break };
        let atom = dict.atoms.column(j).into_owned();
        let mut v = atom.clone();
        let s = support.len();
        // Two passes of Gram-Schmidt keep the factor orthogonal to working precision.
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = qi.dot(&v);
                r[(i, s)] += c;
                v -= qi * c;
            }
        }
        let vn = v.norm();
        if vn <= RANK_TOL * norms[j] {
            termination = Termination::RankDeficientSupport;
            for i in 0..s {
                r[(i, s)] = 0.0;
            }
            break;
        }
        r[(s, s)] = vn;
        let qn = v / vn;
        residual -= &qn * qn.dot(&residual);
        q.push(qn);
        support.push(j);
        used[j] = true;
    }
    let s = support.len();
    let mut coefficients = vec![0.0; dict.num_atoms()];
    if s > 0 {
        let rhs = DVector::from_iterator(s, q.iter().map(|qi| qi.dot(&xv)));
        let rs = r.view((0, 0), (s, s)).into_owned();
        let c = rs.solve_upper_triangular(&rhs).ok_or(Error::RankDeficient)?;
        for (i, &j) in support.iter().enumerate() {
            coefficients[j] = c[i];
        }
    }
    let fitted = &dict.atoms * DVector::from_column_slice(&coefficients);
    let residual_norm = (xv - fitted).norm();
    Ok(SparseCode { coefficients, support, residual_norm, termination })
}

/// Matching pursuit: `k` greedy steps, each adding the projection onto one atom. Atoms may
/// be selected more than once; the support lists each atom at its first selection.
pub fn matching_pursuit(dict: &Dictionary, x: &[f64], k: usize) -> Result<SparseCode> {
    check_inputs(dict, x, k)?;
    let norms = dict.atom_norms();
    let mut residual = DVector::from_column_slice(x);
    let scale = residual.norm();
    let mut coefficients = vec![0.0; dict.num_atoms()];
    let mut support = Vec::new();
    let none = vec![false; dict.num_atoms()];
    let mut termination = Termination::Budget;
    for _ in 0..k {
        if residual.norm() <= EXACT_TOL * scale {
            termination = Termination::ZeroResidual;
            break;
        }
        let (j, corr) = select(dict, &norms, &residual, &none).expect("dictionary is nonempty");
        let step = corr / (norms[j] * norms[j]);
        coefficients[j] += step;
        residual -= dict.atoms.column(j) * step;
        if !support.contains(&j) {
            support.push(j);
        }
    }
    support.retain(|&j| coefficients[j] != 0.0);
    Ok(SparseCode { coefficients, support, residual_norm: residual.norm(), termination })
}

/// `‖x* − x‖² / ‖x‖²`.
pub fn normalized_mse(x: &[f64], approx: &[f64]) -> Result<f64> {
    if x.len() != approx.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: approx.len() });
    }
    let reference: f64 = x.iter().map(|v| v * v).sum();
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err: f64 = x.iter().zip(approx).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(err / reference)
}
