use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// What the sampled set should keep small in the partial least squares error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingObjective {
    /// (a) worst-case bias from the out-of-band part.
    BiasWorst,
    /// (b) expected bias.
    BiasExpected,
    /// (c) worst-case noise amplification.
    NoiseWorst,
    /// (d) expected noise amplification.
    NoiseExpected,
    /// (e) worst-case bias plus weighted noise.
    TotalWorst,
    /// (f) expected bias plus weighted noise.
    TotalExpected,
}

impl SamplingObjective {
    pub const ALL: [SamplingObjective; 6] = [
        SamplingObjective::BiasWorst,
        SamplingObjective::BiasExpected,
        SamplingObjective::NoiseWorst,
        SamplingObjective::NoiseExpected,
        SamplingObjective::TotalWorst,
        SamplingObjective::TotalExpected,
    ];

    pub fn needs_complement(self) -> bool {
        !matches!(self, SamplingObjective::NoiseWorst | SamplingObjective::NoiseExpected)
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplingObjective::BiasWorst => "bias-worst",
            SamplingObjective::BiasExpected => "bias-expected",
            SamplingObjective::NoiseWorst => "noise-worst",
            SamplingObjective::NoiseExpected => "noise-expected",
            SamplingObjective::TotalWorst => "total-worst",
            SamplingObjective::TotalExpected => "total-expected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Sampled nodes in the order they were chosen.
    pub indices: Vec<usize>,
    pub objective: SamplingObjective,
    pub c_tradeoff: f64,
    /// Objective value of the final set.
    pub objective_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Free-form description of the in-band basis used for the design.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
}

impl SamplingPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

const RANK_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-12;

fn rows(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    m.select_rows(idx)
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    linalg::singular_values(m)
}

/// Smallest singular value of the sampled in-band rows.
fn sigma_min(d_omega: &DMatrix<f64>, idx: &[usize]) -> f64 {
    singular_values(&rows(d_omega, idx)).into_iter().fold(f64::INFINITY, f64::min)
}

/// Objective value for a sampled set, or `None` if the sampled rows are rank deficient.
pub fn objective_value(
    d_omega: &DMatrix<f64>,
    d_omega_c: Option<&DMatrix<f64>>,
    idx: &[usize],
    objective: SamplingObjective,
    c_tradeoff: f64,
) -> Option<f64> {
    let k = d_omega.ncols();
    let a = rows(d_omega, idx);
    if a.nrows() < k {
        return None;
    }
    let svd = linalg::svd(&a);
    let sv = svd.sigma.as_slice();
    let smax = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    let smin = sv.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if smin <= RANK_TOL * smax.max(1.0) {
        return None;
    }
    let noise_spectral = 1.0 / smin;
    let noise_frobenius = sv.iter().map(|s| 1.0 / (s * s)).sum::<f64>().sqrt();
    let bias = |spectral: bool| -> f64 {
        let Some(c) = d_omega_c else { return 0.0 };
        if c.ncols() == 0 {
            return 0.0;
        }
        let pinv = svd.pseudo_inverse();
        let term = pinv * rows(c, idx);
        if spectral {
            singular_values(&term).into_iter().fold(0.0, f64::max)
        } else {
            term.norm()
        }
    };
    Some(match objective {
        SamplingObjective::BiasWorst => bias(true),
        SamplingObjective::BiasExpected => bias(false).powi(2),
        SamplingObjective::NoiseWorst => noise_spectral,
        SamplingObjective::NoiseExpected => noise_frobenius,
        SamplingObjective::TotalWorst => bias(true) + c_tradeoff * noise_spectral,
        SamplingObjective::TotalExpected => bias(false) + c_tradeoff * noise_frobenius,
    })
}

/// Greedy forward selection of `m` sampled nodes.
///
/// While fewer than `K` nodes are chosen the smallest singular value of the sampled rows
/// is maximized; afterwards the objective is minimized. Ties go to the lowest node index.
pub fn design_sampling(
    d_omega: &DMatrix<f64>,
    d_omega_c: Option<&DMatrix<f64>>,
    m: usize,
    objective: SamplingObjective,
    c_tradeoff: f64,
) -> Result<SamplingPlan> {
    let n = d_omega.nrows();
    let k = d_omega.ncols();
    if m < k {
        return Err(Error::InsufficientSamples { samples: m, bandwidth: k });
    }
    if m > n || k == 0 {
        return Err(Error::InvalidSampleCount { requested: m, available: n, bandwidth: k });
    }
    if let Some(c) = d_omega_c {
        if c.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.nrows() });
        }
    } else if objective.needs_complement() {
        return Err(Error::MissingComplement);
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut taken = vec![false; n];
    let mut value = f64::INFINITY;
    while chosen.len() < m {
        let mut best: Option<(usize, f64)> = None;
        let growing = chosen.len() + 1 < k;
        for v in (0..n).filter(|&v| !taken[v]) {
            chosen.push(v);
            let score = if growing {
                // Maximize σ_min by minimizing its negation.
                Some(-sigma_min(d_omega, &chosen))
            } else {
                objective_value(d_omega, d_omega_c, &chosen, objective, c_tradeoff)
            };
            chosen.pop();
            let Some(score) = score else { continue };
            let better = match best {
                None => true,
                Some((_, b)) => score < b - TIE_TOL * b.abs().max(1e-300),
            };
            if better {
                best = Some((v, score));
            }
        }
        let (v, score) = best.ok_or(Error::SingularDesign)?;
        chosen.push(v);
        taken[v] = true;
        if !growing {
            value = score;
        }
    }
    Ok(SamplingPlan { indices: chosen, objective, c_tradeoff, objective_value: value, seed: None, basis: None })
}
