//! Discrete-time susceptible-infected-susceptible dynamics and incidence estimation from
//! sampled node states.
//!
//! All randomness in [`simulate_sis`] comes from hashing `(seed, day, node, contact)`, so two
//! runs with the same seed share every coin flip. Raising the infection probability can then
//! only add infections (under [`ReinfectionRule::Allowed`]).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components_of, Graph};
use crate::partition::PartitionMethod;
use crate::sampling::{leaf_sampling, LeafSampling};

/// Whether a node that recovers on a day may be infected again on the same day.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReinfectionRule {
    /// A recovering node stays susceptible for at least one day.
    #[default]
    Blocked,
    /// Recovery and reinfection are drawn independently.
    Allowed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SisParams {
    /// Per-contact, per-day infection probability.
    pub beta: f64,
    /// Per-day recovery probability.
    pub gamma: f64,
    pub seeds: Vec<usize>,
    /// Number of simulated days, including the seeding day.
    pub days: usize,
    #[serde(default)]
    pub reinfection: ReinfectionRule,
}

impl SisParams {
    pub fn new(beta: f64, gamma: f64, seeds: Vec<usize>, days: usize) -> Self {
        SisParams { beta, gamma, seeds, days, reinfection: ReinfectionRule::Blocked }
    }

    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        for (name, p) in [("beta", self.beta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParams("at least one seed node is required".into()));
        }
        if let Some(&v) = self.seeds.iter().find(|&&v| v >= num_nodes) {
            return Err(Error::NodeOutOfRange { node: v, num_nodes });
        }
        if self.days == 0 {
            return Err(Error::InvalidParams("at least one day is required".into()));
        }
        Ok(())
    }
}

/// Daily infection states. Row 0 is the seeding day; day `d` counted from 1 is row `d − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SisTrajectory {
    pub states: Vec<Vec<bool>>,
}

impl SisTrajectory {
    pub fn days(&self) -> usize {
        self.states.len()
    }

    pub fn day(&self, d: usize) -> &[bool] {
        &self.states[d]
    }

    /// Fraction of infected nodes on row `d`.
    pub fn incidence(&self, d: usize) -> f64 {
        incidence(&self.states[d])
    }

    pub fn incidences(&self) -> Vec<f64> {
        self.states.iter().map(|s| incidence(s)).collect()
    }

    /// Connected components of the infected nodes on row `d`, each sorted.
    pub fn infected_components(&self, graph: &Graph, d: usize) -> Vec<Vec<usize>> {
        let infected: Vec<usize> = (0..self.states[d].len()).filter(|&v| self.states[d][v]).collect();
        components_of(graph, &infected)
    }

    /// One row per day: `day,node_0,…,node_{N−1}` with 0/1 entries.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("day");
        for v in 0..n {
            out.push_str(&format!(",node_{v}"));
        }
        out.push('\n');
        for (d, row) in self.states.iter().enumerate() {
            out.push_str(&d.to_string());
            for &s in row {
                out.push_str(if s { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

pub fn incidence(state: &[bool]) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    state.iter().filter(|&&s| s).count() as f64 / state.len() as f64
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` determined by its arguments alone.
fn uniform(seed: u64, day: usize, node: usize, other: u64) -> f64 {
    let h = mix(mix(mix(mix(seed) ^ day as u64) ^ node as u64) ^ other);
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Marks the recovery draw so it cannot collide with a contact index.
const RECOVERY_STREAM: u64 = u64::MAX;

/// Synchronous daily updates: an infected node recovers with probability `γ`; a node is
/// infected through each infected neighbor independently with probability `β`, so a node
/// with `d` infected neighbors is infected with probability `1 − (1 − β)^d`.
pub fn simulate_sis(graph: &Graph, params: &SisParams, seed: u64) -> Result<SisTrajectory> {
    let n = graph.num_nodes();
    params.validate(n)?;
    let mut state = vec![false; n];
    params.seeds.iter().for_each(|&v| state[v] = true);
    let mut states = Vec::with_capacity(params.days);
    states.push(state);
    for day in 1..params.days {
        let prev = states.last().expect("seeded");
        let next: Vec<bool> = (0..n)
            .map(|v| {
                let recovers = prev[v] && uniform(seed, day, v, RECOVERY_STREAM) < params.gamma;
                if prev[v] && !recovers {
                    return true;
                }
                if recovers && params.reinfection == ReinfectionRule::Blocked {
                    return false;
                }
                graph
                    .undirected_neighbors(v)
                    .iter()
                    .any(|&(u, _)| prev[u] && uniform(seed, day, v, u as u64) < params.beta)
            })
            .collect();
        states.push(next);
    }
    Ok(SisTrajectory { states })
}

/// Incidence among `m` nodes drawn uniformly without replacement.
pub fn estimate_random<R: Rng + ?Sized>(state: &[bool], m: usize, rng: &mut R) -> Result<f64> {
    if m == 0 || m > state.len() {
        return Err(Error::InvalidParameter(format!("sample count {m} outside 1..={}", state.len())));
    }
    let hits = rand::seq::index::sample(rng, state.len(), m).iter().filter(|&i| state[i]).count();
    Ok(hits as f64 / m as f64)
}

/// Incidence of the center-assigned reconstruction from the leaves' center states.
pub fn estimate_with_leaves(state: &[bool], leaves: &LeafSampling) -> Result<(f64, Vec<f64>)> {
    if leaves.num_nodes() != state.len() {
        return Err(Error::DimensionMismatch { expected: leaves.num_nodes(), found: state.len() });
    }
    let x: Vec<f64> = state.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect();
    let recovered = leaves.recover_from(&x);
    let fraction = recovered.iter().sum::<f64>() / recovered.len() as f64;
    Ok((fraction, recovered))
}

/// Builds `m` leaves with `method`, reads their centers and extends the states.
pub fn estimate_local_set(
    state: &[bool],
    graph: &Graph,
    method: &PartitionMethod,
    m: usize,
) -> Result<(f64, Vec<f64>)> {
    if m == 0 || m > state.len() {
        return Err(Error::InvalidParameter(format!("sample count {m} outside 1..={}", state.len())));
    }
    estimate_with_leaves(state, &leaf_sampling(graph, method, m)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRate {
    /// Per day, the fraction of random trials that the deterministic estimate strictly beats.
    pub per_day: Vec<f64>,
    /// Fraction of days where the per-day rate exceeds one half.
    pub aggregate: f64,
}

/// Compares a deterministic estimator against repeated random estimates.
/// `random[t][d]` is trial `t` on day `d`.
pub fn success_rate(truth: &[f64], deterministic: &[f64], random: &[Vec<f64>]) -> Result<SuccessRate> {
    let days = truth.len();
    if deterministic.len() != days {
        return Err(Error::DimensionMismatch { expected: days, found: deterministic.len() });
    }
    if random.is_empty() {
        return Err(Error::InvalidParameter("at least one random trial is required".into()));
    }
    if let Some(row) = random.iter().find(|r| r.len() != days) {
        return Err(Error::DimensionMismatch { expected: days, found: row.len() });
    }
    let per_day: Vec<f64> = (0..days)
        .map(|d| {
            let err = (deterministic[d] - truth[d]).abs();
            let wins = random.iter().filter(|r| err < (r[d] - truth[d]).abs()).count();
            wins as f64 / random.len() as f64
        })
        .collect();
    let aggregate = if days == 0 { 0.0 } else { per_day.iter().filter(|&&r| r > 0.5).count() as f64 / days as f64 };
    Ok(SuccessRate { per_day, aggregate })
}
