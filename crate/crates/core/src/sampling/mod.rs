//! Sampling design and signal recovery from node samples.
//!
//! * [`design`]: greedy selection of sampled nodes for partial least squares recovery.
//! * [`recovery`]: partial least squares, harmonic (ℓ₂ variation) and trend-filtering
//!   (ℓ₁ variation) recovery.
//! * [`leaves`]: sampling the centers of a tree's leaf sets and extending their values.

pub mod design;
pub mod leaves;
pub mod recovery;

pub use design::{design_sampling, objective_value, SamplingObjective, SamplingPlan};
pub use leaves::{
    center_assign_recover, leaf_sampling, mislabel_fraction, recovery_error_bound, LeafSampling,
};
pub use recovery::{harmonic_recover, pls_recover, trend_filter_recover, TrendFilterResult};

use rand::Rng;

/// Uniformly random sampled set of `m` distinct nodes, sorted.
pub fn random_sampling<R: Rng + ?Sized>(num_nodes: usize, m: usize, rng: &mut R) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(rng, num_nodes, m.min(num_nodes)).into_vec();
    picked.sort_unstable();
    picked
}

/// Default bandwidth for a sample budget: `⌈0.65·M⌉`.
pub fn default_bandwidth(samples: usize) -> usize {
    (0.65 * samples as f64).ceil() as usize
}
