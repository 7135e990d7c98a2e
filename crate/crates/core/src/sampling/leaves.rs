use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{build_tree, distance_sum_center, LocalSet, PartitionMethod, StopRule};

/// Leaf sets of a partially built tree and one sampled center per leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafSampling {
    pub leaves: Vec<LocalSet>,
    pub centers: Vec<usize>,
}

impl LeafSampling {
    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn num_nodes(&self) -> usize {
        self.leaves.iter().map(|l| l.len()).sum()
    }

    pub fn largest_leaf(&self) -> usize {
        self.leaves.iter().map(|l| l.len()).max().unwrap_or(0)
    }

    /// Reads the signal at the centers and extends each value over its leaf.
    pub fn recover_from(&self, x: &[f64]) -> Vec<f64> {
        let samples: Vec<f64> = self.centers.iter().map(|&c| x[c]).collect();
        center_assign_recover(&samples, self).expect("one sample per leaf")
    }
}

/// Splits the graph into `m` leaves, largest first, and samples each leaf's center.
pub fn leaf_sampling(graph: &Graph, method: &PartitionMethod, m: usize) -> Result<LeafSampling> {
    let tree = build_tree(graph, method, StopRule::LeafCount { leaves: m })?;
    let leaves: Vec<LocalSet> = tree.leaves().map(|t| t.set.clone()).collect();
    let centers = leaves.iter().map(|l| distance_sum_center(graph, l.nodes())).collect();
    Ok(LeafSampling { leaves, centers })
}

/// Piecewise-constant extension of the center samples.
pub fn center_assign_recover(samples: &[f64], leaves: &LeafSampling) -> Result<Vec<f64>> {
    if samples.len() != leaves.len() {
        return Err(Error::SampleCountMismatch { expected: leaves.len(), found: samples.len() });
    }
    let mut x = vec![0.0; leaves.num_nodes()];
    for (leaf, &value) in leaves.leaves.iter().zip(samples) {
        leaf.nodes().iter().for_each(|&v| x[v] = value);
    }
    Ok(x)
}

/// Upper bound on mislabeled nodes for a signal with `cut_edges` inconsistent edges.
pub fn recovery_error_bound(cut_edges: usize, leaves: &LeafSampling) -> usize {
    cut_edges * leaves.largest_leaf()
}

/// Fraction of nodes where `recovered`, snapped to the nearest value present in `x`,
/// differs from `x`. Snapping ties go to the smaller value.
pub fn mislabel_fraction(x: &[f64], recovered: &[f64]) -> Result<f64> {
    if x.len() != recovered.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: recovered.len() });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let mut levels = x.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let snap = |v: f64| -> f64 {
        let i = levels.partition_point(|&l| l < v);
        match (i.checked_sub(1).map(|j| levels[j]), levels.get(i)) {
            (Some(lo), Some(&hi)) => {
                if v - lo <= hi - v {
                    lo
                } else {
                    hi
                }
            }
            (Some(lo), None) => lo,
            (None, Some(&hi)) => hi,
            (None, None) => v,
        }
    };
    let wrong = x.iter().zip(recovered).filter(|(a, b)| **a != snap(**b)).count();
    Ok(wrong as f64 / x.len() as f64)
}
