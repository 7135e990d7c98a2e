//! Builds a local-set tree by recursive bipartition, turns it into the piecewise-constant
//! wavelet basis and checks orthonormality and sparsity on a two-piece signal.

use graphsig::dictionary::lspc_wavelet_basis;
use graphsig::graph::{difference_operator, generators};
use graphsig::partition::{build_tree, PartitionMethod, StopRule};

fn main() -> graphsig::Result<()> {
    let graph = generators::grid(8, 8);
    for method in [PartitionMethod::SpectralClustering, PartitionMethod::SpanningTree, PartitionMethod::TwoMeans { seed: 1 }] {
        let tree = build_tree(&graph, &method, StopRule::FullDepth)?;
        let w = lspc_wavelet_basis(&tree)?;
        let gram = w.atoms.transpose() * &w.atoms;
        let off = (gram - nalgebra::DMatrix::identity(w.num_atoms(), w.num_atoms())).abs().max();

        // Left half 3, right half -1: one straight cut through the grid.
        let x: Vec<f64> = (0..64).map(|v| if v % 8 < 4 { 3.0 } else { -1.0 }).collect();
        let cuts = difference_operator(&graph).count_nonzero(&x, 1e-12);
        let nonzero = w.analyze(&x).iter().filter(|c| c.abs() > 1e-9).count();
        println!(
            "{:<20} depth {}, |WᵀW - I| = {off:.1e}, {nonzero} nonzero coefficients for {cuts} cut edges",
            method.name(),
            tree.depth()
        );
    }

    let path = generators::path(4);
    let tree = build_tree(&path, &PartitionMethod::SpanningTree, StopRule::FullDepth)?;
    let w = lspc_wavelet_basis(&tree)?;
    for j in 0..w.num_atoms() {
        println!("path(4) atom {j}: {:?}", w.atom(j));
    }
    Ok(())
}
