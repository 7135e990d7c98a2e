//! Recovers a piecewise-constant signal from a quarter of its nodes with three
//! strategies: harmonic interpolation, trend filtering and leaf-center sampling.

use graphsig::approx::normalized_mse;
use graphsig::dictionary::{generators as signals, synthesize};
use graphsig::graph::{difference_operator, generators};
use graphsig::partition::PartitionMethod;
use graphsig::sampling::{
    center_assign_recover, harmonic_recover, leaf_sampling, random_sampling, recovery_error_bound,
    trend_filter_recover,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> graphsig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let graph = generators::grid(12, 12);
    let n = graph.num_nodes();
    let x = synthesize(&graph, &signals::piecewise_constant(&graph, 3, &mut rng)?)?;
    let m = n / 4;

    let idx = random_sampling(n, m, &mut rng);
    let y: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let harmonic = harmonic_recover(&y, &idx, &graph, 0.1)?;
    let tf = trend_filter_recover(&y, &idx, &graph, 0.1)?;
    println!("harmonic      nmse {:.3e}", normalized_mse(&x, &harmonic)?);
    println!("trend filter  nmse {:.3e} ({} iterations)", normalized_mse(&x, &tf.signal)?, tf.iterations);

    let leaves = leaf_sampling(&graph, &PartitionMethod::SpectralClustering, m)?;
    let samples: Vec<f64> = leaves.centers.iter().map(|&c| x[c]).collect();
    let rec = center_assign_recover(&samples, &leaves)?;
    let wrong = x.iter().zip(&rec).filter(|(a, b)| a != b).count();
    let cuts = difference_operator(&graph).count_nonzero(&x, 1e-12);
    println!(
        "center assign nmse {:.3e}; {wrong} nodes mislabeled, at most {} allowed by {cuts} cut edges",
        normalized_mse(&x, &rec)?,
        recovery_error_bound(cuts, &leaves)
    );
    Ok(())
}
