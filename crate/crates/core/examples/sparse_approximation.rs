use graphsig::approx::{nonlinear_approx, normalized_mse, omp};
use graphsig::dictionary::{generators as signals, lspc_wavelet_basis, lsps_dictionary, synthesize, LspsModel};
use graphsig::graph::{generators, StructureMatrixKind};
use graphsig::partition::{build_tree, PartitionMethod, StopRule};
use graphsig::spectral::graph_fourier_basis;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Compares K-term approximations of a piecewise-polynomial signal.
fn main() -> graphsig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let graph = generators::random_geometric(120, 0.18, &mut rng);
    let x = synthesize(&graph, &signals::piecewise_polynomial(&graph, 4, 1, &mut rng)?)?;

    let fourier = graph_fourier_basis(&graph, StructureMatrixKind::LaplacianUnnormalized)?;
    let tree = build_tree(&graph, &PartitionMethod::SpectralClustering, StopRule::FullDepth)?;
    let wavelet = lspc_wavelet_basis(&tree)?;
    let lsps = lsps_dictionary(&graph, &tree, LspsModel::Polynomial { degree: 1 })?;

    println!("{:>4} {:>10} {:>10} {:>10}", "k", "fourier", "wavelet", "lsps-omp");
    for k in [2, 5, 10, 20, 40] {
        let f = normalized_mse(&x, &nonlinear_approx(&fourier, &x, k)?.0)?;
        let w = normalized_mse(&x, &nonlinear_approx(&wavelet, &x, k)?.0)?;
        let code = omp(&lsps, &x, k)?;
        let d = normalized_mse(&x, &lsps.synthesize(&code.coefficients))?;
        println!("{k:>4} {f:>10.2e} {w:>10.2e} {d:>10.2e}");
    }
    Ok(())
}
