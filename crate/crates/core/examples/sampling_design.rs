//! Greedy sampling designs for a bandlimited model, under each objective.

use graphsig::graph::{generators, StructureMatrixKind};
use graphsig::sampling::{design_sampling, pls_recover, SamplingObjective};
use graphsig::spectral::graph_fourier_basis;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> graphsig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let graph = generators::random_connected(40, 0.12, false, &mut rng);
    let basis = graph_fourier_basis(&graph, StructureMatrixKind::LaplacianUnnormalized)?;
    let (k, m) = (6, 10);
    let inband = basis.low_band(k);
    let outband = basis.v.columns(k, basis.len() - k).into_owned();

    for objective in SamplingObjective::ALL {
        let plan = design_sampling(&inband, Some(&outband), m, objective, 1.0)?;
        println!("{:<15} value {:>9.3}  nodes {:?}", objective.name(), plan.objective_value, plan.indices);
    }

    // Any full-rank design recovers a noiseless bandlimited signal exactly.
    let plan = design_sampling(&inband, None, m, SamplingObjective::NoiseWorst, 1.0)?;
    let coeffs = nalgebra::DVector::from_fn(k, |i, _| 1.0 / (i + 1) as f64);
    let x = (&inband * coeffs).as_slice().to_vec();
    let y: Vec<f64> = plan.indices.iter().map(|&i| x[i]).collect();
    let rec = pls_recover(&y, &plan, &inband)?;
    let err = x.iter().zip(&rec).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("recovery error from {m} samples: {err:.1e}");
    println!("{}", plan.to_json());
    Ok(())
}
