//! Fourier bases of a small grid under several structure matrices, and how the
//! energy of a smooth signal concentrates in the low band.
//!
//!     cargo run --example graph_fourier

use graphsig::graph::{build_matrix, generators, StructureMatrixKind};
use graphsig::spectral::{bandlimited_project, graph_fourier_basis, variation};

fn main() -> graphsig::Result<()> {
    let graph = generators::grid(4, 5);
    let n = graph.num_nodes();

    for kind in [
        StructureMatrixKind::LaplacianUnnormalized,
        StructureMatrixKind::LaplacianNormalized,
        StructureMatrixKind::Adjacency,
    ] {
        let basis = graph_fourier_basis(&graph, kind)?;
        let matrix = build_matrix(&graph, kind)?;
        let first = variation(&basis.vector(0), &matrix, kind)?;
        let last = variation(&basis.vector(n - 1), &matrix, kind)?;
        println!("{:<24} variation of first vector {first:.4}, last {last:.4}", kind.name());
    }

    // A ramp along the columns is smooth, so a handful of low frequencies hold most of it.
    let x: Vec<f64> = (0..n).map(|v| (v % 5) as f64).collect();
    let basis = graph_fourier_basis(&graph, StructureMatrixKind::LaplacianUnnormalized)?;
    let total: f64 = x.iter().map(|v| v * v).sum();
    for k in [1, 2, 4, 8] {
        let low = bandlimited_project(&basis, k, &x)?;
        let kept: f64 = low.iter().map(|v| v * v).sum();
        println!("band {k:>2}: {:.1}% of the energy", 100.0 * kept / total);
    }

    let coeffs = basis.transform(&x);
    let back = basis.inverse(&coeffs);
    let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("round trip error {err:.1e}");
    Ok(())
}
