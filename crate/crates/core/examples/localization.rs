//! How localized Fourier basis vectors are, on a regular grid versus a star.

use graphsig::graph::{generators, Graph, StructureMatrixKind};
use graphsig::spectral::{graph_fourier_basis, uncertainty_check, Localizer};

fn summarize(name: &str, graph: &Graph) -> graphsig::Result<()> {
    let basis = graph_fourier_basis(graph, StructureMatrixKind::LaplacianUnnormalized)?;
    let localizer = Localizer::new(graph);
    let mut worst = (0, 0.0);
    for i in 0..basis.len() {
        let r = localizer.report(&basis.vector(i))?;
        if r.ipr > worst.1 {
            worst = (i, r.ipr);
        }
    }
    let r = localizer.report(&basis.vector(worst.0))?;
    println!(
        "{name:<6} most localized vector {:>2}: ipr {:.3}, {:.0}% of nodes hold 95% of the energy",
        worst.0,
        r.ipr,
        100.0 * r.ecr
    );
    Ok(())
}

fn main() -> graphsig::Result<()> {
    summarize("grid", &generators::grid(6, 6))?;
    summarize("star", &generators::star(36))?;

    // A signal cannot be concentrated on few nodes and few frequencies at once.
    let graph = generators::cycle(12);
    let basis = graph_fourier_basis(&graph, StructureMatrixKind::LaplacianUnnormalized)?;
    let x = basis.vector(3);
    let nodes: Vec<usize> = (0..6).collect();
    let check = uncertainty_check(&basis, &nodes, &[3], &x)?;
    println!(
        "cycle: energy off the nodes {:.3}, off the band {:.3}, lhs {:.2} >= rhs {:.2}: {}",
        check.eps_vertex, check.eps_spectrum, check.lhs, check.rhs, check.holds
    );
    Ok(())
}
