//! Small hand-checkable cases for every public operation. Expected values come from
//! closed forms, brute-force enumeration or dense reference solves in `common`.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use graphsig::approx::{matching_pursuit, nonlinear_approx, normalized_mse, omp};
use graphsig::detection::{detect, detection_threshold};
use graphsig::dictionary::{
    lsps_dictionary, lspc_dictionary, lspc_wavelet_basis, polynomial_dictionary, synthesize, AtomFamily, AtomMeta,
    Dictionary, LspsModel, SignalModel,
};
use graphsig::epidemics::{estimate_random, estimate_with_leaves, simulate_sis, success_rate, SisParams};
use graphsig::graph::{
    build_matrix, connected_components, difference_operator, generators, geodesic_distances, Edge, Graph,
    StructureMatrixKind,
};
use graphsig::partition::{bipartition, build_tree, set_variation, LocalSet, PartitionMethod, StopRule};
use graphsig::sampling::{
    center_assign_recover, design_sampling, harmonic_recover, leaf_sampling, mislabel_fraction, pls_recover,
    recovery_error_bound, trend_filter_recover, SamplingObjective, SamplingPlan,
};
use graphsig::spectral::{bandlimited_project, graph_fourier_basis, localization_report, uncertainty_check, variation};
use graphsig::Error;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const LAP: StructureMatrixKind = StructureMatrixKind::LaplacianUnnormalized;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn bridged_triangles() -> Graph {
    Graph::unweighted(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
}

fn set(nodes: &[usize]) -> LocalSet {
    LocalSet::new(nodes.to_vec()).unwrap()
}

// ---- graph ----

#[test]
fn path_structure_matrices() {
    let g = generators::path(4);
    let a = build_matrix(&g, StructureMatrixKind::Adjacency).unwrap();
    let expected = DMatrix::from_row_slice(4, 4, &[0., 1., 0., 0., 1., 0., 1., 0., 0., 1., 0., 1., 0., 0., 1., 0.]);
    assert_eq!(a, expected);
    assert_eq!(g.degrees(), vec![1.0, 2.0, 2.0, 1.0]);
    let p = build_matrix(&g, StructureMatrixKind::Transition).unwrap();
    assert_eq!(p.row(1).iter().copied().collect::<Vec<_>>(), vec![0.5, 0.0, 0.5, 0.0]);

    let basis = graph_fourier_basis(&g, LAP).unwrap();
    let brute = common::sorted_eigenvalues(common::dense_laplacian(&g));
    let closed: Vec<f64> = (0..4).map(|k| 2.0 - 2.0 * (k as f64 * PI / 4.0).cos()).collect();
    assert!(close(&brute, &closed, 1e-12));
    assert!(close(&basis.eigenvalues, &closed, 1e-10));
    assert!(close(&closed, &[0.0, 2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()], 1e-12));
}

#[test]
fn difference_operator_rows() {
    let g = Graph::unweighted(4, &[(0, 1)]).unwrap();
    let d = difference_operator(&g).to_dense();
    assert_eq!(d.row(0).iter().copied().collect::<Vec<_>>(), vec![-1.0, 1.0, 0.0, 0.0]);
    let g = Graph::new(4, [Edge { src: 0, dst: 1, weight: 4.0 }], false).unwrap();
    let d = difference_operator(&g).to_dense();
    assert_eq!(d.row(0).iter().copied().collect::<Vec<_>>(), vec![-2.0, 2.0, 0.0, 0.0]);
    let g = generators::grid(3, 4);
    let ones = vec![1.0; 12];
    assert_eq!(difference_operator(&g).count_nonzero(&ones, 0.0), 0);
}

#[test]
fn geodesics_and_components() {
    let g = generators::path(4);
    assert_eq!(geodesic_distances(&g, 0), vec![0.0, 1.0, 2.0, 3.0]);
    assert_eq!(geodesic_distances(&g, 2)[2], 0.0);
    let split = Graph::new(2, [], false).unwrap();
    assert_eq!(geodesic_distances(&split, 0)[1], f64::INFINITY);

    let labels = connected_components(&g, None);
    assert!(labels.iter().all(|l| *l == labels[0]));
    let labels = connected_components(&split, None);
    assert_ne!(labels[0], labels[1]);
    let labels = connected_components(&g, Some(&[0, 2]));
    assert!(labels[0].is_some() && labels[2].is_some() && labels[0] != labels[2]);
}

// ---- spectral ----

#[test]
fn fourier_basis_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = generators::random_connected(9, 0.3, false, &mut rng);
    let basis = graph_fourier_basis(&g, LAP).unwrap();
    assert!(basis.eigenvalues[0].abs() < 1e-10);
    let v1 = basis.vector(0);
    assert!(close(&v1, &[1.0 / 3.0; 9], 1e-10));

    let basis = graph_fourier_basis(&g, StructureMatrixKind::Transition).unwrap();
    assert!((basis.eigenvalues[0] - 1.0).abs() < 1e-10);

    let c4 = generators::cycle(4);
    let brute = common::sorted_eigenvalues(common::dense_laplacian(&c4));
    assert!(close(&brute, &[0.0, 2.0, 2.0, 4.0], 1e-12));
    assert!(close(&graph_fourier_basis(&c4, LAP).unwrap().eigenvalues, &brute, 1e-10));
}

#[test]
fn variation_examples() {
    let g = generators::cycle(4);
    let l = build_matrix(&g, LAP).unwrap();
    assert!(variation(&[2.0; 4], &l, LAP).unwrap().abs() < 1e-12);
    let alt: [f64; 4] = [1.0, -1.0, 1.0, -1.0];
    let by_hand: f64 = g.edges().iter().map(|e| e.weight * (alt[e.src] - alt[e.dst]).powi(2)).sum();
    assert_eq!(by_hand, 16.0);
    assert!((variation(&alt, &l, LAP).unwrap() - by_hand).abs() < 1e-12);

    let g = generators::grid(3, 3);
    let kind = StructureMatrixKind::Transition;
    let p = build_matrix(&g, kind).unwrap();
    let v1 = graph_fourier_basis(&g, kind).unwrap().vector(0);
    assert!(variation(&v1, &p, kind).unwrap() < 1e-12);
}

#[test]
fn bandlimited_projection_examples() {
    let g = generators::grid(3, 4);
    let basis = graph_fourier_basis(&g, LAP).unwrap();
    let x: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
    assert!(close(&bandlimited_project(&basis, 12, &x).unwrap(), &x, 1e-10));
    let v2 = basis.vector(1);
    assert!(close(&bandlimited_project(&basis, 2, &v2).unwrap(), &v2, 1e-10));
    let v3 = basis.vector(2);
    assert!(close(&bandlimited_project(&basis, 2, &v3).unwrap(), &[0.0; 12], 1e-10));
}

#[test]
fn localization_examples() {
    let g = generators::path(20);
    let flat = vec![1.0 / 20f64.sqrt(); 20];
    let r = localization_report(&g, &flat).unwrap();
    assert!((r.ipr - 1.0 / 20.0).abs() < 1e-12);
    // Prefix energies of a flat signal are k/20; the first k with k/20 ≥ 0.95 is 19.
    let s_star = (1..=20).find(|&k| k as f64 / 20.0 >= 0.95).unwrap();
    assert_eq!(s_star, 19);
    assert!((r.ecr - s_star as f64 / 20.0).abs() < 1e-12);

    let mut spike = vec![0.0; 20];
    spike[0] = 1.0;
    let r = localization_report(&g, &spike).unwrap();
    assert_eq!((r.ipr, r.ecr), (1.0, 1.0 / 20.0));
}

#[test]
fn uncertainty_examples() {
    let n = 10;
    let g = generators::cycle(n);
    let basis = graph_fourier_basis(&g, LAP).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let c = uncertainty_check(&basis, &all, &[0], &basis.vector(0)).unwrap();
    assert!(c.eps_vertex.abs() < 1e-12 && c.eps_spectrum.abs() < 1e-12);
    assert!((c.lhs - n as f64).abs() < 1e-9 && (c.rhs - n as f64).abs() < 1e-9);
    assert!(c.holds);

    // Mostly outside both sets: the bound degenerates to zero.
    let x = basis.vector(n - 1);
    let c = uncertainty_check(&basis, &[0], &[0], &x).unwrap();
    assert!(c.eps_vertex + c.eps_spectrum >= 1.0);
    assert_eq!(c.rhs, 0.0);
    assert!(c.holds);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = generators::random_connected(8, 0.4, false, &mut rng);
    let basis = graph_fourier_basis(&g, LAP).unwrap();
    let mut x: Vec<f64> = (0..8).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()));
    let top: Vec<usize> = order[..4].to_vec();
    let band = [0, 1, 2, 3];
    let c = uncertainty_check(&basis, &top, &band, &x).unwrap();
    // Direct evaluation of both concentration measures.
    let eps_v: f64 = (0..8).filter(|i| !top.contains(i)).map(|i| x[i] * x[i]).sum();
    let coeffs = basis.transform(&x);
    let eps_s: f64 = (4..8).map(|i| coeffs[i] * coeffs[i]).sum();
    assert!((c.eps_vertex - eps_v).abs() < 1e-10 && (c.eps_spectrum - eps_s).abs() < 1e-10);
    let max_entry = band.iter().flat_map(|&k| basis.vector(k)).fold(0.0, |m: f64, v| m.max(v.abs()));
    let rhs = (1.0 - eps_v - eps_s).max(0.0).powi(2) / (max_entry * max_entry);
    assert!((c.rhs - rhs).abs() < 1e-9);
    assert!(c.holds && c.lhs == 16.0);
}

// ---- partition ----

#[test]
fn bipartition_examples() {
    let g = generators::path(4);
    let (a, b) = bipartition(&g, &LocalSet::all(4), &PartitionMethod::SpanningTree).unwrap();
    let options = common::connected_bipartitions(&g, &[0, 1, 2, 3]);
    let imbalance = |p: &(Vec<usize>, Vec<usize>)| p.0.len().abs_diff(p.1.len());
    let best = options.iter().map(imbalance).min().unwrap();
    assert!(options.iter().any(|p| imbalance(p) == best && p.0 == a.nodes() && p.1 == b.nodes()));

    let g = bridged_triangles();
    let options = common::connected_bipartitions(&g, &[0, 1, 2, 3, 4, 5]);
    let min_cut = options.iter().map(|p| common::cut_weight(&g, &p.0)).fold(f64::INFINITY, f64::min);
    let argmin: Vec<_> = options.iter().filter(|p| common::cut_weight(&g, &p.0) == min_cut).collect();
    assert_eq!(argmin.len(), 1);
    // Two-means is a local search; seed 9 reaches the global optimum here, some others stop at 4/2.
    for method in [PartitionMethod::SpectralClustering, PartitionMethod::SpanningTree, PartitionMethod::TwoMeans { seed: 9 }] {
        let (a, b) = bipartition(&g, &LocalSet::all(6), &method).unwrap();
        assert_eq!((a.nodes(), b.nodes()), (&argmin[0].0[..], &argmin[0].1[..]), "{}", method.name());
    }

    let (a, b) = bipartition(&g, &set(&[3, 4]), &PartitionMethod::SpanningTree).unwrap();
    assert_eq!((a.nodes(), b.nodes()), (&[3][..], &[4][..]));
}

#[test]
fn tree_examples() {
    let g = generators::path(4);
    let tree = build_tree(&g, &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    assert_eq!(tree.depth(), 2);
    let level1: Vec<&[usize]> = tree.level_sets(1).iter().map(|s| s.nodes()).collect();
    assert_eq!(level1, vec![&[0, 1][..], &[2, 3][..]]);
    assert_eq!(tree.level_sets(2).len(), 4);

    let g = generators::grid(3, 3);
    let one = build_tree(&g, &PartitionMethod::SpanningTree, StopRule::LeafCount { leaves: 1 }).unwrap();
    assert_eq!(one.leaves().map(|l| l.set.len()).collect::<Vec<_>>(), vec![9]);
    let all = build_tree(&g, &PartitionMethod::SpanningTree, StopRule::LeafCount { leaves: 9 }).unwrap();
    assert!(all.leaves().all(|l| l.set.len() == 1));
}

#[test]
fn set_variation_examples() {
    let g = bridged_triangles();
    for p in 0..=2 {
        assert_eq!(set_variation(&g, &LocalSet::all(6), p).unwrap(), 0.0);
        assert_eq!(set_variation(&g, &set(&[2]), p).unwrap(), 3.0);
        assert!((set_variation(&g, &set(&[0, 1, 2]), p).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }
}

// ---- dictionaries ----

#[test]
fn polynomial_dictionary_examples() {
    let g = generators::path(3);
    let d0 = polynomial_dictionary(&g, 0).unwrap();
    assert_eq!(d0.num_atoms(), 1);
    assert_eq!(d0.atom(0), vec![1.0; 3]);
    let d1 = polynomial_dictionary(&g, 1).unwrap();
    let col = d1.meta.iter().position(|m| m.index == 1 && m.origin == Some(0)).unwrap();
    assert_eq!(d1.atom(col), vec![0.0, 1.0, 2.0]);

    // K·N + 1 on a graph the size of the Minnesota road network.
    let n = 2642;
    let d = polynomial_dictionary(&generators::path(n), 2).unwrap();
    assert_eq!(d.num_atoms(), 2 * n + 1);
    assert_eq!(d.num_atoms(), 5285);
}

#[test]
fn lspc_examples() {
    let tree = build_tree(&generators::path(4), &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    let d = lspc_dictionary(&tree).unwrap();
    assert_eq!(d.num_atoms(), 7);
    let g = generators::path(4);
    for j in 0..7 {
        let support: Vec<usize> = (0..4).filter(|&i| d.atom(j)[i] != 0.0).collect();
        assert!(common::is_connected_subset(&g, &support));
    }
    let single = Graph::new(1, [], false).unwrap();
    let t1 = build_tree(&single, &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    assert_eq!(lspc_dictionary(&t1).unwrap().num_atoms(), 1);
}

#[test]
fn toy_wavelet_vectors() {
    let tree = build_tree(&generators::path(4), &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    let w = lspc_wavelet_basis(&tree).unwrap();
    assert!(close(&w.atom(0), &[0.5; 4], 1e-15));
    assert!(close(&w.atom(1), &[0.5, 0.5, -0.5, -0.5], 1e-15));
    assert!(close(&w.atom(2), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0, 0.0], 1e-15));
    assert!(close(&w.atom(3), &[0.0, 0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2], 1e-15));
}

#[test]
fn lsps_examples() {
    let g = generators::path(4);
    let tree = build_tree(&g, &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    let lspc = lspc_dictionary(&tree).unwrap();
    let k0 = lsps_dictionary(&g, &tree, LspsModel::Polynomial { degree: 0 }).unwrap();
    assert_eq!(k0.atoms, lspc.atoms);

    let k1 = lsps_dictionary(&g, &tree, LspsModel::Polynomial { degree: 1 }).unwrap();
    let per_set = |d: &Dictionary, level: usize, id: usize| {
        d.meta.iter().filter(|m: &&AtomMeta| m.level == level && m.set_id == id).count()
    };
    assert_eq!(per_set(&k1, 0, 0), 1 + 4);
    for node in tree.nodes().iter().filter(|t| t.set.len() == 1) {
        let id = tree.nodes().iter().filter(|t| t.level == node.level).position(|t| t == node).unwrap();
        assert_eq!(per_set(&k1, node.level, id), 1);
    }
    assert_eq!(k1.family, AtomFamily::LspsPolynomial);
}

#[test]
fn synthesis_examples() {
    let g = generators::grid(3, 3);
    let x = synthesize(&g, &SignalModel::PiecewiseConstant { sets: vec![LocalSet::all(9)], values: vec![2.5] }).unwrap();
    assert_eq!(x, vec![2.5; 9]);
    assert_eq!(difference_operator(&g).count_nonzero(&x, 0.0), 0);

    let mut coefficients = vec![0.0; 3];
    coefficients[0] = 1.0;
    let x = synthesize(&g, &SignalModel::Bandlimited { kind: LAP, bandwidth: 3, coefficients }).unwrap();
    assert!(close(&x, &[1.0 / 3.0; 9], 1e-10));

    // Cut edges of a two-piece signal equal the edges between the pieces.
    let left = set(&[0, 3, 6]);
    let rest = set(&[1, 2, 4, 5, 7, 8]);
    let model = SignalModel::PiecewiseConstant { sets: vec![left.clone(), rest], values: vec![1.0, -1.0] };
    let x = synthesize(&g, &model).unwrap();
    assert_eq!(difference_operator(&g).count_nonzero(&x, 0.0) as f64, common::cut_weight(&g, left.nodes()));
}

// ---- approximation ----

#[test]
fn nonlinear_approx_examples() {
    let g = generators::grid(3, 4);
    let basis = graph_fourier_basis(&g, LAP).unwrap();
    let x: Vec<f64> = (0..12).map(|i| (i * i) as f64 % 7.0).collect();
    assert!(close(&nonlinear_approx(&basis, &x, 12).unwrap().0, &x, 1e-10));
    let v2: Vec<f64> = basis.vector(1).iter().map(|v| 3.0 * v).collect();
    assert!(close(&nonlinear_approx(&basis, &v2, 1).unwrap().0, &v2, 1e-10));
    let (zero, code) = nonlinear_approx(&basis, &x, 0).unwrap();
    assert_eq!(zero, vec![0.0; 12]);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((code.residual_norm - norm).abs() < 1e-10);
}

fn toy_dictionary(columns: &[&[f64]]) -> Dictionary {
    let n = columns[0].len();
    let atoms = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
    let meta = (0..columns.len())
        .map(|j| AtomMeta { family: AtomFamily::Polynomial, level: 0, set_id: 0, index: j, origin: None })
        .collect();
    Dictionary { atoms, meta, family: AtomFamily::Polynomial, order: 0, depth: 0 }
}

fn least_squares_residual(dict: &Dictionary, cols: &[usize], x: &[f64]) -> f64 {
    let a = dict.atoms.select_columns(cols);
    let b = nalgebra::DVector::from_column_slice(x);
    let coef = common::full_rank_pinv(&a) * &b;
    (a * coef - b).norm()
}

#[test]
fn omp_examples() {
    let tree = build_tree(&generators::grid(3, 3), &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    let lspc = lspc_dictionary(&tree).unwrap();
    let code = omp(&lspc, &lspc.atom(4), 1).unwrap();
    assert_eq!(code.support, vec![4]);
    assert!((code.coefficients[4] - 1.0).abs() < 1e-12 && code.residual_norm < 1e-12);

    let w = lspc_wavelet_basis(&tree).unwrap();
    let x: Vec<f64> = (0..9).map(|i| ((i * 5) % 9) as f64 - 4.0).collect();
    for k in 1..=9 {
        let code = omp(&w, &x, k).unwrap();
        let (_, closed) = nonlinear_approx(&w, &x, k).unwrap();
        assert_eq!(code.support, closed.support);
        assert!(close(&code.values(), &closed.values(), 1e-12));
    }

    let dict = toy_dictionary(&[&[1.0, 0.0, 0.0], &[0.6, 0.8, 0.0], &[0.0, 0.6, 0.8]]);
    let x = [1.0, 1.0, 0.3];
    let code = omp(&dict, &x, 2).unwrap();
    let best = [[0, 1], [0, 2], [1, 2]]
        .iter()
        .map(|c| least_squares_residual(&dict, c, &x))
        .fold(f64::INFINITY, f64::min);
    assert!(code.residual_norm >= best - 1e-12);
    let ratio = code.residual_norm / best;
    println!("omp / best 2-subset residual ratio: {ratio:.4}");
    assert!(ratio.is_finite());
}

#[test]
fn matching_pursuit_examples() {
    let tree = build_tree(&generators::grid(3, 3), &PartitionMethod::SpectralClustering, StopRule::FullDepth).unwrap();
    let w = lspc_wavelet_basis(&tree).unwrap();
    let x: Vec<f64> = (0..9).map(|i| (i as f64).cos()).collect();
    for k in 1..=5 {
        let a = matching_pursuit(&w, &x, k).unwrap();
        let b = omp(&w, &x, k).unwrap();
        assert_eq!(a.support, b.support);
        assert!(close(&a.coefficients, &b.coefficients, 1e-12));
    }
    let lsps = lsps_dictionary(&generators::grid(3, 3), &tree, LspsModel::Polynomial { degree: 1 }).unwrap();
    assert_eq!(matching_pursuit(&lsps, &x, 1).unwrap().support[0], omp(&lsps, &x, 1).unwrap().support[0]);

    let c = 0.9f64;
    let dict = toy_dictionary(&[&[1.0, 0.0], &[c, (1.0 - c * c).sqrt()]]);
    let x = [0.3, 1.0];
    let mp = matching_pursuit(&dict, &x, 2).unwrap();
    let om = omp(&dict, &x, 2).unwrap();
    assert!(om.residual_norm < 1e-12);
    assert!(mp.residual_norm >= om.residual_norm);
}

#[test]
fn nmse_examples() {
    let x = [1.0, -2.0, 0.5];
    assert_eq!(normalized_mse(&x, &x).unwrap(), 0.0);
    assert_eq!(normalized_mse(&x, &[0.0; 3]).unwrap(), 1.0);
    let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    assert_eq!(normalized_mse(&x, &twice).unwrap(), 1.0);
}

// ---- sampling and recovery ----

fn sigma_min(rows: &DMatrix<f64>) -> f64 {
    common::smallest_singular_value(rows)
}

#[test]
fn design_examples() {
    let id = DMatrix::<f64>::identity(5, 5);
    let plan = design_sampling(&id, None, 5, SamplingObjective::NoiseWorst, 1.0).unwrap();
    assert!((plan.objective_value - 1.0).abs() < 1e-12);
    assert_eq!(plan.indices, vec![0, 1, 2, 3, 4]);

    let first = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
    let plan = design_sampling(&first, None, 1, SamplingObjective::NoiseWorst, 1.0).unwrap();
    assert_eq!(plan.indices, vec![0]);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = generators::random_connected(6, 0.5, false, &mut rng);
    let inband = graph_fourier_basis(&g, LAP).unwrap().low_band(2);
    let plan = design_sampling(&inband, None, 2, SamplingObjective::NoiseWorst, 1.0).unwrap();
    let mut best = 0.0f64;
    for a in 0..6 {
        for b in a + 1..6 {
            best = best.max(sigma_min(&inband.select_rows(&[a, b])));
        }
    }
    let greedy = sigma_min(&inband.select_rows(&plan.indices));
    println!("greedy / exhaustive 1/σ_min on 6 nodes: {:.6}", best / greedy);
    assert!((plan.objective_value - 1.0 / greedy).abs() < 1e-10);
    assert!(greedy <= best + 1e-12);
}

fn plan_for(indices: Vec<usize>) -> SamplingPlan {
    SamplingPlan {
        indices,
        objective: SamplingObjective::NoiseWorst,
        c_tradeoff: 1.0,
        objective_value: f64::NAN,
        seed: None,
        basis: None,
    }
}

#[test]
fn pls_examples() {
    let g = generators::grid(4, 4);
    let basis = graph_fourier_basis(&g, LAP).unwrap();
    let k = 4;
    let inband = basis.low_band(k);
    let plan = design_sampling(&inband, None, k, SamplingObjective::NoiseWorst, 1.0).unwrap();
    let x: Vec<f64> = (&inband * nalgebra::DVector::from_vec(vec![1.0, -0.5, 2.0, 0.25])).as_slice().to_vec();
    let y: Vec<f64> = plan.indices.iter().map(|&i| x[i]).collect();
    let rec = pls_recover(&y, &plan, &inband).unwrap();
    let err = x.iter().zip(&rec).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(err <= 1e-8);

    let id = DMatrix::<f64>::identity(16, 16);
    let y: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
    assert!(close(&pls_recover(&y, &plan_for((0..16).collect()), &id).unwrap(), &y, 1e-12));

    // Out-of-band leakage: the error is the bias term D_Ω (Ψ D_Ω)† Ψ D_Ωᶜ a_Ωᶜ − D_Ωᶜ a_Ωᶜ.
    let x: Vec<f64> = basis.vector(0).iter().zip(basis.vector(k)).map(|(a, b)| a + 0.01 * b).collect();
    let plan = design_sampling(&inband, None, 6, SamplingObjective::NoiseWorst, 1.0).unwrap();
    let y: Vec<f64> = plan.indices.iter().map(|&i| x[i]).collect();
    let rec = pls_recover(&y, &plan, &inband).unwrap();
    let leak = nalgebra::DVector::from_vec(basis.vector(k)) * 0.01;
    let psi_d = inband.select_rows(&plan.indices);
    let psi_leak = nalgebra::DVector::from_iterator(6, plan.indices.iter().map(|&i| leak[i]));
    let fitted = &inband * common::full_rank_pinv(&psi_d) * psi_leak;
    let predicted = (fitted - &leak).norm();
    let actual = x.iter().zip(&rec).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!((predicted - actual).abs() < 1e-10);
}

#[test]
fn harmonic_examples() {
    let g = generators::grid(3, 3);
    let y = vec![4.0; 3];
    for mu in [0.01, 1.0, 100.0] {
        assert!(close(&harmonic_recover(&y, &[0, 4, 8], &g, mu).unwrap(), &[4.0; 9], 1e-9));
    }
    let x: Vec<f64> = (0..9).map(|i| i as f64).collect();
    let all: Vec<usize> = (0..9).collect();
    assert!(close(&harmonic_recover(&x, &all, &g, 1e-9).unwrap(), &x, 1e-6));

    // (S + μL) t = S y on path(4) with samples at the ends, solved by dense LU.
    let g = generators::path(4);
    let t = harmonic_recover(&[0.0, 3.0], &[0, 3], &g, 1.0).unwrap();
    let mut s = DMatrix::<f64>::zeros(4, 4);
    s[(0, 0)] = 1.0;
    s[(3, 3)] = 1.0;
    let rhs = nalgebra::DVector::from_vec(vec![0.0, 0.0, 0.0, 3.0]);
    let expected = (s + common::dense_laplacian(&g)).lu().solve(&rhs).unwrap();
    assert!(close(&t, expected.as_slice(), 1e-10));
}

#[test]
fn trend_filter_examples() {
    let g = generators::grid(4, 4);
    let sampled = vec![0, 3, 5, 9, 12, 15];
    let y = vec![1.0, -2.0, 0.5, 3.0, 0.0, 2.0];
    let tf = trend_filter_recover(&y, &sampled, &g, 1e-7).unwrap();
    let on_samples: Vec<f64> = sampled.iter().map(|&i| tf.signal[i]).collect();
    assert!(close(&on_samples, &y, 1e-4));

    for mu in [0.1, 1.0, 10.0] {
        let tf = trend_filter_recover(&[2.0; 6], &sampled, &g, mu).unwrap();
        assert!(close(&tf.signal, &[2.0; 16], 1e-6));
    }

    let truth: Vec<f64> = (0..16).map(|i| if i % 4 < 2 { 1.0 } else { 3.0 }).collect();
    let dense: Vec<usize> = (0..16).filter(|i| i % 5 != 0).collect();
    let y: Vec<f64> = dense.iter().map(|&i| truth[i] + 0.05 * ((i * 7 % 5) as f64 - 2.0)).collect();
    let tf = trend_filter_recover(&y, &dense, &g, 0.5).unwrap();
    assert!(tf.converged);
    let jumps = difference_operator(&g).count_nonzero(&tf.signal, 1e-4);
    assert!(jumps <= 8, "{jumps} jumps");
    let kkt = common::kkt_residual(&y, &dense, &g, 0.5, &tf.signal, 1e-5);
    assert!(kkt <= 1e-5, "kkt residual {kkt}");
}

#[test]
fn leaf_sampling_examples() {
    let g = generators::grid(3, 4);
    let all = leaf_sampling(&g, &PartitionMethod::SpanningTree, 12).unwrap();
    let mut centers = all.centers.clone();
    centers.sort_unstable();
    assert_eq!(centers, (0..12).collect::<Vec<_>>());

    let one = leaf_sampling(&g, &PartitionMethod::SpanningTree, 1).unwrap();
    let sums: Vec<f64> = (0..12).map(|v| geodesic_distances(&g, v).iter().sum()).collect();
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin = sums.iter().position(|&s| s == min).unwrap();
    assert_eq!(one.centers, vec![argmin]);

    let path = generators::path(4);
    let two = leaf_sampling(&path, &PartitionMethod::SpanningTree, 2).unwrap();
    assert_eq!(two.leaves.iter().map(|l| l.nodes().to_vec()).collect::<Vec<_>>(), vec![vec![0, 1], vec![2, 3]]);
    assert!(two.centers[0] < 2 && two.centers[1] >= 2);
}

#[test]
fn center_assign_examples() {
    let g = generators::grid(4, 4);
    let leaves = leaf_sampling(&g, &PartitionMethod::SpanningTree, 4).unwrap();
    let mut x = vec![0.0; 16];
    for (j, leaf) in leaves.leaves.iter().enumerate() {
        leaf.nodes().iter().for_each(|&v| x[v] = j as f64);
    }
    assert_eq!(leaves.recover_from(&x), x);

    let full = leaf_sampling(&g, &PartitionMethod::SpanningTree, 16).unwrap();
    let x: Vec<f64> = (0..16).map(|i| (i as f64).sqrt()).collect();
    let samples: Vec<f64> = full.centers.iter().map(|&c| x[c]).collect();
    assert_eq!(center_assign_recover(&samples, &full).unwrap(), x);

    let x: Vec<f64> = (0..16).map(|i| if i < 6 { 1.0 } else { 2.0 }).collect();
    let cuts = difference_operator(&g).count_nonzero(&x, 0.0);
    let rec = leaves.recover_from(&x);
    let wrong = x.iter().zip(&rec).filter(|(a, b)| a != b).count();
    assert!(wrong <= recovery_error_bound(cuts, &leaves));
}

#[test]
fn bound_and_mislabel_examples() {
    let g = generators::path(6);
    let leaves = leaf_sampling(&g, &PartitionMethod::SpanningTree, 2).unwrap();
    assert_eq!(leaves.largest_leaf(), 3);
    assert_eq!(recovery_error_bound(0, &leaves), 0);
    assert_eq!(recovery_error_bound(1, &leaves), 3);

    let x = [1.0, 2.0, 1.0, 2.0];
    assert_eq!(mislabel_fraction(&x, &x).unwrap(), 0.0);
    assert_eq!(mislabel_fraction(&x, &[2.0, 1.0, 2.0, 1.0]).unwrap(), 1.0);
    assert_eq!(mislabel_fraction(&x, &[1.1, 1.9, 2.0, 1.0]).unwrap(), 0.5);
    assert!(matches!(mislabel_fraction(&x, &[1.0]), Err(Error::DimensionMismatch { .. })));
}

// ---- detection ----

#[test]
fn detection_examples() {
    let tau = detection_threshold(1.0, 0.01, 10, 100, 100);
    assert!((tau - (2.0 * 1e7f64.ln()).sqrt()).abs() < 1e-12);
    assert!((tau - 5.677).abs() < 1e-3);

    let g = generators::grid(4, 4);
    let tree = build_tree(&g, &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
    let dict = lsps_dictionary(&g, &tree, LspsModel::Bandlimited { bandwidth: 2 }).unwrap();
    let r = detect(&[0.0; 16], &dict, 3, 1.0, 0.05).unwrap();
    assert_eq!((r.statistic, r.reject), (0.0, false));

    let atom = dict.atom(7);
    let norm = atom.iter().map(|v| v * v).sum::<f64>().sqrt();
    let y: Vec<f64> = atom.iter().map(|v| 10.0 * r.threshold * v / norm).collect();
    let r = detect(&y, &dict, 3, 1.0, 0.05).unwrap();
    assert!(r.reject);
    assert!((r.statistic - 10.0 * r.threshold).abs() < 1e-9);
}

// ---- epidemics ----

#[test]
fn sis_examples() {
    let g = generators::grid(5, 5);
    let t = simulate_sis(&g, &SisParams::new(0.0, 1.0, vec![0, 12], 5), 3).unwrap();
    assert_eq!(t.incidence(0), 2.0 / 25.0);
    assert!((1..=4).all(|d| t.incidence(d) == 0.0));

    let diameter = 8;
    let t = simulate_sis(&g, &SisParams::new(1.0, 0.0, vec![0], 12), 3).unwrap();
    assert!(t.incidence(diameter + 1) == 1.0);
}

#[test]
fn incidence_estimators() {
    let g = generators::grid(6, 6);
    let state: Vec<bool> = (0..36).map(|i| i % 3 == 0).collect();
    let truth = 12.0 / 36.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(estimate_random(&state, 36, &mut rng).unwrap(), truth);
    assert!([0.0, 1.0].contains(&estimate_random(&state, 1, &mut rng).unwrap()));

    // The mean of many estimates sits within three binomial standard errors of the truth.
    let (m, reps) = (6, 4000);
    let mean = (0..reps).map(|_| estimate_random(&state, m, &mut rng).unwrap()).sum::<f64>() / reps as f64;
    let se = (truth * (1.0 - truth) / m as f64 / reps as f64).sqrt();
    assert!((mean - truth).abs() <= 3.0 * se, "{mean} vs {truth}");

    let full = leaf_sampling(&g, &PartitionMethod::SpanningTree, 36).unwrap();
    assert_eq!(estimate_with_leaves(&state, &full).unwrap().0, truth);
    let leaves = leaf_sampling(&g, &PartitionMethod::SpanningTree, 4).unwrap();
    let mut blocky = vec![false; 36];
    for v in leaves.leaves[1].nodes().iter().chain(leaves.leaves[3].nodes()) {
        blocky[*v] = true;
    }
    let exact = blocky.iter().filter(|&&s| s).count() as f64 / 36.0;
    assert_eq!(estimate_with_leaves(&blocky, &leaves).unwrap().0, exact);
    let one = leaf_sampling(&g, &PartitionMethod::SpanningTree, 1).unwrap();
    let c = one.centers[0];
    assert_eq!(estimate_with_leaves(&state, &one).unwrap().0, if state[c] { 1.0 } else { 0.0 });
}

#[test]
fn success_rate_examples() {
    let truth = [0.2, 0.4];
    let r = success_rate(&truth, &truth, &[vec![0.3, 0.1], vec![0.0, 0.9]]).unwrap();
    assert_eq!(r.per_day, vec![1.0, 1.0]);
    // Equal errors never count as a win; the values are exact in binary.
    let r = success_rate(&[0.25, 0.5], &[0.5, 0.75], &[vec![0.0, 0.25]]).unwrap();
    assert_eq!(r.per_day, vec![0.0, 0.0]);
    let r = success_rate(&[0.5], &[0.6], &[vec![0.5], vec![0.9]]).unwrap();
    assert_eq!(r.per_day, vec![0.5]);
    assert_eq!(r.aggregate, 0.0);
}
