//! Dictionaries over graph signals and generators for the signal classes they target.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{geodesic_distances, geodesic_distances_within, is_connected, Graph, StructureMatrixKind};
use crate::partition::{LocalSet, LocalSetTree};
use crate::spectral::{graph_fourier_basis, FourierBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomFamily {
    Polynomial,
    Lspc,
    LspcWavelet,
    LspsPolynomial,
    LspsBandlimited,
}

/// Where an atom comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomMeta {
    pub family: AtomFamily,
    pub level: usize,
    pub set_id: usize,
    /// Polynomial degree, frequency index, or 0 for the wavelet scaling vector and 1 for details.
    pub index: usize,
    /// Origin node of distance atoms.
    pub origin: Option<usize>,
}

/// A set of atoms stored as the columns of an `N × M` matrix.
#[derive(Debug, Clone)]
pub struct Dictionary {
    pub atoms: DMatrix<f64>,
    pub meta: Vec<AtomMeta>,
    pub family: AtomFamily,
    /// Polynomial degree or per-set bandwidth; 0 for indicator families.
    pub order: usize,
    /// Depth of the tree the atoms come from; 0 for global dictionaries.
    pub depth: usize,
}

impl Dictionary {
    pub fn num_nodes(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn atom(&self, j: usize) -> Vec<f64> {
        self.atoms.column(j).iter().copied().collect()
    }

    pub fn atom_norms(&self) -> Vec<f64> {
        self.atoms.column_iter().map(|c| c.norm()).collect()
    }

    /// Inner products of `x` with every atom.
    pub fn analyze(&self, x: &[f64]) -> Vec<f64> {
        (self.atoms.transpose() * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    /// Linear combination of atoms.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        (&self.atoms * DVector::from_column_slice(coeffs)).as_slice().to_vec()
    }

    /// Columns as CSV, one row per node, with an `atom_<j>` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.num_atoms()).map(|j| format!("atom_{j}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.num_nodes() {
            let row: Vec<String> = self.atoms.row(i).iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON sidecar describing the CSV columns.
    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&DictionaryMetadata {
            family: self.family,
            num_nodes: self.num_nodes(),
            num_atoms: self.num_atoms(),
            order: self.order,
            depth: self.depth,
            atoms: self.meta.clone(),
        })
        .expect("metadata serializes")
    }

    pub fn from_csv_and_metadata(csv_text: &str, metadata: &str) -> Result<Self> {
        let meta: DictionaryMetadata =
            serde_json::from_str(metadata).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
        let mut values = Vec::new();
        let mut rows = 0;
        for record in reader.records() {
            let record = record.map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for field in record.iter() {
                values.push(field.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(e.to_string()))?);
            }
            rows += 1;
        }
        if rows != meta.num_nodes || values.len() != meta.num_nodes * meta.num_atoms {
            return Err(Error::DimensionMismatch { expected: meta.num_nodes * meta.num_atoms, found: values.len() });
        }
        Ok(Dictionary {
            atoms: DMatrix::from_row_slice(rows, meta.num_atoms, &values),
            meta: meta.atoms,
            family: meta.family,
            order: meta.order,
            depth: meta.depth,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DictionaryMetadata {
    family: AtomFamily,
    num_nodes: usize,
    num_atoms: usize,
    order: usize,
    depth: usize,
    atoms: Vec<AtomMeta>,
}

struct Builder {
    n: usize,
    columns: Vec<f64>,
    meta: Vec<AtomMeta>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder { n, columns: Vec::new(), meta: Vec::new() }
    }

    /// Adds a column unless it is identically zero.
    fn push(&mut self, column: Vec<f64>, meta: AtomMeta) {
        debug_assert_eq!(column.len(), self.n);
        if column.iter().any(|&v| v != 0.0) {
            self.columns.extend(column);
            self.meta.push(meta);
        }
    }

    fn finish(self, family: AtomFamily, order: usize, depth: usize) -> Dictionary {
        let m = self.meta.len();
        Dictionary { atoms: DMatrix::from_vec(self.n, m, self.columns), meta: self.meta, family, order, depth }
    }
}

/// `[1 | D¹ | … | Dᴷ]` where column `j` of `Dᵏ` holds distances to node `j` raised to `k`.
pub fn polynomial_dictionary(graph: &Graph, degree: usize) -> Result<Dictionary> {
    if !is_connected(graph) {
        return Err(Error::DisconnectedGraph);
    }
    let n = graph.num_nodes();
    let distances: Vec<Vec<f64>> = (0..n).map(|j| geodesic_distances(graph, j)).collect();
    let mut b = Builder::new(n);
    let meta = |index, origin| AtomMeta { family: AtomFamily::Polynomial, level: 0, set_id: 0, index, origin };
    b.push(vec![1.0; n], meta(0, None));
    for k in 1..=degree {
        for (j, d) in distances.iter().enumerate() {
            b.push(d.iter().map(|v| v.powi(k as i32)).collect(), meta(k, Some(j)));
        }
    }
    Ok(b.finish(AtomFamily::Polynomial, degree, 0))
}

fn require_full(tree: &LocalSetTree) -> Result<()> {
    if tree.is_full() {
        Ok(())
    } else {
        Err(Error::PartialTree)
    }
}

/// One indicator atom per set of a full tree, in level order: `2N − 1` atoms.
pub fn lspc_dictionary(tree: &LocalSetTree) -> Result<Dictionary> {
    require_full(tree)?;
    let n = tree.num_nodes();
    let mut b = Builder::new(n);
    for (i, t) in tree.nodes().iter().enumerate() {
        let meta = AtomMeta { family: AtomFamily::Lspc, level: t.level, set_id: tree.set_id(i), index: 0, origin: None };
        b.push(t.set.indicator(n), meta);
    }
    Ok(b.finish(AtomFamily::Lspc, 0, tree.depth()))
}

/// Orthonormal piecewise-constant basis: the normalized constant vector followed by one
/// zero-mean vector per split, in level order.
pub fn lspc_wavelet_basis(tree: &LocalSetTree) -> Result<Dictionary> {
    require_full(tree)?;
    let n = tree.num_nodes();
    let mut b = Builder::new(n);
    let meta = |level, set_id, index| AtomMeta { family: AtomFamily::LspcWavelet, level, set_id, index, origin: None };
    b.push(vec![1.0 / (n as f64).sqrt(); n], meta(0, 0, 0));
    for (i, t) in tree.nodes().iter().enumerate() {
        let Some([c1, c2]) = t.children else { continue };
        let (s1, s2) = (&tree.nodes()[c1].set, &tree.nodes()[c2].set);
        let (n1, n2) = (s1.len() as f64, s2.len() as f64);
        let scale = (n1 * n2 / (n1 + n2)).sqrt();
        let mut column = vec![0.0; n];
        s1.nodes().iter().for_each(|&v| column[v] = scale / n1);
        s2.nodes().iter().for_each(|&v| column[v] = -scale / n2);
        b.push(column, meta(t.level, tree.set_id(i), 1));
    }
    Ok(b.finish(AtomFamily::LspcWavelet, 0, tree.depth()))
}

/// Sparse `(2N − 1) × N` matrix that combines indicator atoms into wavelet vectors,
/// so that `lspc_dictionary · downsampling_matrix = lspc_wavelet_basis`.
pub fn downsampling_matrix(tree: &LocalSetTree) -> Result<DMatrix<f64>> {
    require_full(tree)?;
    let n = tree.num_nodes();
    let sizes: Vec<f64> = tree.nodes().iter().map(|t| t.set.len() as f64).collect();
    // Weight of atom i when paired with atom j.
    let g = |i: usize, j: usize| (sizes[j] / ((sizes[i] + sizes[j]) * sizes[i])).sqrt();
    let mut d2 = DMatrix::zeros(tree.nodes().len(), n);
    d2[(0, 0)] = 1.0 / (n as f64).sqrt();
    for (col, t) in tree.splits().enumerate() {
        let [a, b] = t.children.expect("splits have children");
        d2[(a, col + 1)] = g(a, b);
        d2[(b, col + 1)] = -g(b, a);
    }
    Ok(d2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum LspsModel {
    /// Per set: indicator plus distance atoms up to this degree.
    Polynomial { degree: usize },
    /// Per set: the lowest-frequency eigenvectors of the set's own Laplacian.
    Bandlimited { bandwidth: usize },
}

/// Zero-padded local dictionaries for every set of a full tree.
pub fn lsps_dictionary(graph: &Graph, tree: &LocalSetTree, model: LspsModel) -> Result<Dictionary> {
    require_full(tree)?;
    let n = graph.num_nodes();
    if tree.num_nodes() != n {
        return Err(Error::DimensionMismatch { expected: n, found: tree.num_nodes() });
    }
    let mut b = Builder::new(n);
    let (family, order) = match model {
        LspsModel::Polynomial { degree } => (AtomFamily::LspsPolynomial, degree),
        LspsModel::Bandlimited { bandwidth } => {
            if bandwidth == 0 {
                return Err(Error::InvalidModel("bandwidth must be at least 1".into()));
            }
            (AtomFamily::LspsBandlimited, bandwidth)
        }
    };
    for (i, t) in tree.nodes().iter().enumerate() {
        let set_id = tree.set_id(i);
        let meta = |index, origin| AtomMeta { family, level: t.level, set_id, index, origin };
        match model {
            LspsModel::Polynomial { degree } => {
                b.push(t.set.indicator(n), meta(0, None));
                if degree == 0 || t.set.len() == 1 {
                    continue;
                }
                let local = local_distances(graph, &t.set);
                for k in 1..=degree {
                    for (o, &origin) in t.set.nodes().iter().enumerate() {
                        let mut column = vec![0.0; n];
                        for (p, &v) in t.set.nodes().iter().enumerate() {
                            column[v] = local[o][p].powi(k as i32);
                        }
                        b.push(column, meta(k, Some(origin)));
                    }
                }
            }
            LspsModel::Bandlimited { bandwidth } => {
                let basis = local_basis(graph, &t.set)?;
                for k in 0..bandwidth.min(t.set.len()) {
                    b.push(pad(&t.set, basis.v.column(k).as_slice(), n), meta(k, None));
                }
            }
        }
    }
    Ok(b.finish(family, order, tree.depth()))
}

/// Distances inside the set's induced subgraph; row `o` is from the `o`-th member.
fn local_distances(graph: &Graph, set: &LocalSet) -> Vec<Vec<f64>> {
    let mask = set.mask(graph.num_nodes());
    set.nodes()
        .iter()
        .map(|&o| {
            let d = geodesic_distances_within(graph, o, &mask);
            set.nodes().iter().map(|&v| d[v]).collect()
        })
        .collect()
}

/// Fourier basis of the unnormalized Laplacian of the set's induced subgraph.
fn local_basis(graph: &Graph, set: &LocalSet) -> Result<FourierBasis> {
    graph_fourier_basis(&graph.induced_subgraph(set.nodes()), StructureMatrixKind::LaplacianUnnormalized)
}

fn pad(set: &LocalSet, local: &[f64], n: usize) -> Vec<f64> {
    let mut column = vec![0.0; n];
    for (&v, &x) in set.nodes().iter().zip(local) {
        column[v] = x;
    }
    column
}

/// One polynomial term `coefficient · d(·, origin)^degree` inside a piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialTerm {
    pub degree: usize,
    pub origin: usize,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialPiece {
    pub constant: f64,
    pub terms: Vec<PolynomialTerm>,
}

/// Generative description of a graph signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum SignalModel {
    /// Coefficients over `[1 | D¹ | … | Dᴷ]`, length `K·N + 1`.
    Polynomial { degree: usize, coefficients: Vec<f64> },
    /// Coefficients over the first `K` vectors of a Fourier basis.
    Bandlimited { kind: StructureMatrixKind, bandwidth: usize, coefficients: Vec<f64> },
    PiecewiseConstant { sets: Vec<LocalSet>, values: Vec<f64> },
    PiecewisePolynomial { sets: Vec<LocalSet>, pieces: Vec<PolynomialPiece> },
    /// Per set, coefficients over the lowest eigenvectors of the set's Laplacian.
    PiecewiseBandlimited { sets: Vec<LocalSet>, coefficients: Vec<Vec<f64>> },
}

fn check_pieces(graph: &Graph, sets: &[LocalSet], count: usize) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidModel(m));
    if sets.len() != count {
        return bad(format!("{} sets but {count} piece parameters", sets.len()));
    }
    let n = graph.num_nodes();
    let mut owner = vec![usize::MAX; n];
    for (c, s) in sets.iter().enumerate() {
        for &v in s.nodes() {
            if v >= n {
                return bad(format!("node {v} out of range"));
            }
            if owner[v] != usize::MAX {
                return bad(format!("node {v} belongs to two pieces"));
            }
            owner[v] = c;
        }
        if !s.is_connected_in(graph) {
            return bad(format!("piece {c} is not connected"));
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return bad(format!("node {v} belongs to no piece"));
    }
    Ok(())
}

/// Evaluates a signal model exactly.
pub fn synthesize(graph: &Graph, model: &SignalModel) -> Result<Vec<f64>> {
    let n = graph.num_nodes();
    match model {
        SignalModel::Polynomial { degree, coefficients } => {
            if coefficients.len() != degree * n + 1 {
                return Err(Error::InvalidModel(format!("expected {} coefficients", degree * n + 1)));
            }
            let d = polynomial_dictionary(graph, *degree)?;
            if d.num_atoms() != coefficients.len() {
                return Err(Error::InvalidModel("degenerate polynomial dictionary".into()));
            }
            Ok(d.synthesize(coefficients))
        }
        SignalModel::Bandlimited { kind, bandwidth, coefficients } => {
            if *bandwidth == 0 || *bandwidth > n || coefficients.len() != *bandwidth {
                return Err(Error::InvalidModel(format!("bandwidth {bandwidth} with {} coefficients", coefficients.len())));
            }
            let basis = graph_fourier_basis(graph, *kind)?;
            Ok((basis.low_band(*bandwidth) * DVector::from_column_slice(coefficients)).as_slice().to_vec())
        }
        SignalModel::PiecewiseConstant { sets, values } => {
            check_pieces(graph, sets, values.len())?;
            let mut x = vec![0.0; n];
            for (s, &a) in sets.iter().zip(values) {
                s.nodes().iter().for_each(|&v| x[v] = a);
            }
            Ok(x)
        }
        SignalModel::PiecewisePolynomial { sets, pieces } => {
            check_pieces(graph, sets, pieces.len())?;
            let mut x = vec![0.0; n];
            for (s, piece) in sets.iter().zip(pieces) {
                let mask = s.mask(n);
                s.nodes().iter().for_each(|&v| x[v] = piece.constant);
                for term in &piece.terms {
                    if !s.contains(term.origin) {
                        return Err(Error::InvalidModel(format!("origin {} outside its piece", term.origin)));
                    }
                    let d = geodesic_distances_within(graph, term.origin, &mask);
                    for &v in s.nodes() {
                        x[v] += term.coefficient * d[v].powi(term.degree as i32);
                    }
                }
            }
            Ok(x)
        }
        SignalModel::PiecewiseBandlimited { sets, coefficients } => {
            check_pieces(graph, sets, coefficients.len())?;
            let mut x = vec![0.0; n];
            for (s, a) in sets.iter().zip(coefficients) {
                if a.is_empty() || a.len() > s.len() {
                    return Err(Error::InvalidModel(format!("{} coefficients for a piece of {} nodes", a.len(), s.len())));
                }
                let basis = local_basis(graph, s)?;
                let local = basis.low_band(a.len()) * DVector::from_column_slice(a);
                for (&v, &val) in s.nodes().iter().zip(local.iter()) {
                    x[v] = val;
                }
            }
            Ok(x)
        }
    }
}

/// Random generators for each signal class.
pub mod generators {
    use super::*;

    /// Picks `count` distinct random centers and gives every node to its nearest center.
    /// Equal distances go to the center with the smaller index, which keeps each piece connected.
    pub fn community_partition<R: Rng + ?Sized>(graph: &Graph, count: usize, rng: &mut R) -> Result<Vec<LocalSet>> {
        let n = graph.num_nodes();
        if count == 0 || count > n {
            return Err(Error::InvalidModel(format!("cannot form {count} communities on {n} nodes")));
        }
        let mut centers: Vec<usize> = rand::seq::index::sample(rng, n, count).into_vec();
        centers.sort_unstable();
        let dists: Vec<Vec<f64>> = centers.iter().map(|&c| geodesic_distances(graph, c)).collect();
        let mut members = vec![Vec::new(); count];
        for v in 0..n {
            let best = (0..count)
                .min_by(|&a, &b| dists[a][v].total_cmp(&dists[b][v]).then(a.cmp(&b)))
                .expect("count >= 1");
            if dists[best][v].is_infinite() {
                return Err(Error::DisconnectedGraph);
            }
            members[best].push(v);
        }
        members.into_iter().map(LocalSet::new).collect()
    }

    /// Community pieces with random integer values in `-10..=10`.
    pub fn piecewise_constant<R: Rng + ?Sized>(graph: &Graph, pieces: usize, rng: &mut R) -> Result<SignalModel> {
        let sets = community_partition(graph, pieces, rng)?;
        let values = sets.iter().map(|_| rng.random_range(-10..=10) as f64).collect();
        Ok(SignalModel::PiecewiseConstant { sets, values })
    }

    /// Community pieces, each a polynomial with one random origin per degree.
    pub fn piecewise_polynomial<R: Rng + ?Sized>(
        graph: &Graph,
        pieces: usize,
        degree: usize,
        rng: &mut R,
    ) -> Result<SignalModel> {
        let sets = community_partition(graph, pieces, rng)?;
        let pieces = sets
            .iter()
            .map(|s| PolynomialPiece {
                constant: StandardNormal.sample(rng),
                terms: (1..=degree)
                    .map(|k| PolynomialTerm {
                        degree: k,
                        origin: s.nodes()[rng.random_range(0..s.len())],
                        coefficient: StandardNormal.sample(rng),
                    })
                    .collect(),
            })
            .collect();
        Ok(SignalModel::PiecewisePolynomial { sets, pieces })
    }

    /// Community pieces, each bandlimited to `min(bandwidth, |piece|)` local frequencies.
    pub fn piecewise_bandlimited<R: Rng + ?Sized>(
        graph: &Graph,
        pieces: usize,
        bandwidth: usize,
        rng: &mut R,
    ) -> Result<SignalModel> {
        if bandwidth == 0 {
            return Err(Error::InvalidModel("bandwidth must be at least 1".into()));
        }
        let sets = community_partition(graph, pieces, rng)?;
        let coefficients = sets
            .iter()
            .map(|s| (0..bandwidth.min(s.len())).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        Ok(SignalModel::PiecewiseBandlimited { sets, coefficients })
    }

    /// Gaussian coefficients over the first `bandwidth` basis vectors, scaled to unit norm.
    pub fn unit_bandlimited<R: Rng + ?Sized>(basis: &FourierBasis, bandwidth: usize, rng: &mut R) -> Vec<f64> {
        let a: Vec<f64> = (0..bandwidth).map(|_| StandardNormal.sample(rng)).collect();
        let x = basis.low_band(bandwidth) * DVector::from_vec(a);
        let norm = x.norm();
        (x / norm).as_slice().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;
    use crate::graph::difference_operator;
    use crate::graph::generators::{path, random_connected};
    use crate::partition::{build_tree, PartitionMethod, StopRule};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_tree() -> LocalSetTree {
        build_tree(&path(4), &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap()
    }

    #[test]
    fn polynomial_examples() {
        let g = path(3);
        let d = polynomial_dictionary(&g, 0).unwrap();
        assert_eq!(d.num_atoms(), 1);
        assert_eq!(d.atom(0), vec![1.0; 3]);
        let d = polynomial_dictionary(&g, 1).unwrap();
        assert_eq!(d.num_atoms(), 4);
        assert_eq!(d.atom(1), vec![0.0, 1.0, 2.0]);
        let d = polynomial_dictionary(&g, 2).unwrap();
        assert_eq!(d.num_atoms(), 7);
        assert_eq!(d.atom(4), vec![0.0, 1.0, 4.0]);
        assert_eq!(d.meta[4].origin, Some(0));
        let disconnected = Graph::unweighted(3, &[(0, 1)]).unwrap();
        assert_eq!(polynomial_dictionary(&disconnected, 1).unwrap_err(), Error::DisconnectedGraph);
    }

    #[test]
    fn toy_lspc_and_wavelets() {
        let tree = toy_tree();
        let d = lspc_dictionary(&tree).unwrap();
        assert_eq!(d.num_atoms(), 7);
        let w = lspc_wavelet_basis(&tree).unwrap();
        assert_eq!(w.atom(0), vec![0.5; 4]);
        assert_eq!(w.atom(1), vec![0.5, 0.5, -0.5, -0.5]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = w.atom(2);
        for (got, want) in v.iter().zip([r, -r, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let product = &d.atoms * downsampling_matrix(&tree).unwrap();
        assert!((product - &w.atoms).amax() < 1e-12);
    }

    #[test]
    fn single_node_tree() {
        let g = Graph::unweighted(1, &[]).unwrap();
        let tree = build_tree(&g, &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
        assert_eq!(lspc_dictionary(&tree).unwrap().num_atoms(), 1);
        assert_eq!(lspc_wavelet_basis(&tree).unwrap().atom(0), vec![1.0]);
    }

    #[test]
    fn partial_tree_rejected() {
        let tree = build_tree(&path(6), &PartitionMethod::SpanningTree, StopRule::LeafCount { leaves: 3 }).unwrap();
        assert_eq!(lspc_dictionary(&tree).unwrap_err(), Error::PartialTree);
        assert_eq!(lspc_wavelet_basis(&tree).unwrap_err(), Error::PartialTree);
        assert_eq!(
            lsps_dictionary(&path(6), &tree, LspsModel::Polynomial { degree: 1 }).unwrap_err(),
            Error::PartialTree
        );
    }

    #[test]
    fn wavelets_orthonormal_with_zero_sum_details() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..6 {
            let g = random_connected(10 + 7 * trial, 0.1, trial % 2 == 0, &mut rng);
            let tree = build_tree(&g, &PartitionMethod::TwoMeans { seed: trial as u64 }, StopRule::FullDepth).unwrap();
            let w = lspc_wavelet_basis(&tree).unwrap();
            let n = g.num_nodes();
            assert_eq!(w.num_atoms(), n);
            assert!((w.atoms.transpose() * &w.atoms - DMatrix::identity(n, n)).amax() < 1e-10);
            for j in 1..n {
                assert!(w.atoms.column(j).sum().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_on_dyadic_path() {
        let tree = build_tree(&path(8), &PartitionMethod::SpanningTree, StopRule::FullDepth).unwrap();
        let w = lspc_wavelet_basis(&tree).unwrap();
        // Classical Haar: constant, then differences of halves at each scale.
        let mut haar = DMatrix::zeros(8, 8);
        haar.column_mut(0).fill(1.0 / 8f64.sqrt());
        let mut col = 1;
        for scale in [8usize, 4, 2] {
            for start in (0..8).step_by(scale) {
                let h = 1.0 / (scale as f64).sqrt();
                for i in 0..scale / 2 {
                    haar[(start + i, col)] = h;
                    haar[(start + scale / 2 + i, col)] = -h;
                }
                col += 1;
            }
        }
        for j in 0..8 {
            let same = (w.atoms.column(j) - haar.column(j)).amax();
            let flipped = (w.atoms.column(j) + haar.column(j)).amax();
            assert!(same.min(flipped) < 1e-12, "column {j}");
        }
    }

    #[test]
    fn lsps_counts() {
        let g = path(4);
        let tree = toy_tree();
        let d = lsps_dictionary(&g, &tree, LspsModel::Polynomial { degree: 0 }).unwrap();
        assert_eq!(d.atoms, lspc_dictionary(&tree).unwrap().atoms);
        let d = lsps_dictionary(&g, &tree, LspsModel::Polynomial { degree: 1 }).unwrap();
        assert_eq!(d.meta.iter().filter(|m| m.level == 0).count(), 5);
        // Root 1 + 4, two pairs 1 + 2 each, four singletons 1 each.
        assert_eq!(d.num_atoms(), 5 + 6 + 4);
        let d = lsps_dictionary(&g, &tree, LspsModel::Bandlimited { bandwidth: 3 }).unwrap();
        assert_eq!(d.num_atoms(), 3 + 2 + 2 + 4);
        assert!(d.atom_norms().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn piecewise_constant_counts_cut_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = random_connected(40, 0.08, false, &mut rng);
        for _ in 0..20 {
            let model = piecewise_constant(&g, 4, &mut rng).unwrap();
            let x = synthesize(&g, &model).unwrap();
            let SignalModel::PiecewiseConstant { sets, values } = &model else { unreachable!() };
            let mut value_of = vec![0.0; 40];
            for (s, v) in sets.iter().zip(values) {
                s.nodes().iter().for_each(|&i| value_of[i] = *v);
            }
            let cut = g.edges().iter().filter(|e| value_of[e.src] != value_of[e.dst]).count();
            assert_eq!(difference_operator(&g).count_nonzero(&x, 0.0), cut);
        }
        let one = SignalModel::PiecewiseConstant { sets: vec![LocalSet::all(40)], values: vec![2.5] };
        let x = synthesize(&g, &one).unwrap();
        assert!(x.iter().all(|&v| v == 2.5));
        assert_eq!(difference_operator(&g).count_nonzero(&x, 0.0), 0);
    }

    #[test]
    fn bandlimited_first_vector_is_constant() {
        let g = path(5);
        let model = SignalModel::Bandlimited {
            kind: StructureMatrixKind::LaplacianUnnormalized,
            bandwidth: 1,
            coefficients: vec![1.0],
        };
        let x = synthesize(&g, &model).unwrap();
        assert!(x.iter().all(|v| (v - 1.0 / 5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn invalid_models() {
        let g = path(4);
        let sets = vec![LocalSet::new(vec![0, 1]).unwrap(), LocalSet::new(vec![1, 2, 3]).unwrap()];
        let overlap = SignalModel::PiecewiseConstant { sets, values: vec![1.0, 2.0] };
        assert!(matches!(synthesize(&g, &overlap), Err(Error::InvalidModel(_))));
        let sets = vec![LocalSet::new(vec![0, 2]).unwrap(), LocalSet::new(vec![1, 3]).unwrap()];
        let disconnected = SignalModel::PiecewiseConstant { sets, values: vec![1.0, 2.0] };
        assert!(matches!(synthesize(&g, &disconnected), Err(Error::InvalidModel(_))));
        let too_wide = SignalModel::Bandlimited {
            kind: StructureMatrixKind::Adjacency,
            bandwidth: 5,
            coefficients: vec![0.0; 5],
        };
        assert!(matches!(synthesize(&g, &too_wide), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn piecewise_polynomial_and_bandlimited_lie_in_lsps_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let g = random_connected(18, 0.12, false, &mut rng);
        let model = piecewise_polynomial(&g, 3, 2, &mut rng).unwrap();
        let x = synthesize(&g, &model).unwrap();
        assert_eq!(x.len(), 18);
        let model = piecewise_bandlimited(&g, 3, 2, &mut rng).unwrap();
        let x = synthesize(&g, &model).unwrap();
        assert!(x.iter().any(|v| *v != 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let tree = toy_tree();
        let w = lspc_wavelet_basis(&tree).unwrap();
        let back = Dictionary::from_csv_and_metadata(&w.to_csv(), &w.metadata_json()).unwrap();
        assert_eq!(back.atoms, w.atoms);
        assert_eq!(back.meta, w.meta);
    }
}
