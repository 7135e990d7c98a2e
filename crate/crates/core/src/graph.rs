//! Graphs, structure matrices, the difference operator and geodesic distances.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weighted edge. Undirected edges are stored with `src < dst`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// An immutable weighted graph with no self-loops and no duplicate edges.
#[derive(Debug, Clone)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<Edge>,
    directed: bool,
    // Outgoing neighbors (both directions when undirected), sorted by index.
    out: Vec<Vec<(usize, f64)>>,
    // Neighbors with direction ignored, sorted by index.
    undirected: Vec<Vec<(usize, f64)>>,
}

/// The six structure matrices a graph can be represented by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureMatrixKind {
    Adjacency,
    NormalizedAdjacency,
    Transition,
    LaplacianUnnormalized,
    LaplacianNormalized,
    LaplacianTransition,
}

impl StructureMatrixKind {
    pub const ALL: [StructureMatrixKind; 6] = [
        StructureMatrixKind::Adjacency,
        StructureMatrixKind::NormalizedAdjacency,
        StructureMatrixKind::Transition,
        StructureMatrixKind::LaplacianUnnormalized,
        StructureMatrixKind::LaplacianNormalized,
        StructureMatrixKind::LaplacianTransition,
    ];

    /// Laplacian kinds measure variation with a quadratic form; the others are graph shifts.
    pub fn is_laplacian(self) -> bool {
        matches!(
            self,
            StructureMatrixKind::LaplacianUnnormalized
                | StructureMatrixKind::LaplacianNormalized
                | StructureMatrixKind::LaplacianTransition
        )
    }

    pub fn is_transition(self) -> bool {
        matches!(self, StructureMatrixKind::Transition | StructureMatrixKind::LaplacianTransition)
    }

    pub fn name(self) -> &'static str {
        match self {
            StructureMatrixKind::Adjacency => "adjacency",
            StructureMatrixKind::NormalizedAdjacency => "normalized-adjacency",
            StructureMatrixKind::Transition => "transition",
            StructureMatrixKind::LaplacianUnnormalized => "laplacian-unnormalized",
            StructureMatrixKind::LaplacianNormalized => "laplacian-normalized",
            StructureMatrixKind::LaplacianTransition => "laplacian-transition",
        }
    }
}

impl std::str::FromStr for StructureMatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StructureMatrixKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown structure matrix kind `{s}`")))
    }
}

impl Graph {
    /// Builds a graph, canonicalizing undirected edges to `src < dst`.
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = Edge>, directed: bool) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen = HashSet::new();
        let mut canonical = Vec::new();
        for e in edges {
            for node in [e.src, e.dst] {
                if node >= num_nodes {
                    return Err(Error::NodeOutOfRange { node, num_nodes });
                }
            }
            if e.src == e.dst {
                return Err(Error::SelfLoop(e.src));
            }
            if !e.weight.is_finite() || e.weight == 0.0 {
                return Err(Error::InvalidWeight(e.src, e.dst));
            }
            let (src, dst) = if directed || e.src < e.dst { (e.src, e.dst) } else { (e.dst, e.src) };
            if !seen.insert((src, dst)) {
                return Err(Error::DuplicateEdge(src, dst));
            }
            canonical.push(Edge { src, dst, weight: e.weight });
        }
        canonical.sort_by_key(|e| (e.src, e.dst));

        let mut out = vec![Vec::new(); num_nodes];
        let mut undirected = vec![Vec::new(); num_nodes];
        for e in &canonical {
            out[e.src].push((e.dst, e.weight));
            if !directed {
                out[e.dst].push((e.src, e.weight));
            }
            undirected[e.src].push((e.dst, e.weight));
            undirected[e.dst].push((e.src, e.weight));
        }
        for list in out.iter_mut().chain(undirected.iter_mut()) {
            list.sort_by_key(|&(v, _)| v);
        }
        if directed {
            // A reciprocal pair of directed edges shows up twice when direction is ignored.
            for list in undirected.iter_mut() {
                list.dedup_by_key(|&mut (v, _)| v);
            }
        }
        Ok(Graph { num_nodes, edges: canonical, directed, out, undirected })
    }

    /// Unweighted undirected graph from index pairs.
    pub fn unweighted(num_nodes: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Graph::new(
            num_nodes,
            pairs.iter().map(|&(src, dst)| Edge { src, dst, weight: 1.0 }),
            false,
        )
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// True when every weight equals one.
    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// Outgoing neighbors with weights, sorted by index.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.out[node]
    }

    /// Neighbors with edge direction ignored.
    pub fn undirected_neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.undirected[node]
    }

    /// Row sums of the weight matrix.
    pub fn degrees(&self) -> Vec<f64> {
        self.out.iter().map(|n| n.iter().map(|&(_, w)| w).sum()).collect()
    }

    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let n = self.num_nodes;
        let mut w = DMatrix::zeros(n, n);
        for (i, list) in self.out.iter().enumerate() {
            for &(j, wt) in list {
                w[(i, j)] = wt;
            }
        }
        w
    }

    /// Subgraph induced by `nodes`, relabeled to `0..nodes.len()` in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.num_nodes];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.src] != usize::MAX && local[e.dst] != usize::MAX)
            .map(|e| Edge { src: local[e.src], dst: local[e.dst], weight: e.weight });
        Graph::new(nodes.len().max(1), edges, self.directed)
            .expect("induced subgraph of a valid graph is valid")
    }

    /// Parses the edge-list text format. The node count comes from a `# nodes: N`
    /// comment when present, otherwise the largest index plus one.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        Self::parse_edge_list(text, None)
    }

    /// Parses the edge-list text format with an explicit node count.
    pub fn from_edge_list_with_nodes(text: &str, num_nodes: usize) -> Result<Self> {
        Self::parse_edge_list(text, Some(num_nodes))
    }

    fn parse_edge_list(text: &str, num_nodes: Option<usize>) -> Result<Self> {
        let mut directed = false;
        let mut edges = Vec::new();
        let mut seen_edge = false;
        let mut hinted = None;
        for (lineno, raw) in text.lines().enumerate() {
            if let Some(n) = raw.trim().strip_prefix("# nodes:") {
                hinted = n.trim().parse::<usize>().ok();
            }
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !seen_edge && (line == "directed" || line == "undirected") {
                directed = line == "directed";
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::InvalidParameter(format!(
                    "line {}: expected `src dst [weight]`",
                    lineno + 1
                )));
            }
            let parse_node = |s: &str| {
                s.parse::<usize>().map_err(|_| {
                    Error::InvalidParameter(format!("line {}: bad node index `{s}`", lineno + 1))
                })
            };
            let weight = match fields.get(2) {
                Some(s) => s.parse::<f64>().map_err(|_| {
                    Error::InvalidParameter(format!("line {}: bad weight `{s}`", lineno + 1))
                })?,
                None => 1.0,
            };
            edges.push(Edge { src: parse_node(fields[0])?, dst: parse_node(fields[1])?, weight });
            seen_edge = true;
        }
        let inferred = edges.iter().map(|e| e.src.max(e.dst) + 1).max().unwrap_or(0);
        Graph::new(num_nodes.or(hinted).unwrap_or(inferred), edges, directed)
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        Ok(Self::from_edge_list(&std::fs::read_to_string(path)?))
    }

    /// Serializes to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# nodes: {}", self.num_nodes);
        s.push_str(if self.directed { "directed\n" } else { "undirected\n" });
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.src, e.dst, e.weight);
        }
        s
    }
}

/// Builds the structure matrix of the given kind.
pub fn build_matrix(graph: &Graph, kind: StructureMatrixKind) -> Result<DMatrix<f64>> {
    use StructureMatrixKind::*;
    let n = graph.num_nodes();
    let w = graph.weight_matrix();
    let d = graph.degrees();
    let check = |strict_positive: bool| -> Result<()> {
        for (i, &di) in d.iter().enumerate() {
            if di == 0.0 || (strict_positive && di < 0.0) {
                return Err(Error::ZeroDegreeNode(i));
            }
        }
        Ok(())
    };
    let m = match kind {
        Adjacency => w,
        LaplacianUnnormalized => DMatrix::from_diagonal(&d.clone().into()) - w,
        NormalizedAdjacency | LaplacianNormalized => {
            check(true)?;
            // One rounding of d_i·d_j keeps the result exactly symmetric.
            let wn = DMatrix::from_fn(n, n, |i, j| w[(i, j)] / (d[i] * d[j]).sqrt());
            if kind == NormalizedAdjacency {
                wn
            } else {
                DMatrix::identity(n, n) - wn
            }
        }
        Transition | LaplacianTransition => {
            check(false)?;
            let p = DMatrix::from_fn(n, n, |i, j| w[(i, j)] / d[i]);
            if kind == Transition {
                p
            } else {
                DMatrix::identity(n, n) - p
            }
        }
    };
    Ok(m)
}

/// Sparse difference operator: one row per edge with two nonzeros.
#[derive(Debug, Clone)]
pub struct DifferenceOperator {
    num_nodes: usize,
    // (tail, head, coefficient): entry -coefficient at tail and +coefficient at head.
    rows: Vec<(usize, usize, f64)>,
}

impl DifferenceOperator {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn rows(&self) -> &[(usize, usize, f64)] {
        &self.rows
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|&(j, k, c)| c * (x[k] - x[j])).collect()
    }

    /// Applies the transpose to an edge-indexed vector.
    pub fn apply_transpose(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_nodes];
        for (&(j, k, c), &zi) in self.rows.iter().zip(z) {
            out[j] -= c * zi;
            out[k] += c * zi;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.num_nodes);
        for (r, &(j, k, c)) in self.rows.iter().enumerate() {
            m[(r, j)] = -c;
            m[(r, k)] = c;
        }
        m
    }

    /// Number of edges whose endpoints differ by more than `tol`.
    pub fn count_nonzero(&self, x: &[f64], tol: f64) -> usize {
        self.apply(x).iter().filter(|v| v.abs() > tol).count()
    }
}

pub fn difference_operator(graph: &Graph) -> DifferenceOperator {
    let rows = graph
        .edges()
        .iter()
        .map(|e| (e.src, e.dst, e.weight.signum() * e.weight.abs().sqrt()))
        .collect();
    DifferenceOperator { num_nodes: graph.num_nodes(), rows }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path distances from `source`, edge length `1/|w|`; `f64::INFINITY` when unreachable.
pub fn geodesic_distances(graph: &Graph, source: usize) -> Vec<f64> {
    shortest_paths(graph, source, None)
}

/// Distances inside the subgraph induced by the nodes with `mask[v] == true`.
pub fn geodesic_distances_within(graph: &Graph, source: usize, mask: &[bool]) -> Vec<f64> {
    shortest_paths(graph, source, Some(mask))
}

fn shortest_paths(graph: &Graph, source: usize, mask: Option<&[bool]>) -> Vec<f64> {
    let n = graph.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let allowed = |v: usize| mask.is_none_or(|m| m[v]);
    if !allowed(source) {
        return dist;
    }
    dist[source] = 0.0;
    if graph.is_unweighted() {
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in graph.neighbors(u) {
                if allowed(v) && dist[v].is_infinite() {
                    dist[v] = dist[u] + 1.0;
                    queue.push_back(v);
                }
            }
        }
        return dist;
    }
    let mut heap = BinaryHeap::from([HeapItem(0.0, source)]);
    while let Some(HeapItem(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &(v, w) in graph.neighbors(u) {
            let alt = du + 1.0 / w.abs();
            if allowed(v) && alt < dist[v] {
                dist[v] = alt;
                heap.push(HeapItem(alt, v));
            }
        }
    }
    dist
}

/// All-pairs distance matrix (row = source).
pub fn all_pairs_distances(graph: &Graph) -> DMatrix<f64> {
    let n = graph.num_nodes();
    let mut m = DMatrix::zeros(n, n);
    for s in 0..n {
        for (t, d) in geodesic_distances(graph, s).into_iter().enumerate() {
            m[(s, t)] = d;
        }
    }
    m
}

/// Component labels, numbered in order of each component's smallest node.
/// Nodes outside `restrict_to` get `None`.
pub fn connected_components(graph: &Graph, restrict_to: Option<&[usize]>) -> Vec<Option<usize>> {
    let n = graph.num_nodes();
    let mut member = vec![restrict_to.is_none(); n];
    if let Some(set) = restrict_to {
        for &v in set {
            member[v] = true;
        }
    }
    let mut labels = vec![None; n];
    let mut next = 0;
    for start in 0..n {
        if !member[start] || labels[start].is_some() {
            continue;
        }
        labels[start] = Some(next);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in graph.undirected_neighbors(u) {
                if member[v] && labels[v].is_none() {
                    labels[v] = Some(next);
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    labels
}

/// Components of the subgraph induced by `nodes`, each sorted, ordered by smallest member.
pub fn components_of(graph: &Graph, nodes: &[usize]) -> Vec<Vec<usize>> {
    let labels = connected_components(graph, Some(nodes));
    let count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); count];
    for (v, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            groups[*l].push(v);
        }
    }
    groups
}

pub fn is_connected(graph: &Graph) -> bool {
    connected_components(graph, None).iter().all(|l| *l == Some(0))
}

/// Common fixtures.
pub mod generators {
    use super::*;
    use rand::Rng;

    pub fn path(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::unweighted(n, &pairs).expect("valid path")
    }

    pub fn cycle(n: usize) -> Graph {
        let mut pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            pairs.push((n - 1, 0));
        }
        Graph::unweighted(n, &pairs).expect("valid cycle")
    }

    pub fn star(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::unweighted(n, &pairs).expect("valid star")
    }

    /// Grid with `rows × cols` nodes, node `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut pairs = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    pairs.push((v, v + 1));
                }
                if r + 1 < rows {
                    pairs.push((v, v + cols));
                }
            }
        }
        Graph::unweighted(rows * cols, &pairs).expect("valid grid")
    }

    /// Random connected graph: a random spanning tree plus extra edges with probability `p`.
    pub fn random_connected<R: Rng + ?Sized>(n: usize, p: f64, weighted: bool, rng: &mut R) -> Graph {
        let mut pairs = HashSet::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            pairs.insert((u, v));
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    pairs.insert((u, v));
                }
            }
        }
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let edges: Vec<Edge> = pairs
            .into_iter()
            .map(|(src, dst)| Edge {
                src,
                dst,
                weight: if weighted { rng.random_range(0.1..2.0) } else { 1.0 },
            })
            .collect();
        Graph::new(n, edges, false).expect("valid random graph")
    }

    /// Random geometric graph on the unit square joining points closer than `radius`,
    /// with spanning-tree edges added so the result is connected.
    pub fn random_geometric<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Graph {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        let dist = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
        let mut pairs = HashSet::new();
        for u in 0..n {
            for v in u + 1..n {
                if dist(u, v) < radius {
                    pairs.insert((u, v));
                }
            }
        }
        // Join components to their nearest outside node.
        loop {
            let g = Graph::unweighted(n, &pairs.iter().copied().collect::<Vec<_>>()).expect("valid");
            let comps = components_of(&g, &(0..n).collect::<Vec<_>>());
            if comps.len() <= 1 {
                return g;
            }
            let first = &comps[0];
            let mut best = (f64::INFINITY, 0, 0);
            for &a in first {
                for other in &comps[1..] {
                    for &b in other {
                        if dist(a, b) < best.0 {
                            best = (dist(a, b), a.min(b), a.max(b));
                        }
                    }
                }
            }
            pairs.insert((best.1, best.2));
        }
    }
}
