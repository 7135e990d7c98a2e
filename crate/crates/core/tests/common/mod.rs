//! Independent oracles shared by the integration tests. Nothing here calls the solver
//! under test; each helper recomputes its quantity from definitions.
#![allow(dead_code)]

use graphsig::graph::Graph;
use nalgebra::{DMatrix, SymmetricEigen};

/// Laplacian assembled entry by entry from the edge list.
pub fn dense_laplacian(graph: &Graph) -> DMatrix<f64> {
    let n = graph.num_nodes();
    let mut l = DMatrix::zeros(n, n);
    for e in graph.edges() {
        let w = e.weight.abs();
        l[(e.src, e.src)] += w;
        l[(e.dst, e.dst)] += w;
        l[(e.src, e.dst)] -= w;
        l[(e.dst, e.src)] -= w;
    }
    l
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Connectivity of a node subset by flood fill over the raw edge list.
pub fn is_connected_subset(graph: &Graph, nodes: &[usize]) -> bool {
    if nodes.is_empty() {
        return false;
    }
    let inside = |v: usize| nodes.contains(&v);
    let mut seen = vec![nodes[0]];
    let mut grew = true;
    while grew {
        grew = false;
        for e in graph.edges() {
            for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
                if seen.contains(&a) && inside(b) && !seen.contains(&b) {
                    seen.push(b);
                    grew = true;
                }
            }
        }
    }
    seen.len() == nodes.len()
}

/// Every split of `nodes` into two nonempty connected parts, first part holding `nodes[0]`.
pub fn connected_bipartitions(graph: &Graph, nodes: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let k = nodes.len();
    let mut out = Vec::new();
    for mask in 0..(1u64 << (k - 1)) {
        // Bit i decides whether nodes[i + 1] joins the first part.
        let mut a = vec![nodes[0]];
        let mut b = Vec::new();
        for (i, &v) in nodes[1..].iter().enumerate() {
            if mask >> i & 1 == 1 { a.push(v) } else { b.push(v) }
        }
        if !b.is_empty() && is_connected_subset(graph, &a) && is_connected_subset(graph, &b) {
            out.push((a, b));
        }
    }
    out
}

pub fn cut_weight(graph: &Graph, a: &[usize]) -> f64 {
    graph
        .edges()
        .iter()
        .filter(|e| a.contains(&e.src) != a.contains(&e.dst))
        .map(|e| e.weight.abs())
        .sum()
}

/// Objective `‖t_S − y‖² + μ‖Δt‖₁` evaluated from the edge list.
pub fn trend_objective(y: &[f64], sampled: &[usize], graph: &Graph, mu: f64, t: &[f64]) -> f64 {
    let data: f64 = sampled.iter().zip(y).map(|(&i, v)| (t[i] - v).powi(2)).sum();
    let tv: f64 = graph.edges().iter().map(|e| e.weight.abs().sqrt() * (t[e.dst] - t[e.src]).abs()).sum();
    data + mu * tv
}

/// Relative residual of the optimality condition `0 ∈ 2S(t − y) + μΔᵀz`, `z ∈ ∂‖Δt‖₁`.
///
/// Entries of `Δt` above `zero_tol` fix `z` to their sign; the rest are chosen in
/// `[−1, 1]` to minimize the residual by projected gradient. The result is the residual
/// norm divided by `max(1, ‖2S(t − y)‖, μ‖Δ‖_F)`.
pub fn kkt_residual(y: &[f64], sampled: &[usize], graph: &Graph, mu: f64, t: &[f64], zero_tol: f64) -> f64 {
    let n = graph.num_nodes();
    let mut g = vec![0.0; n];
    for (&i, v) in sampled.iter().zip(y) {
        g[i] += 2.0 * (t[i] - v);
    }
    let rows: Vec<(usize, usize, f64)> =
        graph.edges().iter().map(|e| (e.src, e.dst, e.weight.abs().sqrt())).collect();
    let mut z: Vec<f64> = rows.iter().map(|&(a, b, w)| w * (t[b] - t[a])).collect();
    let free: Vec<bool> = z.iter().map(|d| d.abs() <= zero_tol).collect();
    for (zi, &f) in z.iter_mut().zip(&free) {
        *zi = if f { 0.0 } else { zi.signum() };
    }
    let residual = |z: &[f64]| {
        let mut r = g.clone();
        for (&(a, b, w), zi) in rows.iter().zip(z) {
            r[a] -= mu * w * zi;
            r[b] += mu * w * zi;
        }
        r
    };
    let max_w = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let max_deg = (0..n).map(|v| rows.iter().filter(|r| r.0 == v || r.1 == v).count()).max().unwrap_or(1) as f64;
    let step = 1.0 / (2.0 * (mu * max_w).powi(2) * max_deg).max(1e-12);
    for _ in 0..20_000 {
        let r = residual(&z);
        let mut moved = 0.0f64;
        for (k, &(a, b, w)) in rows.iter().enumerate() {
            if free[k] {
                // d/dz_k of ½‖r‖² is μw(r_b − r_a).
                let grad = mu * w * (r[b] - r[a]);
                let next = (z[k] - step * grad).clamp(-1.0, 1.0);
                moved = moved.max((next - z[k]).abs());
                z[k] = next;
            }
        }
        if moved < 1e-13 {
            break;
        }
    }
    let r = residual(&z);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let frob = mu * rows.iter().map(|r| 2.0 * r.2 * r.2).sum::<f64>().sqrt();
    norm(&r) / 1f64.max(norm(&g)).max(frob)
}

/// Pseudo-inverse of a full-rank matrix through a QR factorization of whichever of `a`, `aᵀ`
/// is tall. Avoids nalgebra's SVD, which is wrong on some nearly orthogonal inputs.
pub fn full_rank_pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.nrows() < a.ncols() {
        return full_rank_pinv(&a.transpose()).transpose();
    }
    let qr = a.clone().qr();
    let r_inv = qr.r().try_inverse().expect("full column rank");
    r_inv * qr.q().transpose()
}

/// Largest singular value as the square root of the top eigenvalue of `mᵀm`.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.transpose() * m).eigenvalues.max().max(0.0).sqrt()
}

/// Smallest singular value of a tall or square matrix, from the eigenvalues of `mᵀm`.
pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.transpose() * m).eigenvalues.min().max(0.0).sqrt()
}
