//! Thin singular value decomposition by one-sided Jacobi rotations.
//!
//! nalgebra 0.35's bidiagonal SVD returns wrong factors for some inputs whose columns are
//! nearly orthogonal (for example rows `[a, b]`, `[a, -b]` off by a few ulps), and
//! sampled in-band rows of a Fourier basis hit that case often. Jacobi sweeps converge to
//! high relative accuracy on exactly these matrices.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 60;

/// `a = u · diag(sigma) · vᵀ` with `u` of the shape of `a` (or of `aᵀ` when `a` is wide),
/// singular values in decreasing order.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn svd(a: &DMatrix<f64>) -> Svd {
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose());
        return Svd { u: t.v, sigma: t.sigma, v: t.u };
    }
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = DMatrix::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = u.column(p).dot(&u.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut u, &mut v] {
                    for i in 0..m.nrows() {
                        let (x, y) = (m[(i, p)], m[(i, q)]);
                        m[(i, p)] = c * x - s * y;
                        m[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| u.column(j).norm()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = DMatrix::from_fn(u.nrows(), n, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 { u[(i, j)] / norms[j] } else { 0.0 }
    });
    let v = v.select_columns(&order);
    Svd { u, sigma, v }
}

pub(crate) fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    svd(a).sigma
}

impl Svd {
    /// `v · diag(1/sigma) · uᵀ`, assuming every singular value is nonzero.
    pub fn pseudo_inverse(&self) -> DMatrix<f64> {
        let inv = DMatrix::from_diagonal(&DVector::from_iterator(self.sigma.len(), self.sigma.iter().map(|s| 1.0 / s)));
        &self.v * inv * self.u.transpose()
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.pseudo_inverse() * b
    }
}
