//! Dense symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form followed by the implicit
//! shift QL iteration, the classic EISPACK route. Symmetric-specific on
//! purpose: every matrix this crate diagonalizes (distance minors,
//! scaled quadrature kernels) is symmetric, and the symmetric pipeline
//! keeps all eigenvalues real with orthogonal eigenvectors.
//!
//! Two entry points: [`symmetric_eigenvalues`] runs the cheap
//! values-only pipeline, [`symmetric_eigen`] additionally accumulates
//! eigenvectors so residuals `||A v - lambda v||` can be verified.

use crate::error::{Error, Result};

/// Eigendecomposition of a symmetric matrix. Eigenvalues ascend;
/// `vectors` stores the eigenvector for `values[j]` in column `j`
/// (row-major `n x n`).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }

    /// `||A v_j - lambda_j v_j||_2` for the original matrix `a`.
    pub fn residual_norm(&self, a: &[f64], j: usize) -> f64 {
        let n = self.n;
        let lambda = self.values[j];
        let mut sum = 0.0;
        for i in 0..n {
            let mut av = 0.0;
            for k in 0..n {
                av += a[i * n + k] * self.vectors[k * n + j];
            }
            let r = av - lambda * self.vectors[i * n + j];
            sum += r * r;
        }
        sum.sqrt()
    }

    pub fn max_residual_norm(&self, a: &[f64]) -> f64 {
        (0..self.n)
            .map(|j| self.residual_norm(a, j))
            .fold(0.0, f64::max)
    }
}

pub fn frobenius_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn validate_square_symmetric(n: usize, a: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("matrix order must be at least 1"));
    }
    if a.len() != n * n {
        return Err(Error::invalid(format!(
            "expected {} entries for order {n}, got {}",
            n * n,
            a.len()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix entries must be finite"));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if a[i * n + j] != a[j * n + i] {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    validate_square_symmetric(n, a)?;
    let mut work = a.to_vec();
    let (mut d, mut e) = tridiagonalize(n, &mut work, None);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_unstable_by(f64::total_cmp);
    Ok(d)
}

/// Full eigendecomposition with eigenvectors, sorted ascending by value.
pub fn symmetric_eigen(n: usize, a: &[f64]) -> Result<SymmetricEigen> {
    validate_square_symmetric(n, a)?;
    let mut work = a.to_vec();
    let mut q = vec![0.0; n * n];
    let (mut d, mut e) = tridiagonalize(n, &mut work, Some(&mut q));
    tridiagonal_ql(&mut d, &mut e, Some(&mut q))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_j] = q[i * n + old_j];
        }
    }
    Ok(SymmetricEigen { n, values, vectors })
}

/// Householder reduction of symmetric `a` (destroyed) to tridiagonal
/// form. Returns `(d, e)` with `d` the diagonal and `e[i]` coupling
/// `(i, i+1)`; `e` has length `n - 1` conceptually but is allocated at
/// `n` with a trailing zero for the QL stage. When `q` is given it
/// receives the accumulated orthogonal factor so that
/// `a = q * tridiag(d, e) * q^T`.
fn tridiagonalize(n: usize, a: &mut [f64], q: Option<&mut [f64]>) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    // Householder vectors, concatenated; v_k acts on rows/cols k+1..n.
    let mut hh_store: Vec<f64> = Vec::new();
    let mut hh_offsets: Vec<(usize, usize)> = Vec::new(); // (k, start)

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // length of the column below the diagonal
        let col_norm_sq: f64 = (k + 1..n).map(|i| a[i * n + k] * a[i * n + k]).sum();
        let col_norm = col_norm_sq.sqrt();
        if col_norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = if x0 > 0.0 { -col_norm } else { col_norm };

        // v = x - alpha * e1, normalized
        let mut v = vec![0.0; m];
        v[0] = x0 - alpha;
        for i in 1..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        let v_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            e[k] = alpha;
            continue;
        }
        for x in &mut v {
            *x /= v_norm;
        }

        // p = A22 * v on the trailing block, then the rank-2 update
        // A22 <- A22 - 2 v w^T - 2 w v^T with w = p - (v^T p) v.
        let mut p = vec![0.0; m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = (k + 1 + i) * n + (k + 1);
            let mut acc = 0.0;
            for j in 0..m {
                acc += a[row + j] * v[j];
            }
            *pi = acc;
        }
        let vp: f64 = v.iter().zip(&p).map(|(x, y)| x * y).sum();
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - vp * vi).collect();
        for i in 0..m {
            let row = (k + 1 + i) * n + (k + 1);
            for j in 0..m {
                a[row + j] -= 2.0 * (v[i] * w[j] + w[i] * v[j]);
            }
        }

        a[(k + 1) * n + k] = alpha;
        a[k * n + (k + 1)] = alpha;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
            a[k * n + i] = 0.0;
        }
        e[k] = alpha;

        if q.is_some() {
            let start = hh_store.len();
            hh_store.extend_from_slice(&v);
            hh_offsets.push((k, start));
        }
    }

    for i in 0..n {
        d[i] = a[i * n + i];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)];
    }

    if let Some(q) = q {
        // Q = H_0 H_1 ... applied to the identity, last reflector first.
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = if i == j { 1.0 } else { 0.0 };
            }
        }
        for &(k, start) in hh_offsets.iter().rev() {
            let m = n - k - 1;
            let v = &hh_store[start..start + m];
            // rows k+1..n of Q: Q <- Q - 2 v (v^T Q)
            for j in 0..n {
                let mut dot = 0.0;
                for i in 0..m {
                    dot += v[i] * q[(k + 1 + i) * n + j];
                }
                let twice = 2.0 * dot;
                for i in 0..m {
                    q[(k + 1 + i) * n + j] -= twice * v[i];
                }
            }
        }
    }

    (d, e)
}

const MAX_QL_SWEEPS: usize = 50;

/// Implicit shift QL on a symmetric tridiagonal matrix. `d` holds the
/// diagonal, `e[i]` the coupling between `i` and `i+1` (`e[n-1]`
/// ignored). When `q` is given its columns are rotated along, turning
/// tridiagonal eigenvectors into eigenvectors of the original matrix.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut q: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut scale = 0.0f64;

    for l in 0..n {
        scale = scale.max(d[l].abs() + e[l].abs());
        let mut iter = 0;
        loop {
            // find the first negligible subdiagonal at or after l
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= eps * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::NumericDegeneracy(
                    "tridiagonal QL failed to converge".into(),
                ));
            }

            // implicit shift from the 2x2 at l
            let g = d[l];
            let p = (d[l + 1] - g) / (2.0 * e[l]);
            let mut r = p.hypot(1.0);
            if p < 0.0 {
                r = -r;
            }
            d[l] = e[l] / (p + r);
            d[l + 1] = e[l] * (p + r);
            let dl1 = d[l + 1];
            let mut h = g - d[l];
            for di in d.iter_mut().take(n).skip(l + 2) {
                *di -= h;
            }
            shift_total += h;

            // rotate back up from m to l
            let mut p = d[m];
            let mut c = 1.0;
            let mut c2 = c;
            let mut c3 = c;
            let el1 = e[l + 1];
            let mut s = 0.0;
            let mut s2 = 0.0;
            for i in (l..m).rev() {
                c3 = c2;
                c2 = c;
                s2 = s;
                let g = c * e[i];
                h = c * p;
                let r = p.hypot(e[i]);
                e[i + 1] = s * r;
                s = e[i] / r;
                c = p / r;
                p = c * d[i] - s * g;
                d[i + 1] = h + s * (c * g + s * d[i]);

                if let Some(q) = q.as_deref_mut() {
                    for k in 0..n {
                        let h = q[k * n + i + 1];
                        q[k * n + i + 1] = s * q[k * n + i] + c * h;
                        q[k * n + i] = c * q[k * n + i] - s * h;
                    }
                }
            }
            p = -s * s2 * c3 * el1 * e[l] / dl1;
            e[l] = s * p;
            d[l] = c * p;

            if e[l].abs() <= eps * scale {
                break;
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}
