//! Shared oracles for integration tests: an eigenvalue route that never
//! touches the library solver (characteristic polynomial plus bisection)
//! and a composite midpoint rule for integral cross-checks.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Characteristic polynomial of an `n x n` matrix (row-major) by the
/// Faddeev-LeVerrier recursion. Coefficients ascending, monic:
/// `p(x) = c[0] + c[1] x + ... + x^n`.
pub fn charpoly(n: usize, a: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    // m starts as A; each step m <- A (m + c I)
    let mut m = a.to_vec();
    for k in 1..=n {
        let trace: f64 = (0..n).map(|i| m[i * n + i]).sum();
        let c = -trace / k as f64;
        coeffs[n - k] = c;
        if k == n {
            break;
        }
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[i * n + i] += c;
        }
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += a[i * n + l] * shifted[l * n + j];
                }
                next[i * n + j] = acc;
            }
        }
        m = next;
    }
    coeffs
}

/// Horner evaluation of an ascending-coefficient polynomial.
pub fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn bisect(p: &[f64], mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = poly_eval(p, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All real roots of `p` inside `(lo, hi)`, ascending, by the derivative
/// chain: roots of `p'` split `(lo, hi)` into monotone pieces, each
/// bisected for a sign change. Exact for real-rooted polynomials with
/// simple roots, which is the generic symmetric-matrix case.
pub fn real_roots(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let degree = p.len() - 1;
    assert!(degree >= 1, "constant polynomial has no roots to find");
    if degree == 1 {
        return vec![-p[0] / p[1]];
    }
    let derivative: Vec<f64> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect();
    let mut cuts = vec![lo];
    for r in real_roots(&derivative, lo, hi) {
        if r > lo && r < hi {
            cuts.push(r);
        }
    }
    cuts.push(hi);
    let mut roots = Vec::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (poly_eval(p, a), poly_eval(p, b));
        if fa == 0.0 {
            // a critical point landed on a root; it was pushed by the
            // previous window
            continue;
        }
        if fb == 0.0 {
            roots.push(b);
        } else if fa.signum() != fb.signum() {
            roots.push(bisect(p, a, b, fa));
        }
    }
    roots
}

/// Eigenvalues of a symmetric matrix via the characteristic polynomial,
/// ascending. Bracket: spectral radius <= Frobenius norm.
pub fn charpoly_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    let bound = a.iter().map(|x| x * x).sum::<f64>().sqrt() + 1.0;
    let p = charpoly(n, a);
    let mut roots = real_roots(&p, -bound, bound);
    roots.sort_by(f64::total_cmp);
    roots
}

/// Composite midpoint rule on `[a, b]` with `cells` equal cells.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    (0..cells)
        .map(|i| f(a + (i as f64 + 0.5) * h))
        .sum::<f64>()
        * h
}

/// Random symmetric matrix with entries uniform in [-1, 1], row-major.
pub fn random_symmetric(n: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    a
}
