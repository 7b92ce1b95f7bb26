//! Spectrum of the metric-kernel integral operator.
//!
//! For a square-integrable triple the operator `(I f)(y) = int rho(x,y)
//! f(x) dmu(x)` is self-adjoint Hilbert-Schmidt, so it has a real point
//! spectrum with `sum lambda^2 = int int rho^2`. Nystrom discretization
//! on quadrature nodes turns the eigenproblem into a finite symmetric
//! one; the circle kernel is also solved in closed form (Fourier
//! coefficients), giving an independent analytic target.

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::matdist::sample_minor;
use crate::rng::{packed_stream, replication_stream};
use crate::triples::{MetricTriple, Point};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Fixed stream tag for Monte-Carlo quadrature nodes, so Nystrom output
/// is a pure function of (triple, grid).
const NYSTROM_NODE_SEED: u64 = 0x4E59_5354;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    Nystrom,
    Analytic,
}

impl SpectrumMethod {
    pub fn label(&self) -> &'static str {
        match self {
            SpectrumMethod::Nystrom => "nystrom",
            SpectrumMethod::Analytic => "analytic",
        }
    }
}

/// Approximate operator eigenvalues, largest absolute value first.
#[derive(Debug, Clone)]
pub struct OperatorSpectrum {
    eigenvalues: Vec<f64>,
    pub method: SpectrumMethod,
    /// Grid size (nystrom) or max frequency (analytic).
    pub resolution: usize,
    /// Set when the quadrature nodes are Monte-Carlo (sphere d >= 2);
    /// no deterministic-grid error bound applies.
    pub approximate_quadrature: bool,
}

fn sort_abs_desc(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
}

impl OperatorSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn top(&self, count: usize) -> &[f64] {
        &self.eigenvalues[..count.min(self.eigenvalues.len())]
    }

    pub fn sum_squares(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x * x).sum()
    }
}

/// Deterministic quadrature nodes for the built-in square-integrable
/// triples. Equal weights `1/grid` throughout; sphere `d >= 2` falls
/// back to Monte-Carlo nodes (flagged approximate).
fn quadrature_nodes(triple: &dyn MetricTriple, grid: usize) -> Result<(Vec<Point>, bool)> {
    let g = grid as f64;
    match triple.name() {
        "unit-interval" => {
            // midpoint rule
            let pts = (0..grid)
                .map(|i| Point::new(vec![(i as f64 + 0.5) / g]))
                .collect::<Result<Vec<_>>>()?;
            Ok((pts, false))
        }
        "circle" => {
            let pts = (0..grid)
                .map(|i| Point::new(vec![2.0 * PI * i as f64 / g]))
                .collect::<Result<Vec<_>>>()?;
            Ok((pts, false))
        }
        name if name.starts_with("sphere:") => {
            if triple.dimension() == 2 {
                // S^1 embedded in the plane: equispaced angles are exact
                let pts = (0..grid)
                    .map(|i| {
                        let t = 2.0 * PI * i as f64 / g;
                        Point::new(vec![t.cos(), t.sin()])
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((pts, false))
            } else {
                let mut rng = packed_stream(NYSTROM_NODE_SEED, triple.dimension() as u64, grid as u64);
                let pts = (0..grid).map(|_| triple.sample_point(&mut rng)).collect();
                Ok((pts, true))
            }
        }
        name => Err(Error::UnsupportedTriple(format!(
            "no quadrature rule for triple {name:?}"
        ))),
    }
}

/// Nystrom approximation: eigenvalues of the symmetrized scaled kernel
/// `sqrt(w_i) rho(t_i, t_j) sqrt(w_j)`, which with equal weights is
/// just `rho / grid`.
pub fn nystrom_spectrum(triple: &dyn MetricTriple, grid: usize) -> Result<OperatorSpectrum> {
    if !triple.square_integrable() {
        return Err(Error::UnsupportedTriple(format!(
            "triple {:?} is not square-integrable; the operator is not Hilbert-Schmidt",
            triple.name()
        )));
    }
    if grid < 2 {
        return Err(Error::invalid("nystrom grid must be at least 2"));
    }
    let (nodes, approximate) = quadrature_nodes(triple, grid)?;
    let w = 1.0 / grid as f64;
    let mut k = vec![0.0; grid * grid];
    for i in 0..grid {
        for j in (i + 1)..grid {
            let v = triple.distance(&nodes[i], &nodes[j])? * w;
            k[i * grid + j] = v;
            k[j * grid + i] = v;
        }
    }
    let mut eigenvalues = symmetric_eigenvalues(grid, &k)?;
    sort_abs_desc(&mut eigenvalues);
    Ok(OperatorSpectrum {
        eigenvalues,
        method: SpectrumMethod::Nystrom,
        resolution: grid,
        approximate_quadrature: approximate,
    })
}

/// Exact spectrum of the circle geodesic kernel via Fourier
/// coefficients: `c_0 = pi/2`, `c_k = ((-1)^k - 1) / (pi k^2)` with
/// multiplicity 2 for `k >= 1` (the pairs of frequencies +-k).
pub fn analytic_circle_spectrum(k_max: usize) -> Result<OperatorSpectrum> {
    if k_max < 1 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let mut eigenvalues = Vec::with_capacity(1 + 2 * k_max);
    eigenvalues.push(PI / 2.0);
    for k in 1..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = (sign - 1.0) / (PI * (k * k) as f64);
        eigenvalues.push(c);
        eigenvalues.push(c);
    }
    sort_abs_desc(&mut eigenvalues);
    Ok(OperatorSpectrum {
        eigenvalues,
        method: SpectrumMethod::Analytic,
        resolution: k_max,
        approximate_quadrature: false,
    })
}

/// Reference operator spectrum for a triple: closed form where known,
/// Nystrom otherwise.
pub fn reference_spectrum(triple: &dyn MetricTriple, grid: usize, k_max: usize) -> Result<OperatorSpectrum> {
    if triple.name() == "circle" {
        analytic_circle_spectrum(k_max)
    } else {
        nystrom_spectrum(triple, grid)
    }
}

/// Per-rank comparison of `a_n = n` scaled minor spectra against the
/// operator spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumComparison {
    pub triple_name: String,
    pub n: usize,
    pub reps: usize,
    pub top: usize,
    /// Operator eigenvalues used as the target, rank by |value|.
    pub operator_values: Vec<f64>,
    /// Mean over replications of the rank-r scaled empirical eigenvalue.
    pub mean_empirical: Vec<f64>,
    /// Mean over replications of |empirical_r - operator_r|.
    pub per_rank_deviation: Vec<f64>,
    pub operator_method: SpectrumMethod,
    pub operator_resolution: usize,
    /// Monte-Carlo quadrature caveat inherited from the reference.
    pub approximate_quadrature: bool,
}

/// Samples `reps` minors of order `n`, scales each spectrum by
/// `a_n = n`, and matches the `top` largest-by-absolute-value
/// eigenvalues against the operator spectrum rank by rank.
pub fn compare_empirical_to_operator(
    triple: &dyn MetricTriple,
    n: usize,
    reps: usize,
    top: usize,
    master_seed: u64,
) -> Result<SpectrumComparison> {
    if !triple.square_integrable() {
        return Err(Error::UnsupportedTriple(format!(
            "triple {:?} is not square-integrable; no operator spectrum to compare against",
            triple.name()
        )));
    }
    if n == 0 || reps == 0 {
        return Err(Error::invalid("n and reps must be at least 1"));
    }
    if top == 0 || top > n {
        return Err(Error::invalid("top must satisfy 1 <= top <= n"));
    }

    let reference = reference_spectrum(triple, 512.max(top), 64.max(top))?;
    if reference.eigenvalues().len() < top {
        return Err(Error::invalid(
            "operator reference has fewer eigenvalues than requested ranks",
        ));
    }
    let target = &reference.eigenvalues()[..top];

    let tops: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_stream(master_seed, rep as u64);
            let m = sample_minor(triple, n, &mut rng)?;
            let sm = crate::eig::eigenvalues_symmetric(&m)?;
            let scaled = crate::eig::rescale(&sm, n as f64)?;
            Ok(scaled.top_by_abs(top))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean_empirical = vec![0.0; top];
    let mut per_rank_deviation = vec![0.0; top];
    for rep_top in &tops {
        for r in 0..top {
            mean_empirical[r] += rep_top[r];
            per_rank_deviation[r] += (rep_top[r] - target[r]).abs();
        }
    }
    let inv = 1.0 / reps as f64;
    for r in 0..top {
        mean_empirical[r] *= inv;
        per_rank_deviation[r] *= inv;
    }

    Ok(SpectrumComparison {
        triple_name: triple.name().to_string(),
        n,
        reps,
        top,
        operator_values: target.to_vec(),
        mean_empirical,
        per_rank_deviation,
        operator_method: reference.method,
        operator_resolution: reference.resolution,
        approximate_quadrature: reference.approximate_quadrature,
    })
}
