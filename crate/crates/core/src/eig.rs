//! Empirical spectral measures of distance minors.
//!
//! A minor's spectral measure is the sum of unit point masses at its
//! eigenvalues, optionally pushed forward by `x -> x / a_n` for a
//! normalizing sequence `a_n`. With `a_n = n` the atoms of a
//! square-integrable triple's minor approximate the eigenvalues of the
//! metric-kernel integral operator.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matdist::{sample_minor, DistanceMinor};
use crate::rng::packed_stream;
use crate::triples::MetricTriple;
use rayon::prelude::*;

/// How to choose the normalizer `a_n` for a minor of order `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `a_n = 1`: raw eigenvalues.
    Raw,
    /// `a_n = n`: the operator-spectrum scaling for square-integrable
    /// triples.
    ByN,
    /// `a_n = n^beta`.
    Power(f64),
}

impl Normalization {
    pub fn scale_for(&self, n: usize) -> f64 {
        match self {
            Normalization::Raw => 1.0,
            Normalization::ByN => n as f64,
            Normalization::Power(beta) => (n as f64).powf(*beta),
        }
    }

    /// Parses `raw`, `n`, or `n^<beta>`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "raw" => Ok(Normalization::Raw),
            "n" => Ok(Normalization::ByN),
            _ => {
                if let Some(rest) = t.strip_prefix("n^") {
                    let beta: f64 = rest.parse().map_err(|_| {
                        Error::invalid(format!("bad normalization exponent {rest:?}"))
                    })?;
                    if !beta.is_finite() {
                        return Err(Error::invalid("normalization exponent must be finite"));
                    }
                    Ok(Normalization::Power(beta))
                } else {
                    Err(Error::invalid(format!(
                        "unknown normalization {t:?} (expected raw, n, or n^<beta>)"
                    )))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Normalization::Raw => "raw".into(),
            Normalization::ByN => "n".into(),
            Normalization::Power(beta) => format!("n^{beta}"),
        }
    }
}

/// Multiset of eigenvalues of one minor, sorted ascending, with the
/// cumulative normalizer that has been applied to the support.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    atoms: Vec<f64>,
    scale: f64,
    n: usize,
}

impl SpectralMeasure {
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_abs_atom(&self) -> f64 {
        self.atoms.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Atoms of largest absolute value first, `count` of them. Ties in
    /// absolute value break by descending value so rank matching
    /// against operator spectra is deterministic.
    pub fn top_by_abs(&self, count: usize) -> Vec<f64> {
        let mut sorted = self.atoms.clone();
        sorted.sort_unstable_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
        sorted.truncate(count);
        sorted
    }
}

/// All eigenvalues of the minor as a raw (`scale = 1`) spectral
/// measure. Uses the symmetric tridiagonalization + QL pipeline.
pub fn eigenvalues_symmetric(m: &DistanceMinor) -> Result<SpectralMeasure> {
    let atoms = linalg::symmetric_eigenvalues(m.order(), m.entries())?;
    Ok(SpectralMeasure {
        atoms,
        scale: 1.0,
        n: m.order(),
    })
}

/// Pushforward under `x -> x / a_n`: atoms divide by `a_n`, the stored
/// scale multiplies. Exactly invertible when `a_n` is a power of two.
pub fn rescale(sm: &SpectralMeasure, a_n: f64) -> Result<SpectralMeasure> {
    // NaN fails the finiteness test, so the pair covers the full domain
    if a_n <= 0.0 || !a_n.is_finite() {
        return Err(Error::invalid("normalizer a_n must be positive and finite"));
    }
    Ok(SpectralMeasure {
        atoms: sm.atoms.iter().map(|x| x / a_n).collect(),
        scale: sm.scale * a_n,
        n: sm.n,
    })
}

/// Eigenvalues of one minor under the given normalization.
pub fn spectral_measure(m: &DistanceMinor, norm: Normalization) -> Result<SpectralMeasure> {
    let raw = eigenvalues_symmetric(m)?;
    let a_n = norm.scale_for(m.order());
    if a_n == 1.0 {
        Ok(raw)
    } else {
        rescale(&raw, a_n)
    }
}

/// Continuous compactly supported test function whose support avoids 0,
/// the probes of the spectral-measure topology.
#[derive(Debug, Clone, Copy)]
pub enum TestFunction {
    /// Piecewise linear, 0 at the endpoints, height 1 at the midpoint.
    Hat { a: f64, b: f64 },
    /// `exp(1 - 1/(1 - t^2))` on the rescaled support, smooth, height 1
    /// at the midpoint.
    SmoothBump { a: f64, b: f64 },
}

impl TestFunction {
    pub fn hat(a: f64, b: f64) -> Result<Self> {
        Self::validate_support(a, b)?;
        Ok(TestFunction::Hat { a, b })
    }

    pub fn smooth_bump(a: f64, b: f64) -> Result<Self> {
        Self::validate_support(a, b)?;
        Ok(TestFunction::SmoothBump { a, b })
    }

    fn validate_support(a: f64, b: f64) -> Result<()> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::invalid("support must be a finite interval [a, b] with a < b"));
        }
        if a <= 0.0 && b >= 0.0 {
            return Err(Error::invalid("test-function support must not contain 0"));
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Hat { a, b } | TestFunction::SmoothBump { a, b } => (*a, *b),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a || x >= b {
            return 0.0;
        }
        match self {
            TestFunction::Hat { .. } => {
                let c = 0.5 * (a + b);
                let half = 0.5 * (b - a);
                1.0 - (x - c).abs() / half
            }
            TestFunction::SmoothBump { .. } => {
                let t = (2.0 * x - (a + b)) / (b - a);
                (1.0 - 1.0 / (1.0 - t * t)).exp()
            }
        }
    }
}

/// `sum_i f(atom_i)`: the functional defining the topology on spectral
/// measures. Exact sum over atoms, no quadrature.
pub fn apply_functional(sm: &SpectralMeasure, f: &TestFunction) -> f64 {
    sm.atoms.iter().map(|x| f.eval(*x)).sum()
}

/// `sum_i atom_i^k`. On a raw spectrum, `k = 1` recovers the (zero)
/// trace and `k = 2` the squared Frobenius norm.
pub fn power_sum(sm: &SpectralMeasure, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("power_sum exponent must be at least 1"));
    }
    Ok(sm.atoms.iter().map(|x| x.powi(k as i32)).sum())
}

/// Slope and per-order medians from a growth-exponent fit.
#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub slope: f64,
    /// `(n, median over reps of tr M_n^2)` per requested order.
    pub medians: Vec<(usize, f64)>,
    pub orders: Vec<usize>,
    pub reps: usize,
}

/// `tr M^2` for one fresh minor. Line triples use the algebraic
/// identity `tr M^2 = 2 (n sum x^2 - (sum x)^2)` and skip matrix
/// assembly; the identity is itself under test elsewhere.
fn trace_square_once(
    triple: &dyn MetricTriple,
    n: usize,
    rng: &mut dyn rand::RngCore,
) -> Result<f64> {
    if triple.euclidean_line() {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = triple.sample_point(rng).as_scalar()?;
            sum += x;
            sum_sq += x * x;
        }
        Ok((2.0 * ((n as f64) * sum_sq - sum * sum)).max(0.0))
    } else {
        let m = sample_minor(triple, n, rng)?;
        Ok(m.sum_squared_entries())
    }
}

/// Estimates the exponent beta in `tr M_n^2 ~ n^beta` by a log-log
/// least-squares fit through per-order medians.
pub fn estimate_growth_exponent(
    triple: &dyn MetricTriple,
    orders: &[usize],
    reps: usize,
    master_seed: u64,
) -> Result<GrowthFit> {
    let mut distinct: Vec<usize> = orders.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::invalid("growth fit needs at least 3 distinct orders"));
    }
    if distinct.iter().any(|&n| n < 16) {
        return Err(Error::invalid("growth-fit orders must be at least 16"));
    }
    if reps < 3 {
        return Err(Error::invalid("growth fit needs at least 3 replications"));
    }

    let mut medians = Vec::with_capacity(distinct.len());
    for (oi, &n) in distinct.iter().enumerate() {
        let mut values: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = packed_stream(master_seed, oi as u64, rep as u64);
                trace_square_once(triple, n, &mut rng)
            })
            .collect::<Result<Vec<f64>>>()?;
        values.sort_unstable_by(f64::total_cmp);
        let mid = values.len() / 2;
        let median = if values.len() % 2 == 1 {
            values[mid]
        } else {
            0.5 * (values[mid - 1] + values[mid])
        };
        medians.push((n, median));
    }

    if medians.iter().all(|&(_, m)| m == 0.0) {
        return Err(Error::NumericDegeneracy(
            "all trace medians are zero; no growth to fit".into(),
        ));
    }
    if medians.iter().any(|&(_, m)| m <= 0.0) {
        return Err(Error::NumericDegeneracy(
            "nonpositive trace median; log-log fit undefined".into(),
        ));
    }

    // least squares of log(median) on log(n)
    let k = medians.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, m) in &medians {
        let x = (n as f64).ln();
        let y = m.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = k * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::NumericDegeneracy("degenerate order spacing".into()));
    }
    let slope = (k * sxy - sx * sy) / denom;

    Ok(GrowthFit {
        slope,
        medians,
        orders: distinct,
        reps,
    })
}
