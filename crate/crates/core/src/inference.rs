//! Empirical-distribution utilities shared by the verification suites:
//! Kolmogorov-Smirnov distance against an analytic CDF, type-7
//! quantiles, and interquartile-range ratio diagnostics.
//!
//! Spread diagnostics are quantile-based throughout; the heavy-tailed
//! statistics this crate studies have no variance to estimate.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Sorted sample with at least one observation.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical distribution needs at least 1 sample"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("samples must be finite"));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Type-7 linear-interpolation quantile: position `(N - 1) q`
    /// between order statistics.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid("quantile level must lie in [0, 1]"));
        }
        let n = self.samples.len();
        let pos = (n - 1) as f64 * q;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        if lo == hi {
            return Ok(self.samples[lo]);
        }
        let frac = pos - lo as f64;
        Ok(self.samples[lo] * (1.0 - frac) + self.samples[hi] * frac)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).expect("0.5 is a valid level")
    }

    pub fn iqr(&self) -> f64 {
        let hi = self.quantile(0.75).expect("valid level");
        let lo = self.quantile(0.25).expect("valid level");
        hi - lo
    }
}

/// Sup-distance between the empirical CDF and `cdf`:
/// `max_i max(|i/N - F(x_(i))|, |(i-1)/N - F(x_(i))|)`.
pub fn ks_distance<F: Fn(f64) -> f64>(emp: &EmpiricalDistribution, cdf: F) -> f64 {
    let n = emp.count() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in emp.samples().iter().enumerate() {
        let f = cdf(x);
        let hi = ((i + 1) as f64 / n - f).abs();
        let lo = (i as f64 / n - f).abs();
        sup = sup.max(hi).max(lo);
    }
    sup
}

/// IQR per order and ratios against the smallest order.
#[derive(Debug, Clone)]
pub struct IqrRatioReport {
    /// `(n, iqr, iqr / iqr_at_smallest_order)`, ascending in n.
    pub rows: Vec<(usize, f64, f64)>,
    pub base_order: usize,
}

/// Nondegeneracy instrument: how the spread of a statistic moves with
/// the order n. A ratio near 1 across orders indicates a nondegenerate
/// distributional limit; a shrinking ratio indicates concentration.
pub fn iqr_ratio_report(samples_by_n: &BTreeMap<usize, Vec<f64>>) -> Result<IqrRatioReport> {
    if samples_by_n.is_empty() {
        return Err(Error::invalid("iqr report needs at least 1 order"));
    }
    for (&n, samples) in samples_by_n {
        if samples.len() < 50 {
            return Err(Error::InsufficientData(format!(
                "order {n} has {} samples; at least 50 required",
                samples.len()
            )));
        }
    }
    let mut rows = Vec::with_capacity(samples_by_n.len());
    let mut base = None;
    for (&n, samples) in samples_by_n {
        let iqr = EmpiricalDistribution::new(samples.clone())?.iqr();
        let base_iqr = *base.get_or_insert(iqr);
        let ratio = if base_iqr == 0.0 {
            if iqr == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            iqr / base_iqr
        };
        rows.push((n, iqr, ratio));
    }
    let base_order = rows[0].0;
    Ok(IqrRatioReport { rows, base_order })
}

/// Percentile bootstrap interval for a statistic of the sample.
pub fn bootstrap_interval<F>(
    emp: &EmpiricalDistribution,
    statistic: F,
    resamples: usize,
    level: f64,
    rng: &mut dyn rand::RngCore,
) -> Result<(f64, f64)>
where
    F: Fn(&EmpiricalDistribution) -> f64,
{
    if resamples < 2 {
        return Err(Error::invalid("bootstrap needs at least 2 resamples"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::invalid("bootstrap level must lie in (0, 1)"));
    }
    let n = emp.count();
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let resample: Vec<f64> = (0..n)
            .map(|_| emp.samples()[rand::Rng::random_range(rng, 0..n)])
            .collect();
        stats.push(statistic(&EmpiricalDistribution::new(resample)?));
    }
    let boot = EmpiricalDistribution::new(stats)?;
    let tail = 0.5 * (1.0 - level);
    Ok((boot.quantile(tail)?, boot.quantile(1.0 - tail)?))
}
