//! Heavy-tailed trace statistics and the one-sided 1/2-stable limit.
//!
//! For the Cauchy line the scaled trace `T_n = tr M_n^2 / (2 n^3)`
//! converges in distribution to a nondegenerate 1/2-stable (Levy) law
//! rather than a constant. The limit has the exact representation
//! `L = 1 / Z^2` for standard normal `Z`, hence the closed-form CDF
//! `erfc(1 / sqrt(2 x))`; no general stable-law machinery is needed.
//!
//! The algebraic route for line triples,
//! `tr M^2 / 2 = sum_{i<j} (x_i - x_j)^2 = n sum x^2 - (sum x)^2`,
//! turns an O(n^2) matrix reduction into an O(n) pass over the sample.

use crate::error::{Error, Result};
use crate::inference::EmpiricalDistribution;
use crate::matdist::{sample_minor, DistanceMinor};
use crate::rng::{replication_stream, StreamId};
use crate::triples::{MetricTriple, Point};
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

/// `sum x_i` and `sum x_i^2` of the raw line sample behind a trace
/// statistic, when the sample was available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineDecomposition {
    pub sum: f64,
    pub sum_sq: f64,
}

/// The scaled trace statistic `T_n = tr M_n^2 / (2 n^3)` of one minor.
#[derive(Debug, Clone, Copy)]
pub struct TraceStat {
    pub n: usize,
    pub value: f64,
    pub decomposition: Option<LineDecomposition>,
}

impl TraceStat {
    /// `tr M^2` recovered from the scaled value.
    pub fn trace_square(&self) -> f64 {
        2.0 * self.value * (self.n as f64).powi(3)
    }

    /// `n^-2 tr M^2`, the statistic that concentrates (LLN) for
    /// square-integrable triples.
    pub fn trace_over_n2(&self) -> f64 {
        2.0 * self.value * self.n as f64
    }
}

/// Trace statistic of an assembled minor.
pub fn trace_statistic(m: &DistanceMinor) -> TraceStat {
    let n = m.order();
    let value = m.sum_squared_entries() / (2.0 * (n as f64).powi(3));
    TraceStat {
        n,
        value,
        decomposition: None,
    }
}

/// Trace statistic straight from a line sample via the algebraic
/// identity; records the decomposition. O(n), no matrix assembly.
pub fn line_trace_statistic(coords: &[f64]) -> Result<TraceStat> {
    let n = coords.len();
    if n == 0 {
        return Err(Error::invalid("line trace statistic needs at least 1 point"));
    }
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("line coordinates must be finite"));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in coords {
        sum += x;
        sum_sq += x * x;
    }
    let nf = n as f64;
    // (n sum_sq - sum^2) is a sum of squares; clamp fp residue
    let value = ((nf * sum_sq - sum * sum) / nf.powi(3)).max(0.0);
    Ok(TraceStat {
        n,
        value,
        decomposition: Some(LineDecomposition { sum, sum_sq }),
    })
}

/// `n^-gamma sum_{i<j} kernel(x_i, x_j)`.
pub fn u_statistic(
    kernel: &dyn Fn(&Point, &Point) -> Result<f64>,
    pts: &[Point],
    gamma: f64,
) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::invalid("u-statistic needs at least 2 points"));
    }
    if !gamma.is_finite() {
        return Err(Error::invalid("u-statistic exponent must be finite"));
    }
    let mut total = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            total += kernel(&pts[i], &pts[j])?;
        }
    }
    Ok(total / (pts.len() as f64).powf(gamma))
}

/// The limit law: one-sided alpha-stable with alpha = 1/2, up to a
/// calibrated scale.
#[derive(Debug, Clone, Copy)]
pub struct StableLimit {
    pub alpha: f64,
    pub scale: f64,
}

/// CDF of the standard Levy law `L = 1 / Z^2`:
/// `P(L <= x) = P(|Z| >= 1/sqrt(x)) = erfc(1 / sqrt(2 x))`.
pub fn levy_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        libm::erfc(1.0 / (2.0 * x).sqrt())
    }
}

/// Median of the standard Levy law, solved from the closed-form CDF by
/// bisection (about 2.1981).
pub fn levy_median() -> f64 {
    let mut lo = 0.1;
    let mut hi = 10.0;
    debug_assert!(levy_cdf(lo) < 0.5 && levy_cdf(hi) > 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if levy_cdf(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact draws from the standard Levy law via `L = 1 / Z^2`.
pub fn sample_levy_limit(count: usize, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: f64 = StandardNormal.sample(rng);
        if z != 0.0 {
            out.push(1.0 / (z * z));
        }
    }
    Ok(out)
}

/// Estimates the scale constant mapping observed `T_n` samples onto the
/// standard Levy law by matching medians. Median matching is the
/// deliberate choice: the limit has no mean.
pub fn calibrate_scale(samples: &[f64]) -> Result<StableLimit> {
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "scale calibration needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::invalid("calibration samples must be finite and nonnegative"));
    }
    let first = samples[0];
    if samples.iter().all(|x| *x == first) {
        return Err(Error::NumericDegeneracy(
            "all calibration samples are equal; no scale to fit".into(),
        ));
    }
    let median = EmpiricalDistribution::new(samples.to_vec())?.median();
    let scale = median / levy_median();
    // samples are validated finite, so scale cannot be NaN here
    if scale <= 0.0 {
        return Err(Error::NumericDegeneracy(
            "sample median is zero; scale undefined".into(),
        ));
    }
    Ok(StableLimit { alpha: 0.5, scale })
}

/// One threshold row of a tail check: `sqrt(t) * P(x^2 > t)`, measured
/// and exact.
#[derive(Debug, Clone, Copy)]
pub struct TailThreshold {
    pub t: f64,
    pub empirical: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone)]
pub struct TailReport {
    pub count: usize,
    pub thresholds: Vec<TailThreshold>,
    /// Mean of the empirical `sqrt(t) * survival` over the thresholds.
    pub estimated: f64,
    /// Limit of `sqrt(t) * P(x^2 > t)` as t grows, from the exact
    /// Cauchy CDF: 2/pi.
    pub analytic_asymptote: f64,
}

/// Checks the square-of-Cauchy tail `P(x^2 > t) ~ c / sqrt(t)` against
/// the exact survival `1 - (2/pi) atan(sqrt(t))`.
pub fn tail_exponent_check(
    triple: &dyn MetricTriple,
    count: usize,
    rng: &mut dyn RngCore,
) -> Result<TailReport> {
    if triple.name() != "cauchy-line" {
        return Err(Error::UnsupportedTriple(format!(
            "tail check is specific to the Cauchy line, got {:?}",
            triple.name()
        )));
    }
    if count < 10_000 {
        return Err(Error::InsufficientData(format!(
            "tail check needs at least 10000 samples, got {count}"
        )));
    }
    let thresholds_t = [1e2, 1e3, 1e4];
    let mut exceed = [0usize; 3];
    for _ in 0..count {
        let x = triple.sample_point(rng).as_scalar()?;
        let sq = x * x;
        for (k, &t) in thresholds_t.iter().enumerate() {
            if sq > t {
                exceed[k] += 1;
            }
        }
    }
    let mut thresholds = Vec::with_capacity(3);
    let mut acc = 0.0;
    for (k, &t) in thresholds_t.iter().enumerate() {
        let survival = exceed[k] as f64 / count as f64;
        let empirical = t.sqrt() * survival;
        let analytic = t.sqrt() * (1.0 - (2.0 / PI) * t.sqrt().atan());
        acc += empirical;
        thresholds.push(TailThreshold {
            t,
            empirical,
            analytic,
        });
    }
    Ok(TailReport {
        count,
        thresholds,
        estimated: acc / 3.0,
        analytic_asymptote: 2.0 / PI,
    })
}

/// One replication of the trace statistic with its stream identity.
#[derive(Debug, Clone)]
pub struct TraceReplication {
    pub stream: StreamId,
    pub stat: TraceStat,
}

/// `reps` independent trace statistics at order `n`, replication `r`
/// on stream `(master_seed, r)`. Line triples take the O(n) algebraic
/// route; everything else assembles the minor.
pub fn replicated_trace_stats(
    triple: &dyn MetricTriple,
    n: usize,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<TraceReplication>> {
    if n == 0 || reps == 0 {
        return Err(Error::invalid("n and reps must be at least 1"));
    }
    (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let stream = StreamId::new(master_seed, rep);
            let mut rng = replication_stream(master_seed, rep);
            let stat = if triple.euclidean_line() {
                let coords: Vec<f64> = (0..n)
                    .map(|_| triple.sample_point(&mut rng).as_scalar())
                    .collect::<Result<_>>()?;
                line_trace_statistic(&coords)?
            } else {
                trace_statistic(&sample_minor(triple, n, &mut rng)?)
            };
            Ok(TraceReplication { stream, stat })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matdist::minor_from_points;
    use crate::triples::{parse_triple, CauchyLine};

    fn line_points(coords: &[f64]) -> Vec<Point> {
        coords
            .iter()
            .map(|&x| Point::new(vec![x]).unwrap())
            .collect()
    }

    #[test]
    fn trace_statistic_hand_example() {
        let pts = line_points(&[0.0, 1.0, 2.0]);
        let m = minor_from_points(&CauchyLine, &pts).unwrap();
        let stat = trace_statistic(&m);
        assert!((stat.value - 6.0 / 27.0).abs() < 1e-15);
        assert!(stat.decomposition.is_none());

        let line = line_trace_statistic(&[0.0, 1.0, 2.0]).unwrap();
        assert!((line.value - 6.0 / 27.0).abs() < 1e-15);
        let d = line.decomposition.unwrap();
        // n sum_sq - sum^2 = 3 * 5 - 9 = 6 = tr M^2 / 2
        assert_eq!(d.sum, 3.0);
        assert_eq!(d.sum_sq, 5.0);
        assert!((3.0 * d.sum_sq - d.sum * d.sum - 6.0).abs() < 1e-12);
        assert!((line.value * 27.0 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn trace_statistic_single_point_is_zero() {
        let stat = line_trace_statistic(&[5.0]).unwrap();
        assert_eq!(stat.value, 0.0);
        let m = minor_from_points(&CauchyLine, &line_points(&[5.0])).unwrap();
        assert_eq!(trace_statistic(&m).value, 0.0);
    }

    #[test]
    fn algebraic_identity_on_random_samples() {
        for rep in 0..20 {
            let mut rng = replication_stream(0x1D, rep);
            let n = 40;
            let coords: Vec<f64> = (0..n)
                .map(|_| CauchyLine.sample_point(&mut rng).as_scalar().unwrap())
                .collect();
            let mut pair_sum = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = coords[i] - coords[j];
                    pair_sum += d * d;
                }
            }
            let nf = n as f64;
            let sum: f64 = coords.iter().sum();
            let sum_sq: f64 = coords.iter().map(|x| x * x).sum();
            let closed = nf * sum_sq - sum * sum;
            assert!(
                (closed - pair_sum).abs() <= 1e-9 * (1.0 + pair_sum.abs()),
                "closed {closed} vs pairwise {pair_sum}"
            );
        }
    }

    #[test]
    fn u_statistic_matches_trace() {
        let pts = line_points(&[0.3, -1.2, 4.0, 2.5]);
        let m = minor_from_points(&CauchyLine, &pts).unwrap();
        let kernel = |p: &Point, q: &Point| -> Result<f64> {
            let d = CauchyLine.distance(p, q)?;
            Ok(d * d)
        };
        let u = u_statistic(&kernel, &pts, 3.0).unwrap();
        let t = trace_statistic(&m).value;
        assert!((u - t).abs() <= 1e-12 * (1.0 + t.abs()));
    }

    #[test]
    fn u_statistic_counting_kernels() {
        let pts = line_points(&(0..100).map(|i| i as f64).collect::<Vec<_>>());
        let ones = |_: &Point, _: &Point| -> Result<f64> { Ok(1.0) };
        let u = u_statistic(&ones, &pts, 2.0).unwrap();
        assert!((u - 0.495).abs() < 1e-12);
        let zeros = |_: &Point, _: &Point| -> Result<f64> { Ok(0.0) };
        assert_eq!(u_statistic(&zeros, &pts, 2.0).unwrap(), 0.0);
        assert!(u_statistic(&ones, &pts[..1], 2.0).is_err());
    }

    #[test]
    fn levy_cdf_closed_form_points() {
        // P(L <= 1) = P(|Z| >= 1) = erfc(1/sqrt(2))
        assert!((levy_cdf(1.0) - 0.31731050786291415).abs() < 1e-12);
        assert_eq!(levy_cdf(0.0), 0.0);
        assert_eq!(levy_cdf(-3.0), 0.0);
        assert!(levy_cdf(1e9) > 0.999);
    }

    #[test]
    fn levy_median_fixed_point() {
        let m = levy_median();
        assert!((levy_cdf(m) - 0.5).abs() < 1e-12);
        // 1 / quantile(0.75 of |Z|)^2
        assert!((m - 2.1981093).abs() < 1e-5, "median {m}");
    }

    #[test]
    fn levy_sampler_median_and_support() {
        let mut rng = replication_stream(0x7E, 0);
        let draws = sample_levy_limit(1_000_000, &mut rng).unwrap();
        assert!(draws.iter().all(|&x| x > 0.0));
        let med = EmpiricalDistribution::new(draws).unwrap().median();
        assert!((2.15..=2.25).contains(&med), "median {med}");
        assert!(sample_levy_limit(0, &mut rng).is_err());
    }

    #[test]
    fn calibration_recovers_scale() {
        let mut rng = replication_stream(0x7E, 1);
        let base = sample_levy_limit(10_000, &mut rng).unwrap();
        for (c, lo, hi) in [(2.0, 1.8, 2.2), (1.0, 0.9, 1.1)] {
            let scaled: Vec<f64> = base.iter().map(|x| c * x).collect();
            let fit = calibrate_scale(&scaled).unwrap();
            assert_eq!(fit.alpha, 0.5);
            assert!(fit.scale > lo && fit.scale < hi, "c {c} fit {}", fit.scale);
        }
    }

    #[test]
    fn calibration_input_guards() {
        assert!(matches!(
            calibrate_scale(&vec![1.0; 50]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            calibrate_scale(&vec![3.0; 200]),
            Err(Error::NumericDegeneracy(_))
        ));
        let mut bad = vec![1.0; 200];
        bad[7] = -0.5;
        assert!(matches!(calibrate_scale(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tail_check_matches_exact_cauchy() {
        let triple = parse_triple("cauchy-line").unwrap();
        let mut rng = replication_stream(0xCA, 0);
        let report = tail_exponent_check(triple.as_ref(), 1_000_000, &mut rng).unwrap();
        assert!((report.analytic_asymptote - 2.0 / PI).abs() < 1e-15);
        for th in &report.thresholds {
            assert!(
                (th.empirical - th.analytic).abs() < 0.05,
                "t {} empirical {} analytic {}",
                th.t,
                th.empirical,
                th.analytic
            );
        }
        // exact survival at t = 1e4 is already within 1e-4 of 2/pi
        let last = report.thresholds.last().unwrap();
        assert!((last.analytic - 2.0 / PI).abs() < 1e-3);
    }

    #[test]
    fn tail_check_guards() {
        let triple = parse_triple("cauchy-line").unwrap();
        let mut rng = replication_stream(0xCA, 1);
        assert!(matches!(
            tail_exponent_check(triple.as_ref(), 100, &mut rng),
            Err(Error::InsufficientData(_))
        ));
        let interval = parse_triple("unit-interval").unwrap();
        assert!(matches!(
            tail_exponent_check(interval.as_ref(), 100_000, &mut rng),
            Err(Error::UnsupportedTriple(_))
        ));
    }

    #[test]
    fn replication_prefix_is_stable() {
        let triple = parse_triple("cauchy-line").unwrap();
        let five = replicated_trace_stats(triple.as_ref(), 100, 5, 9).unwrap();
        let ten = replicated_trace_stats(triple.as_ref(), 100, 10, 9).unwrap();
        for (a, b) in five.iter().zip(&ten) {
            assert_eq!(a.stat.value, b.stat.value);
            assert_eq!(a.stream, b.stream);
        }
    }

    #[test]
    fn line_route_matches_minor_route() {
        let triple = parse_triple("unit-interval").unwrap();
        for rep in 0..4u64 {
            let mut rng = replication_stream(0xAB, rep);
            let coords: Vec<f64> = (0..25)
                .map(|_| triple.sample_point(&mut rng).as_scalar().unwrap())
                .collect();
            let fast = line_trace_statistic(&coords).unwrap();
            let pts = line_points(&coords);
            let slow = trace_statistic(&minor_from_points(triple.as_ref(), &pts).unwrap());
            assert!((fast.value - slow.value).abs() <= 1e-9 * (1.0 + slow.value.abs()));
        }
    }

    #[test]
    fn centered_correction_vanishes_in_median() {
        // median over reps of n^-3 (sum x)^2 decays like 1/n
        let stat_at = |n: usize, seed: u64| -> f64 {
            let reps = 200;
            let mut vals: Vec<f64> = (0..reps)
                .map(|rep| {
                    let mut rng = replication_stream(seed, rep);
                    let sum: f64 = (0..n)
                        .map(|_| CauchyLine.sample_point(&mut rng).as_scalar().unwrap())
                        .sum();
                    sum * sum / (n as f64).powi(3)
                })
                .collect();
            vals.sort_unstable_by(f64::total_cmp);
            0.5 * (vals[99] + vals[100])
        };
        let small = stat_at(250, 0x33);
        let large = stat_at(4000, 0x34);
        assert!(
            large <= small / 10.0,
            "median at 4000 = {large}, at 250 = {small}"
        );
    }
}
