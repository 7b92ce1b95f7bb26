//! Metric triples: sampleable probability spaces carrying a compatible
//! metric.
//!
//! A triple bundles a point sampler (i.i.d. draws from its measure) with
//! a metric on the sampled points. Four spaces are built in:
//!
//! | name            | space                | metric            | measure              |
//! |-----------------|----------------------|-------------------|----------------------|
//! | `cauchy-line`   | real line            | `\|x - y\|`       | standard Cauchy      |
//! | `unit-interval` | `[0, 1]`             | `\|x - y\|`       | Lebesgue             |
//! | `circle`        | circumference `2*pi` | arc length        | normalized arc length|
//! | `sphere:d`      | unit sphere in R^d+1 | chordal (ambient) | uniform surface      |
//!
//! The line metrics are square integrable except on the Cauchy line,
//! whose heavy tails make even the first moment of the squared distance
//! infinite; that distinction drives everything downstream.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::RngCore;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// A sampled point, stored as its coordinate vector. The triple that
/// produced a point owns the metric; points carry no behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point (line and circle triples).
    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The single coordinate of a one-dimensional point.
    pub fn as_scalar(&self) -> Result<f64> {
        if self.0.len() == 1 {
            Ok(self.0[0])
        } else {
            Err(Error::invalid(format!(
                "expected a 1-coordinate point, got {}",
                self.0.len()
            )))
        }
    }
}

/// A metric triple: a named probability space with an i.i.d. point
/// sampler and a metric over sampled points.
///
/// Implementations must make `distance` symmetric by construction
/// (evaluating both argument orders runs the same float operations), keep
/// `distance(p, p) == 0` exactly, and satisfy the triangle inequality up
/// to rounding.
pub trait MetricTriple: Send + Sync {
    /// Registry name, e.g. `"circle"` or `"sphere:2"`.
    fn name(&self) -> &str;

    /// Number of coordinates per point (ambient dimension for spheres).
    fn dimension(&self) -> usize;

    /// Whether the squared distance is known to integrate to a finite
    /// value against the product measure.
    fn square_integrable(&self) -> bool;

    /// True for triples on the real line with metric `|x - y|`; these
    /// admit the moment decomposition of the squared-distance sum.
    fn euclidean_line(&self) -> bool {
        false
    }

    /// The double integral of the squared metric against the product
    /// measure, when finite and known in closed form.
    fn mean_squared_distance(&self) -> Option<f64> {
        None
    }

    /// One i.i.d. draw from the triple's measure.
    fn sample_point(&self, rng: &mut dyn RngCore) -> Point;

    /// Whether the point lies in the triple's support (dimension and
    /// domain both checked).
    fn contains(&self, p: &Point) -> bool;

    /// The metric. Errs only on dimension mismatch.
    fn distance(&self, p: &Point, q: &Point) -> Result<f64>;
}

fn check_dims(t: &dyn MetricTriple, p: &Point, q: &Point) -> Result<()> {
    if p.dim() != t.dimension() || q.dim() != t.dimension() {
        return Err(Error::invalid(format!(
            "{}: expected {}-coordinate points, got {} and {}",
            t.name(),
            t.dimension(),
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Real line under `|x - y|` with the standard Cauchy measure. The
/// squared distance has infinite mean, so none of the square-integrable
/// machinery applies; this is the heavy-tailed example space.
#[derive(Debug, Clone, Copy)]
pub struct CauchyLine;

impl MetricTriple for CauchyLine {
    fn name(&self) -> &str {
        "cauchy-line"
    }

    fn dimension(&self) -> usize {
        1
    }

    fn square_integrable(&self) -> bool {
        false
    }

    fn euclidean_line(&self) -> bool {
        true
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Point {
        Point::scalar(sample_standard_cauchy(rng))
    }

    fn contains(&self, p: &Point) -> bool {
        p.dim() == 1 && p.coords()[0].is_finite()
    }

    fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        check_dims(self, p, q)?;
        Ok((p.coords()[0] - q.coords()[0]).abs())
    }
}

/// Inverse-CDF draw from the standard Cauchy law: `tan(pi*(u - 1/2))`
/// with `u` uniform on `[0, 1)`. Exact and reproducible given the stream.
pub fn sample_standard_cauchy(rng: &mut dyn RngCore) -> f64 {
    loop {
        let u: f64 = rng.random();
        let x = (PI * (u - 0.5)).tan();
        if x.is_finite() {
            return x;
        }
    }
}

/// `[0, 1]` under `|x - y|` with Lebesgue measure: the canonical
/// square-integrable control case.
#[derive(Debug, Clone, Copy)]
pub struct UnitInterval;

impl MetricTriple for UnitInterval {
    fn name(&self) -> &str {
        "unit-interval"
    }

    fn dimension(&self) -> usize {
        1
    }

    fn square_integrable(&self) -> bool {
        true
    }

    fn euclidean_line(&self) -> bool {
        true
    }

    fn mean_squared_distance(&self) -> Option<f64> {
        // double integral of (x - y)^2 over the unit square
        Some(1.0 / 6.0)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Point {
        Point::scalar(rng.random::<f64>())
    }

    fn contains(&self, p: &Point) -> bool {
        p.dim() == 1 && (0.0..=1.0).contains(&p.coords()[0])
    }

    fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        check_dims(self, p, q)?;
        Ok((p.coords()[0] - q.coords()[0]).abs())
    }
}

/// Circle of circumference `2*pi` under geodesic (arc-length) distance
/// with normalized arc-length measure. Translation invariance makes its
/// kernel operator analytically solvable, which is why it anchors the
/// operator-spectrum tests.
#[derive(Debug, Clone, Copy)]
pub struct CircleGeodesic;

impl MetricTriple for CircleGeodesic {
    fn name(&self) -> &str {
        "circle"
    }

    fn dimension(&self) -> usize {
        1
    }

    fn square_integrable(&self) -> bool {
        true
    }

    fn mean_squared_distance(&self) -> Option<f64> {
        // (1/2pi) * int_0^{2pi} min(t, 2pi-t)^2 dt = pi^2/3
        Some(PI * PI / 3.0)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Point {
        Point::scalar(rng.random::<f64>() * 2.0 * PI)
    }

    fn contains(&self, p: &Point) -> bool {
        p.dim() == 1 && p.coords()[0].is_finite()
    }

    fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        check_dims(self, p, q)?;
        let d = (p.coords()[0] - q.coords()[0]).abs().rem_euclid(2.0 * PI);
        Ok(d.min(2.0 * PI - d))
    }
}

/// Unit sphere S^d embedded in R^{d+1} under chordal (ambient Euclidean)
/// distance with uniform surface measure. Sampling normalizes a standard
/// Gaussian vector, which is dimension-uniform and rejection-free.
#[derive(Debug, Clone)]
pub struct SphereChordal {
    surface_dim: usize,
    name: String,
}

impl SphereChordal {
    /// `d` is the surface dimension; points live in R^{d+1}.
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("sphere dimension must be at least 1"));
        }
        if d > MAX_SPHERE_DIM {
            return Err(Error::invalid(format!(
                "sphere dimension {d} exceeds the supported maximum {MAX_SPHERE_DIM}"
            )));
        }
        Ok(SphereChordal {
            surface_dim: d,
            name: format!("sphere:{d}"),
        })
    }

    pub fn surface_dim(&self) -> usize {
        self.surface_dim
    }
}

/// Upper bound on sphere surface dimension accepted by the registry.
pub const MAX_SPHERE_DIM: usize = 1024;

impl MetricTriple for SphereChordal {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.surface_dim + 1
    }

    fn square_integrable(&self) -> bool {
        true
    }

    fn mean_squared_distance(&self) -> Option<f64> {
        // E|X - Y|^2 = 2 - 2 E<X,Y> = 2 for independent uniform points
        Some(2.0)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Point {
        let ambient = self.surface_dim + 1;
        loop {
            let mut v: Vec<f64> = (0..ambient).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for x in &mut v {
                    *x /= norm;
                }
                return Point(v);
            }
        }
    }

    fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.dimension() {
            return false;
        }
        let norm = p.coords().iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm - 1.0).abs() <= 1e-9
    }

    fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        check_dims(self, p, q)?;
        let sum: f64 = p
            .coords()
            .iter()
            .zip(q.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sum.sqrt())
    }
}

/// Names understood by [`parse_triple`], for error messages and help text.
pub const REGISTRY_NAMES: &str = "cauchy-line, unit-interval, circle, sphere:<d>";

/// Resolves a registry name to a triple. Accepts `cauchy-line`,
/// `unit-interval`, `circle` and `sphere:<d>` with `1 <= d <= 1024`.
pub fn parse_triple(name: &str) -> Result<Box<dyn MetricTriple>> {
    match name {
        "cauchy-line" => Ok(Box::new(CauchyLine)),
        "unit-interval" => Ok(Box::new(UnitInterval)),
        "circle" => Ok(Box::new(CircleGeodesic)),
        _ => {
            if let Some(d) = name.strip_prefix("sphere:") {
                let d: usize = d.parse().map_err(|_| {
                    Error::invalid(format!(
                        "bad sphere dimension in {name:?}; expected sphere:<d> with d in 1..={MAX_SPHERE_DIM}"
                    ))
                })?;
                Ok(Box::new(SphereChordal::new(d)?))
            } else {
                Err(Error::invalid(format!(
                    "unknown triple {name:?}; available: {REGISTRY_NAMES}"
                )))
            }
        }
    }
}

/// `n` i.i.d. draws from the triple's measure.
pub fn sample_points(triple: &dyn MetricTriple, n: usize, rng: &mut dyn RngCore) -> Vec<Point> {
    (0..n).map(|_| triple.sample_point(rng)).collect()
}

/// Result of a randomized check of the metric axioms on sampled points.
#[derive(Debug, Clone)]
pub struct MetricAxiomReport {
    pub trials: usize,
    /// Count of sampled pairs with `d(p,q) != d(q,p)` (exact comparison).
    pub symmetry_violations: usize,
    /// Count of sampled points with `d(p,p) != 0` (exact comparison).
    pub diagonal_violations: usize,
    /// Largest observed `d(p,r) - d(p,q) - d(q,r)`; at most rounding noise
    /// for a true metric.
    pub worst_triangle_slack: f64,
}

impl MetricAxiomReport {
    pub fn passed(&self) -> bool {
        self.symmetry_violations == 0
            && self.diagonal_violations == 0
            && self.worst_triangle_slack <= 1e-9
    }
}

/// Samples `trials` random point triples and checks symmetry, zero
/// diagonal and the triangle inequality.
pub fn check_metric_axioms(
    triple: &dyn MetricTriple,
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<MetricAxiomReport> {
    if trials == 0 {
        return Err(Error::invalid("metric axiom check needs at least 1 trial"));
    }
    let mut report = MetricAxiomReport {
        trials,
        symmetry_violations: 0,
        diagonal_violations: 0,
        worst_triangle_slack: f64::NEG_INFINITY,
    };
    for _ in 0..trials {
        let p = triple.sample_point(rng);
        let q = triple.sample_point(rng);
        let r = triple.sample_point(rng);
        let pq = triple.distance(&p, &q)?;
        let qp = triple.distance(&q, &p)?;
        let pr = triple.distance(&p, &r)?;
        let qr = triple.distance(&q, &r)?;
        if pq != qp {
            report.symmetry_violations += 1;
        }
        if triple.distance(&p, &p)? != 0.0 {
            report.diagonal_violations += 1;
        }
        let slack = pr - pq - qr;
        if slack > report.worst_triangle_slack {
            report.worst_triangle_slack = slack;
        }
    }
    Ok(report)
}
