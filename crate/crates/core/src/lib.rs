//! Numerical laboratory for the spectral theory of random distance
//! matrices of metric measure spaces.
//!
//! A metric triple (a probability space with a compatible metric)
//! induces a random infinite matrix: tabulate pairwise distances of an
//! i.i.d. sample. This crate samples finite minors of that matrix and
//! studies their spectra:
//!
//! * [`triples`]: the built-in spaces (Cauchy line, unit interval,
//!   circle, spheres) with samplers and metrics.
//! * [`matdist`]: minor sampling, exchangeability, CSV/binary codecs.
//! * [`linalg`]: the symmetric eigensolver (Householder + QL).
//! * [`eig`]: empirical spectral measures, normalizing sequences,
//!   test-function functionals, growth-exponent fits.
//! * [`opspec`]: the metric-kernel integral operator's spectrum
//!   (Nystrom and, for the circle, closed form), the deterministic
//!   target of `a_n = n` scaled spectra for square-integrable metrics.
//! * [`heavytail`]: the Cauchy-line trace statistic whose limit is a
//!   random (1/2-stable) law rather than a constant, with exact Levy
//!   sampling, scale calibration and tail checks.
//! * [`inference`]: KS distance, quantiles, IQR ratios, bootstrap.
//! * [`config`], [`run`], [`plot`]: the experiment pipeline behind the
//!   `mmlab` binary: reproducible seeded replication sweeps, CSV/JSON
//!   reports, SVG figures.
//!
//! Every random quantity derives from an explicit `(master seed,
//! replication)` stream; repeated runs are byte-identical.

pub mod config;
pub mod eig;
pub mod error;
pub mod heavytail;
pub mod inference;
pub mod linalg;
pub mod matdist;
pub mod opspec;
pub mod plot;
pub mod rng;
pub mod run;
pub mod triples;

pub use error::{Error, Result};
