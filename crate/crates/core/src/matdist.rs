//! Random distance-matrix minors.
//!
//! Drawing `n` i.i.d. points from a triple and tabulating pairwise
//! distances yields the order-`n` minor of the triple's infinite random
//! distance matrix. Minors are symmetric, hollow (zero diagonal) and
//! exchangeable: permuting the underlying points permutes rows and
//! columns simultaneously and leaves the distribution invariant.

use crate::error::{Error, Result};
use crate::rng::StreamId;
use crate::triples::{sample_points, MetricTriple, Point};
use rand_chacha::rand_core::RngCore;

/// One sampled order-`n` minor: a symmetric hollow matrix of pairwise
/// distances, tagged with its source triple and random stream.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMinor {
    n: usize,
    /// Row-major `n * n` entries.
    entries: Vec<f64>,
    triple_name: String,
    stream: Option<StreamId>,
}

impl DistanceMinor {
    /// Wraps raw entries after validating the minor invariants:
    /// square, finite, nonnegative, zero diagonal, exactly symmetric.
    pub fn from_entries(
        n: usize,
        entries: Vec<f64>,
        triple_name: impl Into<String>,
        stream: Option<StreamId>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("minor order must be at least 1"));
        }
        if entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for an order-{} minor, got {}",
                n * n,
                n,
                entries.len()
            )));
        }
        for (k, &v) in entries.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "entry ({}, {}) is {v}; distances must be finite and nonnegative",
                    k / n,
                    k % n
                )));
            }
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry {i} is nonzero")));
            }
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::invalid(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(DistanceMinor {
            n,
            entries,
            triple_name: triple_name.into(),
            stream,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn triple_name(&self) -> &str {
        &self.triple_name
    }

    pub fn stream(&self) -> Option<StreamId> {
        self.stream
    }

    /// Sum of squared entries, i.e. the trace of the squared minor.
    pub fn sum_squared_entries(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.sum_squared_entries().sqrt()
    }

    /// Top-left `k x k` block. Sampling `n + k` points and slicing gives
    /// coupled minors for convergence studies.
    pub fn leading_minor(&self, k: usize) -> Result<DistanceMinor> {
        if k == 0 || k > self.n {
            return Err(Error::invalid(format!(
                "leading minor order {k} out of range 1..={}",
                self.n
            )));
        }
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            entries.extend_from_slice(&self.entries[i * self.n..i * self.n + k]);
        }
        DistanceMinor::from_entries(k, entries, self.triple_name.clone(), self.stream)
    }
}

/// Draws `n` i.i.d. points and tabulates their pairwise distances.
/// Distance evaluation consumes no randomness, so the stream advances by
/// exactly the sampler's draws.
pub fn sample_minor(
    triple: &dyn MetricTriple,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<DistanceMinor> {
    sample_minor_tagged(triple, n, rng, None)
}

/// [`sample_minor`] with a stream tag recorded in the minor's metadata.
pub fn sample_minor_tagged(
    triple: &dyn MetricTriple,
    n: usize,
    rng: &mut dyn RngCore,
    stream: Option<StreamId>,
) -> Result<DistanceMinor> {
    if n == 0 {
        return Err(Error::invalid("minor order must be at least 1"));
    }
    let pts = sample_points(triple, n, rng);
    let mut minor = minor_from_points(triple, &pts)?;
    minor.stream = stream;
    Ok(minor)
}

/// Deterministic assembly of a minor from given points. Fills the upper
/// triangle and mirrors it, so symmetry is exact by construction.
pub fn minor_from_points(triple: &dyn MetricTriple, pts: &[Point]) -> Result<DistanceMinor> {
    if pts.is_empty() {
        return Err(Error::invalid("need at least one point"));
    }
    for (k, p) in pts.iter().enumerate() {
        if p.dim() != triple.dimension() {
            return Err(Error::invalid(format!(
                "point {k} has {} coordinates, {} expects {}",
                p.dim(),
                triple.name(),
                triple.dimension()
            )));
        }
        if !triple.contains(p) {
            return Err(Error::invalid(format!(
                "point {k} lies outside the support of {}",
                triple.name()
            )));
        }
    }
    let n = pts.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = triple.distance(&pts[i], &pts[j])?;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    DistanceMinor::from_entries(n, entries, triple.name(), None)
}

/// Applies a simultaneous row/column permutation:
/// `out[i][j] = in[sigma[i]][sigma[j]]`. `sigma` maps new index to old.
pub fn permute_minor(m: &DistanceMinor, sigma: &[usize]) -> Result<DistanceMinor> {
    let n = m.order();
    if sigma.len() != n {
        return Err(Error::invalid(format!(
            "permutation has {} entries, minor has order {n}",
            sigma.len()
        )));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::invalid("sigma is not a permutation of 0..n"));
        }
        seen[s] = true;
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = m.entries[sigma[i] * n + sigma[j]];
        }
    }
    Ok(DistanceMinor {
        n,
        entries,
        triple_name: m.triple_name.clone(),
        stream: m.stream,
    })
}

/// Inverse of a permutation in the same new-to-old convention.
pub fn invert_permutation(sigma: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    inv
}

/// Uniformly random permutation of `0..n` (Fisher-Yates).
pub fn random_permutation(n: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    use rand::Rng;
    let mut sigma: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        sigma.swap(i, j);
    }
    sigma
}

// ---------------------------------------------------------------------
// Export / import formats
// ---------------------------------------------------------------------

const CSV_MAGIC: &str = "minor";
/// Hard cap on the order accepted by the decoders, bounding allocation
/// on untrusted input.
pub const MAX_DECODE_ORDER: usize = 65_536;

impl DistanceMinor {
    /// CSV layout: one header line
    /// `minor,n=<n>,triple=<name>,stream=<seed:rep>,rng=<algorithm>`
    /// followed by `n` comma-separated rows. Floats are written in
    /// shortest round-trip form, so encode/decode is lossless.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{CSV_MAGIC},n={},triple={},stream={},rng={}\n",
            self.n,
            self.triple_name,
            self.stream.map_or_else(|| "-".to_string(), |s| s.label()),
            crate::rng::RNG_ALGORITHM,
        ));
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV layout written by [`DistanceMinor::to_csv`].
    /// Total on malformed input: every failure is an error, never a panic.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty minor file"))?;
        let mut fields = header.split(',');
        if fields.next() != Some(CSV_MAGIC) {
            return Err(Error::invalid("missing `minor` header tag"));
        }
        let mut n: Option<usize> = None;
        let mut triple_name = String::new();
        let mut stream = None;
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("malformed header field {field:?}")))?;
            match key {
                "n" => {
                    let v: usize = value
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad order {value:?}")))?;
                    n = Some(v);
                }
                "triple" => triple_name = value.to_string(),
                "stream" => stream = parse_stream_label(value),
                "rng" => {} // informational
                _ => return Err(Error::invalid(format!("unknown header key {key:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::invalid("header missing n="))?;
        if n == 0 || n > MAX_DECODE_ORDER {
            return Err(Error::invalid(format!(
                "order {n} outside the accepted range 1..={MAX_DECODE_ORDER}"
            )));
        }
        let mut entries = Vec::new();
        let mut rows = 0usize;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            rows += 1;
            if rows > n {
                return Err(Error::invalid(format!("more than {n} data rows")));
            }
            let mut cols = 0usize;
            for cell in line.split(',') {
                cols += 1;
                if cols > n {
                    return Err(Error::invalid(format!("row {rows} has more than {n} columns")));
                }
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad number {cell:?} in row {rows}")))?;
                entries.push(v);
            }
            if cols != n {
                return Err(Error::invalid(format!(
                    "row {rows} has {cols} columns, expected {n}"
                )));
            }
        }
        if rows != n {
            return Err(Error::invalid(format!("found {rows} rows, expected {n}")));
        }
        DistanceMinor::from_entries(n, entries, triple_name, stream)
    }

    /// Compact binary layout: `n` as unsigned 64-bit little-endian, then
    /// `n*n` IEEE-754 doubles in row-major order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.n * self.n);
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        for &v in &self.entries {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Parses the binary layout written by [`DistanceMinor::to_bytes`].
    /// The declared order must match the byte length exactly before any
    /// allocation happens.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < 8 {
            return Err(Error::invalid("binary minor shorter than its header"));
        }
        let n_raw = u64::from_le_bytes(data[..8].try_into().unwrap());
        if n_raw == 0 || n_raw > MAX_DECODE_ORDER as u64 {
            return Err(Error::invalid(format!(
                "order {n_raw} outside the accepted range 1..={MAX_DECODE_ORDER}"
            )));
        }
        let n = n_raw as usize;
        let expected = n
            .checked_mul(n)
            .and_then(|nn| nn.checked_mul(8))
            .and_then(|bytes| bytes.checked_add(8))
            .ok_or_else(|| Error::invalid("order overflows the byte layout"))?;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} bytes for order {n}, got {}",
                data.len()
            )));
        }
        let entries: Vec<f64> = data[8..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        DistanceMinor::from_entries(n, entries, "", None)
    }
}

fn parse_stream_label(value: &str) -> Option<StreamId> {
    let (seed, rep) = value.split_once(':')?;
    Some(StreamId::new(seed.parse().ok()?, rep.parse().ok()?))
}
