//! Command implementations behind the CLI: sampling runs, spectrum
//! sweeps, trace-distribution fits, operator comparisons, growth fits,
//! and the self-check suite. Each command is a pure function of its
//! config; all file output is deterministic byte-for-byte given the
//! same config and seed.

use crate::config::ExperimentConfig;
use crate::eig::{eigenvalues_symmetric, spectral_measure};
use crate::error::{Error, Result};
use crate::heavytail::{
    calibrate_scale, levy_cdf, replicated_trace_stats, line_trace_statistic, trace_statistic,
};
use crate::inference::{ks_distance, EmpiricalDistribution};
use crate::matdist::{
    minor_from_points, permute_minor, random_permutation, sample_minor, DistanceMinor,
};
use crate::opspec::{analytic_circle_spectrum, compare_empirical_to_operator, nystrom_spectrum};
use crate::plot::{cdf_overlay_svg, histogram_svg, stem_svg};
use crate::rng::{packed_stream, replication_stream, StreamId, RNG_ALGORITHM};
use crate::triples::{check_metric_axioms, parse_triple, sample_points};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Triple names contain ':' (sphere:2); keep filenames portable.
fn sanitize(name: &str) -> String {
    name.replace(':', "-")
}

fn ensure_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)?;
    Ok(())
}

fn svg_with_header(svg: String, seed: u64) -> String {
    format!("<!-- rng: {RNG_ALGORITHM}, master seed: {seed} -->\n{svg}")
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes one minor per replication, in CSV and binary form.
pub fn cmd_sample(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let name = cfg.triple_name()?;
    let triple = parse_triple(name)?;
    ensure_out(&cfg.out)?;

    let minors: Vec<(u64, DistanceMinor)> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let stream = StreamId::new(cfg.seed, rep);
            let mut rng = replication_stream(cfg.seed, rep);
            let m = crate::matdist::sample_minor_tagged(triple.as_ref(), cfg.n, &mut rng, Some(stream))?;
            Ok((rep, m))
        })
        .collect::<Result<_>>()?;

    let mut written = Vec::new();
    let base = sanitize(name);
    for (rep, m) in &minors {
        let stem = format!("minor-{base}-n{}-rep{rep}-seed{}", cfg.n, cfg.seed);
        let csv_path = cfg.out.join(format!("{stem}.csv"));
        write_text(&csv_path, &m.to_csv())?;
        written.push(csv_path);
        let bin_path = cfg.out.join(format!("{stem}.bin"));
        fs::write(&bin_path, m.to_bytes())?;
        written.push(bin_path);
    }
    Ok(written)
}

/// Per-replication eigenvalue CSVs under the configured normalization,
/// plus an optional pooled histogram.
pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let name = cfg.triple_name()?;
    let triple = parse_triple(name)?;
    ensure_out(&cfg.out)?;

    let spectra: Vec<(u64, Vec<f64>)> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_stream(cfg.seed, rep);
            let m = sample_minor(triple.as_ref(), cfg.n, &mut rng)?;
            let sm = spectral_measure(&m, cfg.normalization)?;
            Ok((rep, sm.atoms().to_vec()))
        })
        .collect::<Result<_>>()?;

    let mut written = Vec::new();
    let base = sanitize(name);
    let scale = cfg.normalization.scale_for(cfg.n);
    for (rep, atoms) in &spectra {
        let stream = StreamId::new(cfg.seed, *rep);
        let mut csv = format!(
            "# spectrum,n={},scale={},normalization={},triple={},stream={},rng={}\n",
            cfg.n,
            scale,
            cfg.normalization.label(),
            name,
            stream.label(),
            RNG_ALGORITHM
        );
        csv.push_str("eigenvalue\n");
        let mut sum = 0.0;
        for a in atoms {
            writeln!(csv, "{a}").expect("string write");
            sum += a;
        }
        // raw spectra sum to the (zero) trace; the footer records it
        writeln!(csv, "# sum={sum}").expect("string write");
        let path = cfg
            .out
            .join(format!("spectrum-{base}-n{}-rep{rep}-seed{}.csv", cfg.n, cfg.seed));
        write_text(&path, &csv)?;
        written.push(path);
    }

    if cfg.plots {
        let pooled: Vec<f64> = spectra.iter().flat_map(|(_, a)| a.iter().copied()).collect();
        let title = format!(
            "pooled spectrum: {name}, n={}, a_n={}, reps={}",
            cfg.n,
            cfg.normalization.label(),
            cfg.reps
        );
        let svg = histogram_svg(&pooled, 60, &title)?;
        let path = cfg
            .out
            .join(format!("spectrum-{base}-n{}-seed{}.svg", cfg.n, cfg.seed));
        write_text(&path, &svg_with_header(svg, cfg.seed))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct StableFitReport<'a> {
    mode: &'a str,
    alpha: f64,
    scale: f64,
    ks_distance: f64,
    n: usize,
    reps: usize,
    calibration_reps: usize,
    test_reps: usize,
    triple: &'a str,
    seed: u64,
    rng: &'a str,
}

#[derive(Serialize)]
struct ConcentrationReport<'a> {
    mode: &'a str,
    statistic: &'a str,
    median: f64,
    iqr: f64,
    expected: Option<f64>,
    n: usize,
    reps: usize,
    triple: &'a str,
    seed: u64,
    rng: &'a str,
}

/// Replication CSV of the trace statistic, then either a calibrated
/// Levy fit (heavy-tailed triples) or a concentration report
/// (square-integrable triples). The CSV is always written before any
/// insufficient-data refusal.
pub fn cmd_trace_dist(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let name = cfg.triple_name()?;
    let triple = parse_triple(name)?;
    ensure_out(&cfg.out)?;

    let stats = replicated_trace_stats(triple.as_ref(), cfg.n, cfg.reps, cfg.seed)?;

    let mut csv = format!(
        "# trace-dist,triple={},n={},reps={},rng={},master_seed={}\n",
        name, cfg.n, cfg.reps, RNG_ALGORITHM, cfg.seed
    );
    csv.push_str("rep_index,n,seed,T_n,sum,sum_sq\n");
    for (rep, tr) in stats.iter().enumerate() {
        let (sum, sum_sq) = match tr.stat.decomposition {
            Some(d) => (d.sum.to_string(), d.sum_sq.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            csv,
            "{rep},{},{},{},{sum},{sum_sq}",
            tr.stat.n,
            tr.stream.label(),
            tr.stat.value
        )
        .expect("string write");
    }
    let base = sanitize(name);
    let csv_path = cfg
        .out
        .join(format!("trace-{base}-n{}-seed{}.csv", cfg.n, cfg.seed));
    write_text(&csv_path, &csv)?;
    let mut written = vec![csv_path];

    if triple.square_integrable() {
        // LLN regime: report concentration of n^-2 tr M^2
        let values: Vec<f64> = stats.iter().map(|t| t.stat.trace_over_n2()).collect();
        if values.len() < 2 {
            return Err(Error::InsufficientData(
                "concentration diagnostic needs at least 2 replications".into(),
            ));
        }
        let emp = EmpiricalDistribution::new(values)?;
        let report = ConcentrationReport {
            mode: "concentration",
            statistic: "trace_over_n2",
            median: emp.median(),
            iqr: emp.iqr(),
            expected: triple.mean_squared_distance(),
            n: cfg.n,
            reps: cfg.reps,
            triple: name,
            seed: cfg.seed,
            rng: RNG_ALGORITHM,
        };
        let path = cfg
            .out
            .join(format!("trace-fit-{base}-n{}-seed{}.json", cfg.n, cfg.seed));
        write_text(&path, &to_json(&report)?)?;
        written.push(path);
        return Ok(written);
    }

    if cfg.reps < 100 {
        return Err(Error::InsufficientData(format!(
            "stable fit needs at least 100 replications, got {}; replication CSV was written",
            cfg.reps
        )));
    }

    // calibrate on the first half, test on the second
    let values: Vec<f64> = stats.iter().map(|t| t.stat.value).collect();
    let half = values.len() / 2;
    let fit = calibrate_scale(&values[..half])?;
    let scaled_test: Vec<f64> = values[half..].iter().map(|v| v / fit.scale).collect();
    let emp = EmpiricalDistribution::new(scaled_test)?;
    let ks = ks_distance(&emp, levy_cdf);

    let report = StableFitReport {
        mode: "stable-fit",
        alpha: fit.alpha,
        scale: fit.scale,
        ks_distance: ks,
        n: cfg.n,
        reps: cfg.reps,
        calibration_reps: half,
        test_reps: values.len() - half,
        triple: name,
        seed: cfg.seed,
        rng: RNG_ALGORITHM,
    };
    let path = cfg
        .out
        .join(format!("trace-fit-{base}-n{}-seed{}.json", cfg.n, cfg.seed));
    write_text(&path, &to_json(&report)?)?;
    written.push(path);

    if cfg.plots {
        let title = format!("T_n / c* vs standard Levy CDF: {name}, n={}", cfg.n);
        let svg = cdf_overlay_svg(&emp, levy_cdf, &title)?;
        let path = cfg
            .out
            .join(format!("trace-cdf-{base}-n{}-seed{}.svg", cfg.n, cfg.seed));
        write_text(&path, &svg_with_header(svg, cfg.seed))?;
        written.push(path);
    }
    Ok(written)
}

fn operator_csv(
    eigenvalues: &[f64],
    method: &str,
    resolution: usize,
    header: &str,
) -> String {
    let mut csv = format!("# {header}\n");
    csv.push_str("rank,eigenvalue,method,resolution\n");
    for (rank, ev) in eigenvalues.iter().enumerate() {
        writeln!(csv, "{},{ev},{method},{resolution}", rank + 1).expect("string write");
    }
    csv
}

#[derive(Serialize)]
struct OperatorCompareReport<'a> {
    triple: &'a str,
    n: usize,
    reps: usize,
    top: usize,
    operator_method: &'a str,
    operator_resolution: usize,
    /// Eigenvalue ordering convention for rank matching.
    ordering: &'a str,
    approximate_quadrature: bool,
    operator_values: &'a [f64],
    mean_empirical: &'a [f64],
    per_rank_deviation: &'a [f64],
    seed: u64,
    rng: &'a str,
}

/// Operator spectrum CSVs (Nystrom, plus analytic for the circle) and
/// the empirical-vs-operator comparison report.
pub fn cmd_operator(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let name = cfg.triple_name()?;
    let triple = parse_triple(name)?;
    ensure_out(&cfg.out)?;
    let base = sanitize(name);
    let mut written = Vec::new();

    let ny = nystrom_spectrum(triple.as_ref(), cfg.grid)?;
    let header = format!(
        "operator,triple={name},method=nystrom,grid={},approximate={}",
        cfg.grid, ny.approximate_quadrature
    );
    let path = cfg.out.join(format!("operator-{base}-grid{}.csv", cfg.grid));
    write_text(
        &path,
        &operator_csv(ny.eigenvalues(), "nystrom", cfg.grid, &header),
    )?;
    written.push(path);

    if name == "circle" {
        let an = analytic_circle_spectrum(cfg.kmax)?;
        let header = format!("operator,triple=circle,method=analytic,kmax={}", cfg.kmax);
        let path = cfg.out.join(format!("operator-circle-analytic-k{}.csv", cfg.kmax));
        write_text(
            &path,
            &operator_csv(an.eigenvalues(), "analytic", cfg.kmax, &header),
        )?;
        written.push(path);
    }

    let cmp = compare_empirical_to_operator(triple.as_ref(), cfg.n, cfg.reps, cfg.top, cfg.seed)?;
    let report = OperatorCompareReport {
        triple: name,
        n: cfg.n,
        reps: cfg.reps,
        top: cfg.top,
        operator_method: cmp.operator_method.label(),
        operator_resolution: cmp.operator_resolution,
        ordering: "descending absolute value",
        approximate_quadrature: cmp.approximate_quadrature,
        operator_values: &cmp.operator_values,
        mean_empirical: &cmp.mean_empirical,
        per_rank_deviation: &cmp.per_rank_deviation,
        seed: cfg.seed,
        rng: RNG_ALGORITHM,
    };
    let path = cfg
        .out
        .join(format!("operator-compare-{base}-n{}-seed{}.json", cfg.n, cfg.seed));
    write_text(&path, &to_json(&report)?)?;
    written.push(path);

    if cfg.plots {
        let shown = ny.top(64);
        let title = format!("operator spectrum (nystrom, grid {}): {name}", cfg.grid);
        let svg = stem_svg(shown, &title)?;
        let path = cfg.out.join(format!("operator-{base}-grid{}.svg", cfg.grid));
        write_text(&path, &svg_with_header(svg, cfg.seed))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct GrowthReport<'a> {
    triple: &'a str,
    orders: &'a [usize],
    reps: usize,
    slope: f64,
    medians: Vec<(usize, f64)>,
    seed: u64,
    rng: &'a str,
}

/// Growth-exponent fit of tr M_n^2 across orders.
pub fn cmd_growth(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let name = cfg.triple_name()?;
    let triple = parse_triple(name)?;
    ensure_out(&cfg.out)?;

    let fit = crate::eig::estimate_growth_exponent(triple.as_ref(), &cfg.orders, cfg.reps, cfg.seed)?;

    let mut csv = format!(
        "# growth,triple={name},reps={},rng={},master_seed={}\n",
        cfg.reps, RNG_ALGORITHM, cfg.seed
    );
    csv.push_str("n,median_trace_square\n");
    for &(n, median) in &fit.medians {
        writeln!(csv, "{n},{median}").expect("string write");
    }
    let base = sanitize(name);
    let csv_path = cfg.out.join(format!("growth-{base}-seed{}.csv", cfg.seed));
    write_text(&csv_path, &csv)?;

    let report = GrowthReport {
        triple: name,
        orders: &fit.orders,
        reps: fit.reps,
        slope: fit.slope,
        medians: fit.medians.clone(),
        seed: cfg.seed,
        rng: RNG_ALGORITHM,
    };
    let json_path = cfg.out.join(format!("growth-{base}-seed{}.json", cfg.seed));
    write_text(&json_path, &to_json(&report)?)?;
    Ok(vec![csv_path, json_path])
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub triple: String,
    pub passed: bool,
    pub detail: String,
}

fn push_check(out: &mut Vec<CheckResult>, name: &str, triple: &str, passed: bool, detail: String) {
    out.push(CheckResult {
        name: name.into(),
        triple: triple.into(),
        passed,
        detail,
    });
}

/// The self-check suite: metric axioms, exact exchangeability, spectrum
/// permutation invariance, the Frobenius identity, and the line trace
/// identity. Pass/fail per check; no files written.
pub fn cmd_check(cfg: &ExperimentConfig) -> Result<Vec<CheckResult>> {
    let names: Vec<String> = match &cfg.triple {
        Some(name) => vec![name.clone()],
        None => ["cauchy-line", "unit-interval", "circle", "sphere:2"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };

    let mut results = Vec::new();
    for (ti, name) in names.iter().enumerate() {
        let triple = parse_triple(name)?;
        let t = triple.as_ref();
        let ti = ti as u64;

        let mut rng = packed_stream(cfg.seed, 0, ti);
        let axioms = check_metric_axioms(t, 1000, &mut rng)?;
        push_check(
            &mut results,
            "metric-axioms",
            name,
            axioms.passed(),
            format!(
                "symmetry violations {}, diagonal violations {}, worst triangle slack {:.3e}",
                axioms.symmetry_violations, axioms.diagonal_violations, axioms.worst_triangle_slack
            ),
        );

        let mut rng = packed_stream(cfg.seed, 1, ti);
        let pts = sample_points(t, 30, &mut rng);
        let m = minor_from_points(t, &pts)?;
        let sigma = random_permutation(30, &mut rng);
        let permuted = permute_minor(&m, &sigma)?;
        let reordered: Vec<_> = sigma.iter().map(|&s| pts[s].clone()).collect();
        let rebuilt = minor_from_points(t, &reordered)?;
        let exact = permuted.entries() == rebuilt.entries();
        push_check(
            &mut results,
            "exchangeability",
            name,
            exact,
            if exact {
                "permuted minor equals minor of permuted points exactly".into()
            } else {
                "permuted minor differs from minor of permuted points".into()
            },
        );

        let before = eigenvalues_symmetric(&m)?;
        let after = eigenvalues_symmetric(&permuted)?;
        let tol = 1e-6 * (1.0 + m.frobenius_norm());
        let worst = before
            .atoms()
            .iter()
            .zip(after.atoms())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        push_check(
            &mut results,
            "spectrum-permutation-invariance",
            name,
            worst <= tol,
            format!("largest eigenvalue shift {worst:.3e} (tolerance {tol:.3e})"),
        );

        let p2 = crate::eig::power_sum(&before, 2)?;
        let frob = m.sum_squared_entries();
        let frob_ok = (p2 - frob).abs() <= 1e-6 * (1.0 + frob.abs());
        push_check(
            &mut results,
            "frobenius-identity",
            name,
            frob_ok,
            format!("sum of squared eigenvalues {p2:.6}, squared entries {frob:.6}"),
        );

        if t.euclidean_line() {
            let mut rng = packed_stream(cfg.seed, 2, ti);
            let coords: Vec<f64> = (0..200)
                .map(|_| t.sample_point(&mut rng).as_scalar())
                .collect::<Result<_>>()?;
            let fast = line_trace_statistic(&coords)?;
            let pts: Vec<_> = coords
                .iter()
                .map(|&x| crate::triples::Point::new(vec![x]))
                .collect::<Result<_>>()?;
            let slow = trace_statistic(&minor_from_points(t, &pts)?);
            let ok = (fast.value - slow.value).abs() <= 1e-9 * (1.0 + slow.value.abs());
            push_check(
                &mut results,
                "line-trace-identity",
                name,
                ok,
                format!(
                    "algebraic {:.12} vs pairwise {:.12}",
                    fast.value, slow.value
                ),
            );
        }
    }
    Ok(results)
}
