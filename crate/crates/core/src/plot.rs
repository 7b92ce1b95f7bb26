//! Static SVG figures: histograms, ECDF-vs-CDF overlays, eigenvalue
//! stem plots. Pure string assembly with fixed-precision coordinates,
//! so identical inputs yield byte-identical files.

use crate::error::{Error, Result};
use crate::inference::EmpiricalDistribution;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 52.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Frame {
        // guard degenerate ranges so mapping stays finite
        let (x_min, x_max) = pad_if_flat(x_min, x_max);
        let (y_min, y_max) = pad_if_flat(y_min, y_max);
        Frame {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn pad_if_flat(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn open_svg(title: &str) -> String {
    let mut s = String::with_capacity(4096);
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
    s
}

fn axes(s: &mut String, frame: &Frame) {
    let x0 = fmt(MARGIN);
    let x1 = fmt(WIDTH - MARGIN);
    let y0 = fmt(HEIGHT - MARGIN);
    let y1 = fmt(MARGIN);
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{x0}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{}</text>\n",
        fmt(HEIGHT - MARGIN + 16.0),
        fmt(frame.x_min)
    ));
    s.push_str(&format!(
        "<text x=\"{x1}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
         text-anchor=\"end\">{}</text>\n",
        fmt(HEIGHT - MARGIN + 16.0),
        fmt(frame.x_max)
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{y0}\" font-family=\"monospace\" font-size=\"11\" \
         text-anchor=\"end\">{}</text>\n",
        fmt(MARGIN - 6.0),
        fmt(frame.y_min)
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{y1}\" font-family=\"monospace\" font-size=\"11\" \
         text-anchor=\"end\">{}</text>\n",
        fmt(MARGIN - 6.0),
        fmt(frame.y_max)
    ));
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("plot needs at least 1 value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("plot values must be finite"));
    }
    Ok(())
}

/// Equal-width histogram over the sample range.
pub fn histogram_svg(values: &[f64], bins: usize, title: &str) -> Result<String> {
    check_finite(values)?;
    if bins == 0 {
        return Err(Error::invalid("histogram needs at least 1 bin"));
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = pad_if_flat(lo, hi);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let peak = *counts.iter().max().expect("bins >= 1") as f64;
    let frame = Frame::new(lo, hi, 0.0, peak.max(1.0));

    let mut s = open_svg(title);
    axes(&mut s, &frame);
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let x_left = lo + i as f64 * width;
        let px = frame.x(x_left);
        let py = frame.y(c as f64);
        let w = frame.x(x_left + width) - px;
        let h = frame.y(0.0) - py;
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" \
             fill=\"steelblue\" stroke=\"black\" stroke-width=\"0.5\"/>\n",
            fmt(px),
            fmt(py),
            fmt(w),
            fmt(h)
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Step ECDF of the sample with the analytic CDF overlaid. The x-range
/// is clipped at the 95th percentile so heavy tails do not flatten the
/// picture.
pub fn cdf_overlay_svg<F: Fn(f64) -> f64>(
    emp: &EmpiricalDistribution,
    cdf: F,
    title: &str,
) -> Result<String> {
    let samples = emp.samples();
    let lo = samples[0];
    let q95 = emp.quantile(0.95)?;
    let hi = if q95 > lo { q95 } else { *samples.last().expect("nonempty") };
    let frame = Frame::new(lo, hi, 0.0, 1.0);

    let mut s = open_svg(title);
    axes(&mut s, &frame);

    // step ECDF
    let n = samples.len() as f64;
    let mut pts = String::new();
    let mut prev_level = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        if x > hi {
            break;
        }
        let level = (i + 1) as f64 / n;
        pts.push_str(&format!("{},{} ", fmt(frame.x(x)), fmt(frame.y(prev_level))));
        pts.push_str(&format!("{},{} ", fmt(frame.x(x)), fmt(frame.y(level))));
        prev_level = level;
    }
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
        pts.trim_end()
    ));

    // analytic CDF
    let mut curve = String::new();
    let steps = 256;
    for k in 0..=steps {
        let x = frame.x_min + (frame.x_max - frame.x_min) * k as f64 / steps as f64;
        let y = cdf(x).clamp(0.0, 1.0);
        curve.push_str(&format!("{},{} ", fmt(frame.x(x)), fmt(frame.y(y))));
    }
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" \
         stroke-dasharray=\"4 3\"/>\n",
        curve.trim_end()
    ));
    s.push_str("</svg>\n");
    Ok(s)
}

/// Eigenvalues as vertical stems from the zero line, by ascending rank.
pub fn stem_svg(values: &[f64], title: &str) -> Result<String> {
    check_finite(values)?;
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let frame = Frame::new(-0.5, values.len() as f64 - 0.5, lo, hi);

    let mut s = open_svg(title);
    axes(&mut s, &frame);
    let zero_y = fmt(frame.y(0.0));
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{zero_y}\" x2=\"{}\" y2=\"{zero_y}\" \
         stroke=\"gray\" stroke-width=\"0.5\"/>\n",
        fmt(MARGIN),
        fmt(WIDTH - MARGIN)
    ));
    for (i, &v) in values.iter().enumerate() {
        let px = fmt(frame.x(i as f64));
        let py = fmt(frame.y(v));
        s.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{zero_y}\" x2=\"{px}\" y2=\"{py}\" \
             stroke=\"steelblue\" stroke-width=\"1\"/>\n"
        ));
        s.push_str(&format!(
            "<circle cx=\"{px}\" cy=\"{py}\" r=\"2\" fill=\"crimson\"/>\n"
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
