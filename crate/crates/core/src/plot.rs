//! Minimal static SVG renderers: line charts (optionally log-x, with
//! mean +/- std bands) and scatter plots with guide lines.

use std::fmt::Write as _;

use crate::analysis::{DiagnosticReport, PerformanceProfile, RatioCurve};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 48.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_x: bool,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>, log_x: bool) -> Self {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        for x in xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for y in ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !x_min.is_finite() || x_min == x_max {
            x_max = x_min + 1.0;
        }
        if !y_min.is_finite() || y_min == y_max {
            y_max = y_min + 1.0;
            y_min -= 1.0;
        }
        let pad = 0.05 * (y_max - y_min);
        Self {
            x_min,
            x_max,
            y_min: y_min - pad,
            y_max: y_max + pad,
            log_x,
        }
    }

    fn px(&self, x: f64) -> f64 {
        let (lo, hi, v) = if self.log_x {
            (self.x_min.ln(), self.x_max.ln(), x.ln())
        } else {
            (self.x_min, self.x_max, x)
        };
        MARGIN_L + (v - lo) / (hi - lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(svg: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = write!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );
    // ticks
    let n_ticks = 6;
    for i in 0..n_ticks {
        let f = i as f64 / (n_ticks - 1) as f64;
        let x_val = if frame.log_x {
            (frame.x_min.ln() + f * (frame.x_max.ln() - frame.x_min.ln())).exp()
        } else {
            frame.x_min + f * (frame.x_max - frame.x_min)
        };
        let y_val = frame.y_min + f * (frame.y_max - frame.y_min);
        let xp = frame.px(x_val);
        let yp = frame.py(y_val);
        let _ = write!(
            svg,
            "<line x1=\"{xp:.1}\" y1=\"{y0}\" x2=\"{xp:.1}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{xp:.1}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n\
             <line x1=\"{x0}\" y1=\"{yp:.1}\" x2=\"{}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            y0 + 5.0,
            y0 + 20.0,
            tick_label(x_val),
            x0 - 5.0,
            x0 - 8.0,
            yp + 4.0,
            tick_label(y_val),
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n\
         <text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\" \
         transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 14.0,
        escape(x_label),
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        escape(y_label),
    );
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (0.01..10_000.0).contains(&a) {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn polyline(svg: &mut String, frame: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    if pts.is_empty() {
        return;
    }
    let mut d = String::new();
    for (x, y) in pts {
        let _ = write!(d, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
    }
    let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>",
        d.trim_end()
    );
}

fn legend(svg: &mut String, labels: &[(String, &str)]) {
    let mut y = MARGIN_T + 12.0;
    for (label, color) in labels {
        let x = WIDTH - MARGIN_R - 230.0;
        let _ = write!(
            svg,
            "<line x1=\"{x}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" stroke-width=\"2.5\"/>\n\
             <text x=\"{}\" y=\"{:.1}\" font-size=\"12\">{}</text>\n",
            x + 26.0,
            x + 32.0,
            y + 4.0,
            escape(label)
        );
        y += 18.0;
    }
}

/// Error-ratio training curve: mean line, +/- one std band, and the parity
/// guide line at 1.
pub fn ratio_svg(title: &str, curve: &RatioCurve) -> String {
    let xs: Vec<f64> = curve.points.iter().map(|p| p.labeled_size as f64).collect();
    let lo: Vec<f64> = curve.points.iter().map(|p| p.mean - p.std).collect();
    let hi: Vec<f64> = curve.points.iter().map(|p| p.mean + p.std).collect();
    let frame = Frame::fit(
        xs.iter().cloned(),
        lo.iter().cloned().chain(hi.iter().cloned()).chain([1.0]),
        false,
    );
    let mut svg = open_svg(title);
    axes(&mut svg, &frame, "labeled set size", &format!("{} ratio", curve.metric));

    if curve.points.len() > 1 {
        let mut band = String::new();
        for (x, y) in xs.iter().zip(hi.iter()) {
            let _ = write!(band, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
        }
        for (x, y) in xs.iter().rev().zip(lo.iter().rev()) {
            let _ = write!(band, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
        }
        let _ = writeln!(
            svg,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>",
            band.trim_end(),
            PALETTE[0]
        );
    }
    // parity line
    polyline(
        &mut svg,
        &frame,
        &[(frame.x_min, 1.0), (frame.x_max, 1.0)],
        "#555555",
        true,
    );
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(curve.points.iter())
        .map(|(x, p)| (*x, p.mean))
        .collect();
    polyline(&mut svg, &frame, &pts, PALETTE[0], false);
    svg.push_str("</svg>\n");
    svg
}

/// Log-x Dolan-More profile with per-algorithm AUC in the legend.
pub fn profile_svg(title: &str, profile: &PerformanceProfile) -> String {
    let frame = Frame::fit(
        profile.tau.iter().cloned(),
        profile
            .curves
            .iter()
            .flat_map(|c| c.rho.iter().cloned())
            .chain([0.0, 1.0]),
        true,
    );
    let mut svg = open_svg(title);
    axes(&mut svg, &frame, "performance ratio factor", "fraction of problems");
    let mut labels = Vec::new();
    for (i, c) in profile.curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = profile
            .tau
            .iter()
            .zip(c.rho.iter())
            .map(|(t, r)| (*t, *r))
            .collect();
        polyline(&mut svg, &frame, &pts, color, false);
        labels.push((format!("{} (AUC={:.3})", c.algorithm, c.auc), color));
    }
    legend(&mut svg, &labels);
    svg.push_str("</svg>\n");
    svg
}

/// Uncertainty-vs-error scatter with distribution medians (dashed black)
/// and the 0.99 std-quantile / high-uncertainty error guides (blue), in the
/// style of an MC-dropout calibration figure.
pub fn diagnostic_svg(title: &str, report: &DiagnosticReport) -> String {
    let frame = Frame::fit(
        report.points.iter().map(|p| p.0),
        report.points.iter().map(|p| p.1),
        false,
    );
    let mut svg = open_svg(title);
    axes(&mut svg, &frame, "MC std", "absolute error");
    for (s, e) in &report.points {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.5\"/>",
            frame.px(*s),
            frame.py(*e),
            PALETTE[0]
        );
    }
    polyline(
        &mut svg,
        &frame,
        &[(report.median_std, frame.y_min), (report.median_std, frame.y_max)],
        "black",
        true,
    );
    polyline(
        &mut svg,
        &frame,
        &[(frame.x_min, report.median_abs_error), (frame.x_max, report.median_abs_error)],
        "black",
        true,
    );
    polyline(
        &mut svg,
        &frame,
        &[(report.std_quantile_99, frame.y_min), (report.std_quantile_99, frame.y_max)],
        "#1f4fd6",
        false,
    );
    if let Some(rank) = report.high_std_error_percentile {
        // horizontal guide at the error value sitting at that percentile
        let mut errors: Vec<f64> = report.points.iter().map(|p| p.1).collect();
        errors.sort_by(f64::total_cmp);
        let idx = ((rank * errors.len() as f64).ceil() as usize).clamp(1, errors.len()) - 1;
        let e = errors[idx];
        polyline(
            &mut svg,
            &frame,
            &[(frame.x_min, e), (frame.x_max, e)],
            "#1f4fd6",
            false,
        );
    }
    let r_text = match report.pearson_r {
        Some(r) => format!("Pearson r = {r:.3}"),
        None => "Pearson r undefined (constant axis)".to_string(),
    };
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>",
        MARGIN_L + 10.0,
        MARGIN_T + 14.0,
        escape(&r_text)
    );
    svg.push_str("</svg>\n");
    svg
}
