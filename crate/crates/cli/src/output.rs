//! CSV tables and SVG figures.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// 12 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0.00000000000e0"
        return "0.00000000000e0".into();
    }
    format!("{x:.11e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Header row plus records, `,`-separated.
pub fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{y}" text-anchor="middle" transform="rotate(-90 18 {y})">{}</text>"#,
        escape(ylabel),
        y = TOP + (HEIGHT - TOP - BOTTOM) / 2.0
    );
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64)) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 + f * (y1 - y0);
        let _ = writeln!(out, r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{px}" y="{}" text-anchor="middle">{:.3}</text>"#, y0 + 18.0, x.0 + f * (x.1 - x.0));
        let _ = writeln!(out, r#"<line x1="{}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, x0 - 8.0, py + 4.0, y.0 + f * (y.1 - y.0));
    }
}

/// Blue-white-red diverging map on `[-1, 1]`.
fn diverging(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let (r, g, b) = if v >= 0.0 {
        (255.0, 255.0 * (1.0 - v), 255.0 * (1.0 - v))
    } else {
        (255.0 * (1.0 + v), 255.0 * (1.0 + v), 255.0)
    };
    format!("rgb({},{},{})", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Cell map of `values[i][j]` at `(xs[i], ys[j])`. Missing cells are grey.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], values: &[Vec<Option<f64>>]) -> String {
    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel);
    let span = |v: &[f64]| (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (xr, yr) = (span(xs), span(ys));
    let scale = values
        .iter()
        .flatten()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let cw = pw / xs.len() as f64;
    let ch = ph / ys.len() as f64;
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let fill = v.map(|v| diverging(v / scale)).unwrap_or_else(|| "rgb(160,160,160)".into());
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                LEFT + i as f64 * cw,
                TOP + ph - (j + 1) as f64 * ch,
                cw,
                ch
            );
        }
    }
    // tick labels mark cell centres
    let pad = |r: (f64, f64), n: usize| {
        let half = if n > 1 { 0.5 * (r.1 - r.0) / (n - 1) as f64 } else { 0.5 };
        (r.0 - half, r.1 + half)
    };
    axes(&mut out, pad(xr, xs.len()), pad(yr, ys.len()));
    let lx = WIDTH - RIGHT + 25.0;
    for k in 0..=20 {
        let f = k as f64 / 20.0;
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{:.2}" width="20" height="{:.2}" fill="{}"/>"#,
            TOP + (1.0 - f) * ph - ph / 21.0,
            ph / 21.0 + 0.5,
            diverging(2.0 * f - 1.0)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, TOP + 8.0, num_short(scale));
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, TOP + ph, num_short(-scale));
    out.push_str("</svg>\n");
    out
}

pub fn num_short(x: f64) -> String {
    format!("{x:.3e}")
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Polylines `series[k] = (label, ys)` over shared `xs`.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel);
    let xr = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let all = series.iter().flat_map(|s| s.1.iter().cloned());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + if xr.1 > xr.0 { (x - xr.0) / (xr.1 - xr.0) } else { 0.5 } * pw;
    let py = |y: f64| TOP + ph - (y - lo) / (hi - lo) * ph;
    axes(&mut out, xr, (lo, hi));
    for (k, (label, ys)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#, pts.join(" "));
        if series.len() <= 24 {
            let ly = TOP + 12.0 + 14.0 * (k % 24) as f64;
            let _ = writeln!(out, r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#, WIDTH - RIGHT + 10.0, escape(label));
        }
    }
    out.push_str("</svg>\n");
    out
}
