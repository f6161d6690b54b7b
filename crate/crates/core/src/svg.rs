//! Single-panel SVG line charts from numeric CSV tables.
//!
//! Output depends only on the table and style, so repeated renders are
//! byte-identical.

use std::fmt::Write as _;

use crate::csv::Table;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XScale {
    /// Log when the x range is positive and spans three decades, `log10(1 + x)`
    /// when it starts at zero and reaches past 1000, linear otherwise.
    Auto,
    Linear,
    Log,
    Log1p,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub width: u32,
    pub height: u32,
    pub title: Option<String>,
    pub x_column: String,
    /// Columns to draw; all other columns when `None`.
    pub columns: Option<Vec<String>>,
    pub x_scale: XScale,
    pub y_label: String,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            width: 720,
            height: 480,
            title: None,
            x_column: "t".into(),
            columns: None,
            x_scale: XScale::Auto,
            y_label: String::new(),
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn resolve_scale(scale: XScale, lo: f64, hi: f64) -> XScale {
    match scale {
        XScale::Auto if lo > 0.0 && hi / lo >= 1e3 => XScale::Log,
        XScale::Auto if lo >= 0.0 && hi >= 1e3 => XScale::Log1p,
        XScale::Auto => XScale::Linear,
        s => s,
    }
}

fn forward(scale: XScale, x: f64) -> f64 {
    match scale {
        XScale::Log => x.log10(),
        XScale::Log1p => x.ln_1p() / std::f64::consts::LN_10,
        _ => x,
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let (first, last) = ((lo / step).ceil(), (hi / step).floor());
    // Degenerate spans (overflow, subnormal widths) get no ticks.
    if !(step.is_finite() && step > 0.0 && first.is_finite() && last - first <= 100.0) {
        return Vec::new();
    }
    (first as i64..=last as i64).map(|k| k as f64 * step).collect()
}

fn x_ticks(scale: XScale, lo: f64, hi: f64) -> Vec<f64> {
    match scale {
        XScale::Log | XScale::Log1p => {
            let start = if scale == XScale::Log { lo.log10().ceil() as i32 } else { 0 };
            let end = hi.log10().floor() as i32;
            let mut ticks: Vec<f64> = (start..=end).map(|e| 10f64.powi(e)).collect();
            if scale == XScale::Log1p && lo <= 0.0 {
                ticks.insert(0, 0.0);
            }
            ticks
        }
        _ => linear_ticks(lo, hi),
    }
}

fn tick_label(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.abs() >= 1e4 || x.abs() < 1e-3 {
        format!("{x:.0e}")
    } else {
        let s = format!("{x:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders one polyline per selected column against the x column.
pub fn render_svg(table: &Table, style: &Style) -> Result<String> {
    let xs = table
        .column(&style.x_column)
        .ok_or_else(|| Error::Schema(format!("table has no `{}` column", style.x_column)))?;
    if xs.len() < 2 {
        return Err(Error::Schema("table needs at least two rows to plot".into()));
    }
    let names: Vec<String> = match &style.columns {
        Some(cols) => cols.clone(),
        None => table
            .columns()
            .iter()
            .filter(|c| **c != style.x_column)
            .cloned()
            .collect(),
    };
    if names.is_empty() {
        return Err(Error::Schema("no data columns to plot".into()));
    }
    let series = names
        .iter()
        .map(|n| {
            table
                .column(n)
                .ok_or_else(|| Error::Schema(format!("table has no `{n}` column")))
        })
        .collect::<Result<Vec<_>>>()?;

    let finite_x: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    let x_lo = finite_x.iter().copied().fold(f64::INFINITY, f64::min);
    let x_hi = finite_x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(x_lo < x_hi) {
        return Err(Error::Schema("x column has no spread".into()));
    }
    let scale = resolve_scale(style.x_scale, x_lo, x_hi);
    if scale == XScale::Log && x_lo <= 0.0 {
        return Err(Error::Schema("log x scale needs positive x values".into()));
    }
    let usable = |x: f64| x.is_finite() && (scale != XScale::Log || x > 0.0);

    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in &series {
        for (x, y) in xs.iter().zip(s) {
            if usable(*x) && y.is_finite() {
                y_lo = y_lo.min(*y);
                y_hi = y_hi.max(*y);
            }
        }
    }
    if !y_lo.is_finite() {
        return Err(Error::Schema("no finite data values".into()));
    }
    if y_hi - y_lo <= 1e-12 * y_hi.abs().max(1e-300) {
        let pad = if y_hi == 0.0 { 1.0 } else { 0.05 * y_hi.abs() };
        y_lo -= pad;
        y_hi += pad;
    } else {
        let pad = 0.04 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }

    let (w, h) = (style.width as f64, style.height as f64);
    let plot_w = (w - MARGIN_LEFT - MARGIN_RIGHT).max(10.0);
    let plot_h = (h - MARGIN_TOP - MARGIN_BOTTOM).max(10.0);
    let (fx_lo, fx_hi) = (forward(scale, x_lo), forward(scale, x_hi));
    let px = |x: f64| MARGIN_LEFT + (forward(scale, x) - fx_lo) / (fx_hi - fx_lo) * plot_w;
    let py = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(title) = &style.title {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(title)
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT:.1}" y="{MARGIN_TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    );

    let bottom = MARGIN_TOP + plot_h;
    for t in x_ticks(scale, x_lo, x_hi) {
        if t < x_lo || t > x_hi {
            continue;
        }
        let x = px(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick_label(t)
        );
    }
    for t in linear_ticks(y_lo, y_hi) {
        let y = py(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT:.2}" y2="{y:.2}" stroke="black"/>"#,
            MARGIN_LEFT - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            escape(&tick_label(t))
        );
    }

    let x_label = match scale {
        XScale::Log => format!("{} (log scale)", style.x_column),
        XScale::Log1p => format!("{} (log(1+{}) scale)", style.x_column, style.x_column),
        _ => style.x_column.clone(),
    };
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        h - 15.0,
        escape(&x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&style.y_label)
    );

    for (k, (name, ys)) in names.iter().zip(&series).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        // Non-finite values break the line into separate segments.
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (x, y) in xs.iter().zip(ys) {
            if usable(*x) && y.is_finite() {
                segments.last_mut().unwrap().push((px(*x), py(*y)));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN_TOP + 14.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Parses CSV text and renders it.
pub fn render_csv(text: &str, style: &Style) -> Result<String> {
    render_svg(&Table::parse(text)?, style)
}
