use std::fmt::Write as _;
use std::path::Path;

use super::AccuracyTable;
use crate::colorspace::ColorSpace;
use crate::error::{Error, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick step from {1, 2, 5} x 10^n giving roughly `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = (span / target).max(1e-9);
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

/// SVG line chart of accuracy against principal dimension, one polyline per space.
pub fn render_plot(table: &AccuracyTable, spaces: &[ColorSpace]) -> Result<String> {
    if spaces.is_empty() {
        return Err(Error::Parameter("plot needs at least one colour space".into()));
    }
    let rows = spaces
        .iter()
        .map(|s| {
            table
                .spaces
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::Parameter(format!("colour space {s} is not in the table")))
        })
        .collect::<Result<Vec<_>>>()?;

    let values: Vec<f64> = rows
        .iter()
        .flat_map(|&r| table.cells[r].iter().map(|c| c.mean))
        .collect();
    let (vmin, vmax) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let ystep = nice_step((vmax - vmin).max(1.0), 6.0);
    let ylo = ((vmin / ystep).floor() * ystep).max(0.0);
    let yhi = ((vmax / ystep).ceil() * ystep).min(100.0).max(ylo + ystep);

    let xs = &table.dims;
    let (xlo, xhi) = (xs[0] as f64, *xs.last().unwrap() as f64);
    let xspan = if xhi > xlo { xhi - xlo } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |d: f64| LEFT + (d - xlo) / xspan * plot_w;
    let py = |v: f64| TOP + (yhi - v) / (yhi - ylo) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();

    // axes
    writeln!(svg, r#"<g id="axes" stroke="black" stroke-width="1">"#).unwrap();
    writeln!(svg, r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/>"#, TOP + plot_h, LEFT + plot_w, TOP + plot_h).unwrap();
    writeln!(svg, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/>"#, TOP + plot_h).unwrap();
    svg.push_str("</g>\n");

    writeln!(svg, r#"<g id="x-ticks" text-anchor="middle">"#).unwrap();
    for &d in xs {
        let x = px(d as f64);
        writeln!(svg, r#"<line x1="{x:.2}" y1="{0}" x2="{x:.2}" y2="{1}" stroke="black"/><text x="{x:.2}" y="{2}">{d}</text>"#,
            TOP + plot_h, TOP + plot_h + 5.0, TOP + plot_h + 20.0).unwrap();
    }
    svg.push_str("</g>\n");

    writeln!(svg, r#"<g id="y-ticks" text-anchor="end">"#).unwrap();
    let nticks = ((yhi - ylo) / ystep).round() as usize;
    for i in 0..=nticks {
        let v = ylo + i as f64 * ystep;
        let y = py(v);
        writeln!(svg, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/><text x="{}" y="{:.2}">{}</text>"##,
            LEFT + plot_w, LEFT - 6.0, y + 4.0, trim_number(v)).unwrap();
    }
    svg.push_str("</g>\n");

    writeln!(svg, r#"<text id="x-label" x="{}" y="{}" text-anchor="middle">Dimension of principal components</text>"#,
        LEFT + plot_w / 2.0, HEIGHT - 15.0).unwrap();
    writeln!(svg, r#"<text id="y-label" x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">Classification accuracy (%)</text>"#,
        TOP + plot_h / 2.0).unwrap();

    writeln!(svg, r#"<g id="series" fill="none" stroke-width="2">"#).unwrap();
    for (i, &r) in rows.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = table.cells[r]
            .iter()
            .zip(xs)
            .map(|(c, &d)| format!("{:.2},{:.2}", px(d as f64), py(c.mean)))
            .collect();
        writeln!(svg, r#"<polyline data-space="{}" stroke="{color}" points="{}"/>"#, table.spaces[r].tag(), points.join(" ")).unwrap();
        for p in &points {
            let (x, y) = p.split_once(',').unwrap();
            writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}" stroke="none"/>"#).unwrap();
        }
    }
    svg.push_str("</g>\n");

    writeln!(svg, r#"<g id="legend">"#).unwrap();
    for (i, &r) in rows.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let x = LEFT + plot_w + 20.0;
        let y = TOP + 10.0 + 20.0 * i as f64;
        writeln!(svg, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 24.0, x + 30.0, y + 4.0, escape(table.spaces[r].display_name())).unwrap();
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

pub fn emit_plot(table: &AccuracyTable, spaces: &[ColorSpace], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_plot(table, spaces)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
