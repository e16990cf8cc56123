//! Static SVG regret curves: log-x axis, one polyline per aggregate with a
//! shaded band of one standard error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use duelbench::runner::{read_aggregate_csv, AggregateRow};

use crate::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub rows: Vec<AggregateRow>,
}

/// Sidecar path for an SVG: `plot.svg` -> `plot.points.csv`.
pub fn sidecar_path(svg: &Path) -> PathBuf {
    svg.with_extension("points.csv")
}

pub fn cmd_plot(inputs: &[PathBuf], out_svg: &Path) -> Result<(), CliError> {
    if inputs.is_empty() {
        return Err(CliError::Usage("plot needs at least one aggregate CSV".into()));
    }
    let mut series = Vec::with_capacity(inputs.len());
    for p in inputs {
        let rows = read_aggregate_csv(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        let name = p
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("series")
            .to_string();
        series.push(Series { name, rows });
    }
    let steps = |s: &Series| s.rows.iter().map(|r| r.step).collect::<Vec<_>>();
    let grid = steps(&series[0]);
    if let Some(bad) = series.iter().find(|s| steps(s) != grid) {
        return Err(CliError::Input(format!(
            "checkpoint grid of {} differs from {}",
            bad.name, series[0].name
        )));
    }
    std::fs::write(out_svg, render_svg(&series))
        .map_err(|e| CliError::Io(format!("{}: {e}", out_svg.display())))?;
    let side = sidecar_path(out_svg);
    std::fs::write(&side, points_csv(&series))
        .map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
    Ok(())
}

/// The plotted points, one row per (series, checkpoint).
pub fn points_csv(series: &[Series]) -> String {
    let mut out = String::from("series,step,mean,stderr,n\n");
    for s in series {
        for r in &s.rows {
            writeln!(out, "{},{},{},{},{}", s.name, r.step, r.mean, r.stderr, r.n).expect("string write");
        }
    }
    out
}

pub fn render_svg(series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.rows.iter());
    let x_min = all().map(|r| r.step).min().unwrap_or(1).max(1) as f64;
    let x_max = (all().map(|r| r.step).max().unwrap_or(10) as f64).max(x_min * 10.0);
    let y_max = all().map(|r| r.mean + r.stderr).fold(0.0, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let (lx0, lx1) = (x_min.log10().floor(), x_max.log10().ceil());
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |step: f64| LEFT + (step.log10() - lx0) / (lx1 - lx0) * plot_w;
    let py = |v: f64| TOP + plot_h - v.max(0.0) / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for e in lx0 as i32..=lx1 as i32 {
        let x = px(10f64.powi(e));
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
    }
    for i in 0..=5 {
        let v = y_max * i as f64 / 5.0;
        let y = py(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">step (log scale)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">cumulative regret</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for (n, s) in series.iter().enumerate() {
        let color = COLORS[n % COLORS.len()];
        let upper = s.rows.iter().map(|r| (px(r.step as f64), py(r.mean + r.stderr)));
        let lower = s.rows.iter().rev().map(|r| (px(r.step as f64), py(r.mean - r.stderr)));
        let band: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = s
            .rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.step as f64), py(r.mean)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="mean" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        let ly = TOP + 15.0 + 18.0 * n as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 100.0).round() / 100.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
