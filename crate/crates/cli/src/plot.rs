//! SVG 1.1 rendering of result tables. Plots only draw what the CSV holds;
//! output is byte-for-byte deterministic.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, CliError, CliResult};
use crate::table::{Cell, PlotScale, Table};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 560.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 420.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn cell_label(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(v) => format!("{v}"),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

/// Series of a table under its plot layout; points that cannot be drawn on
/// the chosen axes (infinite, or nonpositive on a log axis) are dropped.
pub fn series(t: &Table, scale: PlotScale) -> CliResult<Vec<Series>> {
    let layout = t
        .plot
        .as_ref()
        .ok_or_else(|| invalid("csv header has no plot layout"))?;
    let col = |name: &str| {
        t.column_index(name)
            .ok_or_else(|| invalid(format!("plot column '{name}' is not in the csv")))
    };
    let xi = col(&layout.x)?;
    let yis = layout.y.iter().map(|y| col(y)).collect::<CliResult<Vec<_>>>()?;
    let gi = layout.group.as_deref().map(col).transpose()?;
    if t.rows.is_empty() {
        return Err(invalid("csv has no data rows"));
    }
    let mut groups: Vec<String> = Vec::new();
    if let Some(g) = gi {
        for r in &t.rows {
            let l = cell_label(&r[g]);
            if !groups.contains(&l) {
                groups.push(l);
            }
        }
    } else {
        groups.push(String::new());
    }
    let log_x = scale == PlotScale::LogLog;
    let log_y = scale != PlotScale::Linear;
    let drawable = |v: f64, log: bool| v.is_finite() && (!log || v > 0.0);
    let mut out = Vec::new();
    for g in &groups {
        for (yname, &yi) in layout.y.iter().zip(&yis) {
            let points: Vec<(f64, f64)> = t
                .rows
                .iter()
                .filter(|r| gi.is_none_or(|gi| cell_label(&r[gi]) == *g))
                .filter_map(|r| Some((r[xi].as_f64()?, r[yi].as_f64()?)))
                .filter(|&(x, y)| drawable(x, log_x) && drawable(y, log_y))
                .collect();
            if points.is_empty() {
                continue;
            }
            let name = match (&layout.group, layout.y.len()) {
                (None, _) => yname.clone(),
                (Some(gname), 1) => format!("{gname} = {g}"),
                (Some(gname), _) => format!("{yname} ({gname} = {g})"),
            };
            out.push(Series { name, points });
        }
    }
    if out.is_empty() {
        return Err(invalid("no drawable points in the csv"));
    }
    Ok(out)
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    ticks: Vec<(f64, String)>,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if log {
            lo = lo.floor();
            hi = hi.ceil();
            if hi <= lo {
                hi = lo + 1.0;
            }
            let decades = (hi - lo) as i64;
            let step = ((decades + 7) / 8).max(1);
            let ticks = (lo as i64..=hi as i64)
                .filter(|e| (e - lo as i64) % step == 0)
                .map(|e| (e as f64, format!("1e{e}")))
                .collect();
            Axis { log, lo, hi, ticks }
        } else {
            if hi <= lo {
                lo -= 1.0;
                hi += 1.0;
            }
            let raw = (hi - lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            lo = (lo / step).floor() * step;
            hi = (hi / step).ceil() * step;
            let decimals = if step >= 1.0 {
                0
            } else {
                (-step.log10().floor()) as usize
            };
            let count = ((hi - lo) / step).round() as i64;
            let ticks = (0..=count)
                .map(|i| {
                    let v = lo + i as f64 * step;
                    (v, format!("{v:.decimals$}"))
                })
                .collect();
            Axis { log, lo, hi, ticks }
        }
    }

    fn map(&self, v: f64, a: f64, b: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        a + (t - self.lo) / (self.hi - self.lo) * (b - a)
    }

    fn map_tick(&self, t: f64, a: f64, b: f64) -> f64 {
        a + (t - self.lo) / (self.hi - self.lo) * (b - a)
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(t: &Table, scale: Option<PlotScale>) -> CliResult<String> {
    let layout = t
        .plot
        .as_ref()
        .ok_or_else(|| invalid("csv header has no plot layout"))?;
    let scale = scale.unwrap_or(layout.scale);
    let series = series(t, scale)?;
    let xa = Axis::new(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        scale == PlotScale::LogLog,
    );
    let ya = Axis::new(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
        scale != PlotScale::Linear,
    );

    let mut s = String::new();
    let w = &mut s;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, "<title>{}</title>", esc(&t.experiment)).unwrap();
    writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();

    writeln!(w, r#"<g class="axes" stroke="black" fill="none">"#).unwrap();
    writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    )
    .unwrap();
    for (v, label) in &xa.ticks {
        let x = xa.map_tick(*v, LEFT, RIGHT);
        writeln!(
            w,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}" stroke="#dddddd"/>"##
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" stroke="none" fill="black">{}</text>"#,
            BOTTOM + 16.0,
            esc(label)
        )
        .unwrap();
    }
    for (v, label) in &ya.ticks {
        let y = ya.map_tick(*v, BOTTOM, TOP);
        writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#dddddd"/>"##
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="black">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            esc(label)
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();
    writeln!(
        w,
        r#"<text class="xlabel" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0,
        esc(&layout.x)
    )
    .unwrap();
    writeln!(
        w,
        r#"<text class="title" x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        esc(&t.experiment)
    )
    .unwrap();

    for (i, se) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        writeln!(w, r#"<g class="series" data-name="{}">"#, esc(&se.name)).unwrap();
        let pts: Vec<(f64, f64)> = se
            .points
            .iter()
            .map(|&(x, y)| (xa.map(x, LEFT, RIGHT), ya.map(y, BOTTOM, TOP)))
            .collect();
        if layout.markers {
            for (x, y) in &pts {
                writeln!(w, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{color}"/>"#).unwrap();
            }
        } else {
            let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                w,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                coords.join(" ")
            )
            .unwrap();
        }
        writeln!(w, "</g>").unwrap();
    }

    writeln!(w, r#"<g class="legend">"#).unwrap();
    let mut y = TOP + 10.0;
    for (i, se) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        writeln!(
            w,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            RIGHT + 16.0,
            RIGHT + 36.0
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 42.0,
            y + 4.0,
            esc(&se.name)
        )
        .unwrap();
        y += 18.0;
    }
    writeln!(w, "</g>").unwrap();

    let notes: Vec<String> = t
        .summary
        .iter()
        .filter(|(k, _)| k.starts_with("slope"))
        .map(|(k, v)| format!("{k} = {v:.3}"))
        .collect();
    if !notes.is_empty() {
        writeln!(w, r#"<g class="annotation">"#).unwrap();
        y += 10.0;
        for n in notes {
            writeln!(w, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, RIGHT + 16.0, esc(&n)).unwrap();
            y += 16.0;
        }
        writeln!(w, "</g>").unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(s)
}

/// Renders `csv` to `out`. Nothing is written when rendering fails.
pub fn plot_file(csv: &Path, scale: Option<PlotScale>, out: &Path) -> CliResult<()> {
    let t = Table::read_file(csv)?;
    let svg = render_svg(&t, scale)?;
    std::fs::write(out, svg).map_err(CliError::io(out.display().to_string()))
}
