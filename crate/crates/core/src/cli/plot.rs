//! `plot`: minimal static SVG charts of simulation CSVs.
//!
//! `box` reads the boxplot schema and draws one panel per true model with a
//! box per candidate. `line` reads the trajectory schema and draws one panel
//! per (scenario, c) with the replication means of `log_bf` (red) and
//! `score_diff` (blue) against `n`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use super::{read_file, CliError, CliResult, PlotKind, EXIT_OK};
use crate::harness::output::{FIG1_HEADER, TRAJECTORY_HEADER};

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long)]
    pub out: PathBuf,
}

/// Tukey box summary. Quartiles interpolate linearly between order
/// statistics at position `(m - 1) q`; whiskers reach the most extreme
/// observations within 1.5 IQR of the box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub count: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `None` for an empty sample.
pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&v, 0.25);
    let median = quantile_sorted(&v, 0.5);
    let q3 = quantile_sorted(&v, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v
        .iter()
        .copied()
        .filter(|x| (lo_fence..=hi_fence).contains(x))
        .collect();
    Some(BoxStats {
        count: v.len(),
        q1,
        median,
        q3,
        lower_whisker: inside.first().copied().unwrap_or(q1),
        upper_whisker: inside.last().copied().unwrap_or(q3),
        outliers: v
            .into_iter()
            .filter(|x| !(lo_fence..=hi_fence).contains(x))
            .collect(),
    })
}

/// Header-checked rows of a CSV as string fields.
fn read_table<'a>(text: &'a str, header: &str) -> CliResult<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((_, first)) = lines.next() else {
        return Err(CliError::usage("input CSV is empty"));
    };
    if first.trim() != header {
        return Err(CliError::usage(format!(
            "unexpected CSV header '{}'; expected '{header}'",
            first.trim()
        )));
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != width {
            return Err(CliError::usage(format!(
                "line {}: expected {width} fields, found {}",
                i + 1,
                fields.len()
            )));
        }
        rows.push((i + 1, fields));
    }
    if rows.is_empty() {
        return Err(CliError::usage("input CSV has a header but no rows"));
    }
    Ok(rows)
}

fn number(field: &str, lineno: usize) -> CliResult<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::usage(format!("line {lineno}: '{field}' is not a finite number")))
}

fn group_index<K: PartialEq + Clone, V>(groups: &mut Vec<(K, Vec<V>)>, key: &K) -> usize {
    match groups.iter().position(|(k, _)| k == key) {
        Some(i) => i,
        None => {
            groups.push((key.clone(), Vec::new()));
            groups.len() - 1
        }
    }
}

/// Per true model, per candidate score samples, in first-appearance order.
pub type BoxGroups = Vec<(String, Vec<(String, Vec<f64>)>)>;

pub fn box_groups(text: &str) -> CliResult<BoxGroups> {
    let mut panels: BoxGroups = Vec::new();
    for (lineno, f) in read_table(text, FIG1_HEADER)? {
        let score = number(f[4], lineno)?;
        let p = group_index(&mut panels, &f[1].to_string());
        let c = group_index(&mut panels[p].1, &f[3].to_string());
        panels[p].1[c].1.push(score);
    }
    Ok(panels)
}

/// Per (scenario, c), the mean over replications of `(log_bf, score_diff)`
/// at each `n`, sorted by `n`.
pub type LineSeries = Vec<((String, String), Vec<(usize, f64, f64)>)>;

/// Running sums `(n, log_bf, score_diff, count)` per panel.
type LineSums = Vec<((String, String), Vec<(usize, f64, f64, usize)>)>;

pub fn line_series(text: &str) -> CliResult<LineSeries> {
    let mut panels: LineSums = Vec::new();
    for (lineno, f) in read_table(text, TRAJECTORY_HEADER)? {
        number(f[1], lineno)?;
        let n: usize = f[3].parse().map_err(|_| {
            CliError::usage(format!("line {lineno}: '{}' is not a sample size", f[3]))
        })?;
        let bf = number(f[4], lineno)?;
        let sd = number(f[5], lineno)?;
        let p = group_index(&mut panels, &(f[0].to_string(), f[1].to_string()));
        let cells = &mut panels[p].1;
        match cells.iter_mut().find(|c| c.0 == n) {
            Some(c) => {
                c.1 += bf;
                c.2 += sd;
                c.3 += 1;
            }
            None => cells.push((n, bf, sd, 1)),
        }
    }
    Ok(panels
        .into_iter()
        .map(|(k, mut cells)| {
            cells.sort_by_key(|c| c.0);
            (
                k,
                cells
                    .into_iter()
                    .map(|(n, a, b, m)| (n, a / m as f64, b / m as f64))
                    .collect(),
            )
        })
        .collect())
}

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 15.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 35.0;
const COLUMNS: usize = 2;

struct Frame {
    x0: f64,
    y0: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn new(index: usize, lo: f64, hi: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        };
        let pad = 0.05 * (hi - lo);
        Self {
            x0: (index % COLUMNS) as f64 * PANEL_W,
            y0: (index / COLUMNS) as f64 * PANEL_H,
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn plot_w(&self) -> f64 {
        PANEL_W - MARGIN_L - MARGIN_R
    }

    fn plot_h(&self) -> f64 {
        PANEL_H - MARGIN_T - MARGIN_B
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + MARGIN_T + (self.hi - v) / (self.hi - self.lo) * self.plot_h()
    }

    /// `t` in [0, 1] across the plotting area.
    fn x(&self, t: f64) -> f64 {
        self.x0 + MARGIN_L + t * self.plot_w()
    }

    fn axes(&self, s: &mut String, title: &str) {
        let (l, r) = (self.x(0.0), self.x(1.0));
        let (top, bottom) = (self.y0 + MARGIN_T, self.y0 + MARGIN_T + self.plot_h());
        let _ = writeln!(
            s,
            r##"<rect x="{l:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            r - l,
            bottom - top
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            (l + r) / 2.0,
            self.y0 + 18.0,
            escape(title)
        );
        for k in 0..=4 {
            let v = self.lo + (self.hi - self.lo) * k as f64 / 4.0;
            let y = self.y(v);
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{l:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"##,
                l - 4.0,
                l - 6.0,
                y + 3.0,
                tick(v)
            );
        }
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn svg_document(panels: usize, body: &str) -> String {
    let rows = panels.div_ceil(COLUMNS).max(1);
    let cols = panels.clamp(1, COLUMNS);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n",
        w = cols as f64 * PANEL_W,
        h = rows as f64 * PANEL_H,
    )
}

pub fn render_box(groups: &BoxGroups) -> String {
    let mut body = String::new();
    for (i, (truth, cands)) in groups.iter().enumerate() {
        let all = cands.iter().flat_map(|c| c.1.iter().copied());
        let lo = all.clone().fold(f64::INFINITY, f64::min);
        let hi = all.fold(f64::NEG_INFINITY, f64::max);
        let frame = Frame::new(i, lo, hi);
        frame.axes(&mut body, &format!("true model {truth}"));
        let k = cands.len() as f64;
        let slot = 1.0 / k;
        let half = 0.3 * slot * frame.plot_w();
        for (j, (name, values)) in cands.iter().enumerate() {
            let Some(b) = box_stats(values) else { continue };
            let cx = frame.x((j as f64 + 0.5) * slot);
            let (yq1, yq3, ymed) = (frame.y(b.q1), frame.y(b.q3), frame.y(b.median));
            let (ylw, yuw) = (frame.y(b.lower_whisker), frame.y(b.upper_whisker));
            let _ = writeln!(
                body,
                r##"<line x1="{cx:.2}" y1="{yuw:.2}" x2="{cx:.2}" y2="{yq3:.2}" stroke="#000"/><line x1="{cx:.2}" y1="{yq1:.2}" x2="{cx:.2}" y2="{ylw:.2}" stroke="#000"/>"##
            );
            let _ = writeln!(
                body,
                r##"<line x1="{:.2}" y1="{yuw:.2}" x2="{:.2}" y2="{yuw:.2}" stroke="#000"/><line x1="{:.2}" y1="{ylw:.2}" x2="{:.2}" y2="{ylw:.2}" stroke="#000"/>"##,
                cx - half / 2.0,
                cx + half / 2.0,
                cx - half / 2.0,
                cx + half / 2.0
            );
            let _ = writeln!(
                body,
                r##"<rect x="{:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="#cfd8e8" stroke="#000"/><line x1="{:.2}" y1="{ymed:.2}" x2="{:.2}" y2="{ymed:.2}" stroke="#000" stroke-width="2"/>"##,
                cx - half,
                2.0 * half,
                (yq1 - yq3).max(0.0),
                cx - half,
                cx + half
            );
            for o in &b.outliers {
                let _ = writeln!(
                    body,
                    r##"<circle cx="{cx:.2}" cy="{:.2}" r="1.5" fill="none" stroke="#000"/>"##,
                    frame.y(*o)
                );
            }
            let _ = writeln!(
                body,
                r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
                frame.y0 + PANEL_H - MARGIN_B + 15.0,
                escape(name)
            );
        }
    }
    svg_document(groups.len(), &body)
}

pub fn render_line(series: &LineSeries) -> String {
    let mut body = String::new();
    for (i, ((scenario, c), points)) in series.iter().enumerate() {
        let vals = points.iter().flat_map(|p| [p.1, p.2]);
        let lo = vals.clone().fold(0.0f64, f64::min);
        let hi = vals.fold(0.0f64, f64::max);
        let frame = Frame::new(i, lo, hi);
        let c_label = c
            .parse::<f64>()
            .map(|v| format!("{v}"))
            .unwrap_or_else(|_| c.clone());
        frame.axes(&mut body, &format!("{scenario}, c = {c_label}"));
        let n_min = points.first().map_or(0, |p| p.0) as f64;
        let n_max = points.last().map_or(1, |p| p.0) as f64;
        let span = (n_max - n_min).max(1.0);
        let zero = frame.y(0.0);
        let _ = writeln!(
            body,
            r##"<line x1="{:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="#999" stroke-dasharray="3,3"/>"##,
            frame.x(0.0),
            frame.x(1.0)
        );
        for (colour, pick) in [("#d62728", 1usize), ("#1f77b4", 2usize)] {
            let mut pts = String::new();
            for p in points {
                let v = if pick == 1 { p.1 } else { p.2 };
                let _ = write!(
                    pts,
                    "{:.2},{:.2} ",
                    frame.x((p.0 as f64 - n_min) / span),
                    frame.y(v)
                );
            }
            let _ = writeln!(
                body,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                pts.trim_end()
            );
        }
        let _ = writeln!(
            body,
            r##"<text x="{:.2}" y="{:.2}" font-size="10" fill="#d62728">log BF</text><text x="{:.2}" y="{:.2}" font-size="10" fill="#1f77b4">score difference</text>"##,
            frame.x(0.02),
            frame.y0 + MARGIN_T + 12.0,
            frame.x(0.02),
            frame.y0 + MARGIN_T + 24.0
        );
        let _ = writeln!(
            body,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">n ({n_min:.0} to {n_max:.0})</text>"#,
            frame.x(0.5),
            frame.y0 + PANEL_H - MARGIN_B + 15.0
        );
    }
    svg_document(series.len(), &body)
}

pub fn render(text: &str, kind: PlotKind) -> CliResult<String> {
    Ok(match kind {
        PlotKind::Box => render_box(&box_groups(text)?),
        PlotKind::Line => render_line(&line_series(text)?),
    })
}

pub fn cmd_plot(args: &PlotArgs) -> CliResult<i32> {
    let text = read_file(&args.input)?;
    let svg = render(&text, args.kind)?;
    std::fs::write(&args.out, svg)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(EXIT_OK)
}
