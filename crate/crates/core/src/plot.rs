// Copyright 2026 The spinenc Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Minimal SVG line plots of the CSV files written by the experiments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

/// Linear or base-10 logarithmic map from data to pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub log: bool,
    pub px0: f64,
    pub px1: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool, px0: f64, px1: f64) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Axis {
            lo,
            hi,
            log,
            px0,
            px1,
        }
    }

    pub fn to_px(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        self.px0 + (v - self.lo) / (self.hi - self.lo) * (self.px1 - self.px0)
    }

    pub fn from_px(&self, px: f64) -> f64 {
        let v = self.lo + (px - self.px0) / (self.px1 - self.px0) * (self.hi - self.lo);
        if self.log {
            10f64.powf(v)
        } else {
            v
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            (self.lo as i32..=self.hi as i32).map(|e| 10f64.powi(e)).collect()
        } else {
            (0..=5)
                .map(|k| self.lo + (self.hi - self.lo) * k as f64 / 5.0)
                .collect()
        }
    }
}

/// Reads the `# plot:` hint and the data columns of an experiment CSV.
pub fn parse_plot(csv: &str) -> Result<PlotData> {
    let mut hint = None;
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let header = loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::validation("CSV has no column header"))?;
        if let Some(rest) = line.strip_prefix("# plot:") {
            hint = Some(rest.trim().to_string());
        } else if !line.starts_with('#') {
            break line;
        }
    };
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::validation(format!("column '{name}' not found")))
    };
    let (mut x, mut ys, mut group, mut log_x, mut log_y, mut title) =
        (cols[0].to_string(), vec![], None, false, false, String::new());
    if let Some(h) = hint {
        for tok in h.split_whitespace() {
            match tok.split_once('=') {
                Some(("x", v)) => x = v.to_string(),
                Some(("y", v)) => ys = v.split(',').map(String::from).collect(),
                Some(("group", v)) => group = Some(v.to_string()),
                Some(("title", v)) => title = v.replace('_', " "),
                None if tok == "logx" => log_x = true,
                None if tok == "logy" => log_y = true,
                _ => {}
            }
        }
    }
    if ys.is_empty() {
        ys = cols.iter().skip(1).map(|c| c.to_string()).collect();
    }
    let xi = col(&x)?;
    let yi: Vec<usize> = ys.iter().map(|y| col(y)).collect::<Result<_>>()?;
    let gi = group.as_deref().map(col).transpose()?;
    let mut map: BTreeMap<(usize, String, usize), Vec<(f64, f64)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for line in lines.filter(|l| !l.starts_with('#')) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::validation("ragged CSV row"));
        }
        let g = gi.map(|i| cells[i].to_string()).unwrap_or_default();
        if !order.contains(&g) {
            order.push(g.clone());
        }
        let gpos = order.iter().position(|o| *o == g).expect("inserted");
        let Ok(xv) = cells[xi].parse::<f64>() else {
            continue;
        };
        for (k, &i) in yi.iter().enumerate() {
            if let Ok(yv) = cells[i].parse::<f64>() {
                let ok = xv.is_finite() && yv.is_finite() && (!log_x || xv > 0.0) && (!log_y || yv > 0.0);
                if ok {
                    map.entry((gpos, g.clone(), k)).or_default().push((xv, yv));
                }
            }
        }
    }
    let series = map
        .into_iter()
        .map(|((_, g, k), points)| Series {
            label: match &group {
                Some(name) if ys.len() > 1 => format!("{name}={g} {}", ys[k]),
                Some(name) => format!("{name}={g}"),
                None => ys[k].clone(),
            },
            points,
        })
        .collect();
    Ok(PlotData {
        title,
        x_label: x,
        y_label: ys.join(", "),
        log_x,
        log_y,
        series,
    })
}

fn fmt_tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.log10().round() as i32)
    } else if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Axes of a plot, as used by [`render_svg`].
pub fn axes(plot: &PlotData) -> (Axis, Axis) {
    let pts = || plot.series.iter().flat_map(|s| s.points.iter());
    (
        Axis::fit(pts().map(|p| p.0), plot.log_x, MARGIN_L, WIDTH - MARGIN_R),
        Axis::fit(pts().map(|p| p.1), plot.log_y, HEIGHT - MARGIN_B, MARGIN_T),
    )
}

pub fn render_svg(plot: &PlotData) -> String {
    let (ax, ay) = axes(plot);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        escape(&plot.title)
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    )
    .unwrap();
    for v in ax.ticks() {
        let px = ax.to_px(v);
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{0}" x2="{px:.2}" y2="{1}" stroke="black"/><text x="{px:.2}" y="{2}" text-anchor="middle">{3}</text>"#,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0,
            HEIGHT - MARGIN_B + 20.0,
            fmt_tick(v, ax.log)
        )
        .unwrap();
    }
    for v in ay.ticks() {
        let py = ay.to_px(v);
        writeln!(
            s,
            r#"<line x1="{0}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="black"/><text x="{1}" y="{2:.2}" text-anchor="end">{3}</text>"#,
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            py + 4.0,
            fmt_tick(v, ay.log)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 15.0,
        escape(&plot.x_label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        escape(&plot.y_label)
    )
    .unwrap();
    for (i, ser) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.4},{:.4}", ax.to_px(x), ay.to_px(y)))
            .collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = MARGIN_T + 10.0 + 16.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 10.0;
        writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&ser.label)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Parses polyline points back into data coordinates.
pub fn polyline_points(svg: &str, plot: &PlotData) -> Vec<Vec<(f64, f64)>> {
    let (ax, ay) = axes(plot);
    svg.lines()
        .filter_map(|l| l.strip_prefix("<polyline"))
        .filter_map(|l| l.split("points=\"").nth(1))
        .map(|p| {
            p.split('"')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .filter_map(|xy| xy.split_once(','))
                .map(|(x, y)| {
                    (
                        ax.from_px(x.parse().unwrap_or(f64::NAN)),
                        ay.from_px(y.parse().unwrap_or(f64::NAN)),
                    )
                })
                .collect()
        })
        .collect()
}

/// CSV text in, SVG text out.
pub fn plot_csv(csv: &str) -> Result<String> {
    Ok(render_svg(&parse_plot(csv)?))
}
