//! Result emission: CSV tables and self-contained SVG line charts.
//!
//! The CSV contract is bit-exact: `.` decimals, comma separator, LF line
//! endings, a mandatory header row, floats in Rust's shortest round-trip
//! form (which re-parses to the identical bits), and empty fields for
//! absent values.

use crate::sweep::{SweepResult, SweepRow, SweepVariable};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("csv parse error: {0}")]
    Parse(String),
}

pub const CSV_HEADER: [&str; 11] = [
    "variable",
    "value",
    "analytic_delay_s",
    "analytic_reliability",
    "sim_delay_s",
    "sim_delay_ci95_s",
    "sim_reliability",
    "sim_reliability_ci95",
    "stranded_fraction",
    "hop_count_analytic",
    "mean_hops_sim",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Renders the result as CSV text.
pub fn csv_string(result: &SweepResult) -> Result<String, EmitError> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| EmitError::Csv(e.to_string()))?;
    for row in &result.rows {
        writer
            .write_record([
                result.variable.to_string(),
                format!("{}", row.value),
                opt(row.analytic_delay_s),
                opt(row.analytic_reliability),
                opt(row.sim_delay_s),
                opt(row.sim_delay_ci95_s),
                opt(row.sim_reliability),
                opt(row.sim_reliability_ci95),
                opt(row.stranded_fraction),
                format!("{}", row.hop_count_analytic),
                opt(row.mean_hops_sim),
            ])
            .map_err(|e| EmitError::Csv(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| EmitError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| EmitError::Csv(e.to_string()))
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), EmitError> {
    std::fs::write(path, csv_string(result)?)?;
    Ok(())
}

/// Parses CSV text produced by [`csv_string`] back into a [`SweepResult`].
/// Errors on a header-only file (the sweep variable is carried per row).
pub fn read_csv(text: &str) -> Result<SweepResult, EmitError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| EmitError::Parse(e.to_string()))?
        .clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(EmitError::Parse(format!("unexpected header: {headers:?}")));
    }
    let mut variable: Option<SweepVariable> = None;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| EmitError::Parse(e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(EmitError::Parse(format!(
                "row has {} fields, expected {}",
                record.len(),
                CSV_HEADER.len()
            )));
        }
        let var: SweepVariable = record[0].parse().map_err(EmitError::Parse)?;
        match variable {
            None => variable = Some(var),
            Some(v) if v == var => {}
            Some(v) => {
                return Err(EmitError::Parse(format!(
                    "mixed sweep variables {v} and {var}"
                )))
            }
        }
        let num = |i: usize| -> Result<f64, EmitError> {
            record[i]
                .parse()
                .map_err(|_| EmitError::Parse(format!("field {}: `{}`", CSV_HEADER[i], &record[i])))
        };
        let opt_num = |i: usize| -> Result<Option<f64>, EmitError> {
            if record[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        rows.push(SweepRow {
            value: num(1)?,
            analytic_delay_s: opt_num(2)?,
            analytic_reliability: opt_num(3)?,
            sim_delay_s: opt_num(4)?,
            sim_delay_ci95_s: opt_num(5)?,
            sim_reliability: opt_num(6)?,
            sim_reliability_ci95: opt_num(7)?,
            stranded_fraction: opt_num(8)?,
            hop_count_analytic: num(9)?,
            mean_hops_sim: opt_num(10)?,
        });
    }
    let variable = variable.ok_or_else(|| EmitError::Parse("no data rows".into()))?;
    Ok(SweepResult { variable, rows })
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const SVG_WIDTH: f64 = 860.0;
const SVG_HEIGHT: f64 = 720.0;
const PLOT_X: f64 = 90.0;
const PLOT_W: f64 = 700.0;
const PLOT_H: f64 = 250.0;
const DELAY_PLOT_Y: f64 = 50.0;
const RELIABILITY_PLOT_Y: f64 = 410.0;

const COLOR_ANALYTIC: &str = "#1f77b4";
const COLOR_SIMULATED: &str = "#d62728";

/// Affine map between data space and SVG pixel space for one panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelGeometry {
    pub origin_x: f64,
    pub origin_y: f64,
    pub width: f64,
    pub height: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl PanelGeometry {
    pub fn to_svg(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = self.origin_x + (x - self.x_min) / (self.x_max - self.x_min) * self.width;
        let sy =
            self.origin_y + self.height - (y - self.y_min) / (self.y_max - self.y_min) * self.height;
        (sx, sy)
    }

    pub fn from_svg(&self, sx: f64, sy: f64) -> (f64, f64) {
        let x = self.x_min + (sx - self.origin_x) / self.width * (self.x_max - self.x_min);
        let y = self.y_min + (self.origin_y + self.height - sy) / self.height * (self.y_max - self.y_min);
        (x, y)
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return None;
    }
    let span = max - min;
    let pad = if span > 0.0 { span * 0.06 } else { min.abs().max(1.0) * 0.05 };
    Some((min - pad, max + pad))
}

fn panel_geometry(result: &SweepResult, origin_y: f64, ys: &[Option<f64>]) -> Option<PanelGeometry> {
    let (y_min, y_max) = padded_range(ys.iter().copied().flatten())?;
    let (x_min, x_max) = padded_range(result.rows.iter().map(|r| r.value))?;
    Some(PanelGeometry {
        origin_x: PLOT_X,
        origin_y,
        width: PLOT_W,
        height: PLOT_H,
        x_min,
        x_max,
        y_min,
        y_max,
    })
}

fn delay_values(result: &SweepResult) -> Vec<Option<f64>> {
    result
        .rows
        .iter()
        .flat_map(|r| [r.analytic_delay_s, r.sim_delay_s])
        .collect()
}

fn reliability_values(result: &SweepResult) -> Vec<Option<f64>> {
    result
        .rows
        .iter()
        .flat_map(|r| [r.analytic_reliability, r.sim_reliability])
        .collect()
}

/// Geometry of the delay panel, when any delay series is present.
pub fn delay_panel_geometry(result: &SweepResult) -> Option<PanelGeometry> {
    panel_geometry(result, DELAY_PLOT_Y, &delay_values(result))
}

/// Geometry of the reliability panel, when any reliability series is
/// present. The padded range is clamped to the probability domain.
pub fn reliability_panel_geometry(result: &SweepResult) -> Option<PanelGeometry> {
    let mut geom = panel_geometry(result, RELIABILITY_PLOT_Y, &reliability_values(result))?;
    geom.y_min = geom.y_min.max(0.0);
    geom.y_max = geom.y_max.min(1.0);
    Some(geom)
}

/// Compact tick label: up to four significant digits, scientific form for
/// extreme magnitudes.
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..=5).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{v:.3e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Series<'a> {
    class: &'a str,
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

fn render_panel(
    out: &mut String,
    id: &str,
    geom: &PanelGeometry,
    series: &[Series<'_>],
    x_label: &str,
    y_label: &str,
) {
    let x0 = geom.origin_x;
    let y0 = geom.origin_y;
    let x1 = geom.origin_x + geom.width;
    let y1 = geom.origin_y + geom.height;
    let _ = writeln!(out, "  <g id=\"{id}\">");
    let _ = writeln!(
        out,
        "    <rect x=\"{x0}\" y=\"{y0}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>",
        geom.width, geom.height
    );
    // Ticks and labels.
    let ticks = 5usize;
    for i in 0..=ticks {
        let f = i as f64 / ticks as f64;
        let xv = geom.x_min + f * (geom.x_max - geom.x_min);
        let (sx, _) = geom.to_svg(xv, geom.y_min);
        let _ = writeln!(
            out,
            "    <line x1=\"{sx:.2}\" y1=\"{y1}\" x2=\"{sx:.2}\" y2=\"{}\" stroke=\"#333\"/>",
            y1 + 5.0
        );
        let _ = writeln!(
            out,
            "    <text x=\"{sx:.2}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            y1 + 18.0,
            xml_escape(&fmt_tick(xv))
        );
        let yv = geom.y_min + f * (geom.y_max - geom.y_min);
        let (_, sy) = geom.to_svg(geom.x_min, yv);
        let _ = writeln!(
            out,
            "    <line x1=\"{}\" y1=\"{sy:.2}\" x2=\"{x0}\" y2=\"{sy:.2}\" stroke=\"#333\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            "    <text x=\"{}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            sy + 4.0,
            xml_escape(&fmt_tick(yv))
        );
    }
    // Axis captions.
    let _ = writeln!(
        out,
        "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        (x0 + x1) / 2.0,
        y1 + 38.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        out,
        "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>",
        x0 - 62.0,
        (y0 + y1) / 2.0,
        x0 - 62.0,
        (y0 + y1) / 2.0,
        xml_escape(y_label)
    );
    // Series and legend.
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| {
                let (sx, sy) = geom.to_svg(x, y);
                format!("{sx:.2},{sy:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            "    <polyline class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>",
            s.class,
            s.color,
            pts.join(" ")
        );
        for p in &pts {
            let (sx, sy) = p.split_once(',').expect("point format");
            let _ = writeln!(
                out,
                "    <circle cx=\"{sx}\" cy=\"{sy}\" r=\"2.5\" fill=\"{}\"/>",
                s.color
            );
        }
        let ly = y0 + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            "    <line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"1.8\"/>",
            x1 - 150.0,
            x1 - 120.0,
            s.color
        );
        let _ = writeln!(
            out,
            "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            x1 - 114.0,
            ly + 4.0,
            xml_escape(s.label)
        );
    }
    let _ = writeln!(out, "  </g>");
}

/// Renders the result as a two-panel SVG: delay on top, reliability below,
/// one series per evaluation mode.
pub fn svg_string(result: &SweepResult) -> String {
    let variable = result.variable;
    let x_label = if variable.unit().is_empty() {
        variable.to_string()
    } else {
        format!("{} [{}]", variable, variable.unit())
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"28\" font-size=\"16\" text-anchor=\"middle\">multi-hop link performance vs {}</text>",
        SVG_WIDTH / 2.0,
        xml_escape(&variable.to_string())
    );

    if let Some(geom) = delay_panel_geometry(result) {
        let series = [
            Series {
                class: "analytic",
                label: "analytic",
                color: COLOR_ANALYTIC,
                points: result
                    .rows
                    .iter()
                    .filter_map(|r| r.analytic_delay_s.map(|y| (r.value, y)))
                    .collect(),
            },
            Series {
                class: "simulated",
                label: "simulated",
                color: COLOR_SIMULATED,
                points: result
                    .rows
                    .iter()
                    .filter_map(|r| r.sim_delay_s.map(|y| (r.value, y)))
                    .collect(),
            },
        ];
        render_panel(
            &mut out,
            "panel-delay",
            &geom,
            &series,
            &x_label,
            "average total delay [s]",
        );
    }
    if let Some(geom) = reliability_panel_geometry(result) {
        let series = [
            Series {
                class: "analytic",
                label: "analytic",
                color: COLOR_ANALYTIC,
                points: result
                    .rows
                    .iter()
                    .filter_map(|r| r.analytic_reliability.map(|y| (r.value, y)))
                    .collect(),
            },
            Series {
                class: "simulated",
                label: "simulated",
                color: COLOR_SIMULATED,
                points: result
                    .rows
                    .iter()
                    .filter_map(|r| r.sim_reliability.map(|y| (r.value, y)))
                    .collect(),
            },
        ];
        render_panel(
            &mut out,
            "panel-reliability",
            &geom,
            &series,
            &x_label,
            "reliability",
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

pub fn write_svg(result: &SweepResult, path: &Path) -> Result<(), EmitError> {
    std::fs::write(path, svg_string(result))?;
    Ok(())
}
