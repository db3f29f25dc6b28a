use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bands::BandReport;
use super::clusters::{ClusterRow, VolumeFit};
use super::weyl::WeylLawRecord;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "heis-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub title: String,
    pub checks: Vec<CheckOutcome>,
    pub clusters: Vec<ClusterRow>,
    pub volume_fit: Option<VolumeFit>,
    pub weyl: Vec<WeylLawRecord>,
    pub bands: Vec<BandReport>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report {
            schema: SCHEMA_VERSION.to_string(),
            title: title.to_string(),
            checks: Vec::new(),
            clusters: Vec::new(),
            volume_fit: None,
            weyl: Vec::new(),
            bands: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, measured: f64, tolerance: f64, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.to_string(), passed, measured, tolerance, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.clusters.extend(other.clusters);
        self.volume_fit = other.volume_fit.or(self.volume_fit);
        self.weyl.extend(other.weyl);
        self.bands.extend(other.bands);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Json,
    Csv,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Svg];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Svg => "svg",
        }
    }
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    section: &'a str,
    name: String,
    k: Option<u32>,
    n: Option<usize>,
    m: Option<usize>,
    predicted: Option<f64>,
    measured: f64,
    error: Option<f64>,
    count: Option<usize>,
    expected_count: Option<usize>,
    passed: Option<bool>,
}

pub fn render(report: &Report, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
        }
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Svg => Ok(render_svg(report)),
    }
}

fn render_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut rows = Vec::new();
    for c in &report.checks {
        rows.push(CsvRow {
            section: "check",
            name: c.name.clone(),
            k: None,
            n: None,
            m: None,
            predicted: None,
            measured: c.measured,
            error: Some(c.tolerance),
            count: None,
            expected_count: None,
            passed: Some(c.passed),
        });
    }
    for r in &report.clusters {
        rows.push(CsvRow {
            section: "cluster",
            name: format!("level {}", r.m),
            k: Some(r.k),
            n: Some(r.n),
            m: Some(r.m),
            predicted: Some(r.predicted_center),
            measured: r.measured_center,
            error: Some(r.relative_drift),
            count: Some(r.measured_count),
            expected_count: Some(r.exact_count),
            passed: None,
        });
    }
    for r in &report.weyl {
        rows.push(CsvRow {
            section: "weyl",
            name: format!("lambda {}", r.lambda),
            k: Some(r.k),
            n: Some(r.n),
            m: None,
            predicted: Some(r.predicted),
            measured: r.ratio,
            error: Some((r.ratio - 1.0).abs()),
            count: Some(r.measured),
            expected_count: None,
            passed: None,
        });
    }
    for b in &report.bands {
        rows.push(CsvRow {
            section: "bands",
            name: format!("cutoff {}", b.cutoff),
            k: Some(b.k),
            n: Some(b.n),
            m: None,
            predicted: None,
            measured: b.excursion,
            error: None,
            count: Some(b.gaps_confirmed),
            expected_count: Some(b.gaps_predicted),
            passed: None,
        });
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }
    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }
    fn frame(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="14">{title}</text>"#, self.x0, self.y0 - 8.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11">{xlabel}</text>"#,
            self.x0 + self.w / 2.0,
            self.y0 + self.h + 32.0
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="11">{ylabel}</text>"#, self.x0 - 45.0, self.y0 + 12.0);
        for (v, label) in [(self.xr.0, self.xr.0), (self.xr.1, self.xr.1)] {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="10">{label:.1}</text>"#,
                self.px(v) - 8.0,
                self.y0 + self.h + 14.0
            );
        }
        for (v, label) in [(self.yr.0, self.yr.0), (self.yr.1, self.yr.1)] {
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="10">{label:.3}</text>"#, self.x0 - 44.0, self.py(v) + 4.0);
        }
    }
}

fn range(values: impl Iterator<Item = f64>, pad: f64) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = (hi - lo).max(1e-3);
    (lo - pad * span, hi + pad * span)
}

fn render_svg(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="900" height="420" viewBox="0 0 900 420">"#);
    let _ = writeln!(out, r#"<text x="20" y="24" font-size="16">{}</text>"#, report.title);

    let clusters = Panel {
        x0: 80.0,
        y0: 70.0,
        w: 330.0,
        h: 280.0,
        xr: range(report.clusters.iter().map(|r| r.k as f64), 0.1),
        yr: range(report.clusters.iter().flat_map(|r| [r.measured_center, r.predicted_center]), 0.1),
    };
    clusters.frame(&mut out, "cluster centers vs k", "k", "k^-1 E");
    let mut levels: Vec<f64> = report.clusters.iter().map(|r| r.predicted_center).collect();
    levels.dedup();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    for l in levels {
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#999" stroke-dasharray="4 3"/>"##,
            clusters.x0,
            clusters.py(l),
            clusters.x0 + clusters.w,
            clusters.py(l)
        );
    }
    for r in &report.clusters {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#1f77b4"/>"##,
            clusters.px(r.k as f64),
            clusters.py(r.measured_center)
        );
    }

    let weyl = Panel {
        x0: 520.0,
        y0: 70.0,
        w: 330.0,
        h: 280.0,
        xr: range(report.weyl.iter().map(|r| r.k as f64), 0.1),
        yr: range(report.weyl.iter().map(|r| r.ratio).chain([1.0]), 0.2),
    };
    weyl.frame(&mut out, "Weyl ratio vs k", "k", "ratio");
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#d62728"/>"##,
        weyl.x0,
        weyl.py(1.0),
        weyl.x0 + weyl.w,
        weyl.py(1.0)
    );
    let mut pts: Vec<(f64, f64)> = report.weyl.iter().map(|r| (weyl.px(r.k as f64), weyl.py(r.ratio))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if !pts.is_empty() {
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#1f77b4"/>"##, path.join(" "));
        for (x, y) in &pts {
            let _ = writeln!(out, r##"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="#1f77b4"/>"##);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `report.{json,csv,svg}` (for the requested formats) into `dir`.
pub fn emit_report(report: &Report, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    formats
        .iter()
        .map(|&f| {
            let path = dir.join(format!("report.{}", f.extension()));
            std::fs::write(&path, render(report, f)?)?;
            Ok(path)
        })
        .collect()
}
