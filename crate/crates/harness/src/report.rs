use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 8] = [
    "experiment",
    "input",
    "quantity",
    "value",
    "method",
    "tolerance",
    "verdict",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub input: String,
    pub quantity: String,
    /// `None` when the quantity is infinite or was not obtained.
    pub value: Option<f64>,
    pub method: String,
    pub tolerance: f64,
    pub verdict: String,
    pub wall_ms: u64,
    /// Refinement history, `(resolution, value)`.
    pub trace: Vec<(f64, f64)>,
    /// Intermediate quantities.
    pub extra: BTreeMap<String, f64>,
}

/// Two-column data for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub name: String,
    pub columns: (String, String),
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMirror {
    pub experiment: String,
    pub command: String,
    pub exit_code: i32,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub trace: PathBuf,
    pub plots: Vec<PathBuf>,
}

fn fmt_value(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.as_str(),
            r.input.as_str(),
            r.quantity.as_str(),
            &fmt_value(r.value),
            r.method.as_str(),
            &r.tolerance.to_string(),
            r.verdict.as_str(),
            &r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

/// Writes `<stem>.csv`, `<stem>.trace.json` and one `<stem>.<plot>.dat`
/// per plot into `dir`, creating it if needed.
pub fn emit_reports(
    mirror: &TraceMirror,
    plots: &[PlotData],
    dir: &Path,
    stem: &str,
) -> Result<ReportPaths> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;

    let csv_path = dir.join(format!("{stem}.csv"));
    let mut buf = Vec::new();
    write_csv(&mirror.rows, &mut buf)
        .map_err(|e| HarnessError::io(&csv_path, std::io::Error::other(e)))?;
    write_file(&csv_path, &buf)?;

    let trace_path = dir.join(format!("{stem}.trace.json"));
    let json = serde_json::to_vec_pretty(mirror).expect("report rows serialise");
    write_file(&trace_path, &json)?;

    let mut plot_paths = Vec::new();
    for p in plots {
        let path = dir.join(format!("{stem}.{}.dat", p.name));
        let mut s = format!("# {} {}\n", p.columns.0, p.columns.1);
        for (x, y) in &p.points {
            s.push_str(&format!("{x} {y}\n"));
        }
        write_file(&path, s.as_bytes())?;
        plot_paths.push(path);
    }
    Ok(ReportPaths {
        csv: csv_path,
        trace: trace_path,
        plots: plot_paths,
    })
}

pub fn read_trace(path: &Path) -> Result<TraceMirror> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| HarnessError::config(path.display().to_string(), e.to_string()))
}
