//! Report files: CSV, a gnuplot script per report, and the metadata and
//! config echo. Files are written only after every report is computed, and
//! removed again if any write fails.

use std::fs;
use std::path::{Path, PathBuf};
use symheat::experiments::ExperimentReport;

use crate::error::CliError;

/// How a report is drawn: y against x, one curve per distinct value of `group`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: &'static str,
    pub y: &'static str,
    pub group: Vec<&'static str>,
    pub log_y: bool,
}

/// A finished report with its plot layout.
#[derive(Debug, Clone)]
pub struct Output {
    pub report: ExperimentReport,
    pub plot: PlotSpec,
}

/// Writes `<name>.csv`, `<name>.gnuplot` and `<name>.meta` for every output and
/// `<experiment>.config` with the effective config. Returns the paths written.
pub fn write_all(
    dir: &Path,
    experiment: &str,
    config_echo: &str,
    outputs: &[Output],
) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    for o in outputs {
        let name = &o.report.experiment;
        files.push((dir.join(format!("{name}.csv")), o.report.to_csv()));
        files.push((dir.join(format!("{name}.gnuplot")), gnuplot_script(&o.report, &o.plot)));
        files.push((dir.join(format!("{name}.meta")), o.report.metadata_text()));
    }
    files.push((dir.join(format!("{experiment}.config")), config_echo.to_string()));

    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (path, text) in &files {
        if let Err(e) = fs::write(path, text) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(CliError::Io(format!("cannot write {}: {e}", path.display())));
        }
        written.push(path.clone());
    }
    Ok(written)
}

/// A gnuplot script reading the CSV next to it.
pub fn gnuplot_script(report: &ExperimentReport, plot: &PlotSpec) -> String {
    let name = &report.experiment;
    let col = |c: &str| report.columns.iter().position(|x| x == c).map(|j| j + 1).expect("plot column in report");
    let (xc, yc) = (col(plot.x), col(plot.y));
    let gcols: Vec<usize> = plot.group.iter().map(|g| col(g)).collect();

    let mut groups: Vec<Vec<f64>> = Vec::new();
    for row in &report.rows {
        let key: Vec<f64> = gcols.iter().map(|&j| row[j - 1]).collect();
        if !groups.iter().any(|g| same(g, &key)) {
            groups.push(key);
        }
    }

    let mut s = String::new();
    s.push_str(&format!("# {name} on {}\n", report.space));
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{}'\nset ylabel '{}'\n", plot.x, plot.y));
    if plot.log_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set key outside right\n");
    let curves: Vec<String> = groups
        .iter()
        .map(|key| {
            let cond: Vec<String> = gcols.iter().zip(key).map(|(&j, &v)| matches(j, v)).collect();
            let title: Vec<String> = plot.group.iter().zip(key).map(|(g, v)| format!("{g}={v}")).collect();
            let using = if cond.is_empty() {
                format!("{xc}:{yc}")
            } else {
                format!("{xc}:(({}) ? ${yc} : 1/0)", cond.join(" && "))
            };
            format!("'{name}.csv' skip 1 using {using} with linespoints title '{}'", title.join(", "))
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    s
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

// Shortest round-trip decimal, so the comparison is exact against the CSV.
fn matches(col: usize, v: f64) -> String {
    if v.is_infinite() {
        format!("${col} > 1e308")
    } else {
        format!("${col} == {v:e}")
    }
}
