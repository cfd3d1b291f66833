//! CSV, JSON and gnuplot emission.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, ExperimentKind};
use super::experiment::ResultTable;
use crate::error::{KgError, Result};

pub const CSV_HEADER: [&str; 11] = [
    "experiment",
    "c",
    "tau",
    "h",
    "K",
    "T",
    "error_l2",
    "slope",
    "quantity",
    "value",
    "runtime_s",
];

pub const CSV_FILE: &str = "results.csv";
pub const JSON_FILE: &str = "results.json";
pub const PLOT_FILE: &str = "plot.gp";

#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plot: PathBuf,
}

/// 17 significant digits; empty for absent values.
pub(crate) fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

pub fn csv_string(table: &ResultTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.experiment.clone(),
            num(r.c),
            num(r.tau),
            num(Some(r.h)),
            r.num_modes.to_string(),
            num(Some(r.t_final)),
            num(r.error_l2),
            num(r.slope),
            r.quantity.clone(),
            num(r.value),
            num(r.runtime_s),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| KgError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

fn csv_err(e: csv::Error) -> KgError {
    KgError::Config(format!("csv: {e}"))
}

/// Gnuplot script plotting each series on log-log axes, with a reference
/// power line anchored at the first point.
pub fn plot_script(table: &ResultTable, cfg: &ExperimentConfig) -> String {
    let tau_axis = cfg.experiment == ExperimentKind::TauConvergence;
    let (xcol, xlabel) = if tau_axis { (3, "tau") } else { (2, "c") };
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal dumb\n");
    s.push_str("set logscale xy\n");
    s.push_str(&format!(
        "set xlabel '{xlabel}'\nset ylabel 'error'\nset key outside\n"
    ));
    let mut plots = Vec::new();
    for (i, q) in table.quantities().iter().enumerate() {
        let series = table.series(q);
        let Some(first) = series.first() else {
            continue;
        };
        let x0 = if tau_axis { first.tau } else { first.c };
        let y0 = first.error_l2.or(first.value);
        plots.push(format!(
            "'{CSV_FILE}' using (strcol(9) eq '{q}' ? ${xcol} : 1/0):(($7 > 0) ? $7 : $10) with linespoints title '{q}'"
        ));
        if let (Some(x0), Some(y0), Some(slope)) = (x0, y0, first.slope) {
            let sign = if tau_axis { 1.0 } else { -1.0 };
            let exponent = (sign * slope).round();
            s.push_str(&format!(
                "f{i}(x) = {y0:.16e} * (x / {x0:.16e})**({exponent})\n"
            ));
            plots.push(format!(
                "f{i}(x) with lines dashtype 2 title 'slope {}'",
                exponent.abs()
            ));
        }
    }
    if !plots.is_empty() {
        s.push_str("plot ");
        s.push_str(&plots.join(", \\\n     "));
        s.push('\n');
    }
    s
}

pub fn emit_outputs(table: &ResultTable, cfg: &ExperimentConfig) -> Result<OutputFiles> {
    emit_outputs_to(table, cfg, &cfg.output_dir)
}

pub fn emit_outputs_to(
    table: &ResultTable,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<OutputFiles> {
    if table.rows.is_empty() {
        return Err(KgError::Config("result table is empty".into()));
    }
    fs::create_dir_all(dir)?;
    let files = OutputFiles {
        csv: dir.join(CSV_FILE),
        json: dir.join(JSON_FILE),
        plot: dir.join(PLOT_FILE),
    };
    fs::write(&files.csv, csv_string(table)?)?;
    fs::write(&files.json, serde_json::to_string_pretty(table)?)?;
    fs::write(&files.plot, plot_script(table, cfg))?;
    Ok(files)
}

pub fn read_json(path: &Path) -> Result<ResultTable> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
