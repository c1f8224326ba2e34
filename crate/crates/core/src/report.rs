// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Trajectory CSV files, run manifests, trajectory comparison and plot scripts.
//!
//! Columns are `t`, `rho_{m}_{n}_re`, `rho_{m}_{n}_im` for `m ≤ n` (1-based),
//! `purity`, `energy` (empty when undefined) and `trace_residual`. Numbers are
//! written with 17 significant digits.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::{IntegratorConfig, Status, Trajectory};
use crate::observables::ObservableRecord;
use crate::scenario::Method;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("no column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    BadValue { row: usize, column: String, value: String },
    #[error("time grids differ at t = {0}; enable interpolation to compare")]
    IncompatibleGrids(f64),
    #[error("time ranges do not overlap")]
    NoOverlap,
}

pub fn column_names(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for m in 1..=n {
        for k in m..=n {
            cols.push(format!("rho_{m}_{k}_re"));
            cols.push(format!("rho_{m}_{k}_im"));
        }
    }
    cols.extend(["purity", "energy", "trace_residual"].map(String::from));
    cols
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(out: W, n: usize, traj: &Trajectory<ObservableRecord>) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(column_names(n))?;
    for rec in &traj.samples {
        let mut row = vec![num(rec.time)];
        for m in 0..n {
            for k in m..n {
                row.push(num(rec.rho[(m, k)].re));
                row.push(num(rec.rho[(m, k)].im));
            }
        }
        row.push(num(rec.purity));
        row.push(rec.energy.map(num).unwrap_or_default());
        row.push(num(rec.trace_residual));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(n: usize, traj: &Trajectory<ObservableRecord>) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, n, traj).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

/// A parsed trajectory CSV; empty cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn read<R: Read>(input: R) -> Result<Self, ReportError> {
        let mut r = csv::Reader::from_reader(input);
        let columns: Vec<String> = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(cell, col)| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>().map(Some).map_err(|_| ReportError::BadValue {
                            row: i + 1,
                            column: col.clone(),
                            value: cell.to_string(),
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn index(&self, name: &str) -> Result<usize, ReportError> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| ReportError::MissingColumn(name.to_string()))
    }

    /// `(t, value)` pairs of a column, skipping empty cells.
    pub fn series(&self, name: &str) -> Result<Vec<(f64, f64)>, ReportError> {
        let t = self.index("t")?;
        let c = self.index(name)?;
        Ok(self.rows.iter().filter_map(|r| Some((r[t]?, r[c]?))).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Rms,
    MaxAbs,
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rms" => Ok(Metric::Rms),
            "max-abs" | "max" => Ok(Metric::MaxAbs),
            _ => Err(format!("unknown metric `{s}` (expected rms or max-abs)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub column: String,
    pub rms: f64,
    pub max_abs: f64,
    pub points: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub interpolated: bool,
}

impl Comparison {
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Rms => self.rms,
            Metric::MaxAbs => self.max_abs,
        }
    }
}

const TIME_MATCH: f64 = 1e-9;

/// Deviation of `b` from `a` on `a`'s samples inside the common time range.
pub fn compare_series(a: &[(f64, f64)], b: &[(f64, f64)], interpolate: bool) -> Result<(f64, f64, usize, f64, f64, bool), ReportError> {
    let (Some(a0), Some(b0)) = (a.first(), b.first()) else {
        return Err(ReportError::NoOverlap);
    };
    let lo = a0.0.max(b0.0);
    let hi = a.last().unwrap().0.min(b.last().unwrap().0);
    if lo > hi + TIME_MATCH {
        return Err(ReportError::NoOverlap);
    }
    let (mut sq, mut worst, mut count, mut used_interp) = (0.0, 0.0f64, 0usize, false);
    for &(t, va) in a.iter().filter(|p| p.0 >= lo - TIME_MATCH && p.0 <= hi + TIME_MATCH) {
        let j = b.partition_point(|p| p.0 < t - TIME_MATCH);
        let vb = if j < b.len() && (b[j].0 - t).abs() <= TIME_MATCH {
            b[j].1
        } else if interpolate && j > 0 && j < b.len() {
            used_interp = true;
            let (t0, v0) = b[j - 1];
            let (t1, v1) = b[j];
            v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        } else {
            return Err(ReportError::IncompatibleGrids(t));
        };
        let d = va - vb;
        sq += d * d;
        worst = worst.max(d.abs());
        count += 1;
    }
    if count == 0 {
        return Err(ReportError::NoOverlap);
    }
    Ok(((sq / count as f64).sqrt(), worst, count, lo, hi, used_interp))
}

pub fn compare(a: &Table, b: &Table, column: &str, interpolate: bool) -> Result<Comparison, ReportError> {
    let (rms, max_abs, points, t_start, t_end, interpolated) = compare_series(&a.series(column)?, &b.series(column)?, interpolate)?;
    Ok(Comparison { column: column.to_string(), rms, max_abs, points, t_start, t_end, interpolated })
}

/// Deviation between two in-memory trajectories on `ρ_{site,site}`.
pub fn compare_populations(
    a: &Trajectory<ObservableRecord>,
    b: &Trajectory<ObservableRecord>,
    site: usize,
    interpolate: bool,
) -> Result<Comparison, ReportError> {
    let sa: Vec<(f64, f64)> = a.samples.iter().map(|r| (r.time, r.population(site))).collect();
    let sb: Vec<(f64, f64)> = b.samples.iter().map(|r| (r.time, r.population(site))).collect();
    let (rms, max_abs, points, t_start, t_end, interpolated) = compare_series(&sa, &sb, interpolate)?;
    let column = format!("rho_{0}_{0}_re", site + 1);
    Ok(Comparison { column, rms, max_abs, points, t_start, t_end, interpolated })
}

/// Written next to every output CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub method: Method,
    pub integrator: IntegratorConfig,
    pub output: String,
    pub version: String,
    pub runtime_seconds: f64,
    #[serde(flatten)]
    pub status: Status,
    pub samples: usize,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pm_max_delta_rho11: Option<f64>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

pub fn manifest_path(csv_path: &str) -> String {
    match csv_path.strip_suffix(".csv") {
        Some(stem) => format!("{stem}.manifest.json"),
        None => format!("{csv_path}.manifest.json"),
    }
}

/// A gnuplot script plotting the site populations of `csv_path`.
pub fn gnuplot_script(csv_path: &str, n: usize) -> String {
    let names = column_names(n);
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str("set xlabel 't'\nset ylabel 'population'\n");
    let plots: Vec<String> = (1..=n)
        .map(|m| {
            let col = names.iter().position(|c| *c == format!("rho_{m}_{m}_re")).unwrap() + 1;
            format!("'{csv_path}' using 1:{col} with lines")
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
