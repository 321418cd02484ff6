//! Joins a dataset with the bound evaluators into one CSV.
//!
//! Without an explicit `c` the exponent constant is fitted; without an
//! explicit `c_T` the largest `c_T` with `P[delta] >= c_T * shape(X)` on
//! every record is used.

use std::io::Write;

use sunitgap_core::bounds::{fit_effective_constant, gpf_empirical_check, kappa_p2, EmpiricalFit, PrimeStats};
use sunitgap_core::search::Dataset;
use sunitgap_core::Error;

use crate::dataset_io::{csv_io, exps_cell, DatasetFile};
use crate::{AppResult, TOOL_VERSION};

pub const COLUMNS: [&str; 12] = [
    "x",
    "a",
    "delta",
    "ratio",
    "kappa_needed",
    "fitted_c",
    "kappa_fit",
    "holds",
    "gpf",
    "gpf_shape_bound",
    "gpf_quotient",
    "binding",
];

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReportParams {
    pub c: Option<f64>,
    pub c_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub notes: Vec<(String, String)>,
    pub rows: Vec<[String; 12]>,
    pub fit: Option<EmpiricalFit>,
    pub c: Option<f64>,
    pub c_t: Option<f64>,
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn build_report(file: Option<&DatasetFile>, params: ReportParams) -> AppResult<Report> {
    let mut report = Report { notes: Vec::new(), rows: Vec::new(), fit: None, c: None, c_t: None };
    let Some(file) = file else {
        report.notes.push(("dataset".into(), "empty".into()));
        return Ok(report);
    };
    let ds: &Dataset = &file.dataset;
    for (k, v) in &file.config {
        report.notes.push((format!("config.{k}"), v.clone()));
    }
    if ds.records.is_empty() {
        report.notes.push(("dataset".into(), "no records".into()));
        return Ok(report);
    }

    let stats = PrimeStats::new(&ds.s).ok();
    let fit = match fit_effective_constant(ds) {
        Ok(f) => Some(f),
        Err(e @ (Error::Empty(_) | Error::Domain(_))) => {
            report.notes.push(("fit".into(), e.to_string()));
            None
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(f) = &fit {
        report.notes.push(("fit.binding_index".into(), f.binding.to_string()));
        report.notes.push(("fit.eligible".into(), f.eligible.to_string()));
        report.notes.push(("fit.excluded_s_units".into(), f.excluded_s_units.to_string()));
        report.notes.push(("fit.clamped".into(), f.clamped.to_string()));
    }
    let c = params.c.or(fit.map(|f| f.fitted_c));
    let kappa = match (c, &stats) {
        (Some(c), Some(st)) => Some(kappa_p2(st, c)?),
        _ => None,
    };
    report.notes.push((
        "c".into(),
        match (params.c, c) {
            (Some(_), _) => "given".into(),
            (None, Some(_)) => "fitted".into(),
            (None, None) => "unavailable".into(),
        },
    ));

    let unit = gpf_empirical_check(ds, 1.0)?;
    let c_t = params.c_t.or(unit.min_quotient.map(|(q, _)| q));
    report.notes.push((
        "c_T".into(),
        match (params.c_t, c_t) {
            (Some(_), _) => "given".into(),
            (None, Some(_)) => "fitted".into(),
            (None, None) => "unavailable".into(),
        },
    ));
    let mut gpf_cols = vec![None; ds.records.len()];
    if let Some(c_t) = c_t {
        for row in gpf_empirical_check(ds, c_t)?.rows {
            gpf_cols[row.index] = Some((row.bound, row.quotient));
        }
    }

    for (i, r) in ds.records.iter().enumerate() {
        let holds = match (r.ratio, kappa) {
            (Some(q), Some(k)) => Some(q <= 1.0 - k),
            _ => None,
        };
        let binding = fit.is_some_and(|f| f.binding == i);
        report.rows.push([
            r.x.to_string(),
            exps_cell(&r.a),
            r.delta.to_string(),
            cell(r.ratio),
            cell(r.one_minus_ratio()),
            cell(c),
            cell(kappa),
            cell(holds),
            cell(r.gpf.as_ref()),
            cell(gpf_cols[i].map(|g| g.0)),
            cell(gpf_cols[i].map(|g| g.1)),
            binding.to_string(),
        ]);
    }
    report.fit = fit;
    report.c = c;
    report.c_t = c_t;
    Ok(report)
}

pub fn write_report_csv<W: Write>(mut w: W, report: &Report) -> AppResult<()> {
    writeln!(w, "# sunitgap {TOOL_VERSION} report")?;
    for (k, v) in &report.notes {
        writeln!(w, "# {k} = {v}")?;
    }
    if let Some(c) = report.c {
        writeln!(w, "# c_value = {c}")?;
    }
    if let Some(c_t) = report.c_t {
        writeln!(w, "# c_T_value = {c_t}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(COLUMNS).map_err(csv_io)?;
    for row in &report.rows {
        csv.write_record(row).map_err(csv_io)?;
    }
    csv.flush()?;
    Ok(())
}
