//! JSON-lines dataset files and CSV summaries.
//!
//! Line 1 is a header object with the tool version, the effective config
//! and the dataset metadata. Every further line is one record with exactly
//! the keys `x, a, n_value, delta, spart_value, cofactor, gpf, ratio`.
//! Integers are decimal strings; `ratio` is a JSON number printed in
//! shortest round-trip form, so a file re-parses to the identical dataset.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use sunitgap_core::arith::{s_part, ExponentVector, PrimeSet};
use sunitgap_core::search::{Dataset, Origin, SearchWindow, SkipCounts, SolutionRecord};

use crate::{AppError, AppResult, TOOL_VERSION};

pub const FORMAT: &str = "sunitgap-dataset/1";

/// A dataset plus the config it was produced under.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub config: BTreeMap<String, String>,
    pub dataset: Dataset,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    tool: String,
    version: String,
    config: BTreeMap<String, String>,
    s: Vec<u64>,
    t: Vec<u64>,
    origin: OriginRow,
    skipped_zero_delta: u64,
    skipped_not_coprime: u64,
    records: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum OriginRow {
    Window { x_max: u64, exp_max: Vec<u32>, require_coprime: bool },
    HenselFamily { p: u64, k_min: u32, k_max: u32 },
    Imported,
}

/// One record line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordRow {
    pub x: String,
    pub a: Vec<u32>,
    pub n_value: String,
    pub delta: String,
    pub spart_value: String,
    pub cofactor: String,
    pub gpf: Option<String>,
    pub ratio: Option<f64>,
}

impl RecordRow {
    pub fn from_record(r: &SolutionRecord) -> Self {
        RecordRow {
            x: r.x.to_string(),
            a: r.a.exps().to_vec(),
            n_value: r.n_value.to_string(),
            delta: r.delta.to_string(),
            spart_value: r.spart_value().to_string(),
            cofactor: r.spart.cofactor.to_string(),
            gpf: r.gpf.as_ref().map(BigUint::to_string),
            ratio: r.ratio,
        }
    }

    /// Rebuilds the record, checking every stored quantity against a
    /// recomputation from `(x, a)`.
    pub fn to_record(&self, s: &PrimeSet, t: &PrimeSet) -> Result<SolutionRecord, String> {
        fn num<T: std::str::FromStr>(name: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("{name}: not an integer: '{v}'"))
        }
        let x: BigUint = num("x", &self.x)?;
        let a = ExponentVector::new(t.clone(), self.a.clone()).map_err(|e| e.to_string())?;
        let n_value: BigUint = num("n_value", &self.n_value)?;
        let delta: BigInt = num("delta", &self.delta)?;
        if n_value != a.value() {
            return Err("n_value does not match a".into());
        }
        if delta != BigInt::from(&x * &x) - BigInt::from(n_value.clone()) {
            return Err("delta does not match x^2 - n_value".into());
        }
        let spart = s_part(&delta, s).map_err(|e| e.to_string())?;
        if spart.spart_value() != num::<BigUint>("spart_value", &self.spart_value)?
            || spart.cofactor != num::<BigUint>("cofactor", &self.cofactor)?
        {
            return Err("spart_value or cofactor inconsistent with delta".into());
        }
        let gpf = match &self.gpf {
            Some(g) => Some(num::<BigUint>("gpf", g)?),
            None => None,
        };
        if let Some(r) = self.ratio {
            if !r.is_finite() {
                return Err("ratio must be finite".into());
            }
        }
        Ok(SolutionRecord { x, a, n_value, delta, spart, gpf, ratio: self.ratio })
    }
}

pub fn write_dataset<W: Write>(mut w: W, file: &DatasetFile) -> AppResult<()> {
    let ds = &file.dataset;
    let origin = match &ds.origin {
        Origin::Window(win) => OriginRow::Window {
            x_max: win.x_max,
            exp_max: win.exp_max.clone(),
            require_coprime: win.require_coprime,
        },
        Origin::HenselFamily { p, k_min, k_max } => OriginRow::HenselFamily { p: *p, k_min: *k_min, k_max: *k_max },
        Origin::Imported => OriginRow::Imported,
    };
    let header = Header {
        format: FORMAT.into(),
        tool: "sunitgap".into(),
        version: TOOL_VERSION.into(),
        config: file.config.clone(),
        s: ds.s.primes().to_vec(),
        t: ds.t.primes().to_vec(),
        origin,
        skipped_zero_delta: ds.skipped.zero_delta,
        skipped_not_coprime: ds.skipped.not_coprime,
        records: ds.records.len(),
    };
    serde_json::to_writer(&mut w, &header).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    for r in &ds.records {
        serde_json::to_writer(&mut w, &RecordRow::from_record(r)).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// `Ok(None)` for a file with no content at all.
pub fn read_dataset<R: BufRead>(r: R, source_name: &str) -> AppResult<Option<DatasetFile>> {
    let mut header: Option<(Header, PrimeSet, PrimeSet)> = None;
    let mut records = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let err = |msg: String| AppError::parse(source_name, lineno, msg);
        if line.trim().is_empty() {
            continue;
        }
        match &header {
            None => {
                let h: Header = serde_json::from_str(&line).map_err(|e| err(format!("bad header: {e}")))?;
                if h.format != FORMAT {
                    return Err(err(format!("unsupported format '{}'", h.format)));
                }
                let s = PrimeSet::new(h.s.clone()).map_err(|e| err(e.to_string()))?;
                let t = PrimeSet::new(h.t.clone()).map_err(|e| err(e.to_string()))?;
                header = Some((h, s, t));
            }
            Some((_, s, t)) => {
                let row: RecordRow = serde_json::from_str(&line).map_err(|e| err(format!("bad record: {e}")))?;
                records.push(row.to_record(s, t).map_err(err)?);
            }
        }
    }
    let Some((h, s, t)) = header else {
        return Ok(None);
    };
    if h.records != records.len() {
        return Err(AppError::parse(
            source_name,
            records.len() + 1,
            format!("header announces {} records, found {}", h.records, records.len()),
        ));
    }
    let origin = match h.origin {
        OriginRow::Window { x_max, exp_max, require_coprime } => {
            let mut w = SearchWindow::new(x_max, exp_max);
            w.require_coprime = require_coprime;
            Origin::Window(w)
        }
        OriginRow::HenselFamily { p, k_min, k_max } => Origin::HenselFamily { p, k_min, k_max },
        OriginRow::Imported => Origin::Imported,
    };
    let skipped = SkipCounts { zero_delta: h.skipped_zero_delta, not_coprime: h.skipped_not_coprime };
    Ok(Some(DatasetFile { config: h.config, dataset: Dataset::new(s, t, origin, records, skipped) }))
}

pub fn load_dataset(path: &Path) -> AppResult<Option<DatasetFile>> {
    let f = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(f), &path.display().to_string())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> AppResult<()>) -> AppResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn exps(a: &ExponentVector) -> String {
    a.exps().iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `key,value` rows under `#` comment lines echoing version and config.
pub fn write_summary_csv<W: Write>(mut w: W, file: &DatasetFile) -> AppResult<()> {
    writeln!(w, "# sunitgap {TOOL_VERSION}")?;
    for (k, v) in &file.config {
        writeln!(w, "# {k} = {v}")?;
    }
    let ds = &file.dataset;
    let sum = ds.summary();
    let argmax = sum.argmax.map(|i| &ds.records[i]);
    let mut csv = csv::Writer::from_writer(w);
    let rows: [(&str, String); 11] = [
        ("records", sum.records.to_string()),
        ("skipped_zero_delta", sum.skipped.zero_delta.to_string()),
        ("skipped_not_coprime", sum.skipped.not_coprime.to_string()),
        ("max_ratio", opt(sum.max_ratio)),
        ("argmax_x", opt(argmax.map(|r| &r.x))),
        ("argmax_a", argmax.map(|r| exps(&r.a)).unwrap_or_default()),
        ("argmax_delta", opt(argmax.map(|r| &r.delta))),
        ("min_one_minus_ratio", opt(sum.min_one_minus_ratio)),
        ("min_gpf", opt(sum.min_gpf)),
        ("gpf_unknown", sum.gpf_unknown.to_string()),
        ("s_unit_records", sum.s_unit_records.to_string()),
    ];
    csv.write_record(["key", "value"]).map_err(csv_io)?;
    for (k, v) in rows {
        csv.write_record([k, v.as_str()]).map_err(csv_io)?;
    }
    csv.flush()?;
    Ok(())
}

pub(crate) fn csv_io(e: csv::Error) -> AppError {
    AppError::Io(std::io::Error::other(e))
}

pub(crate) fn exps_cell(a: &ExponentVector) -> String {
    exps(a)
}
