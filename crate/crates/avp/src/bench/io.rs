//! Results files and the dataset loader.
//!
//! CSV columns, in order:
//! `method,rep,seed,n,p,s,sigma,rho,r,loss,support_size,oracle_size,wall_ms,selected`.
//! JSON is an array of objects with the same keys. Floats are written with
//! 17 significant digits so values round-trip exactly; `selected` is an
//! integer (1-based path index) or a float (tuning-parameter value);
//! `oracle_size` is empty/null when the oracle set does not exist.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{ExperimentRecord, Selected};
use crate::error::{Error, Result};
use crate::model::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Validation(format!(
                "format must be csv or json, got '{other}'"
            ))),
        }
    }
}

pub(crate) const CSV_HEADER: &str =
    "method,rep,seed,n,p,s,sigma,rho,r,loss,support_size,oracle_size,wall_ms,selected";

/// 17 significant digits, enough for an exact f64 round trip.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn selected_field(sel: &Selected) -> String {
    match sel {
        // Indices are 1-based in every report.
        Selected::Index(i) => (i + 1).to_string(),
        Selected::Param(x) => fmt_f64(*x),
    }
}

fn csv_row(rec: &ExperimentRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        rec.method,
        rec.rep,
        rec.seed,
        rec.n,
        rec.p,
        rec.s,
        fmt_f64(rec.sigma),
        fmt_f64(rec.rho),
        rec.r,
        fmt_f64(rec.loss),
        rec.support_size,
        rec.oracle_size.map(|v| v.to_string()).unwrap_or_default(),
        fmt_f64(rec.wall_ms),
        selected_field(&rec.selected),
    )
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn json_object(rec: &ExperimentRecord) -> String {
    format!(
        concat!(
            "{{\"method\":\"{}\",\"rep\":{},\"seed\":{},\"n\":{},\"p\":{},\"s\":{},",
            "\"sigma\":{},\"rho\":{},\"r\":{},\"loss\":{},\"support_size\":{},",
            "\"oracle_size\":{},\"wall_ms\":{},\"selected\":{}}}"
        ),
        json_escape(&rec.method),
        rec.rep,
        rec.seed,
        rec.n,
        rec.p,
        rec.s,
        fmt_f64(rec.sigma),
        fmt_f64(rec.rho),
        rec.r,
        fmt_f64(rec.loss),
        rec.support_size,
        rec.oracle_size
            .map(|v| v.to_string())
            .unwrap_or_else(|| "null".to_string()),
        fmt_f64(rec.wall_ms),
        selected_field(&rec.selected),
    )
}

/// Renders records in the requested format.
pub fn write_results_string(records: &[ExperimentRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for rec in records {
                out.push_str(&csv_row(rec));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut out = String::from("[");
            for (i, rec) in records.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&json_object(rec));
            }
            out.push_str("\n]\n");
            out
        }
    }
}

/// Writes records to `path_out`.
pub fn write_results(
    records: &[ExperimentRecord],
    path_out: &Path,
    format: OutputFormat,
) -> Result<()> {
    fs::write(path_out, write_results_string(records, format))?;
    Ok(())
}

fn parse_selected(raw: &str) -> Result<Selected> {
    if raw.contains('.') || raw.contains('e') || raw.contains('E') {
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Parse(format!("selected field '{raw}'")))?;
        Ok(Selected::Param(v))
    } else {
        let v: usize = raw
            .parse()
            .map_err(|_| Error::Parse(format!("selected field '{raw}'")))?;
        if v == 0 {
            return Err(Error::Parse(
                "selected index 0 (indices are 1-based)".into(),
            ));
        }
        Ok(Selected::Index(v - 1))
    }
}

/// Parses a CSV results file produced by [`write_results`].
pub fn read_records_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty results file".into()))?;
    if header.trim() != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header '{header}'")));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(Error::Parse(format!(
                "line {}: expected 14 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: field {what}", lineno + 2));
        records.push(ExperimentRecord {
            method: fields[0].to_string(),
            rep: fields[1].parse().map_err(|_| bad("rep"))?,
            seed: fields[2].parse().map_err(|_| bad("seed"))?,
            n: fields[3].parse().map_err(|_| bad("n"))?,
            p: fields[4].parse().map_err(|_| bad("p"))?,
            s: fields[5].parse().map_err(|_| bad("s"))?,
            sigma: fields[6].parse().map_err(|_| bad("sigma"))?,
            rho: fields[7].parse().map_err(|_| bad("rho"))?,
            r: fields[8].parse().map_err(|_| bad("r"))?,
            loss: fields[9].parse().map_err(|_| bad("loss"))?,
            support_size: fields[10].parse().map_err(|_| bad("support_size"))?,
            oracle_size: if fields[11].is_empty() {
                None
            } else {
                Some(fields[11].parse().map_err(|_| bad("oracle_size"))?)
            },
            wall_ms: fields[12].parse().map_err(|_| bad("wall_ms"))?,
            selected: parse_selected(fields[13])?,
        });
    }
    Ok(records)
}

/// Parses a JSON results file produced by [`write_results`].
pub fn read_records_json(text: &str) -> Result<Vec<ExperimentRecord>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("JSON: {e}")))?;
    let array = value
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of records".into()))?;
    let mut records = Vec::with_capacity(array.len());
    for (i, obj) in array.iter().enumerate() {
        let obj = obj
            .as_object()
            .ok_or_else(|| Error::Parse(format!("record {i} is not an object")))?;
        let bad = |what: &str| Error::Parse(format!("record {i}: field {what}"));
        let get_u = |key: &str| -> Result<u64> {
            obj.get(key)
                .and_then(|v| v.as_u64())
                .ok_or_else(|| bad(key))
        };
        let get_f = |key: &str| -> Result<f64> {
            obj.get(key)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| bad(key))
        };
        let selected = match obj.get("selected").ok_or_else(|| bad("selected"))? {
            v if v.is_u64() => {
                let idx = v.as_u64().unwrap();
                if idx == 0 {
                    return Err(Error::Parse("selected index 0 (1-based)".into()));
                }
                Selected::Index(idx as usize - 1)
            }
            v if v.is_f64() => Selected::Param(v.as_f64().unwrap()),
            _ => return Err(bad("selected")),
        };
        records.push(ExperimentRecord {
            method: obj
                .get("method")
                .and_then(|v| v.as_str())
                .ok_or_else(|| bad("method"))?
                .to_string(),
            rep: get_u("rep")? as usize,
            seed: get_u("seed")?,
            n: get_u("n")? as usize,
            p: get_u("p")? as usize,
            s: get_u("s")? as usize,
            sigma: get_f("sigma")?,
            rho: get_f("rho")?,
            r: get_u("r")? as usize,
            loss: get_f("loss")?,
            support_size: get_u("support_size")? as usize,
            oracle_size: match obj.get("oracle_size") {
                Some(v) if v.is_null() => None,
                Some(v) => Some(v.as_u64().ok_or_else(|| bad("oracle_size"))? as usize),
                None => return Err(bad("oracle_size")),
            },
            wall_ms: get_f("wall_ms")?,
            selected,
        });
    }
    Ok(records)
}

/// Reads a results file, sniffing the format from its first non-space byte.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let text = fs::read_to_string(path)?;
    match text.trim_start().chars().next() {
        Some('[') => read_records_json(&text),
        Some(_) => read_records_csv(&text),
        None => Err(Error::Parse("empty results file".into())),
    }
}

/// Per-method loss quartiles and median wall time.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: String,
    pub count: usize,
    pub loss_q1: f64,
    pub loss_median: f64,
    pub loss_q3: f64,
    pub wall_ms_median: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Collapses records into per-method summaries, sorted by method name.
pub fn summarize_records(records: &[ExperimentRecord]) -> Vec<MethodSummary> {
    let mut by_method: std::collections::BTreeMap<&str, Vec<&ExperimentRecord>> =
        std::collections::BTreeMap::new();
    for rec in records {
        by_method.entry(&rec.method).or_default().push(rec);
    }
    by_method
        .into_iter()
        .map(|(method, recs)| {
            let mut losses: Vec<f64> = recs.iter().map(|r| r.loss).collect();
            losses.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut walls: Vec<f64> = recs.iter().map(|r| r.wall_ms).collect();
            walls.sort_by(|a, b| a.partial_cmp(b).unwrap());
            MethodSummary {
                method: method.to_string(),
                count: recs.len(),
                loss_q1: quantile(&losses, 0.25),
                loss_median: quantile(&losses, 0.5),
                loss_q3: quantile(&losses, 0.75),
                wall_ms_median: quantile(&walls, 0.5),
            }
        })
        .collect()
}

/// Loads `(y, x)` from a CSV file: one row per sample, first column the
/// response, remaining columns the raw design. A single header line is
/// skipped when the first field is not numeric. Columns are standardized on
/// load; no ground truth is attached.
pub fn load_dataset_csv(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if values.len() < 2 {
                    return Err(Error::Parse(format!(
                        "line {}: need a response plus at least one feature",
                        lineno + 1
                    )));
                }
                if let Some(first) = rows.first() {
                    if values.len() != first.len() {
                        return Err(Error::Parse(format!(
                            "line {}: expected {} fields, got {}",
                            lineno + 1,
                            first.len(),
                            values.len()
                        )));
                    }
                }
                rows.push(values);
            }
            Err(_) if rows.is_empty() && lineno == 0 => continue, // header
            Err(_) => {
                return Err(Error::Parse(format!(
                    "line {}: non-numeric field",
                    lineno + 1
                )));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    let n = rows.len();
    let p = rows[0].len() - 1;
    let y = DVector::from_fn(n, |i, _| rows[i][0]);
    let x_raw = DMatrix::from_fn(n, p, |i, j| rows[i][j + 1]);
    Dataset::new(x_raw, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> ExperimentRecord {
        ExperimentRecord {
            method: "lassoAVp".into(),
            rep: 3,
            seed: 42,
            n: 200,
            p: 100,
            s: 10,
            sigma: 1.0,
            rho: 0.5,
            r: 10,
            loss: 12.345678901234567,
            support_size: 11,
            oracle_size: Some(12),
            wall_ms: 3.25,
            selected: Selected::Index(4),
        }
    }

    #[test]
    fn empty_record_list_yields_header_only_csv() {
        let out = write_results_string(&[], OutputFormat::Csv);
        assert_eq!(out, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_row_count_is_records_plus_header() {
        let recs = vec![sample_record(), sample_record()];
        let out = write_results_string(&recs, OutputFormat::Csv);
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn json_round_trip_preserves_fields() {
        let mut rec = sample_record();
        rec.oracle_size = None;
        rec.selected = Selected::Param(0.1234567890123456);
        let text = write_results_string(&[rec.clone()], OutputFormat::Json);
        let back = read_records_json(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0], rec);
    }

    #[test]
    fn csv_round_trip_preserves_fields() {
        let recs = vec![
            sample_record(),
            ExperimentRecord {
                selected: Selected::Param(7.0),
                oracle_size: None,
                ..sample_record()
            },
        ];
        let text = write_results_string(&recs, OutputFormat::Csv);
        let back = read_records_csv(&text).unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn selected_index_is_one_based_in_files() {
        let text = write_results_string(&[sample_record()], OutputFormat::Csv);
        let row = text.lines().nth(1).unwrap();
        assert!(row.ends_with(",5"), "{row}");
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn summarize_groups_by_method() {
        let mut a = sample_record();
        a.loss = 1.0;
        let mut b = sample_record();
        b.loss = 3.0;
        let mut c = sample_record();
        c.method = "other".into();
        c.loss = 9.0;
        let summaries = summarize_records(&[a, b, c]);
        assert_eq!(summaries.len(), 2);
        assert_eq!(summaries[0].method, "lassoAVp");
        assert_eq!(summaries[0].count, 2);
        assert_eq!(summaries[0].loss_median, 2.0);
        assert_eq!(summaries[1].method, "other");
    }

    #[test]
    fn dataset_csv_loader_handles_header_and_standardizes() {
        let dir = std::env::temp_dir().join("avp_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        std::fs::write(
            &path,
            "y,x1,x2\n1.0,2.0,0.5\n-1.0,0.0,1.5\n0.5,1.0,-0.5\n2.0,3.0,0.1\n",
        )
        .unwrap();
        let data = load_dataset_csv(&path).unwrap();
        assert_eq!(data.n(), 4);
        assert_eq!(data.p(), 2);
        let target = (data.n() as f64).sqrt();
        for j in 0..data.p() {
            assert!((data.x().column(j).norm() - target).abs() < 1e-10);
        }
        assert!(data.truth().is_none());
    }
}
