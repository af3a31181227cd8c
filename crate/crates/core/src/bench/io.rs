//! CSV ingestion and emission.
//!
//! Static files carry one row per subject with feature columns plus `time`
//! and `event`. Dynamic files are long format with `id` and `obs_time`
//! added; the outcome columns repeat on every row of a subject. Either may
//! carry an optional `censor_time` column holding the subject's potential
//! censoring time (`inf` for never censored).

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DynamicExample, StaticExample};
use crate::record::{DynamicRecord, StaticRecord};

const MISSING: &[&str] = &["", "NA", "N/A", "NaN", "nan", "null", "NULL", "?"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Number of missing cells in the file.
    pub missing: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Missing,
}

/// A static dataset before preprocessing.
#[derive(Debug, Clone)]
pub struct RawStatic {
    pub schema: Schema,
    pub rows: Vec<Vec<Cell>>,
    pub times: Vec<f64>,
    pub events: Vec<bool>,
    pub censor_times: Vec<Option<f64>>,
}

impl RawStatic {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct RawSubject {
    pub id: String,
    pub obs_times: Vec<f64>,
    pub rows: Vec<Vec<Cell>>,
    pub time: f64,
    pub event: bool,
    pub censor_time: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RawDynamic {
    pub schema: Schema,
    pub subjects: Vec<RawSubject>,
}

impl RawDynamic {
    pub fn times(&self) -> Vec<f64> {
        self.subjects.iter().map(|s| s.time).collect()
    }

    pub fn events(&self) -> Vec<bool> {
        self.subjects.iter().map(|s| s.event).collect()
    }
}

struct Table {
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
}

fn read_table(reader: impl Read) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let records = rdr.records().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Table { headers, records })
}

fn column(headers: &[String], name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::data(0, format!("missing required column `{name}`")))
}

fn is_missing(s: &str) -> bool {
    MISSING.contains(&s)
}

fn parse_time(s: &str, row: usize, name: &str) -> Result<f64> {
    let t: f64 = s
        .parse()
        .map_err(|_| Error::data(row, format!("`{name}` value {s:?} is not a number")))?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::data(row, format!("`{name}` must be positive and finite, got {s}")));
    }
    Ok(t)
}

fn parse_event(s: &str, row: usize) -> Result<bool> {
    match s {
        "0" | "0.0" => Ok(false),
        "1" | "1.0" => Ok(true),
        _ => Err(Error::data(row, format!("`event` must be 0 or 1, got {s:?}"))),
    }
}

fn parse_censor(s: &str, row: usize) -> Result<Option<f64>> {
    if is_missing(s) {
        return Ok(None);
    }
    let c: f64 = s
        .parse()
        .map_err(|_| Error::data(row, format!("`censor_time` value {s:?} is not a number")))?;
    if c.is_nan() || c <= 0.0 {
        return Err(Error::data(row, format!("`censor_time` must be positive, got {s}")));
    }
    Ok(Some(c))
}

/// Detects column kinds and converts raw strings into cells.
fn feature_cells(table: &Table, feature_idx: &[usize]) -> (Schema, Vec<Vec<Cell>>) {
    let mut columns = Vec::with_capacity(feature_idx.len());
    let mut numeric = Vec::with_capacity(feature_idx.len());
    for &j in feature_idx {
        let mut missing = 0;
        let mut is_numeric = true;
        for rec in &table.records {
            let s = &rec[j];
            if is_missing(s) {
                missing += 1;
            } else if !s.parse::<f64>().is_ok_and(f64::is_finite) {
                is_numeric = false;
            }
        }
        numeric.push(is_numeric);
        columns.push(Column {
            name: table.headers[j].clone(),
            kind: if is_numeric { ColumnKind::Numeric } else { ColumnKind::Categorical },
            missing,
        });
    }
    let rows = table
        .records
        .iter()
        .map(|rec| {
            feature_idx
                .iter()
                .zip(&numeric)
                .map(|(&j, &num)| {
                    let s = &rec[j];
                    if is_missing(s) {
                        Cell::Missing
                    } else if num {
                        Cell::Number(s.parse().expect("checked numeric"))
                    } else {
                        Cell::Text(s.to_owned())
                    }
                })
                .collect()
        })
        .collect();
    (Schema { columns }, rows)
}

pub fn read_static(reader: impl Read) -> Result<RawStatic> {
    let table = read_table(reader)?;
    let time = column(&table.headers, "time")?;
    let event = column(&table.headers, "event")?;
    let censor = table.headers.iter().position(|h| h == "censor_time");
    let features: Vec<usize> = (0..table.headers.len())
        .filter(|&j| j != time && j != event && Some(j) != censor)
        .collect();
    let mut times = Vec::with_capacity(table.records.len());
    let mut events = Vec::with_capacity(table.records.len());
    let mut censor_times = Vec::with_capacity(table.records.len());
    for (i, rec) in table.records.iter().enumerate() {
        let row = i + 1;
        let t = parse_time(&rec[time], row, "time")?;
        let e = parse_event(&rec[event], row)?;
        let c = censor.map(|j| parse_censor(&rec[j], row)).transpose()?.flatten();
        if let Some(c) = c {
            let consistent = if e { c >= t } else { c == t };
            if !consistent {
                return Err(Error::data(row, format!("`censor_time` {c} inconsistent with time {t}")));
            }
        }
        times.push(t);
        events.push(e);
        censor_times.push(c);
    }
    let (schema, rows) = feature_cells(&table, &features);
    Ok(RawStatic {
        schema,
        rows,
        times,
        events,
        censor_times,
    })
}

pub fn ingest_static(path: impl AsRef<Path>) -> Result<RawStatic> {
    read_static(std::fs::File::open(path)?)
}

/// Long-format ingestion. Subjects keep their first-appearance order and
/// their rows are sorted by `obs_time`; a history that does not start at 0
/// is shifted so that it does.
type TimedRow = (f64, Vec<Cell>);

pub fn read_dynamic(reader: impl Read) -> Result<RawDynamic> {
    let table = read_table(reader)?;
    let id = column(&table.headers, "id")?;
    let obs = column(&table.headers, "obs_time")?;
    let time = column(&table.headers, "time")?;
    let event = column(&table.headers, "event")?;
    let censor = table.headers.iter().position(|h| h == "censor_time");
    let features: Vec<usize> = (0..table.headers.len())
        .filter(|&j| ![id, obs, time, event].contains(&j) && Some(j) != censor)
        .collect();
    let (schema, cells) = feature_cells(&table, &features);

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut grouped: Vec<(RawSubject, Vec<TimedRow>)> = Vec::new();
    for (i, (rec, row_cells)) in table.records.iter().zip(cells).enumerate() {
        let row = i + 1;
        let s: f64 = rec[obs]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| Error::data(row, format!("`obs_time` must be a nonnegative number, got {:?}", &rec[obs])))?;
        let t = parse_time(&rec[time], row, "time")?;
        let e = parse_event(&rec[event], row)?;
        let c = censor.map(|j| parse_censor(&rec[j], row)).transpose()?.flatten();
        let key = rec[id].to_owned();
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            grouped.push((
                RawSubject {
                    id: key.clone(),
                    obs_times: Vec::new(),
                    rows: Vec::new(),
                    time: t,
                    event: e,
                    censor_time: c,
                },
                Vec::new(),
            ));
            grouped.len() - 1
        });
        let subject = &grouped[slot].0;
        if subject.time != t || subject.event != e || subject.censor_time != c {
            return Err(Error::data(row, format!("subject {key}: outcome columns differ between rows")));
        }
        grouped[slot].1.push((s, row_cells));
    }

    let mut subjects = Vec::with_capacity(grouped.len());
    for (mut subject, mut rows) in grouped {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::data(0, format!("subject {}: duplicate obs_time", subject.id)));
        }
        let start = rows[0].0;
        if start != 0.0 {
            log::warn!("subject {}: history starts at {start}; shifting to 0", subject.id);
        }
        for (s, cells) in rows {
            subject.obs_times.push(s - start);
            subject.rows.push(cells);
        }
        if let Some(&last) = subject.obs_times.last() {
            if last > subject.time {
                return Err(Error::data(0, format!("subject {}: observation after outcome time", subject.id)));
            }
        }
        subjects.push(subject);
    }
    Ok(RawDynamic { schema, subjects })
}

pub fn ingest_dynamic(path: impl AsRef<Path>) -> Result<RawDynamic> {
    read_dynamic(std::fs::File::open(path)?)
}

fn fmt_censor(c: Option<f64>) -> String {
    c.map_or_else(String::new, |c| c.to_string())
}

/// Static records as CSV with columns `x0..x{d-1}, time, event, censor_time`.
pub fn write_static(records: &[StaticRecord], writer: impl Write) -> Result<()> {
    let d = records.first().map_or(0, StaticRecord::dim);
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    header.extend(["time", "event", "censor_time"].map(String::from));
    w.write_record(&header)?;
    for r in records {
        let mut row: Vec<String> = r.covariates.iter().map(f64::to_string).collect();
        row.push(r.observed_time.to_string());
        row.push((r.event as u8).to_string());
        row.push(fmt_censor(r.censor_time));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Dynamic records in long format: `id, obs_time, x0.., time, event, censor_time`.
pub fn write_dynamic(records: &[DynamicRecord], writer: impl Write) -> Result<()> {
    let d = records.first().map_or(0, DynamicRecord::dim);
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string(), "obs_time".to_string()];
    header.extend((0..d).map(|j| format!("x{j}")));
    header.extend(["time", "event", "censor_time"].map(String::from));
    w.write_record(&header)?;
    for r in records {
        for o in &r.observations {
            let mut row = vec![r.subject_id.clone(), o.time.to_string()];
            row.extend(o.covariates.iter().map(f64::to_string));
            row.push(r.observed_time.to_string());
            row.push((r.event as u8).to_string());
            row.push(fmt_censor(r.censor_time));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_static_examples(examples: &[StaticExample], writer: impl Write) -> Result<()> {
    let d = examples.first().map_or(0, |e| e.covariates.len());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject".to_string(), "k".to_string()];
    header.extend((0..d).map(|j| format!("x{j}")));
    header.extend(["t_k", "label"].map(String::from));
    w.write_record(&header)?;
    for e in examples {
        let mut row = vec![e.subject_index.to_string(), e.boundary_index.to_string()];
        row.extend(e.covariates.iter().map(f64::to_string));
        row.push(e.boundary_time.to_string());
        row.push((e.label as u8).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dynamic_examples(examples: &[DynamicExample], writer: impl Write) -> Result<()> {
    let width = examples.first().map_or(0, |e| e.features.len());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject".to_string(), "origin".to_string(), "horizon".to_string()];
    header.extend((0..width).map(|j| format!("f{j}")));
    header.push("label".into());
    w.write_record(&header)?;
    for e in examples {
        let mut row = vec![e.subject_index.to_string(), e.origin_index.to_string(), e.horizon_index.to_string()];
        row.extend(e.features.iter().map(f64::to_string));
        row.push((e.label as u8).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
