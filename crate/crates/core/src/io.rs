//! File formats: joint distributions (JSON or CSV), mechanisms (JSON) and the
//! tabular CSV/JSON reports written by the command line tool.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::numerics::format_sig;
use crate::probability::{JointDistribution, ValidateOptions};
use crate::watchdog::Mechanism;

/// Significant digits of every floating-point value in reports.
pub const SIG_DIGITS: usize = 12;

/// On-disk form of a joint distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub s_labels: Vec<String>,
    pub x_labels: Vec<String>,
    pub pmf: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl JointFile {
    pub fn from_joint(joint: &JointDistribution) -> Self {
        Self {
            s_labels: joint.s_labels().to_vec(),
            x_labels: joint.x_labels().to_vec(),
            pmf: joint.to_rows(),
            tol: None,
        }
    }

    /// Validates; a `tol` in the file overrides the one in `opts`.
    pub fn into_joint(self, opts: ValidateOptions) -> Result<JointDistribution> {
        let opts = ValidateOptions {
            tol: self.tol.unwrap_or(opts.tol),
            ..opts
        };
        JointDistribution::validate(&self.pmf, self.s_labels, self.x_labels, opts)
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_joint_json(text: &str, context: &str) -> Result<JointFile> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        context: context.to_string(),
        source,
    })
}

/// Parses the CSV layout: a header row of `X` labels after one corner cell,
/// then one row per `s` starting with its label.
pub fn parse_joint_csv(text: &str, context: &str) -> Result<JointFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |line: u64, message: String| Error::Parse {
        context: format!("{context}:{line}"),
        message,
    };
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(parse_err(1, "empty file".into())),
    };
    let x_labels: Vec<String> = header.iter().skip(1).map(String::from).collect();
    if x_labels.is_empty() {
        return Err(parse_err(1, "header needs a corner cell followed by X labels".into()));
    }
    let mut s_labels = Vec::new();
    let mut pmf = Vec::new();
    for record in records {
        let record = record.map_err(|e| parse_err(0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != x_labels.len() + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", x_labels.len() + 1, record.len()),
            ));
        }
        s_labels.push(record[0].to_string());
        let row = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("'{cell}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        pmf.push(row);
    }
    Ok(JointFile {
        s_labels,
        x_labels,
        pmf,
        tol: None,
    })
}

/// Reads a joint from `.csv` (by extension) or JSON.
pub fn read_joint(path: &Path, opts: ValidateOptions) -> Result<JointDistribution> {
    let text = read_to_string(path)?;
    let context = path.display().to_string();
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let file = if is_csv {
        parse_joint_csv(&text, &context)?
    } else {
        parse_joint_json(&text, &context)?
    };
    file.into_joint(opts)
}

pub fn joint_to_json(joint: &JointDistribution) -> String {
    serde_json::to_string_pretty(&JointFile::from_joint(joint)).expect("joint serializes")
}

pub fn mechanism_to_json(mech: &Mechanism) -> String {
    serde_json::to_string_pretty(mech).expect("mechanism serializes")
}

pub fn parse_mechanism_json(text: &str, context: &str) -> Result<Mechanism> {
    let mech: Mechanism = serde_json::from_str(text).map_err(|source| Error::Json {
        context: context.to_string(),
        source,
    })?;
    mech.check()?;
    Ok(mech)
}

pub fn read_mechanism(path: &Path) -> Result<Mechanism> {
    parse_mechanism_json(&read_to_string(path)?, &path.display().to_string())
}

/// A report cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl Cell {
    fn to_text(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v, SIG_DIGITS),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => {
                let rounded: f64 = format_sig(*v, SIG_DIGITS).parse().unwrap_or(*v);
                Value::from(rounded)
            }
            Cell::Num(v) => Value::String(format_sig(*v, SIG_DIGITS)),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// A named table with fixed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_text)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Output format of reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Renders tables: CSV blocks separated by a blank line, or JSON (a bare array
/// for a single table, otherwise an object keyed by table name).
pub fn render(tables: &[Table], format: Format) -> String {
    match format {
        Format::Csv => tables.iter().map(Table::to_csv).collect::<Vec<_>>().join("\n"),
        Format::Json => {
            let value = if tables.len() == 1 {
                tables[0].to_json_value()
            } else {
                Value::Object(
                    tables
                        .iter()
                        .map(|t| (t.name.clone(), t.to_json_value()))
                        .collect(),
                )
            };
            let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
            s.push('\n');
            s
        }
    }
}

/// Writes `contents` to `path`, or stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
