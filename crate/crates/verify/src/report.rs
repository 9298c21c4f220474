//! Experiment reports and their JSON/CSV serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, HarnessResult};

/// One measured quantity next to the bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub section: String,
    pub key: String,
    pub n: Option<u64>,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl Row {
    /// Builds a row with `ratio = value / bound`.
    pub fn new(section: &str, key: impl Into<String>, n: Option<u64>, value: f64, bound: f64) -> Self {
        Self {
            section: section.to_string(),
            key: key.into(),
            n,
            value,
            bound,
            ratio: value / bound,
        }
    }

    /// A row whose bound is 1, so the ratio is the value itself.
    pub fn plain(section: &str, key: impl Into<String>, n: Option<u64>, value: f64) -> Self {
        Self::new(section, key, n, value, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, Value>,
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub verdict: Verdict,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            parameters: BTreeMap::new(),
            rows: Vec::new(),
            summary: Summary::default(),
            verdict: Verdict::Pass,
        }
    }

    pub fn parameter(&mut self, name: &str, value: impl Into<Value>) {
        self.parameters.insert(name.to_string(), value.into());
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.summary.metrics.insert(name.into(), value);
    }

    /// Records a check; any failed check turns the verdict to fail.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        if !passed {
            self.verdict = Verdict::Fail;
        }
        self.summary.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.summary.checks.iter().find(|c| c.name == name)
    }

    /// Rows sorted by `(section, key, n)`, stable otherwise.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.section.as_str(), a.key.as_str(), a.n).cmp(&(b.section.as_str(), b.key.as_str(), b.n))
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(crate::error::invalid(format!("unknown format {other:?}"))),
        }
    }
}

/// Writes `report` in `format` to `out`.
pub fn write_report(report: &ExperimentReport, format: Format, out: &mut impl Write) -> HarnessResult<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => write_csv(report, out)?,
    }
    out.flush()?;
    Ok(())
}

fn write_csv(report: &ExperimentReport, out: &mut impl Write) -> HarnessResult<()> {
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
        w.write_record(["section", "key", "n", "value", "bound", "ratio"])?;
        for row in &report.rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    writeln!(out, "# experiment={}", report.experiment)?;
    for (k, v) in &report.parameters {
        writeln!(out, "# parameter {k}={v}")?;
    }
    for (k, v) in &report.summary.metrics {
        writeln!(out, "# metric {k}={}", Value::from(*v))?;
    }
    for c in &report.summary.checks {
        let status = if c.passed { "pass" } else { "fail" };
        writeln!(out, "# check {}={status} {}", c.name, c.detail)?;
    }
    writeln!(out, "# verdict={}", report.verdict)?;
    Ok(())
}

pub fn render(report: &ExperimentReport, format: Format) -> HarnessResult<String> {
    let mut buf = Vec::new();
    write_report(report, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("reports are UTF-8"))
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit(report: &ExperimentReport, format: Format, path: Option<&Path>) -> HarnessResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write_report(report, format, &mut w)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_report(report, format, &mut lock)
        }
    }
}

/// Parses the data rows of a CSV report, skipping the trailing comment lines.
pub fn parse_csv_rows(text: &str) -> HarnessResult<Vec<Row>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
