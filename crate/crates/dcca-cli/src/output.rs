//! Table model and writers. Floats print with Rust's shortest round-trip
//! formatting in both CSV and JSON, so emitted values re-parse exactly.

use std::fs::File;
use std::io::{self, Write};

use crate::CliError;

/// A table cell. `Empty` renders as an empty CSV field / JSON null.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(i64),
    Float(f64),
    Empty,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Cell::Str(s) => serde_json::Value::String(s.clone()),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Float(v) => serde_json::Value::from(*v),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map(Cell::Float).unwrap_or(Cell::Empty)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: Vec<S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<(), CliError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.headers).map_err(write_err)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(|c| c.csv_field())).map_err(write_err)?;
        }
        wtr.flush().map_err(|e| write_err(csv::Error::from(e)))
    }

    pub fn write_json<W: Write>(&self, w: &mut W) -> Result<(), CliError> {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                self.headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.clone(), c.json_value()))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect();
        serde_json::to_writer_pretty(&mut *w, &objects)
            .map_err(|e| CliError::data(format!("cannot write output: {e}")))?;
        writeln!(w).map_err(|e| CliError::data(format!("cannot write output: {e}")))
    }
}

fn write_err(e: csv::Error) -> CliError {
    CliError::data(format!("cannot write output: {e}"))
}

pub enum OutputSink {
    Stdout(io::Stdout),
    File(File),
}

impl OutputSink {
    pub fn open(path: &str) -> Result<Self, CliError> {
        if path == "-" {
            Ok(OutputSink::Stdout(io::stdout()))
        } else {
            File::create(path)
                .map(OutputSink::File)
                .map_err(|e| CliError::data(format!("cannot create {path}: {e}")))
        }
    }
}

impl Write for OutputSink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            OutputSink::Stdout(s) => s.write(buf),
            OutputSink::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            OutputSink::Stdout(s) => s.flush(),
            OutputSink::File(f) => f.flush(),
        }
    }
}
