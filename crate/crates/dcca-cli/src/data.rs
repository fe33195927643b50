//! Input parsing: numeric series CSVs and dated price files.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use crate::CliError;

fn open_input(path: &str) -> Result<Box<dyn Read>, CliError> {
    if path == "-" {
        Ok(Box::new(io::stdin()))
    } else {
        File::open(path)
            .map(|f| Box::new(f) as Box<dyn Read>)
            .map_err(|e| CliError::data(format!("cannot open {path}: {e}")))
    }
}

/// Reads the first two numeric columns of a CSV with a mandatory header.
/// Parse failures report the 1-based data line and column.
pub fn read_two_columns(path: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(open_input(path)?);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::data(format!("{path}: cannot read header: {e}")))?
        .clone();
    if headers.len() < 2 {
        return Err(CliError::data(format!(
            "{path}: expected at least two columns, found {}",
            headers.len()
        )));
    }
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2; // header is line 1
        let record = record.map_err(|e| CliError::data(format!("{path}: line {line}: {e}")))?;
        let parse = |col: usize| -> Result<f64, CliError> {
            record
                .get(col)
                .ok_or_else(|| CliError::data(format!("{path}: line {line}: missing column {}", col + 1)))?
                .trim()
                .parse::<f64>()
                .map_err(|_| {
                    CliError::data(format!(
                        "{path}: line {line}, column {}: not a number: '{}'",
                        col + 1,
                        record.get(col).unwrap_or("")
                    ))
                })
        };
        x1.push(parse(0)?);
        x2.push(parse(1)?);
    }
    if x1.is_empty() {
        return Err(CliError::data(format!("{path}: no data rows")));
    }
    Ok((x1, x2))
}

/// One asset: strictly increasing ISO dates and positive prices.
#[derive(Debug, Clone)]
pub struct Asset {
    pub name: String,
    pub dates: Vec<String>,
    pub prices: Vec<f64>,
}

fn iso_date_ok(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b.iter().enumerate().all(|(i, c)| match i {
            4 | 7 => *c == b'-',
            _ => c.is_ascii_digit(),
        })
}

pub fn load_asset(path: &str) -> Result<Asset, CliError> {
    let name = Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| path.to_string());
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(open_input(path)?);
    let mut dates: Vec<String> = Vec::new();
    let mut prices = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| CliError::data(format!("{path}: line {line}: {e}")))?;
        let date = record
            .get(0)
            .ok_or_else(|| CliError::data(format!("{path}: line {line}: missing date")))?
            .trim()
            .to_string();
        if !iso_date_ok(&date) {
            return Err(CliError::data(format!(
                "{path}: line {line}: date '{date}' is not ISO-8601 (YYYY-MM-DD)"
            )));
        }
        if let Some(prev) = dates.last() {
            if *prev == date {
                return Err(CliError::data(format!("{path}: line {line}: duplicate date {date}")));
            }
            if *prev > date {
                return Err(CliError::data(format!(
                    "{path}: line {line}: dates not strictly increasing at {date}"
                )));
            }
        }
        let raw = record
            .get(1)
            .ok_or_else(|| CliError::data(format!("{path}: line {line}: missing price")))?
            .trim();
        let price: f64 = raw.parse().map_err(|_| {
            CliError::data(format!("{path}: line {line}, column 2: not a number: '{raw}'"))
        })?;
        if !price.is_finite() || price <= 0.0 {
            return Err(CliError::data(format!(
                "{path}: line {line}: price {price} must be positive for log-returns"
            )));
        }
        dates.push(date);
        prices.push(price);
    }
    if dates.len() < 2 {
        return Err(CliError::data(format!("{path}: needs at least two observations")));
    }
    Ok(Asset { name, dates, prices })
}

/// Inner join on dates: keeps only dates present in every asset, in
/// chronological order. Returns the shared dates and per-asset prices.
pub fn align(assets: &[Asset]) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut shared: HashSet<&str> = assets[0].dates.iter().map(String::as_str).collect();
    for asset in &assets[1..] {
        let own: HashSet<&str> = asset.dates.iter().map(String::as_str).collect();
        shared.retain(|d| own.contains(d));
    }
    if shared.is_empty() {
        return Err(CliError::data("no shared dates across the input files".to_string()));
    }
    let dates: Vec<String> = assets[0]
        .dates
        .iter()
        .filter(|d| shared.contains(d.as_str()))
        .cloned()
        .collect();
    let mut aligned = Vec::with_capacity(assets.len());
    for asset in assets {
        let prices: Vec<f64> = asset
            .dates
            .iter()
            .zip(&asset.prices)
            .filter(|(d, _)| shared.contains(d.as_str()))
            .map(|(_, p)| *p)
            .collect();
        aligned.push(prices);
    }
    Ok((dates, aligned))
}

/// `r_t = ln(p_t) - ln(p_(t-1))`, optionally in absolute value.
pub fn log_returns(prices: &[f64], absolute: bool) -> Vec<f64> {
    prices
        .windows(2)
        .map(|w| {
            let r = w[1].ln() - w[0].ln();
            if absolute {
                r.abs()
            } else {
                r
            }
        })
        .collect()
}
