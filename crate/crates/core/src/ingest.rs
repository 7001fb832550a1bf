//! Delimited-text close series (e.g. daily index quotes with a `Date` and a
//! `Close` column).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRow {
    /// 1-based line number in the file (the header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedSeries {
    pub dates: Vec<String>,
    pub closes: Vec<f64>,
    pub rejected: Vec<RejectedRow>,
}

fn sniff_delimiter(header: &str) -> u8 {
    b",;\t"
        .iter()
        .max_by_key(|&&d| header.bytes().filter(|&b| b == d).count())
        .copied()
        .unwrap_or(b',')
}

pub fn ingest_prices(path: impl AsRef<Path>) -> Result<IngestedSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_prices(&text)
}

/// Parses the file contents; rows with a missing, unparseable or
/// nonpositive close are skipped and reported.
pub fn parse_prices(text: &str) -> Result<IngestedSeries> {
    let header_line = text
        .lines()
        .next()
        .ok_or_else(|| Error::Data("empty file".into()))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(sniff_delimiter(header_line))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Data(e.to_string()))?
        .clone();
    let find = |wanted: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(wanted));
    let close_col = find("close")
        .or_else(|| {
            headers
                .iter()
                .position(|h| h.to_ascii_lowercase().contains("close"))
        })
        .ok_or_else(|| Error::Data("no close column in header".into()))?;
    let date_col = find("date");

    let mut series = IngestedSeries {
        dates: Vec::new(),
        closes: Vec::new(),
        rejected: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| Error::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let raw = record.get(close_col).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(close) if close > 0.0 && close.is_finite() => {
                series.closes.push(close);
                series.dates.push(
                    date_col
                        .and_then(|c| record.get(c))
                        .unwrap_or("")
                        .to_string(),
                );
            }
            Ok(close) => series.rejected.push(RejectedRow {
                line,
                reason: format!("nonpositive close {close}"),
            }),
            Err(_) => series.rejected.push(RejectedRow {
                line,
                reason: format!("unparseable close `{raw}`"),
            }),
        }
    }
    if series.closes.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 valid close rows, found {}",
            series.closes.len()
        )));
    }
    Ok(series)
}
