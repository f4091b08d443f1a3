//! File-based loading of price bars, report events, and holiday lists.
//!
//! Formats:
//! - bars CSV: header `timestamp,price`, ISO-8601 timestamps, UTF-8, LF;
//! - events CSV: header `ticker,report_time,session`;
//! - holidays file: one `YYYY-MM-DD` per line.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use thiserror::Error;

use crate::calendar::{
    drop_reason, CalendarError, DropReason, EventSpec, Session, TradingCalendar,
};
use crate::timeseries::{PriceSeries, DEFAULT_BAR_INTERVAL_MINUTES};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header {expected:?}, found {found:?}")]
    MissingHeader { expected: String, found: String },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {message}")]
    Validation { line: u64, message: String },
}

const BARS_HEADER: [&str; 2] = ["timestamp", "price"];
const EVENTS_HEADER: [&str; 3] = ["ticker", "report_time", "session"];

fn check_header(actual: &csv::StringRecord, expected: &[&str]) -> Result<(), IngestError> {
    let found: Vec<&str> = actual.iter().collect();
    if found != expected {
        return Err(IngestError::MissingHeader {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_timestamp(raw: &str, line: u64) -> Result<NaiveDateTime, IngestError> {
    NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M"))
        .map_err(|e| IngestError::Parse {
            line,
            message: format!("bad timestamp {raw:?}: {e}"),
        })
}

/// Loads a `timestamp,price` CSV into a validated series. Timestamps must be
/// strictly increasing and prices strictly positive; violations report the
/// offending line.
pub fn load_bars(path: &Path) -> Result<PriceSeries, IngestError> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(reader.headers()?, &BARS_HEADER)?;
    let mut timestamps: Vec<NaiveDateTime> = Vec::new();
    let mut prices: Vec<f64> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        if record.len() != 2 {
            return Err(IngestError::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let timestamp = parse_timestamp(&record[0], line)?;
        let price: f64 = record[1].parse().map_err(|e| IngestError::Parse {
            line,
            message: format!("bad price {:?}: {e}", &record[1]),
        })?;
        if !(price.is_finite() && price > 0.0) {
            return Err(IngestError::Validation {
                line,
                message: format!("price must be strictly positive, got {price}"),
            });
        }
        if let Some(&prev) = timestamps.last() {
            if timestamp <= prev {
                return Err(IngestError::Validation {
                    line,
                    message: format!("timestamp {timestamp} not after previous {prev}"),
                });
            }
        }
        timestamps.push(timestamp);
        prices.push(price);
    }
    let series = PriceSeries::from_parts(
        timestamps,
        prices,
        Duration::minutes(DEFAULT_BAR_INTERVAL_MINUTES),
    )
    .expect("rows validated during read");
    Ok(series)
}

/// Writes a series in the bars CSV format. Prices use the shortest
/// round-trip decimal representation, so load-after-write is lossless.
pub fn write_bars_to<W: Write>(writer: &mut W, series: &PriceSeries) -> std::io::Result<()> {
    writeln!(writer, "timestamp,price")?;
    for point in series.points() {
        writeln!(
            writer,
            "{},{}",
            point.timestamp.format("%Y-%m-%dT%H:%M:%S"),
            point.price
        )?;
    }
    Ok(())
}

/// Writes a series as a bars CSV file.
pub fn write_bars(path: &Path, series: &PriceSeries) -> std::io::Result<()> {
    let mut file = File::create(path)?;
    write_bars_to(&mut file, series)
}

/// Loads a `ticker,report_time,session` CSV of report events.
pub fn load_events(path: &Path) -> Result<Vec<EventSpec>, IngestError> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(reader.headers()?, &EVENTS_HEADER)?;
    let mut events = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        if record.len() != 3 {
            return Err(IngestError::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let ticker = record[0].trim().to_string();
        if ticker.is_empty() {
            return Err(IngestError::Parse {
                line,
                message: "empty ticker".to_string(),
            });
        }
        let report_time = parse_timestamp(&record[1], line)?;
        let session: Session = record[2]
            .parse()
            .map_err(|message| IngestError::Parse { line, message })?;
        events.push(EventSpec {
            ticker,
            report_time,
            session,
        });
    }
    Ok(events)
}

/// Loads a holiday list: one `YYYY-MM-DD` per line, blank lines ignored.
pub fn load_holidays(path: &Path) -> Result<Vec<NaiveDate>, IngestError> {
    let reader = BufReader::new(File::open(path)?);
    let mut holidays = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let date =
            NaiveDate::parse_from_str(trimmed, "%Y-%m-%d").map_err(|e| IngestError::Parse {
                line: index as u64 + 1,
                message: format!("bad date {trimmed:?}: {e}"),
            })?;
        holidays.push(date);
    }
    Ok(holidays)
}

/// Admissible events and the excluded remainder, with reasons.
#[derive(Debug, Clone, PartialEq)]
pub struct EventPartition {
    pub kept: Vec<EventSpec>,
    pub dropped: Vec<(EventSpec, DropReason)>,
}

/// Partitions events by the Monday/Friday effective-day rule. Every input
/// event lands in exactly one of the two lists, in input order.
pub fn filter_admissible(
    events: Vec<EventSpec>,
    calendar: &TradingCalendar,
) -> Result<EventPartition, CalendarError> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for event in events {
        match drop_reason(&event, calendar)? {
            None => kept.push(event),
            Some(reason) => dropped.push((event, reason)),
        }
    }
    Ok(EventPartition { kept, dropped })
}
