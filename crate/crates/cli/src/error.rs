//! CLI error type with the stable exit-code contract:
//! 0 success, 2 inadmissible event / empty report, 3 insufficient data,
//! 4 bad arguments, 1 internal error.

use std::fmt;

use breakfit_core::{CalendarError, DropReason, GridError, IngestError, SimError, TimeSeriesError};

pub const EXIT_EVENT: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_ARGS: u8 = 4;
pub const EXIT_INTERNAL: u8 = 1;

#[derive(Debug)]
pub enum CliError {
    /// The requested event fails the Monday/Friday effective-day rule.
    Inadmissible { ticker: String, reason: DropReason },
    /// A batch run produced no rows.
    EmptyReport,
    /// Not enough bars around the break.
    InsufficientData(String),
    /// Bad flags, unknown ticker, unreadable or malformed input files.
    BadArgs(String),
    /// Anything that should not happen with validated inputs.
    Internal(String),
}

impl CliError {
    pub fn bad_args(message: impl Into<String>) -> Self {
        CliError::BadArgs(message.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Inadmissible { .. } | CliError::EmptyReport => EXIT_EVENT,
            CliError::InsufficientData(_) => EXIT_DATA,
            CliError::BadArgs(_) => EXIT_ARGS,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Inadmissible { ticker, reason } => {
                write!(f, "inadmissible event for {ticker}: {reason}")
            }
            CliError::EmptyReport => write!(f, "no admissible events with usable data"),
            CliError::InsufficientData(message) => write!(f, "insufficient data: {message}"),
            CliError::BadArgs(message) => write!(f, "{message}"),
            CliError::Internal(message) => write!(f, "internal error: {message}"),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::BadArgs(e.to_string())
    }
}

impl From<TimeSeriesError> for CliError {
    fn from(e: TimeSeriesError) -> Self {
        match e {
            TimeSeriesError::TooShort { .. } | TimeSeriesError::InsufficientBars { .. } => {
                CliError::InsufficientData(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CalendarError> for CliError {
    fn from(e: CalendarError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::Series(inner) => inner.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
