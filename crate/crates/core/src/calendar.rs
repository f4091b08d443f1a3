//! Report-event admissibility rules and the trading-day calendar.
//!
//! A report filed after market close counts toward the next trading day, so
//! the market is open when its effect lands. Events whose effective day is a
//! Monday (weekend distortion) or a Friday (no two continuous working days
//! after the break) are excluded.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Weekday};
use thiserror::Error;

/// How far `next_trading_day` searches before giving up.
const SEARCH_LIMIT_DAYS: i64 = 366;

/// Regular session open used as the break timestamp on the effective day.
pub fn market_open() -> NaiveTime {
    NaiveTime::from_hms_opt(9, 30, 0).expect("valid time")
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CalendarError {
    #[error("no trading day within {SEARCH_LIMIT_DAYS} days after {after}")]
    NoTradingDay { after: NaiveDate },
}

/// When in the session a report was filed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Session {
    PreOpen,
    PostClose,
}

impl FromStr for Session {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pre_open" => Ok(Session::PreOpen),
            "post_close" => Ok(Session::PostClose),
            other => Err(format!(
                "unknown session {other:?}, expected \"pre_open\" or \"post_close\""
            )),
        }
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Session::PreOpen => write!(f, "pre_open"),
            Session::PostClose => write!(f, "post_close"),
        }
    }
}

/// A report event: who filed, when, and on which side of the session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpec {
    pub ticker: String,
    pub report_time: NaiveDateTime,
    pub session: Session,
}

/// Monday-to-Friday trading days minus an explicit holiday list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TradingCalendar {
    holidays: BTreeSet<NaiveDate>,
}

impl TradingCalendar {
    /// Plain weekday calendar with no holidays.
    pub fn weekdays() -> Self {
        Self::default()
    }

    pub fn with_holidays(holidays: impl IntoIterator<Item = NaiveDate>) -> Self {
        Self {
            holidays: holidays.into_iter().collect(),
        }
    }

    pub fn is_trading_day(&self, day: NaiveDate) -> bool {
        !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) && !self.holidays.contains(&day)
    }

    /// First trading day strictly after `after`.
    pub fn next_trading_day(&self, after: NaiveDate) -> Result<NaiveDate, CalendarError> {
        let mut day = after;
        for _ in 0..SEARCH_LIMIT_DAYS {
            day += Duration::days(1);
            if self.is_trading_day(day) {
                return Ok(day);
            }
        }
        Err(CalendarError::NoTradingDay { after })
    }
}

/// The day an event's market effect lands: post-close filings shift to the
/// next trading day, pre-open filings keep the filing date.
pub fn effective_report_day(
    event: &EventSpec,
    calendar: &TradingCalendar,
) -> Result<NaiveDate, CalendarError> {
    let filed = event.report_time.date();
    match event.session {
        Session::PreOpen => Ok(filed),
        Session::PostClose => calendar.next_trading_day(filed),
    }
}

/// Why an event was excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    EffectiveMonday,
    EffectiveFriday,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::EffectiveMonday => write!(f, "effective-monday"),
            DropReason::EffectiveFriday => write!(f, "effective-friday"),
        }
    }
}

/// Classifies an event by the weekday of its effective report day.
/// `None` means admissible.
pub fn drop_reason(
    event: &EventSpec,
    calendar: &TradingCalendar,
) -> Result<Option<DropReason>, CalendarError> {
    let day = effective_report_day(event, calendar)?;
    Ok(match day.weekday() {
        Weekday::Mon => Some(DropReason::EffectiveMonday),
        Weekday::Fri => Some(DropReason::EffectiveFriday),
        _ => None,
    })
}

/// False when the effective report day is a Monday or a Friday.
pub fn is_admissible_event(
    event: &EventSpec,
    calendar: &TradingCalendar,
) -> Result<bool, CalendarError> {
    Ok(drop_reason(event, calendar)?.is_none())
}

/// Break timestamp for an admissible event: market open on the effective day.
pub fn effective_break_time(
    event: &EventSpec,
    calendar: &TradingCalendar,
) -> Result<NaiveDateTime, CalendarError> {
    Ok(NaiveDateTime::new(
        effective_report_day(event, calendar)?,
        market_open(),
    ))
}
