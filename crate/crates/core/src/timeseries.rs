//! Price-series data model, return transforms, and event-window splitting.
//!
//! A [`PriceSeries`] is an ordered run of strictly positive price bars at a
//! nominal interval (5 minutes by default). Consecutive bars are treated as
//! adjacent for all return computations: overnight and weekend gaps are
//! collapsed, matching estimators that index bars uniformly.

use std::fmt;

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime};
use thiserror::Error;

/// Nominal bar interval: 5 minutes.
pub const DEFAULT_BAR_INTERVAL_MINUTES: i64 = 5;

/// Default bars on each side of a break: 5 trading days of 78 five-minute
/// bars per 6.5-hour session.
pub const DEFAULT_BARS_PER_SIDE: usize = 390;

/// Which side of an event window a constraint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TimeSeriesError {
    #[error("series has {got} points, need at least {needed}")]
    TooShort { needed: usize, got: usize },
    #[error("non-positive or non-finite price {price} at index {index}")]
    InvalidPrice { index: usize, price: f64 },
    #[error("timestamps not strictly increasing at index {index}")]
    NonMonotoneTimestamps { index: usize },
    #[error("timestamp/price counts differ: {timestamps} vs {prices}")]
    LengthMismatch { timestamps: usize, prices: usize },
    #[error("insufficient bars on {side} side: have {available}, need {requested}")]
    InsufficientBars {
        side: Side,
        available: usize,
        requested: usize,
    },
    #[error("bars_per_side must be positive")]
    ZeroBarsPerSide,
    #[error("{side} side of window is empty")]
    EmptyWindowSide { side: Side },
    #[error("window sides do not straddle the break time")]
    BreakTimeOrder,
}

/// A single observed price bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricePoint {
    pub timestamp: NaiveDateTime,
    pub price: f64,
}

/// Ordered, strictly-positive price bars at a fixed nominal interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    timestamps: Vec<NaiveDateTime>,
    prices: Vec<f64>,
    bar_interval: Duration,
}

/// Fixed origin for synthetic bar grids: a Monday at market open.
pub fn synthetic_origin() -> NaiveDateTime {
    NaiveDateTime::new(
        NaiveDate::from_ymd_opt(2021, 1, 4).expect("valid date"),
        NaiveTime::from_hms_opt(9, 30, 0).expect("valid time"),
    )
}

impl PriceSeries {
    /// Builds a series from points, validating ordering and positivity.
    pub fn new(points: Vec<PricePoint>, bar_interval: Duration) -> Result<Self, TimeSeriesError> {
        let (timestamps, prices) = points.into_iter().map(|p| (p.timestamp, p.price)).unzip();
        Self::from_parts(timestamps, prices, bar_interval)
    }

    /// Builds a series from parallel timestamp/price vectors.
    pub fn from_parts(
        timestamps: Vec<NaiveDateTime>,
        prices: Vec<f64>,
        bar_interval: Duration,
    ) -> Result<Self, TimeSeriesError> {
        if timestamps.len() != prices.len() {
            return Err(TimeSeriesError::LengthMismatch {
                timestamps: timestamps.len(),
                prices: prices.len(),
            });
        }
        for (index, &price) in prices.iter().enumerate() {
            if !(price.is_finite() && price > 0.0) {
                return Err(TimeSeriesError::InvalidPrice { index, price });
            }
        }
        for (index, pair) in timestamps.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(TimeSeriesError::NonMonotoneTimestamps { index: index + 1 });
            }
        }
        Ok(Self {
            timestamps,
            prices,
            bar_interval,
        })
    }

    /// Builds a series on the default 5-minute synthetic grid.
    pub fn synthetic(prices: Vec<f64>) -> Result<Self, TimeSeriesError> {
        Self::synthetic_from(prices, synthetic_origin())
    }

    /// Builds a series on a 5-minute synthetic grid starting at `start`.
    pub fn synthetic_from(prices: Vec<f64>, start: NaiveDateTime) -> Result<Self, TimeSeriesError> {
        let interval = Duration::minutes(DEFAULT_BAR_INTERVAL_MINUTES);
        let timestamps = (0..prices.len() as i64)
            .map(|i| start + interval * i as i32)
            .collect();
        Self::from_parts(timestamps, prices, interval)
    }

    /// Same timestamps, different prices. Used to pair a fitted model path
    /// with the observed bar grid.
    pub fn with_prices(&self, prices: Vec<f64>) -> Result<Self, TimeSeriesError> {
        Self::from_parts(self.timestamps.clone(), prices, self.bar_interval)
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn bar_interval(&self) -> Duration {
        self.bar_interval
    }

    pub fn first_price(&self) -> Option<f64> {
        self.prices.first().copied()
    }

    pub fn last_price(&self) -> Option<f64> {
        self.prices.last().copied()
    }

    pub fn points(&self) -> impl Iterator<Item = PricePoint> + '_ {
        self.timestamps
            .iter()
            .zip(&self.prices)
            .map(|(&timestamp, &price)| PricePoint { timestamp, price })
    }

    fn segment(&self, start: usize, end: usize) -> Self {
        Self {
            timestamps: self.timestamps[start..end].to_vec(),
            prices: self.prices[start..end].to_vec(),
            bar_interval: self.bar_interval,
        }
    }

    /// Log returns: element t is `ln(price_t / price_{t-1})`. An (n+1)-point
    /// series yields n values; bars are adjacent regardless of clock gaps.
    pub fn log_returns(&self) -> Result<Vec<f64>, TimeSeriesError> {
        if self.len() < 2 {
            return Err(TimeSeriesError::TooShort {
                needed: 2,
                got: self.len(),
            });
        }
        Ok(self.prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
    }

    /// First differences: element i is `price_i - price_{i-1}`.
    pub fn arithmetic_diffs(&self) -> Result<Vec<f64>, TimeSeriesError> {
        if self.len() < 2 {
            return Err(TimeSeriesError::TooShort {
                needed: 2,
                got: self.len(),
            });
        }
        Ok(self.prices.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// Splits into the last `bars_per_side` bars strictly before `break_time`
    /// and the first `bars_per_side` bars at or after it.
    pub fn split_window(
        &self,
        break_time: NaiveDateTime,
        bars_per_side: usize,
    ) -> Result<EventWindow, TimeSeriesError> {
        if bars_per_side == 0 {
            return Err(TimeSeriesError::ZeroBarsPerSide);
        }
        let pivot = self.timestamps.partition_point(|&t| t < break_time);
        if pivot < bars_per_side {
            return Err(TimeSeriesError::InsufficientBars {
                side: Side::Left,
                available: pivot,
                requested: bars_per_side,
            });
        }
        let right_available = self.len() - pivot;
        if right_available < bars_per_side {
            return Err(TimeSeriesError::InsufficientBars {
                side: Side::Right,
                available: right_available,
                requested: bars_per_side,
            });
        }
        EventWindow::new(
            self.segment(pivot - bars_per_side, pivot),
            self.segment(pivot, pivot + bars_per_side),
            break_time,
        )
    }
}

/// Left/right price windows around a break timestamp. Every left bar is
/// strictly before the break; every right bar is at or after it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventWindow {
    left: PriceSeries,
    right: PriceSeries,
    break_time: NaiveDateTime,
}

impl EventWindow {
    pub fn new(
        left: PriceSeries,
        right: PriceSeries,
        break_time: NaiveDateTime,
    ) -> Result<Self, TimeSeriesError> {
        if left.is_empty() {
            return Err(TimeSeriesError::EmptyWindowSide { side: Side::Left });
        }
        if right.is_empty() {
            return Err(TimeSeriesError::EmptyWindowSide { side: Side::Right });
        }
        let last_left = *left.timestamps().last().expect("non-empty");
        let first_right = right.timestamps()[0];
        if !(last_left < break_time && break_time <= first_right) {
            return Err(TimeSeriesError::BreakTimeOrder);
        }
        Ok(Self {
            left,
            right,
            break_time,
        })
    }

    pub fn left(&self) -> &PriceSeries {
        &self.left
    }

    pub fn right(&self) -> &PriceSeries {
        &self.right
    }

    pub fn break_time(&self) -> NaiveDateTime {
        self.break_time
    }

    /// Left and right windows joined back into one contiguous series.
    pub fn merged(&self) -> PriceSeries {
        let timestamps = self
            .left
            .timestamps()
            .iter()
            .chain(self.right.timestamps())
            .copied()
            .collect();
        let prices = self
            .left
            .prices()
            .iter()
            .chain(self.right.prices())
            .copied()
            .collect();
        PriceSeries::from_parts(timestamps, prices, self.left.bar_interval())
            .expect("window sides are individually valid and ordered around the break")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn series(prices: &[f64]) -> PriceSeries {
        PriceSeries::synthetic(prices.to_vec()).unwrap()
    }

    #[test]
    fn log_returns_constant_series_is_zero() {
        assert_eq!(
            series(&[2.0, 2.0, 2.0]).log_returns().unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn log_returns_of_e_step_is_one() {
        let r = series(&[1.0, std::f64::consts::E]).log_returns().unwrap();
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn log_returns_five_percent_growth() {
        let r = series(&[100.0, 105.0, 110.25]).log_returns().unwrap();
        let expected = 1.05_f64.ln(); // 0.048790164169432...
        assert_relative_eq!(r[0], expected, max_relative = 1e-12);
        assert_relative_eq!(r[1], expected, max_relative = 1e-12);
        assert_relative_eq!(r[0], 0.048790, epsilon = 1e-6);
    }

    #[test]
    fn log_returns_too_short() {
        assert_eq!(
            series(&[1.0]).log_returns(),
            Err(TimeSeriesError::TooShort { needed: 2, got: 1 })
        );
    }

    #[test]
    fn diffs_constant_and_alternating() {
        assert_eq!(
            series(&[5.0, 5.0, 5.0]).arithmetic_diffs().unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            series(&[10.0, 11.0, 10.0, 11.0, 10.0])
                .arithmetic_diffs()
                .unwrap(),
            vec![1.0, -1.0, 1.0, -1.0]
        );
        assert_eq!(
            series(&[100.0, 102.5]).arithmetic_diffs().unwrap(),
            vec![2.5]
        );
    }

    #[test]
    fn diffs_too_short() {
        assert!(matches!(
            series(&[1.0]).arithmetic_diffs(),
            Err(TimeSeriesError::TooShort { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_prices() {
        assert!(matches!(
            PriceSeries::synthetic(vec![1.0, 0.0]),
            Err(TimeSeriesError::InvalidPrice { index: 1, .. })
        ));
        assert!(matches!(
            PriceSeries::synthetic(vec![1.0, -3.0]),
            Err(TimeSeriesError::InvalidPrice { .. })
        ));
        assert!(matches!(
            PriceSeries::synthetic(vec![1.0, f64::NAN]),
            Err(TimeSeriesError::InvalidPrice { .. })
        ));
    }

    #[test]
    fn construction_rejects_unsorted_timestamps() {
        let t0 = synthetic_origin();
        let result = PriceSeries::from_parts(vec![t0, t0], vec![1.0, 2.0], Duration::minutes(5));
        assert!(matches!(
            result,
            Err(TimeSeriesError::NonMonotoneTimestamps { index: 1 })
        ));
    }

    #[test]
    fn split_window_exact_midpoint() {
        let s = series(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]);
        let break_time = s.timestamps()[5];
        let w = s.split_window(break_time, 5).unwrap();
        assert_eq!(w.left().prices(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(w.right().prices(), &[6.0, 7.0, 8.0, 9.0, 10.0]);
        assert_eq!(w.break_time(), break_time);
    }

    #[test]
    fn split_window_full_week_sides() {
        // 78 five-minute bars per 6.5-hour session x 5 days = 390 a side.
        let prices: Vec<f64> = (0..780).map(|i| 100.0 + (i % 7) as f64).collect();
        let s = PriceSeries::synthetic(prices).unwrap();
        let break_time = s.timestamps()[390];
        let w = s.split_window(break_time, 390).unwrap();
        assert_eq!(w.left().len(), 390);
        assert_eq!(w.right().len(), 390);
    }

    #[test]
    fn split_window_insufficient_left() {
        let s = series(&[1.0, 2.0, 3.0, 4.0]);
        let err = s.split_window(s.timestamps()[1], 3).unwrap_err();
        assert_eq!(
            err,
            TimeSeriesError::InsufficientBars {
                side: Side::Left,
                available: 1,
                requested: 3,
            }
        );
    }

    #[test]
    fn split_window_insufficient_right() {
        let s = series(&[1.0, 2.0, 3.0, 4.0]);
        let err = s.split_window(s.timestamps()[3], 2).unwrap_err();
        assert_eq!(
            err,
            TimeSeriesError::InsufficientBars {
                side: Side::Right,
                available: 1,
                requested: 2,
            }
        );
    }

    #[test]
    fn split_window_keeps_contiguity() {
        let s = series(&[3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.0, 3.5]);
        let w = s.split_window(s.timestamps()[4], 3).unwrap();
        let merged = w.merged();
        assert_eq!(merged.prices(), &s.prices()[1..7]);
        assert_eq!(merged.timestamps(), &s.timestamps()[1..7]);
    }

    #[test]
    fn window_rejects_misordered_break() {
        let left = series(&[1.0, 2.0]);
        let right = series(&[3.0, 4.0]);
        // Break before the left window's last bar.
        let err = EventWindow::new(left.clone(), right, left.timestamps()[0]).unwrap_err();
        assert_eq!(err, TimeSeriesError::BreakTimeOrder);
    }

    #[test]
    fn log_returns_exact_under_power_of_two_scaling() {
        let s = series(&[100.0, 103.0, 97.5, 101.25]);
        let scaled = series(&[200.0, 206.0, 195.0, 202.5]);
        assert_eq!(s.log_returns().unwrap(), scaled.log_returns().unwrap());
    }

    proptest! {
        #[test]
        fn log_returns_scale_invariant(
            prices in proptest::collection::vec(0.5f64..500.0, 2..40),
            scale in 0.01f64..100.0,
        ) {
            let base = series(&prices);
            let scaled = series(&prices.iter().map(|p| p * scale).collect::<Vec<_>>());
            let a = base.log_returns().unwrap();
            let b = scaled.log_returns().unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn returns_and_diffs_have_length_n(
            prices in proptest::collection::vec(0.5f64..500.0, 2..60),
        ) {
            let s = series(&prices);
            prop_assert_eq!(s.log_returns().unwrap().len(), prices.len() - 1);
            prop_assert_eq!(s.arithmetic_diffs().unwrap().len(), prices.len() - 1);
        }
    }
}
