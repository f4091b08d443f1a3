//! Fits stochastic differential equation models (GBM, CEV, jump-modified
//! CEV) to intraday price windows on both sides of a report event and
//! quantifies the structural break as right/left parameter ratios and
//! percentage changes.
//!
//! Pipeline: load bars and events ([`ingest`]), resolve the effective report
//! day and admissibility ([`calendar`]), split the series into left/right
//! windows ([`timeseries`]), fit GBM by closed-form MLE ([`gbm`]) or CEV by
//! exhaustive grid search over simulated paths ([`grid`], [`sde`]), then
//! render the break table ([`breaks`]).
//!
//! Everything is deterministic given input files and a seed: noise paths are
//! frozen behind seeded generators and shared across grid candidates, and
//! grid ties break by lattice index, so concurrent evaluation cannot change
//! a result.

pub mod breaks;
pub mod calendar;
pub mod gbm;
pub mod grid;
pub mod ingest;
pub mod sde;
pub mod timeseries;

pub use breaks::{
    build_report, change_pct, jump_pct, ratio_rl, BreakModel, BreakRow, ParamChange, ReportError,
    ReportFormat,
};
pub use calendar::{
    drop_reason, effective_break_time, effective_report_day, is_admissible_event, CalendarError,
    DropReason, EventSpec, Session, TradingCalendar,
};
pub use gbm::{estimate_gbm, gbm_path, GbmParams};
pub use grid::{
    build_grid, build_grid_custom, fit_jump_cev, grid_search_fit, mu_interval, objective_kl,
    objective_mape, objective_mse, sigma_interval, sigma_point, FitResult, GridCounts, GridError,
    GridSpec, ObjectiveKind, DEFAULT_GAMMA_RANGE,
};
pub use ingest::{
    filter_admissible, load_bars, load_events, load_holidays, write_bars, write_bars_to,
    EventPartition, IngestError,
};
pub use sde::{
    apply_jump_initial, derive_seed, euler_cev_path, CevParams, JumpFactor, NoisePath, SimError,
    DEFAULT_JUMP_FACTORS,
};
pub use timeseries::{
    EventWindow, PricePoint, PriceSeries, Side, TimeSeriesError, DEFAULT_BARS_PER_SIDE,
    DEFAULT_BAR_INTERVAL_MINUTES,
};
