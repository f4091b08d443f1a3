//! Command implementations: orchestration from input files to report rows
//! and fitted-path files.
//!
//! Diagnostics go to standard error; standard output carries only the
//! report or path payload. Every command is deterministic given its input
//! files, configuration, and seed.

use std::fs;
use std::io::Write;
use std::path::Path;

use breakfit_core::{
    apply_jump_initial, build_grid_custom, build_report, derive_seed, drop_reason,
    effective_break_time, estimate_gbm, euler_cev_path, fit_jump_cev, gbm_path, load_bars,
    load_events, load_holidays, write_bars, write_bars_to, BreakModel, BreakRow, CevParams,
    EventSpec, EventWindow, FitResult, GbmParams, GridSpec, NoisePath, PriceSeries, ReportFormat,
    TradingCalendar,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::{BatchArgs, FitArgs, ModelArg, SimulateArgs};

/// Noise stream tags: one frozen draw sequence per window side.
const LEFT_STREAM: u64 = 0;
const RIGHT_STREAM: u64 = 1;

fn load_calendar(holidays: Option<&Path>) -> Result<TradingCalendar, CliError> {
    Ok(match holidays {
        None => TradingCalendar::weekdays(),
        Some(path) => TradingCalendar::with_holidays(load_holidays(path)?),
    })
}

fn find_event(events: &[EventSpec], ticker: &str) -> Result<EventSpec, CliError> {
    events
        .iter()
        .find(|e| e.ticker == ticker)
        .cloned()
        .ok_or_else(|| CliError::bad_args(format!("unknown ticker: {ticker}")))
}

/// Resolves the event's break time, enforcing admissibility, and cuts the
/// window out of the bar series.
fn window_for_event(
    series: &PriceSeries,
    event: &EventSpec,
    calendar: &TradingCalendar,
    bars_per_side: usize,
) -> Result<EventWindow, CliError> {
    if let Some(reason) = drop_reason(event, calendar)? {
        return Err(CliError::Inadmissible {
            ticker: event.ticker.clone(),
            reason,
        });
    }
    let break_time = effective_break_time(event, calendar)?;
    Ok(series.split_window(break_time, bars_per_side)?)
}

fn write_path_files(
    out_dir: &Path,
    ticker: &str,
    model: BreakModel,
    window: &EventWindow,
    fitted_left: &PriceSeries,
    fitted_right: &PriceSeries,
) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    let observed = window.merged();
    write_bars(&out_dir.join(format!("{ticker}_observed.csv")), &observed)?;
    let fitted_prices: Vec<f64> = fitted_left
        .prices()
        .iter()
        .chain(fitted_right.prices())
        .copied()
        .collect();
    let fitted = observed
        .with_prices(fitted_prices)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    write_bars(
        &out_dir.join(format!("{ticker}_fitted_{model}.csv")),
        &fitted,
    )?;
    Ok(())
}

struct FitSetup {
    config: RunConfig,
    event: EventSpec,
    window: EventWindow,
    noise_left: NoisePath,
    noise_right: NoisePath,
}

fn prepare_fit(args: &FitArgs) -> Result<FitSetup, CliError> {
    let config = RunConfig::load(
        args.config.as_deref(),
        args.seed,
        args.objective.as_deref(),
        args.bars_per_side,
    )?;
    let calendar = load_calendar(args.holidays.as_deref())?;
    let events = load_events(&args.events)?;
    let event = find_event(&events, &args.ticker)?;
    let series = load_bars(&args.bars)?;
    let window = window_for_event(&series, &event, &calendar, config.bars_per_side)?;
    let noise_left = NoisePath::generate(
        derive_seed(config.seed, &event.ticker, LEFT_STREAM),
        window.left().len() - 1,
    );
    let noise_right = NoisePath::generate(
        derive_seed(config.seed, &event.ticker, RIGHT_STREAM),
        window.right().len() - 1,
    );
    Ok(FitSetup {
        config,
        event,
        window,
        noise_left,
        noise_right,
    })
}

fn fit_gbm_window(
    window: &EventWindow,
    noise_left: &NoisePath,
    noise_right: &NoisePath,
    ticker: &str,
) -> Result<(BreakRow, PriceSeries, PriceSeries), CliError> {
    let left = estimate_gbm(window.left())?;
    let right = estimate_gbm(window.right())?;
    let row = BreakRow::gbm(ticker, &left, &right);
    let fitted_left = gbm_path(
        &left,
        window.left().first_price().expect("non-empty"),
        window.left().len() - 1,
        noise_left,
    )?;
    let fitted_right = gbm_path(
        &right,
        window.right().first_price().expect("non-empty"),
        window.right().len() - 1,
        noise_right,
    )?;
    Ok((row, fitted_left, fitted_right))
}

fn side_grids(window: &EventWindow, config: &RunConfig) -> Result<(GridSpec, GridSpec), CliError> {
    let left = build_grid_custom(
        window.left(),
        &config.counts,
        config.gamma_range,
        &config.jump_set,
    )?;
    let right = build_grid_custom(
        window.right(),
        &config.counts,
        config.gamma_range,
        &config.jump_set,
    )?;
    Ok((left, right))
}

fn fit_cev_window(
    window: &EventWindow,
    config: &RunConfig,
    noise_left: &NoisePath,
    noise_right: &NoisePath,
    ticker: &str,
    verbose: bool,
) -> Result<(BreakRow, PriceSeries, PriceSeries), CliError> {
    let (left_grid, right_grid) = side_grids(window, config)?;
    if verbose {
        eprintln!("left candidates: {}", left_grid.lattice_len());
        eprintln!(
            "right candidates: {}",
            right_grid.lattice_len() * right_grid.jump_values().len()
        );
    }
    let (left, right): (FitResult, FitResult) = fit_jump_cev(
        window,
        &left_grid,
        &right_grid,
        config.objective_kind(),
        noise_left,
        noise_right,
    )?;
    let jump = right.jump.expect("right CEV fit carries a jump factor");
    if verbose {
        eprintln!(
            "left fit: objective {} = {:.6e} at grid index {}",
            left.objective_kind, left.objective_value, left.grid_index
        );
        eprintln!(
            "right fit: objective {} = {:.6e} at grid index {}, jump {}",
            right.objective_kind,
            right.objective_value,
            right.grid_index,
            jump.y()
        );
    }
    let row = BreakRow::cev_jump(ticker, &left.params, &right.params, jump);
    let fitted_left = euler_cev_path(
        &left.params,
        window.left().first_price().expect("non-empty"),
        window.left().len() - 1,
        noise_left,
    )?;
    let fitted_right = euler_cev_path(
        &right.params,
        apply_jump_initial(window.left().last_price().expect("non-empty"), jump),
        window.right().len() - 1,
        noise_right,
    )?;
    Ok((row, fitted_left, fitted_right))
}

pub fn fit_gbm(args: &FitArgs) -> Result<(), CliError> {
    let setup = prepare_fit(args)?;
    let (row, fitted_left, fitted_right) = fit_gbm_window(
        &setup.window,
        &setup.noise_left,
        &setup.noise_right,
        &setup.event.ticker,
    )?;
    let doc = build_report(BreakModel::GbmMle, &[row], ReportFormat::Tsv)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    print!("{doc}");
    write_path_files(
        &args.out_dir,
        &setup.event.ticker,
        BreakModel::GbmMle,
        &setup.window,
        &fitted_left,
        &fitted_right,
    )
}

pub fn fit_cev(args: &FitArgs) -> Result<(), CliError> {
    let setup = prepare_fit(args)?;
    let (row, fitted_left, fitted_right) = fit_cev_window(
        &setup.window,
        &setup.config,
        &setup.noise_left,
        &setup.noise_right,
        &setup.event.ticker,
        args.verbose,
    )?;
    let doc = build_report(BreakModel::CevJump, &[row], ReportFormat::Tsv)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    print!("{doc}");
    write_path_files(
        &args.out_dir,
        &setup.event.ticker,
        BreakModel::CevJump,
        &setup.window,
        &fitted_left,
        &fitted_right,
    )
}

pub fn batch_report(args: &BatchArgs) -> Result<(), CliError> {
    let config = RunConfig::load(
        args.config.as_deref(),
        args.seed,
        args.objective.as_deref(),
        args.bars_per_side,
    )?;
    let calendar = load_calendar(args.holidays.as_deref())?;
    let events = load_events(&args.events)?;
    let model = match args.model {
        ModelArg::Gbm => BreakModel::GbmMle,
        ModelArg::Cev => BreakModel::CevJump,
    };

    let partition = breakfit_core::filter_admissible(events, &calendar)?;
    for (event, reason) in &partition.dropped {
        eprintln!("skip {}: {reason}", event.ticker);
    }

    let mut rows: Vec<BreakRow> = Vec::new();
    for event in &partition.kept {
        let bars_path = args.bars_dir.join(format!("{}.csv", event.ticker));
        if !bars_path.is_file() {
            eprintln!("skip {}: missing-bars", event.ticker);
            continue;
        }
        match fit_one_event(event, &bars_path, &calendar, &config, model, args.verbose) {
            Ok(row) => rows.push(row),
            Err(CliError::InsufficientData(message)) => {
                eprintln!("skip {}: insufficient-data ({message})", event.ticker);
            }
            Err(CliError::BadArgs(message)) => {
                eprintln!("skip {}: bad-bars ({message})", event.ticker);
            }
            Err(other) => return Err(other),
        }
    }
    if rows.is_empty() {
        return Err(CliError::EmptyReport);
    }
    let doc = build_report(model, &rows, ReportFormat::Tsv)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    print!("{doc}");
    Ok(())
}

fn fit_one_event(
    event: &EventSpec,
    bars_path: &Path,
    calendar: &TradingCalendar,
    config: &RunConfig,
    model: BreakModel,
    verbose: bool,
) -> Result<BreakRow, CliError> {
    let series = load_bars(bars_path)?;
    let window = window_for_event(&series, event, calendar, config.bars_per_side)?;
    let noise_left = NoisePath::generate(
        derive_seed(config.seed, &event.ticker, LEFT_STREAM),
        window.left().len() - 1,
    );
    let noise_right = NoisePath::generate(
        derive_seed(config.seed, &event.ticker, RIGHT_STREAM),
        window.right().len() - 1,
    );
    let (row, _, _) = match model {
        BreakModel::GbmMle => fit_gbm_window(&window, &noise_left, &noise_right, &event.ticker)?,
        BreakModel::CevJump => fit_cev_window(
            &window,
            config,
            &noise_left,
            &noise_right,
            &event.ticker,
            verbose,
        )?,
    };
    Ok(row)
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if args.n_bars == 0 {
        return Err(CliError::bad_args("--n-bars must be at least 1"));
    }
    if !(args.s0.is_finite() && args.s0 > 0.0) {
        return Err(CliError::bad_args(format!(
            "--s0 must be positive, got {}",
            args.s0
        )));
    }
    let noise = NoisePath::generate(args.seed, args.n_bars);
    let path = match args.model {
        ModelArg::Gbm => {
            if !(args.sigma.is_finite() && args.sigma >= 0.0) || !args.mu.is_finite() {
                return Err(CliError::bad_args(format!(
                    "invalid gbm parameters: mu = {}, sigma = {}",
                    args.mu, args.sigma
                )));
            }
            gbm_path(
                &GbmParams {
                    mu: args.mu,
                    sigma: args.sigma,
                },
                args.s0,
                args.n_bars,
                &noise,
            )?
        }
        ModelArg::Cev => {
            let gamma = args
                .gamma
                .ok_or_else(|| CliError::bad_args("cev simulation requires --gamma"))?;
            let params = CevParams::new(args.mu, args.sigma, gamma)
                .map_err(|e| CliError::bad_args(e.to_string()))?;
            euler_cev_path(&params, args.s0, args.n_bars, &noise)?
        }
    };
    let stdout = std::io::stdout();
    let mut handle = stdout.lock();
    write_bars_to(&mut handle, &path)?;
    handle.flush()?;
    Ok(())
}
