//! Search-interval construction, objective functions, and exhaustive
//! grid-search calibration of CEV and jump-CEV models.
//!
//! Interval rules, over prices y_i with diffs z_i = y_i - y_{i-1} and log
//! returns r_t:
//!
//! ```text
//! mu^    = (1/n) sum z_i          drift axis spans [mu^ - 5 sd(z)/n, mu^ + 5 sd(z)/n]
//! sigma^ = sqrt((1/n) sum (r_t - r_bar)^2)     volatility axis spans [sigma^/10, 25 sigma^]
//! ```
//!
//! Every lattice candidate is simulated once against a shared [`NoisePath`]
//! (common random numbers) and scored pointwise against the observed series;
//! the lowest objective wins, ties broken by the smallest lexicographic grid
//! index so the result is independent of evaluation order.

use rayon::prelude::*;
use thiserror::Error;

use crate::sde::{
    apply_jump_initial, euler_cev_prices, CevParams, JumpFactor, NoisePath, SimError,
    DEFAULT_JUMP_FACTORS,
};
use crate::timeseries::{EventWindow, PriceSeries, TimeSeriesError};

/// Default gamma search range; 21 points give a 0.1 step.
pub const DEFAULT_GAMMA_RANGE: (f64, f64) = (0.0, 2.0);

/// Half-width floor applied when the diff variance is exactly zero.
const DEGENERATE_MU_EPS: f64 = 1e-6;

/// Fallback volatility interval when the point estimate is exactly zero.
const DEGENERATE_SIGMA_INTERVAL: (f64, f64) = (1e-8, 1e-2);

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error("grid axis {axis} is empty")]
    EmptyAxis { axis: &'static str },
    #[error("grid axis {axis} must be strictly increasing")]
    NotIncreasing { axis: &'static str },
    #[error("grid axis {axis} has an out-of-domain value {value}")]
    OutOfDomain { axis: &'static str, value: f64 },
    #[error("axis counts must all be at least 1")]
    ZeroCount,
    #[error("gamma range must satisfy lo < hi, got ({0}, {1})")]
    BadGammaRange(f64, f64),
    #[error("series lengths differ: observed {observed}, model {model}")]
    LengthMismatch { observed: usize, model: usize },
    #[error("series must have at least {needed} points for this objective, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("histogram needs at least 2 bins, got {0}")]
    BadBins(usize),
    #[error(transparent)]
    Series(#[from] TimeSeriesError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Number of lattice points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCounts {
    pub n_mu: usize,
    pub n_sigma: usize,
    pub n_gamma: usize,
}

impl Default for GridCounts {
    fn default() -> Self {
        Self {
            n_mu: 20,
            n_sigma: 30,
            n_gamma: 21,
        }
    }
}

/// The candidate lattice: strictly increasing values on each axis, plus the
/// jump-factor axis used only for post-break fits.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    mu_values: Vec<f64>,
    sigma_values: Vec<f64>,
    gamma_values: Vec<f64>,
    jump_values: Vec<f64>,
}

fn check_axis(axis: &'static str, values: &[f64], min_allowed: f64) -> Result<(), GridError> {
    if values.is_empty() {
        return Err(GridError::EmptyAxis { axis });
    }
    for pair in values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(GridError::NotIncreasing { axis });
        }
    }
    for &v in values {
        if !v.is_finite() || v < min_allowed {
            return Err(GridError::OutOfDomain { axis, value: v });
        }
    }
    Ok(())
}

impl GridSpec {
    pub fn new(
        mu_values: Vec<f64>,
        sigma_values: Vec<f64>,
        gamma_values: Vec<f64>,
        jump_values: Vec<f64>,
    ) -> Result<Self, GridError> {
        check_axis("mu", &mu_values, f64::NEG_INFINITY)?;
        check_axis("sigma", &sigma_values, f64::MIN_POSITIVE)?;
        check_axis("gamma", &gamma_values, 0.0)?;
        check_axis("jump", &jump_values, f64::MIN_POSITIVE)?;
        Ok(Self {
            mu_values,
            sigma_values,
            gamma_values,
            jump_values,
        })
    }

    pub fn mu_values(&self) -> &[f64] {
        &self.mu_values
    }

    pub fn sigma_values(&self) -> &[f64] {
        &self.sigma_values
    }

    pub fn gamma_values(&self) -> &[f64] {
        &self.gamma_values
    }

    pub fn jump_values(&self) -> &[f64] {
        &self.jump_values
    }

    /// Number of (mu, sigma, gamma) candidates.
    pub fn lattice_len(&self) -> usize {
        self.mu_values.len() * self.sigma_values.len() * self.gamma_values.len()
    }

    /// Candidate at a lexicographic index: mu-major, then sigma, then gamma.
    pub fn candidate(&self, index: usize) -> CevParams {
        let n_gamma = self.gamma_values.len();
        let n_sigma = self.sigma_values.len();
        let i_gamma = index % n_gamma;
        let i_sigma = (index / n_gamma) % n_sigma;
        let i_mu = index / (n_gamma * n_sigma);
        CevParams {
            mu: self.mu_values[i_mu],
            sigma: self.sigma_values[i_sigma],
            gamma: self.gamma_values[i_gamma],
        }
    }
}

/// `n` equally spaced points across [lo, hi], endpoints inclusive; a single
/// point collapses to the interval midpoint.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Drift search interval `[mu^ - 5 sd(z)/n, mu^ + 5 sd(z)/n]` where mu^ is
/// the mean arithmetic diff and sd uses the n-1 denominator. A zero-variance
/// series falls back to a half-width of `max(|mu^|, 1) * 1e-6`.
pub fn mu_interval(series: &PriceSeries) -> Result<(f64, f64), TimeSeriesError> {
    if series.len() < 3 {
        return Err(TimeSeriesError::TooShort {
            needed: 3,
            got: series.len(),
        });
    }
    let diffs = series.arithmetic_diffs()?;
    let n = diffs.len() as f64;
    let mu_hat = mean(&diffs);
    let var = diffs
        .iter()
        .map(|z| (z - mu_hat) * (z - mu_hat))
        .sum::<f64>()
        / (n - 1.0);
    let sd = var.sqrt();
    let half_width = if sd == 0.0 {
        mu_hat.abs().max(1.0) * DEGENERATE_MU_EPS
    } else {
        5.0 * sd / n
    };
    Ok((mu_hat - half_width, mu_hat + half_width))
}

/// Population-style (1/n) standard deviation of log returns.
pub fn sigma_point(series: &PriceSeries) -> Result<f64, TimeSeriesError> {
    let returns = series.log_returns()?;
    let n = returns.len() as f64;
    let r_bar = mean(&returns);
    let var = returns
        .iter()
        .map(|r| (r - r_bar) * (r - r_bar))
        .sum::<f64>()
        / n;
    Ok(var.sqrt())
}

/// Volatility search interval `[sigma^/10, 25 sigma^]`; volatility cannot be
/// negative, and a zero point estimate falls back to (1e-8, 1e-2).
pub fn sigma_interval(sigma_hat: f64) -> (f64, f64) {
    if sigma_hat == 0.0 {
        DEGENERATE_SIGMA_INTERVAL
    } else {
        (sigma_hat / 10.0, 25.0 * sigma_hat)
    }
}

/// Builds the candidate lattice from a series with the default gamma range
/// and jump set.
pub fn build_grid(series: &PriceSeries, counts: &GridCounts) -> Result<GridSpec, GridError> {
    build_grid_custom(series, counts, DEFAULT_GAMMA_RANGE, &DEFAULT_JUMP_FACTORS)
}

/// Builds the candidate lattice: mu and sigma axes span the data-derived
/// intervals, the gamma axis spans `gamma_range`, and the jump axis is taken
/// verbatim.
pub fn build_grid_custom(
    series: &PriceSeries,
    counts: &GridCounts,
    gamma_range: (f64, f64),
    jump_values: &[f64],
) -> Result<GridSpec, GridError> {
    if counts.n_mu == 0 || counts.n_sigma == 0 || counts.n_gamma == 0 {
        return Err(GridError::ZeroCount);
    }
    let (gamma_lo, gamma_hi) = gamma_range;
    if gamma_lo.is_nan() || gamma_hi.is_nan() || gamma_lo >= gamma_hi {
        return Err(GridError::BadGammaRange(gamma_lo, gamma_hi));
    }
    let (mu_lo, mu_hi) = mu_interval(series)?;
    let (sigma_lo, sigma_hi) = sigma_interval(sigma_point(series)?);
    GridSpec::new(
        linspace(mu_lo, mu_hi, counts.n_mu),
        linspace(sigma_lo, sigma_hi, counts.n_sigma),
        linspace(gamma_range.0, gamma_range.1, counts.n_gamma),
        jump_values.to_vec(),
    )
}

/// Which error metric scores a candidate path against the observed window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Mse,
    Mape,
    Kl { bins: usize },
}

impl std::fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveKind::Mse => write!(f, "MSE"),
            ObjectiveKind::Mape => write!(f, "MAPE"),
            ObjectiveKind::Kl { .. } => write!(f, "KL"),
        }
    }
}

fn mse_prices(observed: &[f64], model: &[f64]) -> f64 {
    let sum: f64 = observed
        .iter()
        .zip(model)
        .map(|(o, m)| (m - o) * (m - o))
        .sum();
    sum / observed.len() as f64
}

fn mape_prices(observed: &[f64], model: &[f64]) -> f64 {
    let sum: f64 = observed
        .iter()
        .zip(model)
        .map(|(o, m)| (m - o).abs() / o)
        .sum();
    sum / observed.len() as f64
}

fn log_returns_of(prices: &[f64]) -> Vec<f64> {
    prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
}

/// KL(P || Q) between Laplace-smoothed histograms of the two return sets
/// over their shared [min, max] range.
fn kl_prices(observed: &[f64], model: &[f64], bins: usize) -> f64 {
    let p_returns = log_returns_of(observed);
    let q_returns = log_returns_of(model);
    let lo = p_returns
        .iter()
        .chain(&q_returns)
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = p_returns
        .iter()
        .chain(&q_returns)
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if hi <= lo {
        // Every return identical: both histograms put all mass in one bin.
        return 0.0;
    }
    let width = hi - lo;
    let count = |returns: &[f64]| {
        let mut counts = vec![0u64; bins];
        for &r in returns {
            let bin = (((r - lo) / width) * bins as f64) as usize;
            counts[bin.min(bins - 1)] += 1;
        }
        counts
    };
    let p_counts = count(&p_returns);
    let q_counts = count(&q_returns);
    let p_total = (p_returns.len() + bins) as f64;
    let q_total = (q_returns.len() + bins) as f64;
    let mut kl = 0.0;
    for (&pc, &qc) in p_counts.iter().zip(&q_counts) {
        let p = (pc + 1) as f64 / p_total;
        let q = (qc + 1) as f64 / q_total;
        kl += p * (p / q).ln();
    }
    kl
}

fn check_equal_len(observed: &PriceSeries, model: &PriceSeries) -> Result<(), GridError> {
    if observed.len() != model.len() {
        return Err(GridError::LengthMismatch {
            observed: observed.len(),
            model: model.len(),
        });
    }
    if observed.is_empty() {
        return Err(GridError::SeriesTooShort { needed: 1, got: 0 });
    }
    Ok(())
}

/// Mean squared pointwise price difference.
pub fn objective_mse(observed: &PriceSeries, model: &PriceSeries) -> Result<f64, GridError> {
    check_equal_len(observed, model)?;
    Ok(mse_prices(observed.prices(), model.prices()))
}

/// Mean absolute percentage error, relative to the observed price.
pub fn objective_mape(observed: &PriceSeries, model: &PriceSeries) -> Result<f64, GridError> {
    check_equal_len(observed, model)?;
    Ok(mape_prices(observed.prices(), model.prices()))
}

/// Kullback-Leibler divergence between log-return histograms of the two
/// series, binned over a shared range and Laplace-smoothed (+1 per bin).
pub fn objective_kl(
    observed: &PriceSeries,
    model: &PriceSeries,
    n_bins: usize,
) -> Result<f64, GridError> {
    check_equal_len(observed, model)?;
    if observed.len() < 3 {
        return Err(GridError::SeriesTooShort {
            needed: 3,
            got: observed.len(),
        });
    }
    if n_bins < 2 {
        return Err(GridError::BadBins(n_bins));
    }
    Ok(kl_prices(observed.prices(), model.prices(), n_bins))
}

fn score_prices(kind: ObjectiveKind, observed: &[f64], model: &[f64]) -> f64 {
    let value = match kind {
        ObjectiveKind::Mse => mse_prices(observed, model),
        ObjectiveKind::Mape => mape_prices(observed, model),
        ObjectiveKind::Kl { bins } => kl_prices(observed, model, bins),
    };
    // Extreme candidates can overflow the simulation into the clamp floor;
    // order any non-finite score after every finite one.
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}

/// The winning lattice candidate and its score.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: CevParams,
    pub jump: Option<JumpFactor>,
    pub objective_value: f64,
    pub objective_kind: ObjectiveKind,
    /// Lexicographic index of the winner on the (mu, sigma, gamma) lattice.
    pub grid_index: usize,
}

fn validate_fit_inputs(
    series: &PriceSeries,
    kind: ObjectiveKind,
    noise: &NoisePath,
    s0: f64,
) -> Result<usize, GridError> {
    if series.len() < 2 {
        return Err(GridError::SeriesTooShort {
            needed: 2,
            got: series.len(),
        });
    }
    if let ObjectiveKind::Kl { bins } = kind {
        if bins < 2 {
            return Err(GridError::BadBins(bins));
        }
        if series.len() < 3 {
            return Err(GridError::SeriesTooShort {
                needed: 3,
                got: series.len(),
            });
        }
    }
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(GridError::Sim(SimError::NonPositiveInitialPrice(s0)));
    }
    let n_steps = series.len() - 1;
    if noise.len() < n_steps {
        return Err(GridError::Sim(SimError::NoiseTooShort {
            needed: n_steps,
            available: noise.len(),
        }));
    }
    Ok(n_steps)
}

/// Scores every lattice candidate in parallel and returns the minimum as
/// (objective, index). The (value, index) key is a total order, so the
/// reduction is deterministic regardless of scheduling.
fn scan_lattice(
    observed: &[f64],
    grid: &GridSpec,
    kind: ObjectiveKind,
    noise: &NoisePath,
    s0: f64,
    n_steps: usize,
) -> (f64, usize) {
    (0..grid.lattice_len())
        .into_par_iter()
        .map(|index| {
            let candidate = grid.candidate(index);
            let model = euler_cev_prices(&candidate, s0, n_steps, noise.draws());
            (score_prices(kind, observed, &model), index)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("lattice is non-empty by GridSpec construction")
}

/// Exhaustive search over the (mu, sigma, gamma) lattice. Every candidate is
/// simulated from `s0` with the same noise path and scored against `series`;
/// the lowest objective wins, ties broken by smallest lexicographic index.
pub fn grid_search_fit(
    series: &PriceSeries,
    grid: &GridSpec,
    kind: ObjectiveKind,
    noise: &NoisePath,
    s0: f64,
) -> Result<FitResult, GridError> {
    let n_steps = validate_fit_inputs(series, kind, noise, s0)?;
    let (objective_value, grid_index) =
        scan_lattice(series.prices(), grid, kind, noise, s0, n_steps);
    Ok(FitResult {
        params: grid.candidate(grid_index),
        jump: None,
        objective_value,
        objective_kind: kind,
        grid_index,
    })
}

/// Fits both sides of an event window. The left model starts at the first
/// left price with no jump. The right model searches the jump axis as well:
/// its initial value is the last left price scaled by each candidate jump,
/// and the winner carries the jump factor. Ties across jumps resolve toward
/// the earlier value in the jump axis.
pub fn fit_jump_cev(
    window: &EventWindow,
    left_grid: &GridSpec,
    right_grid: &GridSpec,
    kind: ObjectiveKind,
    noise_left: &NoisePath,
    noise_right: &NoisePath,
) -> Result<(FitResult, FitResult), GridError> {
    let left_s0 = window.left().first_price().expect("window sides non-empty");
    let left = grid_search_fit(window.left(), left_grid, kind, noise_left, left_s0)?;

    let last_left = window.left().last_price().expect("window sides non-empty");
    let right_series = window.right();
    let n_steps = validate_fit_inputs(
        right_series,
        kind,
        noise_right,
        // Validate against the smallest candidate start so every jump works.
        apply_jump_initial(last_left, JumpFactor::new(right_grid.jump_values()[0])?),
    )?;

    let mut best: Option<(f64, usize, usize)> = None; // (objective, jump index, lattice index)
    for (jump_index, &y) in right_grid.jump_values().iter().enumerate() {
        let s0 = apply_jump_initial(last_left, JumpFactor::new(y)?);
        let (objective, lattice_index) = scan_lattice(
            right_series.prices(),
            right_grid,
            kind,
            noise_right,
            s0,
            n_steps,
        );
        let key = (objective, jump_index, lattice_index);
        let better = match &best {
            None => true,
            Some(current) => {
                key.0
                    .total_cmp(&current.0)
                    .then(key.1.cmp(&current.1).then(key.2.cmp(&current.2)))
                    == std::cmp::Ordering::Less
            }
        };
        if better {
            best = Some(key);
        }
    }
    let (objective_value, jump_index, grid_index) =
        best.expect("jump axis is non-empty by GridSpec construction");
    let right = FitResult {
        params: right_grid.candidate(grid_index),
        jump: Some(JumpFactor::new(right_grid.jump_values()[jump_index])?),
        objective_value,
        objective_kind: kind,
        grid_index,
    };
    Ok((left, right))
}
