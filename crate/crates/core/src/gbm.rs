//! Closed-form maximum-likelihood estimation of geometric Brownian motion
//! and exact-scheme path generation.
//!
//! GBM: `dS/S = mu dt + sigma dW`, with the log-Euler exact solution
//! `S_{t+1} = S_t * exp((mu - sigma^2/2) + sigma * eps_t)` at dt = 1 bar.
//! Estimators over n log returns r_t:
//!
//! ```text
//! X_bar  = (1/n) sum r_t
//! sigma^ = sqrt( (1/(n-1)) sum (r_t - X_bar)^2 )
//! mu^    = X_bar + sigma^2 / 2
//! ```

use crate::sde::{NoisePath, SimError};
use crate::timeseries::{PriceSeries, TimeSeriesError};

/// Per-bar GBM drift and volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmParams {
    pub mu: f64,
    pub sigma: f64,
}

/// Maximum-likelihood GBM estimates from a price series. Needs at least
/// three points so the n-1 denominator of the volatility is positive.
pub fn estimate_gbm(series: &PriceSeries) -> Result<GbmParams, TimeSeriesError> {
    if series.len() < 3 {
        return Err(TimeSeriesError::TooShort {
            needed: 3,
            got: series.len(),
        });
    }
    let returns = series.log_returns()?;
    let n = returns.len() as f64;
    let x_bar = returns.iter().sum::<f64>() / n;
    let sum_sq = returns
        .iter()
        .map(|r| (r - x_bar) * (r - x_bar))
        .sum::<f64>();
    let sigma = (sum_sq / (n - 1.0)).sqrt();
    let mu = x_bar + 0.5 * sigma * sigma;
    Ok(GbmParams { mu, sigma })
}

/// Exact-scheme GBM path: `n_steps + 1` strictly positive prices starting
/// at `s0`, consuming one noise draw per step.
pub fn gbm_path(
    params: &GbmParams,
    s0: f64,
    n_steps: usize,
    noise: &NoisePath,
) -> Result<PriceSeries, SimError> {
    if !(params.mu.is_finite() && params.sigma.is_finite() && params.sigma >= 0.0) {
        return Err(SimError::InvalidParams(format!(
            "mu = {}, sigma = {}",
            params.mu, params.sigma
        )));
    }
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(SimError::NonPositiveInitialPrice(s0));
    }
    if noise.len() < n_steps {
        return Err(SimError::NoiseTooShort {
            needed: n_steps,
            available: noise.len(),
        });
    }
    let drift = params.mu - 0.5 * params.sigma * params.sigma;
    let mut prices = Vec::with_capacity(n_steps + 1);
    let mut s = s0;
    prices.push(s);
    for (step, &eps) in noise.draws()[..n_steps].iter().enumerate() {
        s *= (drift + params.sigma * eps).exp();
        if !(s.is_finite() && s > 0.0) {
            // exp() keeps the exact scheme positive unless the exponent
            // overflows or underflows f64.
            return Err(SimError::NumericalRange { step: step + 1 });
        }
        prices.push(s);
    }
    Ok(PriceSeries::synthetic(prices).expect("prices checked positive and finite"))
}
