//! Euler-Maruyama simulation of CEV dynamics and the reusable noise path.
//!
//! CEV: `dS = mu * S dt + sigma * S^gamma dW`. There is no closed-form
//! solution, so paths come from the explicit Euler scheme with dt = 1 bar.
//! A [`NoisePath`] freezes the standard-normal increments behind a seed so
//! one draw sequence can be shared across every candidate parameter set
//! (common random numbers).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::timeseries::{PriceSeries, TimeSeriesError};

/// Relative floor for Euler steps that leave the positive domain.
pub const CLAMP_FLOOR_RATIO: f64 = 1e-8;

/// Multiplicative jump sizes tried for the post-break initial value.
pub const DEFAULT_JUMP_FACTORS: [f64; 3] = [0.9, 1.0, 1.1];

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("initial price must be positive and finite, got {0}")]
    NonPositiveInitialPrice(f64),
    #[error("noise path has {available} draws, need {needed}")]
    NoiseTooShort { needed: usize, available: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("jump factor must be positive and finite, got {0}")]
    InvalidJump(f64),
    #[error("simulated price left (0, inf) at step {step}")]
    NumericalRange { step: usize },
}

/// Per-bar CEV parameters: drift, volatility scale, and the elasticity
/// exponent coupling diffusion magnitude to price level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CevParams {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
}

impl CevParams {
    pub fn new(mu: f64, sigma: f64, gamma: f64) -> Result<Self, SimError> {
        let params = Self { mu, sigma, gamma };
        params.validate()?;
        Ok(params)
    }

    pub(crate) fn validate(&self) -> Result<(), SimError> {
        if !self.mu.is_finite() {
            return Err(SimError::InvalidParams(format!("mu = {}", self.mu)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(SimError::InvalidParams(format!("sigma = {}", self.sigma)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(SimError::InvalidParams(format!("gamma = {}", self.gamma)));
        }
        Ok(())
    }
}

/// Multiplicative rescale of the post-break initial price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpFactor(f64);

impl JumpFactor {
    pub fn new(y: f64) -> Result<Self, SimError> {
        if !(y.is_finite() && y > 0.0) {
            return Err(SimError::InvalidJump(y));
        }
        Ok(Self(y))
    }

    pub fn y(&self) -> f64 {
        self.0
    }
}

/// A frozen sequence of standard-normal increments, reproducible from its
/// seed. Immutable after construction and shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    seed: u64,
    draws: Vec<f64>,
}

impl NoisePath {
    /// Draws `n_draws` standard normals from a ChaCha8 stream seeded with
    /// `seed`. The same (seed, n_draws) always yields the same values.
    pub fn generate(seed: u64, n_draws: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = (0..n_draws)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Self { seed, draws }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }
}

/// Mixes a base seed with a label and stream index into a child seed.
/// Stable across runs and platforms, so batch and single-ticker invocations
/// agree on the noise given the same base seed.
pub fn derive_seed(base: u64, label: &str, stream: u64) -> u64 {
    // FNV-1a over the label, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base ^ h ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Euler step sequence without validation; callers guarantee `s0 > 0`,
/// valid params, and `draws.len() >= n_steps`. Returns `n_steps + 1` prices
/// starting at `s0`. Steps that leave (0, inf) are clamped to the floor.
pub(crate) fn euler_cev_prices(
    params: &CevParams,
    s0: f64,
    n_steps: usize,
    draws: &[f64],
) -> Vec<f64> {
    let floor = CLAMP_FLOOR_RATIO * s0;
    let mut prices = Vec::with_capacity(n_steps + 1);
    prices.push(s0);
    let mut s = s0;
    for &eps in &draws[..n_steps] {
        let next = s + params.mu * s + params.sigma * s.powf(params.gamma) * eps;
        s = if next.is_finite() && next > 0.0 {
            next
        } else {
            floor
        };
        prices.push(s);
    }
    prices
}

/// Explicit Euler-Maruyama path of `dS = mu S dt + sigma S^gamma dW` with
/// dt = 1 bar: `S_{t+1} = S_t + mu S_t + sigma S_t^gamma * eps_t`. Any step
/// that leaves the positive domain is clamped to `1e-8 * s0` so `S^gamma`
/// stays defined. Output has `n_steps + 1` points, the first being `s0`.
pub fn euler_cev_path(
    params: &CevParams,
    s0: f64,
    n_steps: usize,
    noise: &NoisePath,
) -> Result<PriceSeries, SimError> {
    params.validate()?;
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(SimError::NonPositiveInitialPrice(s0));
    }
    if noise.len() < n_steps {
        return Err(SimError::NoiseTooShort {
            needed: n_steps,
            available: noise.len(),
        });
    }
    let prices = euler_cev_prices(params, s0, n_steps, noise.draws());
    PriceSeries::synthetic(prices).map_err(|e| match e {
        // Clamping keeps every price in (0, inf); anything else is a bug.
        TimeSeriesError::InvalidPrice { index, .. } => SimError::NumericalRange { step: index },
        other => SimError::InvalidParams(other.to_string()),
    })
}

/// Post-break initial value: the last left-window price scaled by the jump.
pub fn apply_jump_initial(last_left_price: f64, jump: JumpFactor) -> f64 {
    last_left_price * jump.y()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_sigma_zero_mu_is_constant() {
        let params = CevParams::new(0.0, 0.0, 1.0).unwrap();
        let noise = NoisePath::generate(3, 10);
        let path = euler_cev_path(&params, 50.0, 10, &noise).unwrap();
        assert!(path.prices().iter().all(|&p| p == 50.0));
    }

    #[test]
    fn zero_sigma_follows_compound_growth() {
        let params = CevParams::new(0.01, 0.0, 1.0).unwrap();
        let noise = NoisePath::generate(3, 2);
        let path = euler_cev_path(&params, 100.0, 2, &noise).unwrap();
        assert_eq!(path.prices().len(), 3);
        assert_relative_eq!(path.prices()[0], 100.0);
        assert_relative_eq!(path.prices()[1], 101.0, max_relative = 1e-12);
        assert_relative_eq!(path.prices()[2], 102.01, max_relative = 1e-12);
    }

    #[test]
    fn zero_sigma_matches_deterministic_recursion_exactly() {
        let params = CevParams::new(0.003, 0.0, 1.7).unwrap();
        let noise = NoisePath::generate(11, 64);
        let path = euler_cev_path(&params, 42.0, 64, &noise).unwrap();
        let mut s = 42.0_f64;
        for (step, &p) in path.prices().iter().enumerate() {
            assert_eq!(p, s, "step {step}");
            s += params.mu * s;
        }
    }

    #[test]
    fn gamma_one_matches_gbm_euler_form() {
        let params = CevParams::new(0.002, 0.015, 1.0).unwrap();
        let noise = NoisePath::generate(99, 200);
        let path = euler_cev_path(&params, 80.0, 200, &noise).unwrap();
        // Reference: S_{t+1} = S_t * (1 + mu + sigma * eps).
        let mut s = 80.0_f64;
        for (i, &p) in path.prices().iter().enumerate() {
            assert_relative_eq!(p, s, max_relative = 1e-12);
            if i < noise.len() {
                s *= 1.0 + params.mu + params.sigma * noise.draws()[i];
            }
        }
    }

    #[test]
    fn paths_are_bitwise_deterministic() {
        let params = CevParams::new(-0.001, 0.04, 0.5).unwrap();
        let a = euler_cev_path(&params, 10.0, 300, &NoisePath::generate(7, 300)).unwrap();
        let b = euler_cev_path(&params, 10.0, 300, &NoisePath::generate(7, 300)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_steps_clamp_to_floor() {
        // Additive noise (gamma = 0) with huge sigma forces negative steps.
        let params = CevParams::new(0.0, 1e6, 0.0).unwrap();
        let noise = NoisePath::generate(5, 50);
        let path = euler_cev_path(&params, 1.0, 50, &noise).unwrap();
        let floor = CLAMP_FLOOR_RATIO * 1.0;
        assert!(path.prices().iter().all(|&p| p > 0.0));
        assert!(path.prices().contains(&floor));
    }

    #[test]
    fn small_parameter_changes_move_the_path_smoothly() {
        let noise = NoisePath::generate(21, 100);
        let base = CevParams::new(0.001, 0.01, 1.0).unwrap();
        let bumped = CevParams::new(0.001 + 1e-6, 0.01, 1.0).unwrap();
        let a = euler_cev_path(&base, 100.0, 100, &noise).unwrap();
        let b = euler_cev_path(&bumped, 100.0, 100, &noise).unwrap();
        let max_diff = a
            .prices()
            .iter()
            .zip(b.prices())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(max_diff > 0.0 && max_diff < 0.1, "max_diff = {max_diff}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = CevParams::new(0.0, 0.01, 1.0).unwrap();
        let noise = NoisePath::generate(1, 4);
        assert!(matches!(
            euler_cev_path(&params, 0.0, 2, &noise),
            Err(SimError::NonPositiveInitialPrice(_))
        ));
        assert!(matches!(
            euler_cev_path(&params, 100.0, 5, &noise),
            Err(SimError::NoiseTooShort {
                needed: 5,
                available: 4
            })
        ));
        assert!(CevParams::new(0.0, -0.1, 1.0).is_err());
        assert!(CevParams::new(0.0, 0.1, -1.0).is_err());
    }

    #[test]
    fn jump_scales_the_initial_value() {
        assert_eq!(
            apply_jump_initial(100.0, JumpFactor::new(1.0).unwrap()),
            100.0
        );
        assert_eq!(
            apply_jump_initial(100.0, JumpFactor::new(0.9).unwrap()),
            90.0
        );
        assert_relative_eq!(
            apply_jump_initial(50.0, JumpFactor::new(1.1).unwrap()),
            55.0,
            max_relative = 1e-15
        );
        assert!(JumpFactor::new(0.0).is_err());
        assert!(JumpFactor::new(-1.0).is_err());
    }

    #[test]
    fn noise_is_reproducible_from_seed() {
        let a = NoisePath::generate(12345, 1000);
        let b = NoisePath::generate(12345, 1000);
        assert_eq!(a, b);
        let c = NoisePath::generate(12346, 1000);
        assert_ne!(a.draws(), c.draws());
    }

    #[test]
    fn derived_seeds_separate_labels_and_streams() {
        let a = derive_seed(42, "UAVS", 0);
        let b = derive_seed(42, "UAVS", 1);
        let c = derive_seed(42, "AACG", 0);
        let d = derive_seed(43, "UAVS", 0);
        assert!(a != b && a != c && a != d && b != c);
        assert_eq!(a, derive_seed(42, "UAVS", 0));
    }
}
