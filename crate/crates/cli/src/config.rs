//! Run configuration: defaults, the flat key=value config file, and flag
//! overrides (flags win).

use std::fmt;
use std::path::Path;

use breakfit_core::{GridCounts, ObjectiveKind, DEFAULT_BARS_PER_SIDE, DEFAULT_JUMP_FACTORS};

use crate::error::CliError;

/// Objective selection before the KL bin count is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveChoice {
    Mse,
    Mape,
    Kl,
}

impl ObjectiveChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "mse" => Ok(Self::Mse),
            "mape" => Ok(Self::Mape),
            "kl" => Ok(Self::Kl),
            other => Err(CliError::bad_args(format!(
                "unknown objective {other:?}, expected mse|mape|kl"
            ))),
        }
    }
}

impl fmt::Display for ObjectiveChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mse => write!(f, "mse"),
            Self::Mape => write!(f, "mape"),
            Self::Kl => write!(f, "kl"),
        }
    }
}

/// All fitting knobs with their defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bars_per_side: usize,
    pub counts: GridCounts,
    pub gamma_range: (f64, f64),
    pub jump_set: Vec<f64>,
    pub objective: ObjectiveChoice,
    pub seed: u64,
    pub kl_bins: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            bars_per_side: DEFAULT_BARS_PER_SIDE,
            counts: GridCounts::default(),
            gamma_range: breakfit_core::DEFAULT_GAMMA_RANGE,
            jump_set: DEFAULT_JUMP_FACTORS.to_vec(),
            objective: ObjectiveChoice::Mse,
            seed: 42,
            kl_bins: 20,
        }
    }
}

impl RunConfig {
    /// Loads the key=value file (if given), then applies flag overrides.
    pub fn load(
        path: Option<&Path>,
        seed: Option<u64>,
        objective: Option<&str>,
        bars_per_side: Option<usize>,
    ) -> Result<Self, CliError> {
        let mut config = Self::default();
        if let Some(path) = path {
            config.apply_file(path)?;
        }
        if let Some(seed) = seed {
            config.seed = seed;
        }
        if let Some(objective) = objective {
            config.objective = ObjectiveChoice::parse(objective)?;
        }
        if let Some(bars) = bars_per_side {
            config.bars_per_side = bars;
        }
        config.validate()?;
        Ok(config)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::bad_args(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::bad_args(format!(
                    "config line {}: expected key=value, got {line:?}",
                    number + 1
                ))
            })?;
            self.apply_entry(key.trim(), value.trim())
                .map_err(|e| CliError::bad_args(format!("config line {}: {e}", number + 1)))?;
        }
        Ok(())
    }

    fn apply_entry(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("bad value for {key}: {e}"))
        }
        match key {
            "bars_per_side" => self.bars_per_side = num(key, value)?,
            "n_mu" => self.counts.n_mu = num(key, value)?,
            "n_sigma" => self.counts.n_sigma = num(key, value)?,
            "n_gamma" => self.counts.n_gamma = num(key, value)?,
            "gamma_lo" => self.gamma_range.0 = num(key, value)?,
            "gamma_hi" => self.gamma_range.1 = num(key, value)?,
            "jump_set" => {
                self.jump_set = value
                    .split(',')
                    .map(|v| num::<f64>(key, v.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "objective" => {
                self.objective = ObjectiveChoice::parse(value).map_err(|e| e.to_string())?;
            }
            "seed" => self.seed = num(key, value)?,
            "kl_bins" => self.kl_bins = num(key, value)?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.bars_per_side == 0 {
            return Err(CliError::bad_args("bars_per_side must be at least 1"));
        }
        if self.counts.n_mu == 0 || self.counts.n_sigma == 0 || self.counts.n_gamma == 0 {
            return Err(CliError::bad_args("grid counts must all be at least 1"));
        }
        let (gamma_lo, gamma_hi) = self.gamma_range;
        let gamma_ok =
            gamma_lo.is_finite() && gamma_hi.is_finite() && (0.0..gamma_hi).contains(&gamma_lo);
        if !gamma_ok {
            return Err(CliError::bad_args(format!(
                "gamma range must satisfy 0 <= lo < hi, got ({gamma_lo}, {gamma_hi})"
            )));
        }
        if self.jump_set.is_empty() {
            return Err(CliError::bad_args("jump_set must be non-empty"));
        }
        for pair in self.jump_set.windows(2) {
            if pair[1] <= pair[0] {
                return Err(CliError::bad_args("jump_set must be strictly increasing"));
            }
        }
        if self.jump_set.iter().any(|&y| !(y.is_finite() && y > 0.0)) {
            return Err(CliError::bad_args("jump_set values must be positive"));
        }
        if self.kl_bins < 2 {
            return Err(CliError::bad_args("kl_bins must be at least 2"));
        }
        Ok(())
    }

    pub fn objective_kind(&self) -> ObjectiveKind {
        match self.objective {
            ObjectiveChoice::Mse => ObjectiveKind::Mse,
            ObjectiveChoice::Mape => ObjectiveKind::Mape,
            ObjectiveChoice::Kl => ObjectiveKind::Kl { bins: self.kl_bins },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_the_documented_knobs() {
        let config = RunConfig::default();
        assert_eq!(config.bars_per_side, 390);
        assert_eq!(
            config.counts,
            GridCounts {
                n_mu: 20,
                n_sigma: 30,
                n_gamma: 21
            }
        );
        assert_eq!(config.gamma_range, (0.0, 2.0));
        assert_eq!(config.jump_set, vec![0.9, 1.0, 1.1]);
        assert_eq!(config.objective, ObjectiveChoice::Mse);
        assert_eq!(config.seed, 42);
        assert_eq!(config.kl_bins, 20);
    }

    #[test]
    fn file_overrides_defaults_and_flags_override_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# fit setup").unwrap();
        writeln!(file, "bars_per_side = 30").unwrap();
        writeln!(file, "seed = 7").unwrap();
        writeln!(file, "objective = mape").unwrap();
        writeln!(file, "jump_set = 0.8,1.0,1.2").unwrap();
        file.flush().unwrap();
        let config = RunConfig::load(Some(file.path()), Some(99), None, None).unwrap();
        assert_eq!(config.bars_per_side, 30);
        assert_eq!(config.seed, 99); // flag wins
        assert_eq!(config.objective, ObjectiveChoice::Mape);
        assert_eq!(config.jump_set, vec![0.8, 1.0, 1.2]);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "volume = 11").unwrap();
        file.flush().unwrap();
        assert!(RunConfig::load(Some(file.path()), None, None, None).is_err());

        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "n_mu = zero").unwrap();
        file.flush().unwrap();
        assert!(RunConfig::load(Some(file.path()), None, None, None).is_err());
    }

    #[test]
    fn validation_rejects_degenerate_settings() {
        assert!(RunConfig::load(None, None, Some("nope"), None).is_err());
        assert!(RunConfig::load(None, None, None, Some(0)).is_err());
        let unordered = RunConfig {
            jump_set: vec![1.1, 0.9],
            ..RunConfig::default()
        };
        assert!(unordered.validate().is_err());
        let negative = RunConfig {
            jump_set: vec![-0.5],
            ..RunConfig::default()
        };
        assert!(negative.validate().is_err());
    }

    #[test]
    fn kl_choice_carries_the_bin_count() {
        let config = RunConfig {
            objective: ObjectiveChoice::Kl,
            kl_bins: 12,
            ..RunConfig::default()
        };
        assert_eq!(config.objective_kind(), ObjectiveKind::Kl { bins: 12 });
    }
}
