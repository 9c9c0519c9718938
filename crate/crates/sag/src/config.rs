//! TOML experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use sag_core::arrival::EstimateConfig;
use sag_core::datagen::{GeneratorSpec, TypeVolume};
use sag_core::{Interpolation, PayoffStructure, TypePayoff};

use crate::error::Failure;

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub budget: f64,
    pub alpha: f64,
    pub rollback_threshold: f64,
    pub bucket_width: u32,
    #[serde(default)]
    pub interpolation: Interpolation,
    pub grid_step: f64,
    pub experiment: ExperimentConfig,
    pub types: Vec<TypeConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Synthetic days generated when no alert log is supplied.
    pub days: usize,
    /// Days of history each test day is forecast from.
    pub history_days: usize,
    /// Trailing days that are replayed.
    pub test_days: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeConfig {
    pub name: String,
    pub u_dc: f64,
    pub u_du: f64,
    pub u_ac: f64,
    pub u_au: f64,
    pub audit_cost: f64,
    pub quit_prob: f64,
    pub quit_loss: f64,
    pub daily_mean: f64,
    pub daily_std: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled configuration is valid")
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let config: Config = toml::from_str(text).map_err(|e| Failure::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads `path`, or the bundled defaults when `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.payoffs()?;
        if !(self.budget.is_finite() && self.budget >= 0.0) {
            return Err(Failure::config("budget must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Failure::config("alpha must lie in [0, 1)"));
        }
        if self.bucket_width == 0 {
            return Err(Failure::config("bucket_width must be positive"));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(Failure::config("grid_step must lie in (0, 1]"));
        }
        let e = &self.experiment;
        if e.history_days == 0 || e.test_days == 0 || e.history_days + e.test_days > e.days {
            return Err(Failure::config(
                "experiment needs history_days + test_days <= days, both positive",
            ));
        }
        Ok(())
    }

    pub fn payoffs(&self) -> Result<PayoffStructure, Failure> {
        let types = self
            .types
            .iter()
            .map(|t| TypePayoff {
                u_dc: t.u_dc,
                u_du: t.u_du,
                u_ac: t.u_ac,
                u_au: t.u_au,
                audit_cost: t.audit_cost,
                quit_prob: t.quit_prob,
                quit_loss: t.quit_loss,
            })
            .collect();
        Ok(PayoffStructure::new(types)?)
    }

    pub fn generator_spec(&self) -> GeneratorSpec {
        GeneratorSpec::new(
            self.types
                .iter()
                .map(|t| TypeVolume {
                    mean: t.daily_mean,
                    std_dev: t.daily_std,
                })
                .collect(),
        )
    }

    pub fn estimate_config(&self) -> EstimateConfig {
        EstimateConfig {
            rollback_threshold: self.rollback_threshold,
            interpolation: self.interpolation,
        }
    }

    pub fn type_names(&self) -> Vec<&str> {
        self.types.iter().map(|t| t.name.as_str()).collect()
    }
}
