use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Seven nested candidates, four truths, boxplots of scores.
    #[serde(rename = "fig1")]
    Fig1Boxplots,
    /// Two non-nested candidates along growing sample size.
    #[serde(rename = "fig2")]
    Fig2NonNested,
    /// Two nested candidates along growing sample size.
    #[serde(rename = "fig3")]
    Fig3Nested,
    #[serde(rename = "gamma-normal")]
    GammaVsNormal,
    #[serde(rename = "pareto-normal")]
    ParetoVsNormal,
}

impl Scenario {
    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::Fig1Boxplots => "fig1",
            Scenario::Fig2NonNested => "fig2",
            Scenario::Fig3Nested => "fig3",
            Scenario::GammaVsNormal => "gamma-normal",
            Scenario::ParetoVsNormal => "pareto-normal",
        }
    }

    pub fn is_trajectory(&self) -> bool {
        matches!(self, Scenario::Fig2NonNested | Scenario::Fig3Nested)
    }

    pub fn is_univariate(&self) -> bool {
        matches!(self, Scenario::GammaVsNormal | Scenario::ParetoVsNormal)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Scenario::Fig1Boxplots),
            "fig2" => Ok(Scenario::Fig2NonNested),
            "fig3" => Ok(Scenario::Fig3Nested),
            "gamma-normal" => Ok(Scenario::GammaVsNormal),
            "pareto-normal" => Ok(Scenario::ParetoVsNormal),
            other => Err(Error::InvalidParameters(format!(
                "unknown scenario '{other}'"
            ))),
        }
    }
}

/// Prior placed on the coefficients of every linear candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMode {
    Improper,
    /// `N(0, c sigma2 I)`.
    Proper(f64),
}

impl fmt::Display for PriorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorMode::Improper => f.write_str("improper"),
            PriorMode::Proper(c) => write!(f, "proper:{c}"),
        }
    }
}

impl FromStr for PriorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "improper" {
            return Ok(PriorMode::Improper);
        }
        if let Some(c) = s.strip_prefix("proper:") {
            let c: f64 = c
                .parse()
                .map_err(|_| Error::InvalidParameters(format!("bad prior multiplier in '{s}'")))?;
            if c > 0.0 && c.is_finite() {
                return Ok(PriorMode::Proper(c));
            }
        }
        Err(Error::InvalidParameters(format!(
            "prior must be 'improper' or 'proper:C' with C > 0, got '{s}'"
        )))
    }
}

/// Data-generating values and conjugate hyperparameters for the
/// Gamma/Pareto versus Normal studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnivariateSettings {
    pub gamma_shape: f64,
    pub gamma_rate: f64,
    pub pareto_x_min: f64,
    pub pareto_shape: f64,
    /// Gamma(a, b) prior on the Gamma rate or the Pareto shape.
    pub prior_a: f64,
    pub prior_b: f64,
    /// Prior mean of the Normal candidate's location.
    pub normal_prior_mean: f64,
}

impl Default for UnivariateSettings {
    fn default() -> Self {
        Self {
            gamma_shape: 2.0,
            gamma_rate: 1.0,
            pareto_x_min: 1.0,
            pareto_shape: 3.0,
            prior_a: 1.0,
            prior_b: 1.0,
            normal_prior_mean: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Sample size; the largest prefix length for trajectory scenarios.
    pub n: usize,
    pub reps: usize,
    pub sigma2: f64,
    /// Prior variance multipliers `c` in `V = c sigma2 I` for trajectories.
    pub c_grid: Vec<f64>,
    pub master_seed: u64,
    /// Prior used by the boxplot study.
    pub prior_mode: PriorMode,
    #[serde(default)]
    pub univariate: UnivariateSettings,
}

pub const DEFAULT_C_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

impl ExperimentConfig {
    pub fn default_for(scenario: Scenario) -> Self {
        let (n, reps) = match scenario {
            Scenario::Fig1Boxplots => (100, 1000),
            Scenario::Fig2NonNested | Scenario::Fig3Nested => (1000, 20),
            Scenario::GammaVsNormal | Scenario::ParetoVsNormal => (100, 100),
        };
        Self {
            scenario,
            n,
            reps,
            sigma2: 10.0,
            c_grid: DEFAULT_C_GRID.to_vec(),
            master_seed: 1,
            prior_mode: PriorMode::Improper,
            univariate: UnivariateSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameters("reps must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameters("n must be at least 1".into()));
        }
        if self.scenario.is_trajectory() && self.n < 2 {
            return Err(Error::InvalidParameters(
                "trajectory scenarios need a largest sample size of at least 2".into(),
            ));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        if self.scenario.is_trajectory() {
            if self.c_grid.is_empty() {
                return Err(Error::InvalidParameters("c grid is empty".into()));
            }
            if let Some(c) = self.c_grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
                return Err(Error::InvalidParameters(format!(
                    "c must be positive, got {c}"
                )));
            }
        }
        if let PriorMode::Proper(c) = self.prior_mode {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameters(format!(
                    "c must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }
}
