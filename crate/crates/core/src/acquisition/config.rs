use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Batch-proposal strategy. The string ids are stable and used in configs,
/// file names and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "tsrsr")]
    TsRsr,
    #[serde(rename = "ts")]
    Ts,
    #[serde(rename = "bucb")]
    Bucb,
    #[serde(rename = "ucbpe")]
    Ucbpe,
    #[serde(rename = "qei")]
    Qei,
    #[serde(rename = "sp")]
    Sp,
    #[serde(rename = "maxvar")]
    MaxVar,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::TsRsr,
        Strategy::Ts,
        Strategy::Bucb,
        Strategy::Ucbpe,
        Strategy::Qei,
        Strategy::Sp,
        Strategy::MaxVar,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Strategy::TsRsr => "tsrsr",
            Strategy::Ts => "ts",
            Strategy::Bucb => "bucb",
            Strategy::Ucbpe => "ucbpe",
            Strategy::Qei => "qei",
            Strategy::Sp => "sp",
            Strategy::MaxVar => "maxvar",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown strategy {s:?}")))
    }
}

/// How qEI fills in pending outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiarStrategy {
    /// Pending outcomes equal their posterior mean.
    #[default]
    KrigingBeliever,
}

/// Strategy parameters. Fields irrelevant to the chosen strategy are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    pub strategy: Strategy,
    /// TS-RSR redraws of f̃* allowed per slot while it falls below max μ.
    pub resample_cap: usize,
    /// Confidence parameter of the β schedule.
    pub delta: f64,
    /// Overrides the β schedule with a constant when set.
    pub beta: Option<f64>,
    pub liar: LiarStrategy,
    /// Boltzmann temperature for SP.
    pub temperature: f64,
}

impl AcquisitionConfig {
    pub fn new(strategy: Strategy) -> Self {
        AcquisitionConfig {
            strategy,
            resample_cap: 10,
            delta: 0.1,
            beta: None,
            liar: LiarStrategy::KrigingBeliever,
            temperature: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::invalid(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if let Some(b) = self.beta {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::invalid(format!("beta must be finite and nonnegative, got {b}")));
            }
        }
        Ok(())
    }

    /// β for iteration `t` (0-based) over `d` candidates.
    pub fn beta_at(&self, d: usize, t: usize) -> f64 {
        self.beta.unwrap_or_else(|| beta_schedule(d, t, self.delta))
    }
}

/// `β_t = 2 log(D (t+1)² π² / (6δ))`.
pub fn beta_schedule(d: usize, t: usize, delta: f64) -> f64 {
    let tp = (t + 1) as f64;
    2.0 * (d as f64 * tp * tp * PI * PI / (6.0 * delta)).ln()
}
