use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ProfileIndex, Result};
use crate::factors::{FactorRef, Level};
use crate::stats::ConfidenceInterval;

use super::doe::{FactorPlan, InteractionEffect};
use super::evaluation::{CrossIterationTest, NeighborTest, TolerancePoint};
use super::stability::StabilityResult;

/// Bumped whenever a report field changes meaning or shape.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub index: usize,
    pub label: String,
    pub levels: Vec<(FactorRef, Level)>,
}

/// Payoff CI of one player from the initial sample and from all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffCi {
    pub initial: ConfidenceInterval,
    pub extended: ConfidenceInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub profile: ProfileIndex,
    pub payoff: [PayoffCi; 2],
    pub regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub profile: ProfileIndex,
    pub exact: bool,
    pub regret: f64,
    pub payoff: [PayoffCi; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoeFactorReport {
    pub factor: FactorRef,
    pub effect: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsaIterationReport {
    pub schema_version: u32,
    /// 1-based iteration number.
    pub iteration: usize,
    pub plan: FactorPlan,
    pub strategies: Vec<StrategyReport>,
    /// Stored (upper-triangular) profiles.
    pub profiles: usize,
    pub initial_samples: usize,
    pub trim_per_tail: usize,
    /// Replications simulated in this iteration.
    pub replications: u64,
    /// Set when the replication budget ran out; the remaining fields then
    /// describe whatever was completed.
    pub truncated: Option<String>,
    pub solution: Option<SolutionReport>,
    pub equilibria: Vec<EquilibriumReport>,
    pub tolerance_curve: Vec<TolerancePoint>,
    pub doe: Vec<DoeFactorReport>,
    pub doe_interactions: Vec<InteractionEffect>,
    pub neighbor_tests: Vec<NeighborTest>,
    pub stability: Option<StabilityResult>,
    pub next_plan: Option<FactorPlan>,
}

impl GsaIterationReport {
    /// Structural checks a consumer can rely on.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "report schema {} != supported {}",
                self.schema_version, REPORT_SCHEMA_VERSION
            )));
        }
        let s = self.strategies.len();
        if self.truncated.is_none() && self.profiles != s * (s + 1) / 2 {
            return Err(Error::State(format!(
                "{} profiles stored for {s} strategies",
                self.profiles
            )));
        }
        if let Some(st) = &self.stability {
            let r = st.ratios;
            let sum = r.asymptotic + r.marginal + r.instable;
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::State(format!("stability ratios sum to {sum}")));
            }
        }
        for eq in &self.equilibria {
            if eq.profile.0 >= s || eq.profile.1 >= s {
                return Err(Error::State(format!("equilibrium {:?} out of range", eq.profile)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsaSummary {
    pub schema_version: u32,
    pub iterations: usize,
    /// Average of both players' payoff at each iteration's solution.
    pub solution_payoffs: Vec<Option<f64>>,
    pub cross_iteration: Vec<CrossIterationTest>,
    /// Final solution payoff above the first; `None` with fewer than two
    /// solved iterations.
    pub payoff_increased: Option<bool>,
    pub truncated: bool,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
