//! Experiment configuration file.
//!
//! One TOML document holds everything a run needs: the baseline company
//! policy, the factor-level table, run length and market, the GSA schedule
//! and sampling policy, seeds and output location. Unknown keys are errors,
//! missing keys take their defaults, and [`ExperimentConfig::to_toml`] writes
//! the fully resolved result back out.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{CompanyPolicy, Detailed, FactorRef, FactorTable, FactorValue, Level};
use crate::game::Strategy;
use crate::gsa::{GsaConfig, SimulationSource};
use crate::runner::{RunConfig, StrategyProfile};

/// Version of the configuration layout; a file must state it.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// The shipped configuration: case-study factor levels and schedule.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub seed: u64,
    pub replications: usize,
    /// Factor levels of player 1 on top of the baseline; empty means the
    /// baseline itself.
    pub player1: BTreeMap<FactorRef, Level>,
    pub player2: BTreeMap<FactorRef, Level>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            seed: 1,
            replications: 1,
            player1: BTreeMap::new(),
            player2: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub baseline: CompanyPolicy,
    /// Levels per detailed factor, as `[L, H]` or `[L, ML, MH, H]`. Factors
    /// left out keep the case-study values.
    pub factor_table: BTreeMap<Detailed, Vec<FactorValue>>,
    pub run: RunConfig,
    pub simulate: SimulateConfig,
    pub gsa: GsaConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: CONFIG_SCHEMA_VERSION,
            output_dir: PathBuf::from("gsa-out"),
            jobs: 0,
            baseline: CompanyPolicy::default(),
            factor_table: BTreeMap::new(),
            run: RunConfig::default(),
            simulate: SimulateConfig::default(),
            gsa: GsaConfig::default(),
        }
        .resolved()
        .expect("built-in defaults are valid")
    }
}

/// Puts `parent.` in front of keys reported by a nested validator.
fn scoped<T>(parent: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { key, message } if !key.starts_with(&format!("{parent}.")) => Error::Config {
            key: format!("{parent}.{key}"),
            message,
        },
        other => other,
    })
}

impl ExperimentConfig {
    /// Parses and validates a TOML document; all defaults are filled in.
    pub fn from_toml(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::config("schema_version", "config file is empty"));
        }
        let de = toml::Deserializer::parse(text).map_err(|e| Error::Parse(e.to_string()))?;
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            Error::config(key, e.into_inner().message().to_string())
        })?;
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        if !table.contains_key("schema_version") {
            return Err(Error::config("schema_version", "missing; this build reads version 1"));
        }
        cfg.resolved()
    }

    /// Fills the factor table with every factor's four levels and validates.
    pub fn resolved(mut self) -> Result<Self> {
        let table = self.factor_table()?;
        self.factor_table = Detailed::ALL
            .iter()
            .map(|&d| (d, table.levels(d).to_vec()))
            .collect();
        self.validate()?;
        Ok(self)
    }

    pub fn factor_table(&self) -> Result<FactorTable> {
        let mut table = FactorTable::default();
        for (&d, values) in &self.factor_table {
            scoped("factor_table", table.set(d, values))?;
        }
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}, expected {CONFIG_SCHEMA_VERSION}", self.schema_version),
            ));
        }
        scoped("baseline", self.baseline.validate())?;
        let table = self.factor_table()?;
        scoped("factor_table", table.validate(&self.baseline))?;
        scoped("run", self.run.validate())?;
        scoped("gsa", self.gsa.validate())?;
        if self.simulate.replications == 0 {
            return Err(Error::config("simulate.replications", "must be >= 1"));
        }
        for (key, levels) in [("simulate.player1", &self.simulate.player1), ("simulate.player2", &self.simulate.player2)] {
            scoped(key, Self::strategy(levels).policy_in(&self.baseline, &table))?;
        }
        Ok(())
    }

    fn strategy(levels: &BTreeMap<FactorRef, Level>) -> Strategy {
        Strategy::from_levels(levels.iter().map(|(&f, &l)| (f, l)).collect())
    }

    /// Strategy pair of the `simulate` section.
    pub fn simulate_profile(&self) -> Result<(StrategyProfile, [Strategy; 2])> {
        let table = self.factor_table()?;
        let s1 = Self::strategy(&self.simulate.player1);
        let s2 = Self::strategy(&self.simulate.player2);
        let profile = StrategyProfile::new(s1.policy_in(&self.baseline, &table)?, s2.policy_in(&self.baseline, &table)?);
        Ok((profile, [s1, s2]))
    }

    pub fn simulation_source(&self) -> Result<SimulationSource> {
        Ok(SimulationSource {
            base: self.baseline.clone(),
            table: self.factor_table()?,
            run: self.run.clone(),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    ExperimentConfig::from_toml(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn shipped_default_matches_builtin() {
        let cfg = ExperimentConfig::from_toml(DEFAULT_CONFIG).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn resolved_output_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn empty_file_is_rejected() {
        assert!(ExperimentConfig::from_toml("").is_err());
        assert!(ExperimentConfig::from_toml("  \n# nothing\n").is_err());
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = ExperimentConfig::from_toml("schema_version = 1\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let e = ExperimentConfig::from_toml("schema_version = 1\n[run.market]\nn_agentz = 5\n").unwrap_err();
        let key = key_of(e);
        assert!(key.starts_with("run.market"), "{key}");
    }

    #[test]
    fn positive_price_sensitivity_to_inventory_is_a_range_error() {
        let e = ExperimentConfig::from_toml("schema_version = 1\n[baseline.sd]\npsens_i = 0.5\n").unwrap_err();
        assert_eq!(key_of(e), "baseline.sd.psens_i");
        let e = ExperimentConfig::from_toml(
            "schema_version = 1\n[factor_table]\nprice_sensitivity_inventory = [0.5, -0.5]\n",
        )
        .unwrap_err();
        assert_eq!(key_of(e), "factor_table.price_sensitivity_inventory");
    }

    #[test]
    fn nested_validators_are_scoped() {
        let e = ExperimentConfig::from_toml("schema_version = 1\n[run.market]\nn_agents = 0\n").unwrap_err();
        assert_eq!(key_of(e), "run.market.n_agents");
        let e = ExperimentConfig::from_toml("schema_version = 1\n[gsa.sampling]\ninitial_n = 10\ntrim_per_tail = 5\n")
            .unwrap_err();
        assert_eq!(key_of(e), "gsa.sampling.trim_per_tail");
    }

    #[test]
    fn two_value_factor_levels_are_interpolated() {
        let cfg = ExperimentConfig::from_toml("schema_version = 1\n[factor_table]\nlayoff_time = [2.0, 8.0]\n").unwrap();
        let t = cfg.factor_table().unwrap();
        assert_eq!(t.value(Detailed::LayoffTime, Level::ML), FactorValue::Scalar(4.0));
        assert_eq!(cfg.factor_table[&Detailed::LayoffTime].len(), 4);
    }

    #[test]
    fn unknown_factor_in_profile_is_rejected() {
        let e = ExperimentConfig::from_toml("schema_version = 1\n[simulate.player1]\nwarp_drive = \"H\"\n").unwrap_err();
        assert!(key_of(e).starts_with("simulate.player1"));
    }
}
