//! Python bindings. Simple results come back as Python numbers and lists;
//! structured reports come back as JSON text for `json.loads`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use duopoly_core::config::{ExperimentConfig, DEFAULT_CONFIG};
use duopoly_core::game::{self, EmpiricalGame};
use duopoly_core::gsa::{self, CheckpointStore, StabilityConfig};
use duopoly_core::rng::{replication_seed, ReplicationSeed};
use duopoly_core::runner::{compute_payoff, estimate_payoffs, run_replication};
use duopoly_core::stats;

fn py_err(e: duopoly_core::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn config(text: Option<&str>) -> PyResult<ExperimentConfig> {
    ExperimentConfig::from_toml(text.unwrap_or(DEFAULT_CONFIG)).map_err(py_err)
}

/// The shipped configuration as TOML text.
#[pyfunction]
fn default_config() -> &'static str {
    DEFAULT_CONFIG
}

/// Validates a TOML configuration and returns it with every default filled in.
#[pyfunction]
fn resolve_config(text: &str) -> PyResult<String> {
    config(Some(text))?.to_toml().map_err(py_err)
}

/// Unordered strategy pairs plus the diagonal for `s` strategies.
#[pyfunction]
fn symmetric_profile_count(s: u64) -> u64 {
    game::symmetric_profile_count(s)
}

#[pyfunction]
fn trim_samples(samples: Vec<f64>, k: usize) -> PyResult<Vec<f64>> {
    stats::trim_samples(&samples, k).map_err(py_err)
}

/// `(mean, half_width)` of the t confidence interval.
#[pyfunction]
#[pyo3(signature = (samples, alpha=0.05))]
fn confidence_interval(samples: Vec<f64>, alpha: f64) -> PyResult<(f64, f64)> {
    let ci = stats::confidence_interval(&samples, alpha).map_err(py_err)?;
    Ok((ci.mean, ci.half_width))
}

/// One replication of the configured strategy pair, as JSON with the cost
/// breakdown and the daily series of both companies.
#[pyfunction]
#[pyo3(signature = (config_toml=None, seed=1))]
fn simulate(py: Python<'_>, config_toml: Option<&str>, seed: u64) -> PyResult<String> {
    let cfg = config(config_toml)?;
    let (profile, _) = cfg.simulate_profile().map_err(py_err)?;
    let rep = py
        .detach(|| run_replication(&profile, &cfg.run, ReplicationSeed::new(replication_seed(seed, &[], 0))))
        .map_err(py_err)?;
    let out = serde_json::json!({
        "payoff": compute_payoff(&rep, &cfg.run.cost_rates),
        "costs": rep.cost_breakdown(&cfg.run.cost_rates),
        "series": rep.series,
        "conservation_error": rep.conservation_error,
    });
    to_json(&out)
}

/// Payoff samples `(player1, player2)` of `n` replications.
#[pyfunction]
#[pyo3(signature = (n, config_toml=None, seed=1))]
fn estimate(py: Python<'_>, n: usize, config_toml: Option<&str>, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = config(config_toml)?;
    let (profile, _) = cfg.simulate_profile().map_err(py_err)?;
    let set = py
        .detach(|| estimate_payoffs(&profile, n, &cfg.run, seed, &[]))
        .map_err(py_err)?;
    Ok((set.samples(0), set.samples(1)))
}

/// Runs the iterative refinement. Returns the reports and summary as JSON;
/// with `out_dir`, also writes them there and checkpoints each iteration.
#[pyfunction]
#[pyo3(signature = (config_toml=None, out_dir=None))]
fn run_gsa(py: Python<'_>, config_toml: Option<&str>, out_dir: Option<PathBuf>) -> PyResult<String> {
    let cfg = config(config_toml)?;
    let source = cfg.simulation_source().map_err(py_err)?;
    let out = py
        .detach(|| -> duopoly_core::Result<_> {
            let store = out_dir.as_ref().map(|d| CheckpointStore::new(d.join("checkpoints"))).transpose()?;
            let out = gsa::run_gsa(&cfg.gsa, &source, store.as_ref())?;
            if let Some(d) = &out_dir {
                gsa::write_outputs(&out, d)?;
            }
            Ok(out)
        })
        .map_err(py_err)?;
    to_json(&serde_json::json!({ "reports": out.reports, "summary": out.summary }))
}

/// Normal-form game with estimated payoffs.
#[pyclass(name = "EmpiricalGame", frozen)]
struct PyGame {
    inner: EmpiricalGame,
}

#[pymethods]
impl PyGame {
    /// Symmetric game from player 1's payoff matrix.
    #[staticmethod]
    fn symmetric(matrix: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyGame {
            inner: EmpiricalGame::symmetric_from_matrix(&matrix).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn bimatrix(u1: Vec<Vec<f64>>, u2: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyGame {
            inner: EmpiricalGame::from_bimatrix(&u1, &u2).map_err(py_err)?,
        })
    }

    /// Parses the payoff-matrix CSV layout written by `to_csv`.
    #[staticmethod]
    #[pyo3(signature = (text, symmetric=true))]
    fn from_csv(text: &str, symmetric: bool) -> PyResult<Self> {
        Ok(PyGame {
            inner: EmpiricalGame::read_csv(text.as_bytes(), symmetric).map_err(py_err)?,
        })
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).map_err(py_err)?;
        String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn num_strategies(&self) -> usize {
        self.inner.num_strategies()
    }

    fn labels(&self) -> Vec<String> {
        (0..self.inner.num_strategies()).map(|i| self.inner.space.label(i)).collect()
    }

    fn payoff(&self, row: usize, column: usize, player: usize) -> PyResult<f64> {
        self.inner.payoff((row, column), player).map_err(py_err)
    }

    fn regret(&self, row: usize, column: usize) -> PyResult<f64> {
        game::regret(&self.inner, (row, column)).map_err(py_err)
    }

    #[pyo3(signature = (epsilon=0.0))]
    fn pure_nash(&self, epsilon: f64) -> PyResult<Vec<(usize, usize)>> {
        game::pure_nash(&self.inner, epsilon).map_err(py_err)
    }

    /// `(row, column, exact, regret)` of the selected solution profile.
    fn solution(&self) -> PyResult<(usize, usize, bool, f64)> {
        let s = gsa::select_solution(&self.inner).map_err(py_err)?;
        Ok((s.profile.0, s.profile.1, s.exact, s.regret))
    }

    /// `(asymptotic, marginal, instable)` shares of starting profiles.
    #[pyo3(signature = (row, column, epsilon, steps=2000, seed=0, resample=true))]
    fn stability(
        &self,
        py: Python<'_>,
        row: usize,
        column: usize,
        epsilon: f64,
        steps: usize,
        seed: u64,
        resample: bool,
    ) -> PyResult<(f64, f64, f64)> {
        let cfg = StabilityConfig {
            steps,
            noise: if resample {
                gsa::PayoffNoise::Resample
            } else {
                gsa::PayoffNoise::None
            },
            ..StabilityConfig::default()
        };
        let r = py
            .detach(|| gsa::stability_analysis(&self.inner, (row, column), epsilon, &cfg, seed))
            .map_err(py_err)?;
        Ok((r.ratios.asymptotic, r.ratios.marginal, r.ratios.instable))
    }

    /// `(epsilon, number of ε-equilibria)` for each tolerance.
    fn tolerance_curve(&self, epsilons: Vec<f64>) -> PyResult<Vec<(f64, usize)>> {
        let curve = gsa::tolerance_curve(&self.inner, &epsilons).map_err(py_err)?;
        Ok(curve.into_iter().map(|p| (p.epsilon, p.equilibria.len())).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "EmpiricalGame(strategies={}, symmetric={})",
            self.inner.num_strategies(),
            self.inner.space.symmetric
        )
    }
}

#[pymodule]
fn duopoly(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_config, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_profile_count, m)?)?;
    m.add_function(wrap_pyfunction!(trim_samples, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_interval, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(run_gsa, m)?)?;
    Ok(())
}
