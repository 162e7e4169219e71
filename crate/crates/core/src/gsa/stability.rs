//! Stability of a solution under repeated noisy best responses.
//!
//! From every initial profile, players keep switching to a best response
//! against the opponent's current strategy. The payoff trajectory over the
//! final window decides the class: pinned to the solution payoff
//! (asymptotic), inside its ε band (marginal), or neither.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ProfileIndex, Result};
use crate::game::EmpiricalGame;
use crate::rng::{rng_from, SimRng};
use crate::stats::confidence_interval_from_stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    AsymptoticallyStable,
    MarginallyStable,
    Instable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Players move in turn, player 1 first.
    #[default]
    Alternating,
    /// Both players respond to the previous profile at once.
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffNoise {
    /// Every evaluation draws one stored replication of the profile.
    #[default]
    Resample,
    /// Mean payoffs only.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub steps: usize,
    /// Share of final steps forming the classification window.
    pub window_fraction: f64,
    pub rule: UpdateRule,
    pub noise: PayoffNoise,
    /// Band for asymptotic stability; by default the CI half-width of the
    /// solution payoff.
    pub as_tolerance: Option<f64>,
    pub alpha: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            steps: 2000,
            window_fraction: 0.1,
            rule: UpdateRule::Alternating,
            noise: PayoffNoise::Resample,
            as_tolerance: None,
            alpha: 0.05,
        }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("stability.steps", "must be >= 1"));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return Err(Error::config("stability.window_fraction", "must lie in (0, 1]"));
        }
        if let Some(t) = self.as_tolerance {
            if !(t >= 0.0) {
                return Err(Error::config("stability.as_tolerance", "must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn window(&self) -> usize {
        ((self.steps as f64 * self.window_fraction).ceil() as usize).clamp(1, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StabilityRatios {
    pub asymptotic: f64,
    pub marginal: f64,
    pub instable: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub solution: ProfileIndex,
    pub epsilon: f64,
    pub tolerance: f64,
    pub classes: Vec<(ProfileIndex, StabilityClass)>,
    pub ratios: StabilityRatios,
}

struct PayoffView {
    means: Vec<[f64; 2]>,
    samples: Vec<Option<[Vec<f64>; 2]>>,
    n: usize,
}

impl PayoffView {
    fn new(game: &EmpiricalGame) -> Result<Self> {
        let n = game.num_strategies();
        let mut means = Vec::with_capacity(n * n);
        let mut samples = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                means.push([game.payoff((a, b), 0)?, game.payoff((a, b), 1)?]);
                samples.push(
                    game.entry((a, b))
                        .and_then(|e| e.samples)
                        .filter(|s| !s.is_empty())
                        .map(|s| [s.samples(0), s.samples(1)]),
                );
            }
        }
        Ok(PayoffView { means, samples, n })
    }

    fn value(&self, p: ProfileIndex, player: usize, noise: PayoffNoise, rng: &mut SimRng) -> f64 {
        let idx = p.0 * self.n + p.1;
        match (noise, &self.samples[idx]) {
            (PayoffNoise::Resample, Some(s)) => s[player][rng.random_range(0..s[player].len())],
            _ => self.means[idx][player],
        }
    }

    fn best_response(&self, player: usize, current: ProfileIndex, noise: PayoffNoise, rng: &mut SimRng) -> usize {
        let mut best = f64::NEG_INFINITY;
        let mut ties: Vec<usize> = Vec::new();
        for s in 0..self.n {
            let p = if player == 0 { (s, current.1) } else { (current.0, s) };
            let u = self.value(p, player, noise, rng);
            if u > best {
                best = u;
                ties.clear();
                ties.push(s);
            } else if u == best {
                ties.push(s);
            }
        }
        if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.random_range(0..ties.len())]
        }
    }
}

/// Deterministic best-response path used by the dynamics: profile after
/// each of `steps` updates from `start`.
fn trajectory(
    view: &PayoffView,
    start: ProfileIndex,
    cfg: &StabilityConfig,
    rng: &mut SimRng,
) -> Vec<ProfileIndex> {
    let mut cur = start;
    let mut path = Vec::with_capacity(cfg.steps);
    for t in 0..cfg.steps {
        cur = match cfg.rule {
            UpdateRule::Alternating => {
                if t % 2 == 0 {
                    (view.best_response(0, cur, cfg.noise, rng), cur.1)
                } else {
                    (cur.0, view.best_response(1, cur, cfg.noise, rng))
                }
            }
            UpdateRule::Simultaneous => {
                let a = view.best_response(0, cur, cfg.noise, rng);
                let b = view.best_response(1, cur, cfg.noise, rng);
                (a, b)
            }
        };
        path.push(cur);
    }
    path
}

/// Classifies every initial profile by where best-response dynamics lead.
pub fn stability_analysis(
    game: &EmpiricalGame,
    solution: ProfileIndex,
    epsilon: f64,
    cfg: &StabilityConfig,
    seed: u64,
) -> Result<StabilityResult> {
    cfg.validate()?;
    if !(epsilon >= 0.0) {
        return Err(Error::param(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let missing = game.missing_profiles();
    if !missing.is_empty() {
        return Err(Error::IncompleteGame { missing });
    }
    let view = PayoffView::new(game)?;
    let target = [game.payoff(solution, 0)?, game.payoff(solution, 1)?];
    let tolerance = match cfg.as_tolerance {
        Some(t) => t,
        None => {
            let mut hw: f64 = 0.0;
            for player in 0..2 {
                let st = game.stats(solution, player)?;
                if st.n >= 2 {
                    hw = hw.max(confidence_interval_from_stats(&st, cfg.alpha)?.half_width);
                }
            }
            hw
        }
    };
    // Floating-point floor so exact payoff matches always count.
    let tol = tolerance.max(1e-9 * target[0].abs().max(target[1].abs()).max(1.0));
    let window = cfg.window();
    let n = game.num_strategies();
    let starts: Vec<ProfileIndex> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();

    let classes: Vec<(ProfileIndex, StabilityClass)> = starts
        .par_iter()
        .map(|&start| {
            let mut rng = rng_from(&[seed, 0x57AB, start.0 as u64, start.1 as u64]);
            let path = trajectory(&view, start, cfg, &mut rng);
            let dev = path[path.len() - window..]
                .iter()
                .map(|&p| {
                    let u = view.means[p.0 * n + p.1];
                    (u[0] - target[0]).abs().max((u[1] - target[1]).abs())
                })
                .fold(0.0, f64::max);
            let class = if dev <= tol {
                StabilityClass::AsymptoticallyStable
            } else if dev <= epsilon + tol {
                StabilityClass::MarginallyStable
            } else {
                StabilityClass::Instable
            };
            (start, class)
        })
        .collect();

    let total = classes.len() as f64;
    let count = |c: StabilityClass| classes.iter().filter(|x| x.1 == c).count() as f64 / total;
    let asymptotic = count(StabilityClass::AsymptoticallyStable);
    let marginal = count(StabilityClass::MarginallyStable);
    Ok(StabilityResult {
        solution,
        epsilon,
        tolerance,
        ratios: StabilityRatios {
            asymptotic,
            marginal,
            instable: 1.0 - asymptotic - marginal,
        },
        classes,
    })
}
