//! Statistical evaluation of an equilibrium: neighbor strictness tests,
//! tolerance curves and cross-iteration comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{ProfileIndex, Result};
use crate::game::{pure_nash, regret, EmpiricalGame};
use crate::stats::{welch_from_stats, welch_t_test, Alternative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborTest {
    pub profile: ProfileIndex,
    pub mean: f64,
    pub p_value: f64,
}

/// Two-sided Welch tests of `player`'s equilibrium payoff against the `k`
/// other profiles whose mean payoff is closest to it.
pub fn neighbor_strictness_test(
    game: &EmpiricalGame,
    equilibrium: ProfileIndex,
    player: usize,
    k: usize,
) -> Result<Vec<NeighborTest>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let eq = game.stats(equilibrium, player)?;
    let n = game.num_strategies();
    let mut candidates: Vec<(ProfileIndex, f64)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if (a, b) != equilibrium {
                candidates.push(((a, b), game.payoff((a, b), player)?));
            }
        }
    }
    candidates.sort_by(|x, y| {
        (x.1 - eq.mean)
            .abs()
            .total_cmp(&(y.1 - eq.mean).abs())
            .then(x.0.cmp(&y.0))
    });
    candidates
        .into_iter()
        .take(k)
        .map(|(p, mean)| {
            let other = game.stats(p, player)?;
            let t = welch_from_stats(&eq, &other, Alternative::TwoSided)?;
            Ok(NeighborTest {
                profile: p,
                mean,
                p_value: t.p_value,
            })
        })
        .collect()
}

/// One point of the equilibrium-versus-tolerance curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TolerancePoint {
    pub epsilon: f64,
    pub equilibria: Vec<ProfileIndex>,
    /// Share of all ordered profiles that are ε-equilibria.
    pub fraction: f64,
    /// Share of the ε-equilibria that are symmetric (both players on the
    /// same strategy).
    pub symmetric_fraction: f64,
}

pub fn tolerance_curve(game: &EmpiricalGame, epsilons: &[f64]) -> Result<Vec<TolerancePoint>> {
    let total = (game.num_strategies() * game.num_strategies()) as f64;
    epsilons
        .iter()
        .map(|&eps| {
            let eq = pure_nash(game, eps)?;
            let sym = eq.iter().filter(|p| p.0 == p.1).count();
            Ok(TolerancePoint {
                epsilon: eps,
                fraction: eq.len() as f64 / total,
                symmetric_fraction: if eq.is_empty() { 0.0 } else { sym as f64 / eq.len() as f64 },
                equilibria: eq,
            })
        })
        .collect()
}

/// Profile chosen to represent the iteration's solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub profile: ProfileIndex,
    /// `false` when no exact pure equilibrium exists and the least-regret
    /// profile stands in.
    pub exact: bool,
    pub regret: f64,
}

/// Among exact pure equilibria prefer symmetric ones, then higher average
/// payoff, then lower index. Without any, take the least-regret profile.
pub fn select_solution(game: &EmpiricalGame) -> Result<Solution> {
    let avg = |p: ProfileIndex| -> Result<f64> { Ok((game.payoff(p, 0)? + game.payoff(p, 1)?) / 2.0) };
    let eq = pure_nash(game, 0.0)?;
    let single = game.num_strategies() < 2;
    let reg = |p: ProfileIndex| if single { Ok(0.0) } else { regret(game, p) };
    if !eq.is_empty() {
        let mut best = eq[0];
        let mut key = (eq[0].0 == eq[0].1, avg(eq[0])?);
        for &p in &eq[1..] {
            let k = (p.0 == p.1, avg(p)?);
            if k.0 > key.0 || (k.0 == key.0 && k.1 > key.1) {
                best = p;
                key = k;
            }
        }
        return Ok(Solution {
            profile: best,
            exact: true,
            regret: reg(best)?,
        });
    }
    let n = game.num_strategies();
    let mut best = (0, 0);
    let mut best_r = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            let r = reg((a, b))?;
            if r < best_r {
                best_r = r;
                best = (a, b);
            }
        }
    }
    Ok(Solution {
        profile: best,
        exact: false,
        regret: best_r,
    })
}

/// Iteration pairs (1-based) compared across the GSA run.
pub const CROSS_ITERATION_PAIRS: [(usize, usize); 7] = [(1, 2), (2, 3), (3, 4), (4, 5), (3, 5), (2, 5), (1, 5)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossIterationTest {
    pub earlier: usize,
    pub later: usize,
    /// One-sided p-value for H1: the earlier solution payoff is lower.
    pub p_value: f64,
}

/// One-sided Welch tests between solution payoff samples of iteration
/// pairs; pairs referring to missing iterations are skipped.
pub fn cross_iteration_tests(samples: &[Vec<f64>]) -> Result<Vec<CrossIterationTest>> {
    let mut out = Vec::new();
    for (i, j) in CROSS_ITERATION_PAIRS {
        if j > samples.len() || samples[i - 1].len() < 2 || samples[j - 1].len() < 2 {
            continue;
        }
        let t = welch_t_test(&samples[i - 1], &samples[j - 1], Alternative::Less)?;
        out.push(CrossIterationTest {
            earlier: i,
            later: j,
            p_value: t.p_value,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ProfileEntry, StrategySpace};
    use crate::stats::SampleStats;

    fn st(mean: f64) -> SampleStats {
        SampleStats {
            n: 20,
            mean,
            variance: 1.0,
        }
    }

    fn game_with(means: &[f64]) -> EmpiricalGame {
        let n = means.len();
        let mut g = EmpiricalGame::new(StrategySpace::abstract_space(n, false).unwrap());
        for a in 0..n {
            for b in 0..n {
                let m = if a == b { means[a] } else { means[a] + 100.0 * (1 + a + b) as f64 };
                g.set_entry((a, b), ProfileEntry { stats: [st(m), st(m)], samples: None }).unwrap();
            }
        }
        g
    }

    #[test]
    fn neighbor_tests() {
        let g = game_with(&[0.0, 0.0, 50.0]);
        assert!(neighbor_strictness_test(&g, (0, 0), 0, 0).unwrap().is_empty());
        let t = neighbor_strictness_test(&g, (0, 0), 0, 2).unwrap();
        assert_eq!(t[0].profile, (1, 1));
        assert!((t[0].p_value - 1.0).abs() < 1e-12);
        assert!(t[1].p_value < 1e-6);
    }

    #[test]
    fn tolerance_curve_is_monotone() {
        let g = EmpiricalGame::symmetric_from_matrix(&[vec![3.0, 0.0], vec![5.0, 1.0]]).unwrap();
        let c = tolerance_curve(&g, &[0.0, 1.0, 10.0]).unwrap();
        assert_eq!(c[0].equilibria, vec![(1, 1)]);
        assert_eq!(c[2].fraction, 1.0);
        assert!(c.windows(2).all(|w| w[0].fraction <= w[1].fraction));
    }

    #[test]
    fn solution_prefers_symmetric_higher_payoff() {
        // Coordination game with equilibria (0,0) and (1,1).
        let g = EmpiricalGame::symmetric_from_matrix(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = select_solution(&g).unwrap();
        assert_eq!(s.profile, (0, 0));
        assert!(s.exact);
    }

    #[test]
    fn cross_iteration_pairs_skip_missing() {
        let a = vec![1.0, 2.0, 3.0];
        let b = vec![11.0, 12.0, 13.0];
        let r = cross_iteration_tests(&[a, b]).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].p_value < 0.01);
    }
}
