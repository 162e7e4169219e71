//! Main-effect screening over a two-level design and the factor-plan
//! refinement it drives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::FactorRef;
use crate::stats::two_sided_p;

use super::design::design_capacity;

/// One design point with its replicate responses.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeRun {
    /// Per factor: `true` when the factor sits in its upper half of levels.
    pub high: Vec<bool>,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorEffect {
    /// `mean(high) - mean(low)` over design points.
    pub effect: f64,
    pub std_error: f64,
    pub df: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionEffect {
    pub factors: [usize; 2],
    /// Half the difference between the effect of the first factor at the
    /// high and at the low setting of the second.
    pub effect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoeResult {
    pub main: Vec<FactorEffect>,
    pub interactions: Vec<InteractionEffect>,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Main effects with t-tests against zero using the pooled replicate
/// (within-run) variance.
pub fn doe_significance(runs: &[DoeRun], alpha: f64) -> Result<DoeResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let k = runs.first().map_or(0, |r| r.high.len());
    if k == 0 {
        return Err(Error::Design("no design points or no factors".into()));
    }
    if runs.iter().any(|r| r.high.len() != k || r.samples.is_empty()) {
        return Err(Error::Design("design points disagree in factor count or have no samples".into()));
    }
    for i in 0..k {
        for j in i..k {
            for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
                if i == j && a != b {
                    continue;
                }
                if !runs.iter().any(|r| r.high[i] == a && r.high[j] == b) {
                    return Err(Error::Design(format!(
                        "missing factorial cell for factors {i} and {j} at ({a}, {b})"
                    )));
                }
            }
        }
    }

    let run_means: Vec<f64> = runs.iter().map(|r| mean(&r.samples)).collect();
    let mut ss = 0.0;
    let mut df = 0usize;
    for (r, &m) in runs.iter().zip(&run_means) {
        ss += r.samples.iter().map(|v| (v - m).powi(2)).sum::<f64>();
        df += r.samples.len() - 1;
    }
    let s2 = if df > 0 { ss / df as f64 } else { 0.0 };

    let mut main = Vec::with_capacity(k);
    for f in 0..k {
        let (mut hi, mut lo) = (Vec::new(), Vec::new());
        let (mut v_hi, mut v_lo) = (0.0, 0.0);
        for (r, &m) in runs.iter().zip(&run_means) {
            let inv_n = 1.0 / r.samples.len() as f64;
            if r.high[f] {
                hi.push(m);
                v_hi += inv_n;
            } else {
                lo.push(m);
                v_lo += inv_n;
            }
        }
        let effect = mean(&hi) - mean(&lo);
        let var = s2 * (v_hi / (hi.len() as f64).powi(2) + v_lo / (lo.len() as f64).powi(2));
        let se = var.sqrt();
        let p_value = if se > 0.0 && df > 0 {
            two_sided_p(effect / se, df as f64)?
        } else if effect.abs() > 1e-12 * run_means.iter().map(|m| m.abs()).fold(1.0, f64::max) {
            0.0
        } else {
            1.0
        };
        main.push(FactorEffect {
            effect,
            std_error: se,
            df: df as f64,
            p_value,
            significant: p_value < alpha,
        });
    }

    let mut interactions = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let cell = |a: bool, b: bool| {
                let v: Vec<f64> = runs
                    .iter()
                    .zip(&run_means)
                    .filter(|(r, _)| r.high[i] == a && r.high[j] == b)
                    .map(|(_, &m)| m)
                    .collect();
                mean(&v)
            };
            let effect =
                ((cell(true, true) - cell(false, true)) - (cell(true, false) - cell(false, false))) / 2.0;
            interactions.push(InteractionEffect {
                factors: [i, j],
                effect,
            });
        }
    }
    Ok(DoeResult { main, interactions })
}

/// Active factors and level resolution of one iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorPlan {
    pub factors: Vec<FactorRef>,
    /// 2 (L/H) or 4 (L/ML/MH/H).
    pub levels: usize,
    /// 1: factor decomposition, 2: level densification.
    #[serde(default = "first_phase")]
    pub phase: u8,
}

fn first_phase() -> u8 {
    1
}

impl FactorPlan {
    pub fn aggregated() -> Self {
        FactorPlan {
            factors: crate::factors::Aggregate::ALL
                .iter()
                .map(|&a| FactorRef::Aggregate(a))
                .collect(),
            levels: 2,
            phase: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "plan")]
pub enum Refinement {
    Next(FactorPlan),
    Terminate,
}

/// Next plan from the current one and its main-effect screening.
///
/// Phase 1 replaces every significant aggregated factor by its detailed
/// sub-factors and drops insignificant ones; once no aggregated factor is
/// left it moves to phase 2, which densifies the surviving factors to four
/// levels. A phase-2 plan already at four levels terminates. If nothing is
/// significant, the factor with the largest absolute effect is kept, and the
/// plan is cut to the largest-effect factors that the design budget allows.
pub fn refine_plan(plan: &FactorPlan, effects: &[FactorEffect], max_runs: usize) -> Result<Refinement> {
    if effects.len() != plan.factors.len() {
        return Err(Error::param(format!(
            "{} effects for {} factors",
            effects.len(),
            plan.factors.len()
        )));
    }
    if plan.phase >= 2 && plan.levels >= 4 {
        return Ok(Refinement::Terminate);
    }
    let mut kept: Vec<(FactorRef, f64)> = plan
        .factors
        .iter()
        .zip(effects)
        .filter(|(_, e)| e.significant)
        .map(|(&f, e)| (f, e.effect.abs()))
        .collect();
    if kept.is_empty() {
        let (best, e) = plan
            .factors
            .iter()
            .zip(effects)
            .max_by(|a, b| a.1.effect.abs().total_cmp(&b.1.effect.abs()))
            .expect("plan has factors");
        kept.push((*best, e.effect.abs()));
    }

    let (factors, levels, phase) = if plan.phase == 1 {
        let any_aggregate = kept.iter().any(|(f, _)| matches!(f, FactorRef::Aggregate(_)));
        let mut next: Vec<(FactorRef, f64)> = Vec::new();
        for (f, e) in kept {
            for d in f.members() {
                next.push((FactorRef::Detailed(d), e));
            }
        }
        if any_aggregate {
            (next, 2, 1)
        } else {
            (next, 4, 2)
        }
    } else {
        (kept, 4, 2)
    };

    let cap = design_capacity(levels, max_runs);
    let mut factors = factors;
    if factors.len() > cap {
        // Stable sort keeps sub-factors of one parent in table order.
        let mut order: Vec<usize> = (0..factors.len()).collect();
        order.sort_by(|&a, &b| factors[b].1.total_cmp(&factors[a].1));
        let mut keep: Vec<usize> = order.into_iter().take(cap).collect();
        keep.sort_unstable();
        factors = keep.into_iter().map(|i| factors[i]).collect();
    }
    Ok(Refinement::Next(FactorPlan {
        factors: factors.into_iter().map(|(f, _)| f).collect(),
        levels,
        phase,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::{Aggregate, Detailed};

    fn factorial_runs(k: usize, reps: usize, f: impl Fn(&[bool], usize) -> f64) -> Vec<DoeRun> {
        (0..1usize << k)
            .map(|r| {
                let high: Vec<bool> = (0..k).map(|j| (r >> j) & 1 == 1).collect();
                let samples = (0..reps).map(|i| f(&high, i)).collect();
                DoeRun { high, samples }
            })
            .collect()
    }

    #[test]
    fn noiseless_effects_are_exact() {
        let runs = factorial_runs(3, 2, |h, _| 3.0 * h[0] as u8 as f64 - 2.0 * h[2] as u8 as f64 + 7.0);
        let r = doe_significance(&runs, 0.05).unwrap();
        assert_eq!(r.main[0].effect, 3.0);
        assert_eq!(r.main[1].effect, 0.0);
        assert_eq!(r.main[2].effect, -2.0);
        assert!(r.main[0].significant && !r.main[1].significant && r.main[2].significant);
    }

    #[test]
    fn constant_response_has_no_significant_factor() {
        let runs = factorial_runs(2, 3, |_, _| 5.0);
        let r = doe_significance(&runs, 0.05).unwrap();
        assert!(r.main.iter().all(|e| !e.significant));
    }

    #[test]
    fn missing_cell_is_a_design_error() {
        let mut runs = factorial_runs(2, 2, |_, i| i as f64);
        runs.retain(|r| !(r.high[0] && r.high[1]));
        assert!(matches!(doe_significance(&runs, 0.05), Err(Error::Design(_))));
    }

    fn eff(effect: f64, significant: bool) -> FactorEffect {
        FactorEffect {
            effect,
            std_error: 1.0,
            df: 10.0,
            p_value: if significant { 0.0 } else { 1.0 },
            significant,
        }
    }

    #[test]
    fn logistics_decomposes() {
        let plan = FactorPlan::aggregated();
        let e = [eff(1.0, false), eff(5.0, true), eff(0.5, false), eff(0.1, false)];
        match refine_plan(&plan, &e, 16).unwrap() {
            Refinement::Next(p) => {
                let want: Vec<FactorRef> =
                    Aggregate::Logistics.members().iter().map(|&d| FactorRef::Detailed(d)).collect();
                assert_eq!(p.factors, want);
                assert_eq!((p.levels, p.phase), (2, 1));
            }
            Refinement::Terminate => panic!(),
        }
    }

    #[test]
    fn all_insignificant_keeps_largest_effect() {
        let plan = FactorPlan {
            factors: vec![
                FactorRef::Detailed(Detailed::SafetyStockCoverage),
                FactorRef::Detailed(Detailed::MarketingBudget),
            ],
            levels: 2,
            phase: 1,
        };
        let e = [eff(-3.0, false), eff(1.0, false)];
        match refine_plan(&plan, &e, 16).unwrap() {
            Refinement::Next(p) => {
                assert_eq!(p.factors, vec![FactorRef::Detailed(Detailed::SafetyStockCoverage)]);
                assert_eq!((p.levels, p.phase), (4, 2));
            }
            Refinement::Terminate => panic!(),
        }
    }

    #[test]
    fn dense_phase_two_terminates() {
        let plan = FactorPlan {
            factors: vec![FactorRef::Detailed(Detailed::SafetyStockCoverage)],
            levels: 4,
            phase: 2,
        };
        assert_eq!(refine_plan(&plan, &[eff(1.0, true)], 16).unwrap(), Refinement::Terminate);
    }
}
