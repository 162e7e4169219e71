//! Iterative strategy refinement: build a strategy set from the active
//! factors, estimate the symmetric empirical game by simulation, solve it,
//! screen factors, and refine until the schedule ends.

pub mod design;
pub mod doe;
pub mod evaluation;
pub mod report;
pub mod sampling;
pub mod stability;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ProfileIndex, Result};
use crate::factors::{Aggregate, CompanyPolicy, Detailed, FactorRef, FactorTable};
use crate::game::{pure_nash, regret, EmpiricalGame, ProfileEntry, Strategy, StrategySpace};
use crate::rng::{derive_seed, replication_seed, ReplicationSeed};
use crate::runner::{compute_payoff, run_replication, PayoffSampleSet, RunConfig, StrategyProfile};
use crate::stats::{confidence_interval, trim_samples, SampleStats};

pub use design::{build_strategies, design_capacity, design_rows};
pub use doe::{doe_significance, refine_plan, DoeResult, DoeRun, FactorEffect, FactorPlan, Refinement};
pub use evaluation::{
    cross_iteration_tests, neighbor_strictness_test, select_solution, tolerance_curve, CrossIterationTest,
    NeighborTest, Solution, TolerancePoint,
};
pub use report::{GsaIterationReport, GsaSummary, REPORT_SCHEMA_VERSION};
pub use sampling::{decide_sample_size, ecvi_gain, SamplingPolicy};
pub use stability::{
    stability_analysis, PayoffNoise, StabilityClass, StabilityConfig, StabilityRatios, StabilityResult, UpdateRule,
};

use report::{DoeFactorReport, EquilibriumReport, PayoffCi, SolutionReport, StrategyReport};

/// Produces one replication's payoffs for a strategy pair.
pub trait PayoffSource: Sync {
    fn payoffs(&self, a: &Strategy, b: &Strategy, seed: ReplicationSeed) -> Result<[f64; 2]>;

    /// Identifies the source in checkpoints so a resume cannot mix models.
    fn fingerprint(&self) -> String {
        String::new()
    }
}

/// Payoffs from the coupled supply-chain and market simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSource {
    pub base: CompanyPolicy,
    #[serde(default)]
    pub table: FactorTable,
    pub run: RunConfig,
}

impl PayoffSource for SimulationSource {
    fn payoffs(&self, a: &Strategy, b: &Strategy, seed: ReplicationSeed) -> Result<[f64; 2]> {
        let profile = StrategyProfile::new(
            a.policy_in(&self.base, &self.table)?,
            b.policy_in(&self.base, &self.table)?,
        );
        let rep = run_replication(&profile, &self.run, seed)?;
        Ok(compute_payoff(&rep, &self.run.cost_rates))
    }

    fn fingerprint(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    /// Run the listed plans in order.
    #[default]
    Fixed,
    /// Start from the first listed plan and refine by factor screening.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    pub mode: ScheduleMode,
    pub iterations: Vec<FactorPlan>,
    /// Upper bound on iterations in adaptive mode.
    pub max_iterations: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            mode: ScheduleMode::Fixed,
            iterations: case_study_schedule(),
            max_iterations: 5,
        }
    }
}

/// The five-iteration case-study schedule: the four aggregated factors at
/// two levels, then logistics and marketing sub-factors at two levels, then
/// shrinking sets of logistics and marketing factors at four levels.
pub fn case_study_schedule() -> Vec<FactorPlan> {
    use Detailed::*;
    let d = |v: &[Detailed]| v.iter().map(|&x| FactorRef::Detailed(x)).collect::<Vec<_>>();
    vec![
        FactorPlan {
            factors: Aggregate::ALL.iter().map(|&a| FactorRef::Aggregate(a)).collect(),
            levels: 2,
            phase: 1,
        },
        FactorPlan {
            factors: d(&[
                RawMaterialCoverage,
                SafetyStockCoverage,
                RawMaterialLeadTime,
                InventoryFulfillmentTime,
                PromotionDepth,
                AdvertisingIntensity,
            ]),
            levels: 2,
            phase: 1,
        },
        FactorPlan {
            factors: d(&[
                RawMaterialCoverage,
                SafetyStockCoverage,
                RawMaterialLeadTime,
                InventoryFulfillmentTime,
            ]),
            levels: 4,
            phase: 2,
        },
        FactorPlan {
            factors: d(&[RawMaterialCoverage, SafetyStockCoverage, PromotionDepth]),
            levels: 4,
            phase: 2,
        },
        FactorPlan {
            factors: d(&[RawMaterialCoverage, SafetyStockCoverage, AdvertisingIntensity]),
            levels: 4,
            phase: 2,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GsaConfig {
    pub master_seed: u64,
    pub schedule: Schedule,
    pub sampling: SamplingPolicy,
    /// Strategy-set size per iteration (design runs).
    pub max_strategies: usize,
    /// Tolerance band for marginal stability (currency).
    pub epsilon: f64,
    /// Tolerances at which equilibrium sets are reported.
    pub tolerance_grid: Vec<f64>,
    pub neighbors: usize,
    pub doe_alpha: f64,
    pub stability: StabilityConfig,
    /// Total replication budget; exhausting it ends the run with a
    /// truncated report.
    pub max_replications: Option<u64>,
    /// Rounds of sample extension and re-solving per iteration.
    pub ecvi_rounds: usize,
}

impl Default for GsaConfig {
    fn default() -> Self {
        GsaConfig {
            master_seed: 20_240_601,
            schedule: Schedule::default(),
            sampling: SamplingPolicy::default(),
            max_strategies: 16,
            epsilon: 1500.0,
            tolerance_grid: (0..=12).map(|i| 250.0 * i as f64).collect(),
            neighbors: 10,
            doe_alpha: 0.05,
            stability: StabilityConfig::default(),
            max_replications: None,
            ecvi_rounds: 2,
        }
    }
}

impl GsaConfig {
    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        self.stability.validate()?;
        if self.schedule.iterations.is_empty() {
            return Err(Error::config("gsa.schedule.iterations", "must list at least one plan"));
        }
        for (i, plan) in self.schedule.iterations.iter().enumerate() {
            let key = format!("gsa.schedule.iterations[{i}]");
            if plan.factors.is_empty() {
                return Err(Error::config(key, "has no factors"));
            }
            if plan.levels != 2 && plan.levels != 4 {
                return Err(Error::config(key, format!("levels must be 2 or 4, got {}", plan.levels)));
            }
            for (j, f) in plan.factors.iter().enumerate() {
                if plan.factors[..j].contains(f) {
                    return Err(Error::config(key, format!("factor {f} listed twice")));
                }
            }
            let cap = design_capacity(plan.levels, self.max_strategies);
            if plan.factors.len() > cap {
                return Err(Error::config(
                    key,
                    format!(
                        "{} factors at {} levels exceed the {cap}-factor design capacity for {} strategies",
                        plan.factors.len(),
                        plan.levels,
                        self.max_strategies
                    ),
                ));
            }
        }
        if self.schedule.mode == ScheduleMode::Adaptive && self.schedule.max_iterations == 0 {
            return Err(Error::config("gsa.schedule.max_iterations", "must be >= 1"));
        }
        if self.max_strategies < 2 {
            return Err(Error::config("gsa.max_strategies", "must be >= 2"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::config("gsa.epsilon", "must be >= 0"));
        }
        if self.tolerance_grid.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::config("gsa.tolerance_grid", "entries must be >= 0"));
        }
        if !(self.doe_alpha > 0.0 && self.doe_alpha < 1.0) {
            return Err(Error::config("gsa.doe_alpha", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Everything needed to resume after an iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub config: GsaConfig,
    pub source: String,
    pub report: GsaIterationReport,
    pub game: EmpiricalGame,
    pub replications_total: u64,
}

/// Per-iteration checkpoint files in one directory.
#[derive(Debug, Clone)]
pub struct CheckpointStore {
    pub dir: PathBuf,
}

impl CheckpointStore {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(CheckpointStore { dir })
    }

    pub fn path(&self, iteration: usize) -> PathBuf {
        self.dir.join(format!("checkpoint_{iteration:02}.json"))
    }

    fn load(&self, iteration: usize, cfg: &GsaConfig, source: &str) -> Result<Option<Checkpoint>> {
        let path = self.path(iteration);
        if !path.exists() {
            return Ok(None);
        }
        let cp: Checkpoint = report::read_json(&path)?;
        if cp.schema_version != REPORT_SCHEMA_VERSION || &cp.config != cfg || cp.source != source {
            // A checkpoint from another configuration is not reused.
            return Ok(None);
        }
        Ok(Some(cp))
    }

    fn save(&self, cp: &Checkpoint) -> Result<()> {
        // Write then rename so an interrupt never leaves a torn checkpoint.
        let path = self.path(cp.report.iteration);
        let tmp = path.with_extension("json.tmp");
        report::write_json(&tmp, cp)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsaOutput {
    pub reports: Vec<GsaIterationReport>,
    pub games: Vec<EmpiricalGame>,
    pub summary: GsaSummary,
}

struct Budget {
    limit: Option<u64>,
    used: u64,
}

impl Budget {
    fn remaining(&self) -> u64 {
        self.limit.map_or(u64::MAX, |l| l.saturating_sub(self.used))
    }
}

/// Stats of a sample after trimming `k` values per tail.
fn trimmed_stats(samples: &[f64], k: usize) -> Result<SampleStats> {
    Ok(SampleStats::from_slice(&trim_samples(samples, k)?))
}

fn entry_from_set(set: PayoffSampleSet, policy: &SamplingPolicy) -> Result<ProfileEntry> {
    let k = policy.trim_for(set.len());
    let stats = [trimmed_stats(&set.samples(0), k)?, trimmed_stats(&set.samples(1), k)?];
    Ok(ProfileEntry {
        stats,
        samples: Some(set),
    })
}

fn simulate(
    source: &dyn PayoffSource,
    strategies: &[Strategy],
    jobs: &[(ProfileIndex, u64)],
    master: u64,
    iteration: usize,
) -> Result<Vec<(ProfileIndex, u64, [f64; 2])>> {
    jobs.par_iter()
        .map(|&((a, b), i)| {
            let seed = ReplicationSeed::new(replication_seed(master, &[iteration as u64, a as u64, b as u64], i));
            let u = source.payoffs(&strategies[a], &strategies[b], seed)?;
            if !(u[0].is_finite() && u[1].is_finite()) {
                return Err(Error::Replication {
                    day: 0,
                    seed: seed.seed,
                    message: format!("non-finite payoff for profile ({a}, {b})"),
                });
            }
            Ok(((a, b), i, u))
        })
        .collect()
}

fn payoff_ci(entry: &ProfileEntry, player: usize, policy: &SamplingPolicy) -> Result<PayoffCi> {
    let samples = entry
        .samples
        .as_ref()
        .ok_or_else(|| Error::State("profile has no stored samples".into()))?;
    let all = samples.samples(player);
    let n0 = policy.initial_n.min(all.len());
    let initial = trim_samples(&all[..n0], policy.trim_for(n0))?;
    let extended = trim_samples(&all, policy.trim_for(all.len()))?;
    Ok(PayoffCi {
        initial: confidence_interval(&initial, policy.alpha)?,
        extended: confidence_interval(&extended, policy.alpha)?,
    })
}

fn run_iteration(
    cfg: &GsaConfig,
    source: &dyn PayoffSource,
    iteration: usize,
    plan: &FactorPlan,
    budget: &mut Budget,
) -> Result<(GsaIterationReport, EmpiricalGame)> {
    let policy = &cfg.sampling;
    let strategies = build_strategies(&plan.factors, plan.levels, cfg.max_strategies)?;
    let space = StrategySpace::new(strategies.clone(), true)?;
    let mut game = EmpiricalGame::new(space);
    let keys = game.profile_keys();
    let master = cfg.master_seed;

    let mut report = GsaIterationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        iteration,
        plan: plan.clone(),
        strategies: strategies
            .iter()
            .enumerate()
            .map(|(i, s)| StrategyReport {
                index: i,
                label: s.label(),
                levels: s.levels.clone(),
            })
            .collect(),
        profiles: keys.len(),
        initial_samples: policy.initial_n,
        trim_per_tail: policy.trim_per_tail,
        replications: 0,
        truncated: None,
        solution: None,
        equilibria: Vec::new(),
        tolerance_curve: Vec::new(),
        doe: Vec::new(),
        doe_interactions: Vec::new(),
        neighbor_tests: Vec::new(),
        stability: None,
        next_plan: None,
    };

    // Initial sampling, profile by profile in canonical order, as far as
    // the budget allows.
    let n = policy.initial_n as u64;
    let affordable = (budget.remaining() / n.max(1)).min(keys.len() as u64) as usize;
    let jobs: Vec<(ProfileIndex, u64)> = keys[..affordable]
        .iter()
        .flat_map(|&k| (0..n).map(move |i| (k, i)))
        .collect();
    let results = simulate(source, &strategies, &jobs, master, iteration)?;
    budget.used += jobs.len() as u64;
    report.replications += jobs.len() as u64;
    let mut sets: Vec<PayoffSampleSet> = vec![PayoffSampleSet::new(); keys.len()];
    for (p, i, u) in results {
        let idx = keys.binary_search(&p).expect("canonical profile");
        sets[idx].insert(i, u);
    }
    for (k, set) in keys.iter().zip(sets) {
        if !set.is_empty() {
            game.set_entry(*k, entry_from_set(set, policy)?)?;
        }
    }
    if affordable < keys.len() {
        report.truncated = Some(format!(
            "replication budget exhausted after {affordable} of {} profiles",
            keys.len()
        ));
        report.profiles = affordable;
        return Ok((report, game));
    }

    // Extend the samples of equilibrium candidates while further sampling
    // is still informative, then re-solve.
    for _ in 0..cfg.ecvi_rounds {
        let mut candidates = pure_nash(&game, 0.0)?;
        if candidates.is_empty() {
            candidates.push(select_solution(&game)?.profile);
        }
        let mut canon: Vec<ProfileIndex> = candidates.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        canon.sort_unstable();
        canon.dedup();
        let mut jobs = Vec::new();
        for &p in &canon {
            let entry = game.entry(p).expect("complete game");
            let have = entry.samples.as_ref().map_or(0, |s| s.len());
            let mut target = have;
            for player in 0..2 {
                let st = trimmed_stats(
                    &entry.samples.as_ref().expect("simulated").samples(player),
                    policy.trim_for(have),
                )?;
                let st = SampleStats { n: have, ..st };
                target = target.max(decide_sample_size(&st, policy)?);
            }
            for i in have..target {
                jobs.push((p, i as u64));
            }
        }
        if jobs.is_empty() {
            break;
        }
        let allowed = budget.remaining().min(jobs.len() as u64) as usize;
        if allowed < jobs.len() {
            report.truncated = Some("replication budget exhausted during sample extension".into());
            jobs.truncate(allowed);
        }
        let results = simulate(source, &strategies, &jobs, master, iteration)?;
        budget.used += jobs.len() as u64;
        report.replications += jobs.len() as u64;
        for p in &canon {
            let mut set = game.entry(*p).and_then(|e| e.samples).unwrap_or_default();
            for (q, i, u) in results.iter().filter(|r| r.0 == *p) {
                debug_assert_eq!(q, p);
                set.insert(*i, *u);
            }
            game.set_entry(*p, entry_from_set(set, policy)?)?;
        }
        if report.truncated.is_some() {
            break;
        }
    }

    let s = strategies.len();
    let solution = select_solution(&game)?;
    let sol_entry = game.entry(solution.profile).expect("complete game");
    report.solution = Some(SolutionReport {
        profile: solution.profile,
        exact: solution.exact,
        regret: solution.regret,
        payoff: [payoff_ci(&sol_entry, 0, policy)?, payoff_ci(&sol_entry, 1, policy)?],
    });
    for p in pure_nash(&game, 0.0)? {
        let e = game.entry(p).expect("complete game");
        report.equilibria.push(EquilibriumReport {
            profile: p,
            payoff: [payoff_ci(&e, 0, policy)?, payoff_ci(&e, 1, policy)?],
            regret: if s > 1 { Some(regret(&game, p)?) } else { None },
        });
    }
    report.tolerance_curve = tolerance_curve(&game, &cfg.tolerance_grid)?;

    // Factor screening on player 1's payoff over all ordered profiles,
    // using the balanced initial samples.
    let mut runs = Vec::with_capacity(s * s);
    for a in 0..s {
        let high: Vec<bool> = strategies[a]
            .levels
            .iter()
            .map(|(_, l)| l.index() >= plan.levels / 2)
            .collect();
        for b in 0..s {
            let e = game.entry((a, b)).expect("complete game");
            let all = e.samples.as_ref().expect("simulated").samples(0);
            let n0 = policy.initial_n.min(all.len());
            runs.push(doe::DoeRun {
                high: high.clone(),
                samples: trim_samples(&all[..n0], policy.trim_for(n0))?,
            });
        }
    }
    let doe_result = doe_significance(&runs, cfg.doe_alpha)?;
    report.doe = plan
        .factors
        .iter()
        .zip(&doe_result.main)
        .map(|(&factor, e)| DoeFactorReport {
            factor,
            effect: e.effect,
            std_error: e.std_error,
            p_value: e.p_value,
            significant: e.significant,
        })
        .collect();
    report.doe_interactions = doe_result.interactions.clone();

    report.neighbor_tests = neighbor_strictness_test(&game, solution.profile, 0, cfg.neighbors)?;
    report.stability = Some(stability_analysis(
        &game,
        solution.profile,
        cfg.epsilon,
        &cfg.stability,
        derive_seed(&[master, iteration as u64, 0x57AB]),
    )?);

    report.next_plan = match cfg.schedule.mode {
        ScheduleMode::Fixed => cfg.schedule.iterations.get(iteration).cloned(),
        ScheduleMode::Adaptive => {
            if iteration >= cfg.schedule.max_iterations {
                None
            } else {
                match refine_plan(plan, &doe_result.main, cfg.max_strategies)? {
                    Refinement::Next(p) => Some(p),
                    Refinement::Terminate => None,
                }
            }
        }
    };
    Ok((report, game))
}

/// Runs the whole procedure. With a checkpoint store, finished iterations
/// whose checkpoint matches this configuration are loaded instead of
/// recomputed, and every new iteration is checkpointed.
pub fn run_gsa(cfg: &GsaConfig, source: &dyn PayoffSource, store: Option<&CheckpointStore>) -> Result<GsaOutput> {
    cfg.validate()?;
    let fingerprint = source.fingerprint();
    let mut budget = Budget {
        limit: cfg.max_replications,
        used: 0,
    };
    let mut reports = Vec::new();
    let mut games = Vec::new();
    let mut plan = Some(cfg.schedule.iterations[0].clone());
    let mut iteration = 0;
    while let Some(current) = plan.take() {
        iteration += 1;
        let loaded = match store {
            Some(st) => st.load(iteration, cfg, &fingerprint)?,
            None => None,
        };
        let (report, game) = match loaded {
            Some(cp) if cp.report.plan == current => {
                budget.used = cp.replications_total;
                (cp.report, cp.game)
            }
            _ => {
                let (report, game) = run_iteration(cfg, source, iteration, &current, &mut budget)?;
                if let Some(st) = store {
                    st.save(&Checkpoint {
                        schema_version: REPORT_SCHEMA_VERSION,
                        config: cfg.clone(),
                        source: fingerprint.clone(),
                        report: report.clone(),
                        game: game.clone(),
                        replications_total: budget.used,
                    })?;
                }
                (report, game)
            }
        };
        let stop = report.truncated.is_some();
        plan = if stop { None } else { report.next_plan.clone() };
        reports.push(report);
        games.push(game);
    }
    let summary = summarize(&reports, &games, &cfg.sampling)?;
    Ok(GsaOutput {
        reports,
        games,
        summary,
    })
}

fn summarize(reports: &[GsaIterationReport], games: &[EmpiricalGame], policy: &SamplingPolicy) -> Result<GsaSummary> {
    let mut payoffs = Vec::new();
    let mut samples = Vec::new();
    for (r, g) in reports.iter().zip(games) {
        match &r.solution {
            Some(sol) => {
                payoffs.push(Some((sol.payoff[0].extended.mean + sol.payoff[1].extended.mean) / 2.0));
                let e = g.entry(sol.profile).expect("solved game");
                let all = e.samples.as_ref().map(|s| s.samples(0)).unwrap_or_default();
                samples.push(trim_samples(&all, policy.trim_for(all.len()))?);
            }
            None => {
                payoffs.push(None);
                samples.push(Vec::new());
            }
        }
    }
    let solved: Vec<f64> = payoffs.iter().flatten().copied().collect();
    Ok(GsaSummary {
        schema_version: REPORT_SCHEMA_VERSION,
        iterations: reports.len(),
        cross_iteration: cross_iteration_tests(&samples)?,
        payoff_increased: (solved.len() >= 2).then(|| solved[solved.len() - 1] > solved[0]),
        solution_payoffs: payoffs,
        truncated: reports.iter().any(|r| r.truncated.is_some()),
    })
}

/// Writes reports, payoff matrices and the summary into `dir`.
pub fn write_outputs(out: &GsaOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (r, g) in out.reports.iter().zip(&out.games) {
        report::write_json(&dir.join(format!("iteration_{:02}.json", r.iteration)), r)?;
        let f = std::fs::File::create(dir.join(format!("payoffs_{:02}.csv", r.iteration)))?;
        g.write_csv(std::io::BufWriter::new(f))?;
    }
    report::write_json(&dir.join("summary.json"), &out.summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::Level;

    /// Deterministic symmetric payoff: strategies with more high levels
    /// earn more, minus a penalty for matching the opponent.
    struct Stub;

    impl PayoffSource for Stub {
        fn payoffs(&self, a: &Strategy, b: &Strategy, _seed: ReplicationSeed) -> Result<[f64; 2]> {
            let score = |s: &Strategy| {
                s.levels
                    .iter()
                    .enumerate()
                    .map(|(i, (_, l))| (i + 1) as f64 * l.index() as f64)
                    .sum::<f64>()
            };
            let (x, y) = (score(a), score(b));
            Ok([100.0 + 10.0 * x - 2.0 * y, 100.0 + 10.0 * y - 2.0 * x])
        }
    }

    fn tiny() -> GsaConfig {
        GsaConfig {
            schedule: Schedule {
                mode: ScheduleMode::Fixed,
                iterations: vec![FactorPlan {
                    factors: vec![FactorRef::Aggregate(Aggregate::Logistics)],
                    levels: 2,
                    phase: 1,
                }],
                max_iterations: 1,
            },
            sampling: SamplingPolicy {
                initial_n: 4,
                trim_per_tail: 1,
                max_samples: 8,
                ..SamplingPolicy::default()
            },
            stability: StabilityConfig {
                steps: 20,
                ..StabilityConfig::default()
            },
            ..GsaConfig::default()
        }
    }

    #[test]
    fn one_factor_two_levels_simulates_three_profiles() {
        let out = run_gsa(&tiny(), &Stub, None).unwrap();
        assert_eq!(out.reports.len(), 1);
        let r = &out.reports[0];
        assert_eq!(r.profiles, 3);
        assert_eq!(r.replications, 12);
        r.validate().unwrap();
        let sol = r.solution.as_ref().unwrap();
        assert_eq!(sol.profile, (1, 1));
        assert_eq!(r.strategies[1].levels[0].1, Level::H);
    }

    #[test]
    fn deterministic_across_runs() {
        let a = run_gsa(&tiny(), &Stub, None).unwrap();
        let b = run_gsa(&tiny(), &Stub, None).unwrap();
        assert_eq!(a.reports, b.reports);
    }

    #[test]
    fn budget_truncation_is_marked() {
        let mut cfg = tiny();
        cfg.max_replications = Some(6);
        let out = run_gsa(&cfg, &Stub, None).unwrap();
        assert!(out.reports[0].truncated.is_some());
        assert!(out.summary.truncated);
    }

    #[test]
    fn checkpoint_resume_matches() {
        let dir = tempfile::tempdir().unwrap();
        let store = CheckpointStore::new(dir.path()).unwrap();
        let mut cfg = tiny();
        cfg.schedule.iterations.push(FactorPlan {
            factors: vec![FactorRef::Detailed(Detailed::SafetyStockCoverage)],
            levels: 4,
            phase: 2,
        });
        let first = run_gsa(&cfg, &Stub, Some(&store)).unwrap();
        std::fs::remove_file(store.path(2)).unwrap();
        let resumed = run_gsa(&cfg, &Stub, Some(&store)).unwrap();
        assert_eq!(first, resumed);
    }

    #[test]
    fn case_study_schedule_fits_sixteen_strategies() {
        for plan in case_study_schedule() {
            let s = build_strategies(&plan.factors, plan.levels, 16).unwrap();
            assert_eq!(s.len(), 16);
        }
        GsaConfig::default().validate().unwrap();
    }
}
