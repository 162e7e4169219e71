use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use duopoly_core::config::{load_config, ExperimentConfig, DEFAULT_CONFIG};
use duopoly_core::game::{pure_nash, regret, EmpiricalGame};
use duopoly_core::gsa::report::{read_json, write_json};
use duopoly_core::gsa::{
    run_gsa, select_solution, stability_analysis, tolerance_curve, write_outputs, CheckpointStore,
    GsaIterationReport, GsaSummary, Solution, StabilityResult, TolerancePoint,
};
use duopoly_core::rng::{replication_seed, ReplicationSeed};
use duopoly_core::runner::{
    compute_payoff, estimate_payoffs, run_replication, write_trace, CostBreakdown, StrategyProfile,
};
use duopoly_core::stats::{confidence_interval, trim_samples, ConfidenceInterval, SampleStats};
use duopoly_core::{Error, Result};

use crate::plots;
use crate::Common;

/// Layout version of the JSON files written by `simulate`, `estimate`,
/// `solve` and `stability`.
const OUTPUT_SCHEMA_VERSION: u32 = 1;

pub struct Context {
    pub cfg: ExperimentConfig,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl Context {
    pub fn new(common: &Common) -> Result<Self> {
        let mut cfg = match &common.config {
            Some(path) => load_config(path)?,
            None => ExperimentConfig::from_toml(DEFAULT_CONFIG)?,
        };
        if let Some(jobs) = common.jobs {
            cfg.jobs = jobs;
        }
        if cfg.jobs > 0 {
            // Only fails if a pool already exists, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
        }
        let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        Ok(Context {
            cfg,
            seed: common.seed,
            out,
        })
    }

    /// Creates the output directory and records the resolved configuration.
    fn prepare_out(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out)?;
        fs::write(self.out.join("config.resolved.toml"), self.cfg.to_toml()?)?;
        Ok(&self.out)
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

#[derive(Serialize)]
struct ReplicationRecord {
    index: u64,
    seed: u64,
    payoff: [f64; 2],
    costs: [CostBreakdown; 2],
    conservation_error: f64,
}

#[derive(Serialize)]
struct SimulateOutput {
    schema_version: u32,
    seed: u64,
    strategies: [String; 2],
    days: usize,
    replications: Vec<ReplicationRecord>,
    mean_payoff: [f64; 2],
}

pub fn simulate(ctx: &Context, trace: bool, replications: Option<usize>) -> Result<()> {
    let cfg = &ctx.cfg;
    let n = replications.unwrap_or(cfg.simulate.replications);
    if n == 0 {
        return Err(Error::config("replications", "must be >= 1"));
    }
    let seed = ctx.seed.unwrap_or(cfg.simulate.seed);
    let (profile, strategies) = cfg.simulate_profile()?;
    let out = ctx.prepare_out()?;

    let reps: Vec<_> = (0..n as u64)
        .into_par_iter()
        .map(|i| run_replication(&profile, &cfg.run, ReplicationSeed::new(replication_seed(seed, &[], i))))
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(n);
    for (i, rep) in reps.iter().enumerate() {
        if trace {
            write_trace(rep, create(&out.join(format!("trace_{:04}.csv", i + 1)))?)?;
        }
        records.push(ReplicationRecord {
            index: i as u64,
            seed: rep.seed,
            payoff: compute_payoff(rep, &cfg.run.cost_rates),
            costs: rep.cost_breakdown(&cfg.run.cost_rates),
            conservation_error: rep.conservation_error,
        });
    }
    let mean = |k: usize| records.iter().map(|r| r.payoff[k]).sum::<f64>() / n as f64;
    let output = SimulateOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        seed,
        strategies: [strategies[0].label(), strategies[1].label()],
        days: cfg.run.days,
        mean_payoff: [mean(0), mean(1)],
        replications: records,
    };
    write_json(&out.join("payoffs.json"), &output)?;
    println!(
        "simulated {n} replication(s) of {} vs {}: mean payoff {:.2} / {:.2}",
        output.strategies[0], output.strategies[1], output.mean_payoff[0], output.mean_payoff[1]
    );
    Ok(())
}

#[derive(Serialize)]
struct PlayerEstimate {
    stats: SampleStats,
    ci: Option<ConfidenceInterval>,
    trim_per_tail: usize,
    trimmed_ci: Option<ConfidenceInterval>,
    samples: Vec<f64>,
}

#[derive(Serialize)]
struct EstimateOutput {
    schema_version: u32,
    seed: u64,
    strategies: [String; 2],
    players: [PlayerEstimate; 2],
}

fn player_estimate(samples: Vec<f64>, trim: usize, alpha: f64) -> Result<PlayerEstimate> {
    let ci = (samples.len() >= 2).then(|| confidence_interval(&samples, alpha)).transpose()?;
    let trimmed_ci = match trim_samples(&samples, trim) {
        Ok(t) if t.len() >= 2 => Some(confidence_interval(&t, alpha)?),
        _ => None,
    };
    Ok(PlayerEstimate {
        stats: SampleStats::from_slice(&samples),
        ci,
        trim_per_tail: trim,
        trimmed_ci,
        samples,
    })
}

pub fn estimate(ctx: &Context, replications: Option<usize>) -> Result<()> {
    let cfg = &ctx.cfg;
    let n = replications.unwrap_or(cfg.gsa.sampling.initial_n);
    let seed = ctx.seed.unwrap_or(cfg.simulate.seed);
    let (profile, strategies): (StrategyProfile, _) = cfg.simulate_profile()?;
    let out = ctx.prepare_out()?;
    let set = estimate_payoffs(&profile, n, &cfg.run, seed, &[])?;
    let trim = cfg.gsa.sampling.trim_for(n);
    let alpha = cfg.gsa.sampling.alpha;
    let output = EstimateOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        seed,
        strategies: [strategies[0].label(), strategies[1].label()],
        players: [
            player_estimate(set.samples(0), trim, alpha)?,
            player_estimate(set.samples(1), trim, alpha)?,
        ],
    };
    write_json(&out.join("estimate.json"), &output)?;
    for (k, p) in output.players.iter().enumerate() {
        match p.ci {
            Some(ci) => println!("player {}: mean {:.2} ± {:.2} (n={})", k + 1, ci.mean, ci.half_width, ci.n),
            None => println!("player {}: mean {:.2} (n={})", k + 1, p.stats.mean, p.stats.n),
        }
    }
    Ok(())
}

fn read_game(path: &Path, symmetric: bool) -> Result<EmpiricalGame> {
    let file = fs::File::open(path)?;
    EmpiricalGame::read_csv(std::io::BufReader::new(file), symmetric)
}

#[derive(Serialize)]
struct EquilibriumRecord {
    profile: (usize, usize),
    labels: [String; 2],
    payoff: [f64; 2],
    regret: f64,
}

#[derive(Serialize)]
struct SolveOutput {
    schema_version: u32,
    epsilon: f64,
    equilibria: Vec<EquilibriumRecord>,
    solution: Solution,
    tolerance_curve: Vec<TolerancePoint>,
}

pub fn solve(ctx: &Context, game_path: &Path, symmetric: bool, epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) {
        return Err(Error::config("epsilon", "must be >= 0"));
    }
    let game = read_game(game_path, symmetric)?;
    let out = ctx.prepare_out()?;
    let single = game.num_strategies() < 2;
    let mut equilibria = Vec::new();
    for p in pure_nash(&game, epsilon)? {
        equilibria.push(EquilibriumRecord {
            profile: p,
            labels: [game.space.label(p.0), game.space.label(p.1)],
            payoff: [game.payoff(p, 0)?, game.payoff(p, 1)?],
            regret: if single { 0.0 } else { regret(&game, p)? },
        });
    }
    let output = SolveOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        epsilon,
        solution: select_solution(&game)?,
        tolerance_curve: tolerance_curve(&game, &ctx.cfg.gsa.tolerance_grid)?,
        equilibria,
    };
    write_json(&out.join("solve.json"), &output)?;
    plots::write_tolerance_curves(&out.join("tolerance_curve.csv"), &[(1, output.tolerance_curve.as_slice())])?;
    println!("{} pure equilibria at epsilon {epsilon}", output.equilibria.len());
    for e in &output.equilibria {
        println!(
            "  {:?} {} vs {}: payoff {:.2} / {:.2}, regret {:.2}",
            e.profile, e.labels[0], e.labels[1], e.payoff[0], e.payoff[1], e.regret
        );
    }
    let s = &output.solution;
    println!("solution {:?} ({}), regret {:.2}", s.profile, if s.exact { "exact" } else { "least regret" }, s.regret);
    Ok(())
}

fn parse_profile(text: &str, n: usize) -> Result<(usize, usize)> {
    let bad = || Error::config("solution", format!("expected `row,column` below {n}, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a >= n || b >= n {
        return Err(bad());
    }
    Ok((a, b))
}

#[derive(Serialize)]
struct StabilityOutput {
    schema_version: u32,
    seed: u64,
    steps: usize,
    result: StabilityResult,
}

pub fn stability(
    ctx: &Context,
    game_path: &Path,
    symmetric: bool,
    epsilon: Option<f64>,
    steps: Option<usize>,
    solution: Option<&str>,
) -> Result<()> {
    let game = read_game(game_path, symmetric)?;
    let mut scfg = ctx.cfg.gsa.stability.clone();
    if let Some(s) = steps {
        scfg.steps = s;
    }
    scfg.validate()?;
    let epsilon = epsilon.unwrap_or(ctx.cfg.gsa.epsilon);
    if !(epsilon >= 0.0) {
        return Err(Error::config("epsilon", "must be >= 0"));
    }
    let solution = match solution {
        Some(text) => parse_profile(text, game.num_strategies())?,
        None => select_solution(&game)?.profile,
    };
    let seed = ctx.seed.unwrap_or(ctx.cfg.gsa.master_seed);
    let out = ctx.prepare_out()?;
    let result = stability_analysis(&game, solution, epsilon, &scfg, seed)?;
    plots::write_stability(&out.join("stability.csv"), &[(1, &result)])?;
    let r = result.ratios;
    println!("solution {:?}, epsilon {epsilon}", result.solution);
    println!("  asymptotically stable {:6.2}%", 100.0 * r.asymptotic);
    println!("  marginally stable     {:6.2}%", 100.0 * r.marginal);
    println!("  instable              {:6.2}%", 100.0 * r.instable);
    write_json(
        &out.join("stability.json"),
        &StabilityOutput {
            schema_version: OUTPUT_SCHEMA_VERSION,
            seed,
            steps: scfg.steps,
            result,
        },
    )
}

pub fn gsa(mut ctx: Context, epsilon: Option<f64>, steps: Option<usize>, trace: bool) -> Result<()> {
    if let Some(e) = epsilon {
        ctx.cfg.gsa.epsilon = e;
    }
    if let Some(s) = steps {
        ctx.cfg.gsa.stability.steps = s;
    }
    if let Some(seed) = ctx.seed {
        ctx.cfg.gsa.master_seed = seed;
    }
    ctx.cfg.validate()?;
    let cfg = &ctx.cfg;
    let out = ctx.prepare_out()?;
    let source = cfg.simulation_source()?;
    let store = CheckpointStore::new(out.join("checkpoints"))?;
    let result = run_gsa(&cfg.gsa, &source, Some(&store))?;
    write_outputs(&result, out)?;
    plots::emit(out, &result.reports, &result.summary)?;

    // Daily series of each iteration's solution, from the first replication
    // of that profile.
    for (r, game) in result.reports.iter().zip(&result.games) {
        let Some(sol) = &r.solution else { continue };
        let (a, b) = sol.profile;
        let profile = StrategyProfile::new(
            game.space.strategies[a].policy_in(&source.base, &source.table)?,
            game.space.strategies[b].policy_in(&source.base, &source.table)?,
        );
        let seed = replication_seed(cfg.gsa.master_seed, &[r.iteration as u64, a as u64, b as u64], 0);
        let rep = run_replication(&profile, &cfg.run, ReplicationSeed::new(seed))?;
        plots::write_timeseries(&out.join(format!("timeseries_{:02}.csv", r.iteration)), &rep)?;
        if trace {
            write_trace(&rep, create(&out.join(format!("trace_{:02}.csv", r.iteration)))?)?;
        }
    }
    print_summary(&result.reports, &result.summary);
    Ok(())
}

fn iteration_reports(dir: &Path) -> Result<Vec<GsaIterationReport>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("iteration_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    let mut reports = Vec::with_capacity(paths.len());
    for p in paths {
        let r: GsaIterationReport = read_json(&p)?;
        r.validate()?;
        reports.push(r);
    }
    if reports.is_empty() {
        return Err(Error::config("dir", format!("no iteration reports in {}", dir.display())));
    }
    Ok(reports)
}

pub fn report(ctx: &Context, dir: Option<PathBuf>) -> Result<()> {
    let dir = dir.unwrap_or_else(|| ctx.out.clone());
    let reports = iteration_reports(&dir)?;
    let summary: GsaSummary = read_json(&dir.join("summary.json"))?;
    plots::emit(&dir, &reports, &summary)?;
    print_summary(&reports, &summary);
    Ok(())
}

fn print_summary(reports: &[GsaIterationReport], summary: &GsaSummary) {
    println!("iter  strategies  replications  solution      payoff 1 (95% CI)        payoff 2 (95% CI)");
    for r in reports {
        let sol = match &r.solution {
            Some(s) => {
                let ci = |k: usize| {
                    let c = s.payoff[k].extended;
                    format!("{:>10.1} ± {:<9.1}", c.mean, c.half_width)
                };
                format!("{:<12}  {}  {}", format!("{:?}", s.profile), ci(0), ci(1))
            }
            None => "-".into(),
        };
        println!("{:>4}  {:>10}  {:>12}  {sol}", r.iteration, r.strategies.len(), r.replications);
    }
    for t in &summary.cross_iteration {
        println!("iteration {} < {}: p = {:.4}", t.earlier, t.later, t.p_value);
    }
    match summary.payoff_increased {
        Some(true) => println!("solution payoff increased from the first to the last iteration"),
        Some(false) => println!("warning: solution payoff did not increase from the first to the last iteration"),
        None => {}
    }
    if summary.truncated {
        println!("warning: replication budget exhausted; reports are truncated");
    }
}
