//! One replication couples both companies' supply chains with the consumer
//! market: shares set order rates, prices feed back into consumer choice,
//! and cost items are accumulated into each company's net profit.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::CompanyPolicy;
use crate::market::{sunk_cost, BrandInputs, Market, MarketParams};
use crate::rng::{replication_seed, ReplicationSeed, Stream};
use crate::sd::{
    company_price, step_pricing, substep, PriceInputs, PricingState, SdNoise, SdState, DT,
    SUBSTEPS_PER_DAY,
};
use crate::stats::SampleStats;

/// The two companies' concrete decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub players: [CompanyPolicy; 2],
}

impl StrategyProfile {
    pub fn new(a: CompanyPolicy, b: CompanyPolicy) -> Self {
        StrategyProfile { players: [a, b] }
    }

    pub fn symmetric(p: CompanyPolicy) -> Self {
        StrategyProfile {
            players: [p.clone(), p],
        }
    }

    pub fn swapped(&self) -> Self {
        StrategyProfile {
            players: [self.players[1].clone(), self.players[0].clone()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostRates {
    /// Per unit started into production.
    pub production: f64,
    /// Per unit of raw material ordered.
    pub raw_material: f64,
    /// Per unit-day of finished or raw-material inventory.
    pub holding: f64,
    /// Per unit-day of backlog.
    pub backlog: f64,
    /// Per unit shipped.
    pub transport: f64,
}

impl Default for CostRates {
    fn default() -> Self {
        CostRates {
            production: 0.4,
            raw_material: 0.2,
            holding: 0.01,
            backlog: 0.05,
            transport: 0.05,
        }
    }
}

impl CostRates {
    pub fn zero() -> Self {
        CostRates {
            production: 0.0,
            raw_material: 0.0,
            holding: 0.0,
            backlog: 0.0,
            transport: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("cost_rates.production", self.production),
            ("cost_rates.raw_material", self.raw_material),
            ("cost_rates.holding", self.holding),
            ("cost_rates.backlog", self.backlog),
            ("cost_rates.transport", self.transport),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Which share of the marketing-interaction sunk cost each company bears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SunkCostMode {
    /// Each company bears the whole market sunk cost.
    #[default]
    Total,
    /// Each company bears only `MB_i * Inter_i`.
    OwnTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub days: usize,
    /// Days excluded from cost accounting when `truncate_warmup` is set.
    pub warmup_days: usize,
    pub truncate_warmup: bool,
    /// Initial stocks as a fraction of their steady-state values.
    pub initial_fill: f64,
    pub marketing_period: usize,
    pub sunk_cost: SunkCostMode,
    pub cost_rates: CostRates,
    pub market: MarketParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            days: 100,
            warmup_days: 50,
            truncate_warmup: false,
            initial_fill: 0.5,
            marketing_period: 10,
            sunk_cost: SunkCostMode::Total,
            cost_rates: CostRates::default(),
            market: MarketParams::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.days == 0 {
            return Err(Error::config("run.days", "must be >= 1"));
        }
        if self.warmup_days >= self.days {
            return Err(Error::config(
                "run.warmup_days",
                format!("must be < run.days ({}), got {}", self.days, self.warmup_days),
            ));
        }
        if !(self.initial_fill >= 0.0 && self.initial_fill.is_finite()) {
            return Err(Error::config("run.initial_fill", "must be >= 0"));
        }
        if self.marketing_period == 0 {
            return Err(Error::config("run.marketing_period", "must be >= 1"));
        }
        self.cost_rates.validate()?;
        self.market.validate()
    }
}

/// End-of-day observations of one company.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompanySeries {
    pub price: Vec<f64>,
    pub inv: Vec<f64>,
    pub backlog: Vec<f64>,
    /// Average shipment rate over the day.
    pub ship_r: Vec<f64>,
    pub ms: Vec<f64>,
    pub labor: Vec<f64>,
    pub wip: Vec<f64>,
    pub m_inv: Vec<f64>,
    pub vac: Vec<f64>,
}

impl CompanySeries {
    fn with_capacity(n: usize) -> Self {
        let v = || Vec::with_capacity(n);
        CompanySeries {
            price: v(),
            inv: v(),
            backlog: v(),
            ship_r: v(),
            ms: v(),
            labor: v(),
            wip: v(),
            m_inv: v(),
            vac: v(),
        }
    }
}

/// Cost drivers and currency items accumulated by one company over the
/// accounted part of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CompanyAccounts {
    /// Total revenue, `sum ShipR * Price * dt`.
    pub revenue: f64,
    pub units_produced: f64,
    pub material_ordered: f64,
    pub inventory_unit_days: f64,
    pub backlog_unit_days: f64,
    pub units_shipped: f64,
    /// Advertising and promotion spending (currency).
    pub marketing: f64,
    /// Own term of the sunk cost, `sum MB_i * Inter_i` spread over each period.
    pub sunk_own: f64,
}

impl CompanyAccounts {
    fn minus(&self, o: &CompanyAccounts) -> CompanyAccounts {
        CompanyAccounts {
            revenue: self.revenue - o.revenue,
            units_produced: self.units_produced - o.units_produced,
            material_ordered: self.material_ordered - o.material_ordered,
            inventory_unit_days: self.inventory_unit_days - o.inventory_unit_days,
            backlog_unit_days: self.backlog_unit_days - o.backlog_unit_days,
            units_shipped: self.units_shipped - o.units_shipped,
            marketing: self.marketing - o.marketing,
            sunk_own: self.sunk_own - o.sunk_own,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutput {
    pub seed: u64,
    pub mirrored: bool,
    pub days: usize,
    pub warmup_days: usize,
    pub sunk_cost_mode: SunkCostMode,
    pub series: [CompanySeries; 2],
    pub accounts: [CompanyAccounts; 2],
    /// Market sunk cost, `sum_i MB_i * Inter_i` accumulated over the run.
    pub sunk_total: f64,
    /// Largest relative stock-bookkeeping error seen at the end of the run.
    pub conservation_error: f64,
}

/// Currency cost items of one company.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub revenue: f64,
    pub production: f64,
    pub raw_material: f64,
    pub inventory: f64,
    pub backlog: f64,
    pub transport: f64,
    pub marketing: f64,
    pub sunk: f64,
}

impl CostBreakdown {
    pub fn total_cost(&self) -> f64 {
        self.production
            + self.raw_material
            + self.inventory
            + self.backlog
            + self.transport
            + self.marketing
            + self.sunk
    }

    pub fn payoff(&self) -> f64 {
        self.revenue - self.total_cost()
    }
}

impl ReplicationOutput {
    pub fn cost_breakdown(&self, rates: &CostRates) -> [CostBreakdown; 2] {
        let item = |k: usize| {
            let a = &self.accounts[k];
            CostBreakdown {
                revenue: a.revenue,
                production: rates.production * a.units_produced,
                raw_material: rates.raw_material * a.material_ordered,
                inventory: rates.holding * a.inventory_unit_days,
                backlog: rates.backlog * a.backlog_unit_days,
                transport: rates.transport * a.units_shipped,
                marketing: a.marketing,
                sunk: match self.sunk_cost_mode {
                    SunkCostMode::Total => self.sunk_total,
                    SunkCostMode::OwnTerm => a.sunk_own,
                },
            }
        };
        [item(0), item(1)]
    }
}

/// Net profit of each company: revenue minus all cost items.
pub fn compute_payoff(rep: &ReplicationOutput, rates: &CostRates) -> [f64; 2] {
    let b = rep.cost_breakdown(rates);
    [b[0].payoff(), b[1].payoff()]
}

fn draw_in(rng: &mut impl Rng, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn replication_error(day: usize, seed: &ReplicationSeed, e: impl std::fmt::Display) -> Error {
    Error::Replication {
        day,
        seed: seed.seed,
        message: e.to_string(),
    }
}

/// Simulates one replication of `cfg.days` days.
pub fn run_replication(
    profile: &StrategyProfile,
    cfg: &RunConfig,
    seed: ReplicationSeed,
) -> Result<ReplicationOutput> {
    cfg.validate()?;
    for p in &profile.players {
        p.validate()?;
    }
    let players = &profile.players;
    let mut agent_rng = seed.shared(Stream::Agents);
    let mut tie_rng = seed.shared(Stream::TieBreak);
    let network_seed = crate::rng::derive_seed(&[seed.seed, Stream::Network as u64]);
    let mut market = Market::new(cfg.market.clone(), network_seed, &mut agent_rng, seed.mirrored)?;
    let mut noise_rng = [
        seed.company(Stream::CompanyNoise, 0),
        seed.company(Stream::CompanyNoise, 1),
    ];
    let mut mkt_rng = [
        seed.company(Stream::CompanyMarketing, 0),
        seed.company(Stream::CompanyMarketing, 1),
    ];

    let tor = market.total_order_rate();
    let mp0 = (players[0].sd.mfg_price + players[1].sd.mfg_price) / 2.0;
    let mut pricing = PricingState::new(mp0)?;
    let mut states = [
        SdState::scaled_steady_state(&players[0].sd, tor / 2.0, mp0, cfg.initial_fill)?,
        SdState::scaled_steady_state(&players[1].sd, tor / 2.0, mp0, cfg.initial_fill)?,
    ];
    for k in 0..2 {
        let input = PriceInputs::from_params(&players[k].sd, states[k].inv_cov);
        states[k].price = company_price(mp0, &input)?;
    }

    let period = cfg.marketing_period;
    let mut mb = [0.0; 2];
    let mut ad = [0.0; 2];
    let mut pm = [0.0; 2];
    let mut period_revenue_start = [0.0; 2];

    let mut series = [
        CompanySeries::with_capacity(cfg.days),
        CompanySeries::with_capacity(cfg.days),
    ];
    let mut marketing_cost = [0.0; 2];
    let mut sunk_own = [0.0; 2];
    let mut sunk_total = 0.0;
    let mut snapshot: Option<([CompanyAccounts; 2], f64)> = None;

    let accounts = |states: &[SdState; 2], mc: &[f64; 2], so: &[f64; 2]| -> [CompanyAccounts; 2] {
        let acc = |k: usize| {
            let t = &states[k].totals;
            CompanyAccounts {
                revenue: t.revenue,
                units_produced: t.units_produced,
                material_ordered: t.material_ordered,
                inventory_unit_days: t.inventory_unit_days,
                backlog_unit_days: t.backlog_unit_days,
                units_shipped: t.units_shipped,
                marketing: mc[k],
                sunk_own: so[k],
            }
        };
        [acc(0), acc(1)]
    };

    for day in 0..cfg.days {
        if cfg.truncate_warmup && day == cfg.warmup_days {
            snapshot = Some((accounts(&states, &marketing_cost, &sunk_own), sunk_total));
        }
        if day % period == 0 {
            for k in 0..2 {
                let pct = players[k].marketing.mb_pct;
                mb[k] = if day == 0 {
                    pct * mp0 * tor * period as f64
                } else {
                    pct * (states[k].totals.revenue - period_revenue_start[k])
                };
                period_revenue_start[k] = states[k].totals.revenue;
                ad[k] = draw_in(&mut mkt_rng[k], players[k].marketing.ad);
                pm[k] = draw_in(&mut mkt_rng[k], players[k].marketing.pm);
            }
        }

        let brands = [0, 1].map(|k| BrandInputs {
            price: states[k].price,
            ad: ad[k],
            pm: pm[k],
            mb: mb[k],
        });
        let step = market
            .step(brands, &mut tie_rng)
            .map_err(|e| replication_error(day, &seed, e))?;
        let inter = market.marketing.inter;
        for k in 0..2 {
            marketing_cost[k] += market.marketing.spend[k].msr_spend;
            sunk_own[k] += (mb[k] * inter[k]).max(0.0) / period as f64;
        }
        sunk_total += sunk_cost(mb, inter).max(0.0) / period as f64;

        let demand = [tor * step.shares[0], tor * step.shares[1]];
        let noise = [
            SdNoise::draw(&players[0].sd, &mut noise_rng[0]),
            SdNoise::draw(&players[1].sd, &mut noise_rng[1]),
        ];
        let shipped_before = [states[0].totals.units_shipped, states[1].totals.units_shipped];
        for _ in 0..SUBSTEPS_PER_DAY {
            for k in 0..2 {
                substep(&mut states[k], &players[k].sd, demand[k], &noise[k], DT)
                    .map_err(|e| replication_error(day, &seed, e))?;
            }
            let inputs = [
                PriceInputs::from_params(&players[0].sd, states[0].inv_cov),
                PriceInputs::from_params(&players[1].sd, states[1].inv_cov),
            ];
            let mpft = (players[0].sd.mpft + players[1].sd.mpft) / 2.0;
            let (prices, next) = step_pricing(&pricing, [&inputs[0], &inputs[1]], mpft, DT)
                .map_err(|e| replication_error(day, &seed, e))?;
            pricing = next;
            states[0].price = prices[0];
            states[1].price = prices[1];
        }

        for k in 0..2 {
            let s = &states[k];
            if !s.is_finite() {
                return Err(replication_error(day, &seed, "non-finite supply-chain state"));
            }
            let ser = &mut series[k];
            ser.price.push(s.price);
            ser.inv.push(s.inv);
            ser.backlog.push(s.backlog);
            ser.ship_r.push(s.totals.units_shipped - shipped_before[k]);
            ser.ms.push(step.shares[k]);
            ser.labor.push(s.labor);
            ser.wip.push(s.wip);
            ser.m_inv.push(s.m_inv);
            ser.vac.push(s.vac);
        }
    }

    let mut accounts_final = accounts(&states, &marketing_cost, &sunk_own);
    if let Some((snap, sunk_snap)) = snapshot {
        accounts_final = [accounts_final[0].minus(&snap[0]), accounts_final[1].minus(&snap[1])];
        sunk_total -= sunk_snap;
    }
    let conservation_error = states[0]
        .max_conservation_error()
        .max(states[1].max_conservation_error());

    Ok(ReplicationOutput {
        seed: seed.seed,
        mirrored: seed.mirrored,
        days: cfg.days,
        warmup_days: if cfg.truncate_warmup { cfg.warmup_days } else { 0 },
        sunk_cost_mode: cfg.sunk_cost,
        series,
        accounts: accounts_final,
        sunk_total,
        conservation_error,
    })
}

impl CompanySeries {
    /// Stock trajectories used for warm-up detection.
    pub fn stocks(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("inv", &self.inv),
            ("backlog", &self.backlog),
            ("labor", &self.labor),
            ("wip", &self.wip),
            ("m_inv", &self.m_inv),
            ("vac", &self.vac),
        ]
    }
}

/// First day after which `x` stays within `tol` of its terminal value.
///
/// The band is relative to the terminal value, floored by the mean absolute
/// level of the trajectory so that stocks settling near zero (backlog,
/// vacancies) are not judged against a vanishing scale.
pub fn settling_day(x: &[f64], tol: f64) -> usize {
    let Some(&term) = x.last() else { return 0 };
    let level = x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64;
    let band = tol * term.abs().max(level);
    x.iter()
        .rposition(|v| (v - term).abs() > band)
        .map_or(0, |d| d + 1)
}

/// Day by which every stock of both companies has settled within `tol`.
pub fn warmup_day(rep: &ReplicationOutput, tol: f64) -> usize {
    rep.series
        .iter()
        .flat_map(|s| s.stocks())
        .map(|(_, x)| settling_day(x, tol))
        .max()
        .unwrap_or(0)
}

/// Per-replication payoffs of one profile, keyed by replication index so
/// that merging partial sets is associative and order-independent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PayoffSampleSet {
    entries: Vec<(u64, [f64; 2])>,
}

impl PayoffSampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sample set from plain per-player payoff lists, indexed 0..n.
    pub fn from_samples(p1: &[f64], p2: &[f64]) -> Result<Self> {
        if p1.len() != p2.len() {
            return Err(Error::param("per-player sample lists differ in length"));
        }
        Ok(PayoffSampleSet {
            entries: p1
                .iter()
                .zip(p2)
                .enumerate()
                .map(|(i, (&a, &b))| (i as u64, [a, b]))
                .collect(),
        })
    }

    pub fn insert(&mut self, index: u64, payoffs: [f64; 2]) {
        match self.entries.binary_search_by_key(&index, |e| e.0) {
            Ok(pos) => self.entries[pos].1 = payoffs,
            Err(pos) => self.entries.insert(pos, (index, payoffs)),
        }
    }

    /// Union of two sets. For duplicate indices the entry of `other` wins;
    /// duplicate indices carry identical payoffs when produced by the same
    /// seed policy, so the result does not depend on merge order.
    pub fn merge(&mut self, other: &PayoffSampleSet) {
        for &(i, p) in &other.entries {
            self.insert(i, p);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn next_index(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.0 + 1)
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn samples(&self, player: usize) -> Vec<f64> {
        self.entries.iter().map(|e| e.1[player]).collect()
    }

    /// The set with player labels exchanged.
    pub fn swapped(&self) -> PayoffSampleSet {
        PayoffSampleSet {
            entries: self.entries.iter().map(|&(i, [a, b])| (i, [b, a])).collect(),
        }
    }

    pub fn stats(&self, player: usize) -> SampleStats {
        SampleStats::from_slice(&self.samples(player))
    }

    pub fn mean(&self, player: usize) -> f64 {
        self.stats(player).mean
    }
}

/// Runs replications `start..start + n` of `profile`. The seed of each
/// replication is derived from `(master, key, index)`, so results do not
/// depend on thread scheduling.
pub fn estimate_payoffs_range(
    profile: &StrategyProfile,
    start: u64,
    n: usize,
    cfg: &RunConfig,
    master: u64,
    key: &[u64],
) -> Result<PayoffSampleSet> {
    if n == 0 {
        return Ok(PayoffSampleSet::new());
    }
    let results: Vec<Result<(u64, [f64; 2])>> = (start..start + n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = ReplicationSeed::new(replication_seed(master, key, i));
            let rep = run_replication(profile, cfg, seed)?;
            Ok((i, compute_payoff(&rep, &cfg.cost_rates)))
        })
        .collect();
    let mut set = PayoffSampleSet::new();
    for r in results {
        let (i, p) = r?;
        set.insert(i, p);
    }
    Ok(set)
}

/// `n` independent replications of `profile`.
pub fn estimate_payoffs(
    profile: &StrategyProfile,
    n: usize,
    cfg: &RunConfig,
    master: u64,
    key: &[u64],
) -> Result<PayoffSampleSet> {
    if n == 0 {
        return Err(Error::param("estimate_payoffs needs n >= 1"));
    }
    estimate_payoffs_range(profile, 0, n, cfg, master, key)
}

/// Daily trace as CSV: one row per day per company.
pub fn write_trace<W: Write>(rep: &ReplicationOutput, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["day", "company", "price", "inv", "backlog", "shipR", "MS", "labor", "wip"])
        .map_err(csv_err)?;
    for day in 0..rep.days {
        for (k, s) in rep.series.iter().enumerate() {
            w.write_record([
                (day + 1).to_string(),
                (k + 1).to_string(),
                s.price[day].to_string(),
                s.inv[day].to_string(),
                s.backlog[day].to_string(),
                s.ship_r[day].to_string(),
                s.ms[day].to_string(),
                s.labor[day].to_string(),
                s.wip[day].to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_profile() -> StrategyProfile {
        let mut p = CompanyPolicy::default();
        p.sd = p.sd.without_noise();
        StrategyProfile::symmetric(p)
    }

    #[test]
    fn determinism() {
        let cfg = RunConfig::default();
        let prof = StrategyProfile::symmetric(CompanyPolicy::default());
        let a = run_replication(&prof, &cfg, ReplicationSeed::new(5)).unwrap();
        let b = run_replication(&prof, &cfg, ReplicationSeed::new(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.series[0].price.len(), 100);
    }

    #[test]
    fn zero_rates_pay_revenue_minus_marketing_items() {
        let cfg = RunConfig::default();
        let rep = run_replication(&quiet_profile(), &cfg, ReplicationSeed::new(1)).unwrap();
        let b = rep.cost_breakdown(&CostRates::zero());
        let pay = compute_payoff(&rep, &CostRates::zero());
        for k in 0..2 {
            assert_eq!(b[k].production, 0.0);
            assert!((pay[k] - (b[k].revenue - b[k].marketing - b[k].sunk)).abs() < 1e-9);
        }
    }

    #[test]
    fn mirrored_seed_swaps_payoffs() {
        let cfg = RunConfig::default();
        let mut a = CompanyPolicy::default();
        a.sd.ss_cov = 12.0;
        a.marketing.ad = [0.4, 0.5];
        let b = CompanyPolicy::default();
        let prof = StrategyProfile::new(a, b);
        let s = ReplicationSeed::new(77);
        let r1 = run_replication(&prof, &cfg, s).unwrap();
        let r2 = run_replication(&prof.swapped(), &cfg, s.mirrored()).unwrap();
        let p1 = compute_payoff(&r1, &cfg.cost_rates);
        let p2 = compute_payoff(&r2, &cfg.cost_rates);
        assert_eq!(p1[0], p2[1]);
        assert_eq!(p1[1], p2[0]);
        assert_eq!(r1.series[0].ms, r2.series[1].ms);
    }

    #[test]
    fn sample_set_merge_is_order_independent() {
        let mut a = PayoffSampleSet::new();
        a.insert(0, [1.0, 2.0]);
        a.insert(2, [3.0, 4.0]);
        let mut b = PayoffSampleSet::new();
        b.insert(1, [5.0, 6.0]);
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.samples(0), vec![1.0, 5.0, 3.0]);
    }

    #[test]
    fn trace_has_one_row_per_day_per_company() {
        let cfg = RunConfig::default();
        let rep = run_replication(&quiet_profile(), &cfg, ReplicationSeed::new(2)).unwrap();
        let mut buf = Vec::new();
        write_trace(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 200);
        assert!(text.starts_with("day,company,price,inv,backlog,shipR,MS,labor,wip"));
    }
}
