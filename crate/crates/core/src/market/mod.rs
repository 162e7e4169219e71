//! Agent-based consumer market. Consumers sit on a scale-free social network
//! and each day adopt the brand with the higher purchasing motivation, which
//! mixes price, advertising, promotion and the adoption of their neighbors.

pub mod consumer;
pub mod marketing;
pub mod network;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use consumer::{
    motivation, price_sensitivity, update_perceptions, ConsumerAgent, Perception,
};
pub use marketing::{
    base_force, marketing_force, marketing_spend, stationary_costate, sunk_cost,
    update_costate, CostateParams, ForceWeights, MarketingSpend,
};
pub use network::{ba_edge_count, ccdf_loglog_slope, generate_ba_network, SocialNetwork};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Price level against which a consumer judges one brand's effective price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceReference {
    /// `Price_1 + Price_2`.
    #[default]
    Sum,
    /// `(Price_1 + Price_2) / 2`.
    Average,
}

/// How the marketing-interaction co-state evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostateMode {
    /// Held at the rest point of the co-state system for the current inputs.
    #[default]
    Stationary,
    /// Literal daily Euler steps of the co-state system.
    Forward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketParams {
    pub n_agents: usize,
    pub m0: usize,
    pub m: usize,
    pub weights: ForceWeights,
    pub costate: CostateParams,
    pub costate_mode: CostateMode,
    /// Mean initial perceptions `(I_a, I_p, I_f)`.
    pub initial_perception: [f64; 3],
    /// Half-width of the uniform spread of initial perceptions across
    /// consumers and brands.
    pub perception_spread: f64,
    pub s: f64,
    /// Range of the per-consumer socio-economic offset.
    pub m_agent_range: [f64; 2],
    pub k: f64,
    pub adj_time_ms: f64,
    pub price_reference: PriceReference,
    /// Units bought per consumer per day.
    pub consumption: f64,
}

impl Default for MarketParams {
    fn default() -> Self {
        MarketParams {
            n_agents: 200,
            m0: 5,
            m: 3,
            weights: ForceWeights::default(),
            costate: CostateParams::default(),
            costate_mode: CostateMode::Stationary,
            initial_perception: [0.5, 0.5, 0.5],
            perception_spread: 0.5,
            s: 2.0,
            m_agent_range: [0.5, 1.5],
            k: 1.0,
            adj_time_ms: 10.0,
            price_reference: PriceReference::Sum,
            consumption: 1.0,
        }
    }
}

impl MarketParams {
    /// Total order rate of the whole market.
    pub fn total_order_rate(&self) -> f64 {
        self.n_agents as f64 * self.consumption
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::config("market.n_agents", "must be >= 1"));
        }
        if self.m == 0 || self.m > self.m0 {
            return Err(Error::config(
                "market.m",
                format!("must satisfy 1 <= m <= m0, got m={}, m0={}", self.m, self.m0),
            ));
        }
        if self.n_agents < self.m0 {
            return Err(Error::config(
                "market.m0",
                format!("must be <= n_agents, got {}", self.m0),
            ));
        }
        if !(self.s > 1.0) {
            return Err(Error::config("market.s", format!("must be > 1, got {}", self.s)));
        }
        if !(self.adj_time_ms > 0.0) {
            return Err(Error::config("market.adj_time_ms", "must be > 0"));
        }
        if !(self.k >= 0.0) {
            return Err(Error::config("market.k", "must be >= 0"));
        }
        if !(self.consumption >= 0.0 && self.consumption.is_finite()) {
            return Err(Error::config("market.consumption", "must be >= 0"));
        }
        if !(self.perception_spread >= 0.0) {
            return Err(Error::config("market.perception_spread", "must be >= 0"));
        }
        if !(self.m_agent_range[0] <= self.m_agent_range[1]) {
            return Err(Error::config("market.m_agent_range", "lower bound exceeds upper bound"));
        }
        if !(self.costate.rho >= 0.0) {
            return Err(Error::config("market.costate.rho", "must be >= 0"));
        }
        Ok(())
    }
}

/// Per-brand marketing inputs for one day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrandInputs {
    pub price: f64,
    pub ad: f64,
    pub pm: f64,
    pub mb: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MarketingState {
    pub spend: [MarketingSpend; 2],
    pub mf: [f64; 2],
    pub inter: [f64; 2],
    /// Total marketing force of the previous step.
    pub total_force: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketStep {
    pub shares: [f64; 2],
    pub adopters: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    pub params: MarketParams,
    pub network: SocialNetwork,
    pub agents: Vec<ConsumerAgent>,
    pub marketing: MarketingState,
    /// When set, uniform draws resolve toward the opposite brand label, so
    /// the run is the exact brand-swapped image of the unmirrored one.
    pub mirrored: bool,
    next_adopted: Vec<usize>,
}

impl Market {
    /// Builds the network and the consumer population. `agent_rng` draws the
    /// consumer attributes in a brand-agnostic slot order.
    pub fn new(
        params: MarketParams,
        network_seed: u64,
        agent_rng: &mut SimRng,
        mirrored: bool,
    ) -> Result<Self> {
        params.validate()?;
        let network = generate_ba_network(params.n_agents, params.m0, params.m, network_seed)?;
        let [lo, hi] = params.m_agent_range;
        let spread = params.perception_spread;
        let agents = (0..params.n_agents)
            .map(|id| {
                let m_agent = if hi > lo { agent_rng.random_range(lo..hi) } else { lo };
                let mut slots = [[0.0; 3]; 2];
                for slot in slots.iter_mut() {
                    for (j, v) in slot.iter_mut().enumerate() {
                        let mean = params.initial_perception[j];
                        *v = if spread > 0.0 {
                            agent_rng.random_range(mean - spread..mean + spread)
                        } else {
                            mean
                        };
                    }
                }
                if mirrored {
                    slots.swap(0, 1);
                }
                ConsumerAgent::new(id, m_agent, slots)
            })
            .collect();
        Ok(Market {
            next_adopted: vec![0; params.n_agents],
            params,
            network,
            agents,
            marketing: MarketingState::default(),
            mirrored,
        })
    }

    /// Market over a given network and population, for hand-built cases.
    pub fn from_parts(
        params: MarketParams,
        network: SocialNetwork,
        agents: Vec<ConsumerAgent>,
        mirrored: bool,
    ) -> Result<Self> {
        if network.len() != agents.len() {
            return Err(Error::param("network and population sizes differ"));
        }
        Ok(Market {
            next_adopted: vec![0; agents.len()],
            params,
            network,
            agents,
            marketing: MarketingState::default(),
            mirrored,
        })
    }

    pub fn total_order_rate(&self) -> f64 {
        self.params.total_order_rate()
    }

    /// Advances the market by one day.
    pub fn step(&mut self, brands: [BrandInputs; 2], tie_rng: &mut SimRng) -> Result<MarketStep> {
        if self.agents.is_empty() {
            return Err(Error::param("market has no agents"));
        }
        for b in &brands {
            if !(b.ad > 0.0 && b.ad < 1.0 && b.pm > 0.0 && b.pm < 1.0) {
                return Err(Error::param(format!(
                    "advertising and promotion intensities must lie in (0, 1), got {} and {}",
                    b.ad, b.pm
                )));
            }
            if !(b.mb >= 0.0) || !(b.price > 0.0) {
                return Err(Error::State(format!(
                    "marketing budget {} or price {} out of range",
                    b.mb, b.price
                )));
            }
        }
        let p = &self.params;
        let prices = [brands[0].price, brands[1].price];
        let pms = [brands[0].pm, brands[1].pm];
        let m = &mut self.marketing;
        for k in 0..2 {
            m.spend[k] = marketing_spend(brands[k].mb, brands[k].ad, brands[k].pm, p.k, p.adj_time_ms)?;
        }
        let base = [
            base_force(brands[0].ad, brands[0].pm, &p.weights),
            base_force(brands[1].ad, brands[1].pm, &p.weights),
        ];
        m.inter = match p.costate_mode {
            CostateMode::Stationary => stationary_costate(&p.costate, base[0] + base[1], prices, pms),
            CostateMode::Forward => update_costate(m.inter, &p.costate, m.total_force, prices, pms, 1.0)?,
        };
        m.mf = [base[0] + m.inter[0], base[1] + m.inter[1]];
        m.total_force = m.mf[0] + m.mf[1];
        if !m.total_force.is_finite() {
            return Err(Error::State("marketing force is not finite".into()));
        }

        let price_ref = match p.price_reference {
            PriceReference::Sum => prices[0] + prices[1],
            PriceReference::Average => (prices[0] + prices[1]) / 2.0,
        };
        let mf = m.mf;
        let mut adopters = [0usize; 2];
        for (idx, agent) in self.agents.iter().enumerate() {
            let neighbors = self.network.neighbors(idx);
            let mut counts = [0usize; 2];
            for &u in neighbors {
                if let Some(b) = self.agents[u as usize].adopted {
                    counts[b] += 1;
                }
            }
            let deg = neighbors.len().max(1) as f64;
            let inf = [counts[0] as f64 / deg, counts[1] as f64 / deg];
            let mut score = [0.0; 2];
            for k in 0..2 {
                let [i_a, i_p, i_f] = agent.initial[k];
                let perception = update_perceptions(mf[k], i_a, i_p, i_f);
                let sens_p = price_sensitivity(prices[k], pms[k], price_ref, p.s, agent.m_agent)?;
                score[k] = motivation(sens_p, &perception, prices[k], brands[k].ad, pms[k], inf[k]);
            }
            // One draw per consumer per day keeps the stream aligned
            // regardless of how many ties occur.
            let u: f64 = tie_rng.random();
            let choice = if score[0] > score[1] {
                0
            } else if score[1] > score[0] {
                1
            } else if (u < 0.5) != self.mirrored {
                0
            } else {
                1
            };
            self.next_adopted[idx] = choice;
            adopters[choice] += 1;
        }

        // Perceptions and influence are recorded after all choices so the
        // update stays synchronous.
        for (idx, agent) in self.agents.iter_mut().enumerate() {
            agent.adopted = Some(self.next_adopted[idx]);
        }
        for idx in 0..self.agents.len() {
            let neighbors = self.network.neighbors(idx);
            let mut counts = [0usize; 2];
            for &u in neighbors {
                if let Some(b) = self.agents[u as usize].adopted {
                    counts[b] += 1;
                }
            }
            let deg = neighbors.len().max(1) as f64;
            let agent = &mut self.agents[idx];
            agent.inf = [counts[0] as f64 / deg, counts[1] as f64 / deg];
            for k in 0..2 {
                let [i_a, i_p, i_f] = agent.initial[k];
                agent.perception[k] = update_perceptions(mf[k], i_a, i_p, i_f);
                agent.sens_p[k] = price_sensitivity(prices[k], pms[k], price_ref, p.s, agent.m_agent)?;
            }
        }

        let n = self.agents.len() as f64;
        Ok(MarketStep {
            shares: [adopters[0] as f64 / n, adopters[1] as f64 / n],
            adopters,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{ReplicationSeed, Stream};

    fn market(seed: u64, mirrored: bool, params: MarketParams) -> (Market, SimRng) {
        let rs = ReplicationSeed { seed, mirrored };
        let mut agent_rng = rs.shared(Stream::Agents);
        let m = Market::new(params, rs.seed, &mut agent_rng, mirrored).unwrap();
        (m, rs.shared(Stream::TieBreak))
    }

    fn brand(price: f64, ad: f64, pm: f64) -> BrandInputs {
        BrandInputs { price, ad, pm, mb: 100.0 }
    }

    #[test]
    fn shares_partition_the_population() {
        let (mut m, mut rng) = market(3, false, MarketParams::default());
        for _ in 0..20 {
            let s = m.step([brand(1.5, 0.15, 0.25), brand(1.6, 0.35, 0.15)], &mut rng).unwrap();
            assert_eq!(s.shares[0] + s.shares[1], 1.0);
            assert_eq!(s.adopters[0] + s.adopters[1], 200);
        }
    }

    #[test]
    fn dominant_brand_takes_the_market() {
        // Brand 0 is strictly better on every positive coefficient and
        // consumers all share the same perceptions.
        let params = MarketParams {
            perception_spread: 0.0,
            m_agent_range: [3.0, 3.0],
            ..MarketParams::default()
        };
        let (mut m, mut rng) = market(1, false, params);
        let s = m.step([brand(1.5, 0.45, 0.2), brand(1.5, 0.11, 0.2)], &mut rng).unwrap();
        assert_eq!(s.shares, [1.0, 0.0]);
    }

    #[test]
    fn mirrored_run_swaps_shares_exactly() {
        let inputs = [brand(1.4, 0.2, 0.3), brand(1.7, 0.3, 0.2)];
        let (mut a, mut ra) = market(11, false, MarketParams::default());
        let (mut b, mut rb) = market(11, true, MarketParams::default());
        for _ in 0..30 {
            let sa = a.step(inputs, &mut ra).unwrap();
            let sb = b.step([inputs[1], inputs[0]], &mut rb).unwrap();
            assert_eq!(sa.shares[0], sb.shares[1]);
            assert_eq!(sa.adopters[1], sb.adopters[0]);
        }
    }

    #[test]
    fn empty_intensity_is_rejected() {
        let (mut m, mut rng) = market(1, false, MarketParams::default());
        assert!(m.step([brand(1.5, 0.0, 0.2), brand(1.5, 0.2, 0.2)], &mut rng).is_err());
    }
}
