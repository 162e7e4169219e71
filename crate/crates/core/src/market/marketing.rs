use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MarketingSpend {
    pub ad_s: f64,
    pub pm_s: f64,
    /// Daily marketing spending rate.
    pub msr_spend: f64,
}

/// Advertising and promotion spending out of the marketing budget.
pub fn marketing_spend(mb: f64, ad: f64, pm: f64, k: f64, adj_time_ms: f64) -> Result<MarketingSpend> {
    if !(adj_time_ms > 0.0) {
        return Err(Error::param(format!(
            "marketing adjustment time must be > 0, got {adj_time_ms}"
        )));
    }
    let ad_s = k * mb * ad;
    let pm_s = k * mb * pm;
    Ok(MarketingSpend {
        ad_s,
        pm_s,
        msr_spend: (ad_s + pm_s) / adj_time_ms,
    })
}

/// Weights of advertising, promotion and their interaction in marketing force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceWeights(pub [f64; 3]);

impl Default for ForceWeights {
    fn default() -> Self {
        ForceWeights([1.0, 1.0, 0.5])
    }
}

/// Force excluding the interaction co-state.
pub fn base_force(ad: f64, pm: f64, w: &ForceWeights) -> f64 {
    let [w1, w2, w3] = w.0;
    w1 * ad + w2 * pm + w3 * ad * pm
}

pub fn marketing_force(ad: f64, pm: f64, inter: f64, w: &ForceWeights) -> f64 {
    base_force(ad, pm, w) + inter
}

/// Parameters of the marketing-interaction co-state system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostateParams {
    pub rho: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl Default for CostateParams {
    fn default() -> Self {
        CostateParams {
            rho: 0.1,
            delta1: 0.2,
            delta2: 0.2,
        }
    }
}

fn effective_prices(prices: [f64; 2], pms: [f64; 2]) -> [f64; 2] {
    [prices[0] * (1.0 - pms[0]), prices[1] * (1.0 - pms[1])]
}

/// One Euler step of `d inter / dt = Delta (rho + F) inter - e`, with
/// `Delta = [[d1, d1 d2], [d2 d1, d2]]` and `e_i = Price_i (1 - Pm_i)`.
pub fn update_costate(
    inter: [f64; 2],
    cp: &CostateParams,
    total_force: f64,
    prices: [f64; 2],
    pms: [f64; 2],
    dt: f64,
) -> Result<[f64; 2]> {
    if !(dt > 0.0) {
        return Err(Error::param(format!("dt must be > 0, got {dt}")));
    }
    let (d1, d2) = (cp.delta1, cp.delta2);
    let g = cp.rho + total_force;
    let e = effective_prices(prices, pms);
    let r0 = g * (d1 * inter[0] + d1 * d2 * inter[1]) - e[0];
    let r1 = g * (d2 * d1 * inter[0] + d2 * inter[1]) - e[1];
    Ok([inter[0] + dt * r0, inter[1] + dt * r1])
}

/// Rest point of the co-state system when the total force feeds back as
/// `F = B + inter_1 + inter_2`, with `B` the summed base forces.
///
/// Writing `y = Delta^-1 e` and `S = inter_1 + inter_2`, the rest point is
/// `inter = y / (rho + B + S)` where `S` is the non-negative root of
/// `S^2 + (rho + B) S - (y_1 + y_2) = 0`. The forward Euler recursion moves
/// away from this point, so the simulator holds the co-state here by default.
/// Returns zeros when `Delta` is singular or no non-negative root exists.
pub fn stationary_costate(cp: &CostateParams, base_total: f64, prices: [f64; 2], pms: [f64; 2]) -> [f64; 2] {
    let (d1, d2) = (cp.delta1, cp.delta2);
    let det = d1 * d2 * (1.0 - d1 * d2);
    if det.abs() < 1e-12 {
        return [0.0; 2];
    }
    let e = effective_prices(prices, pms);
    let y = [
        (d2 * e[0] - d1 * d2 * e[1]) / det,
        (d1 * e[1] - d1 * d2 * e[0]) / det,
    ];
    let a = cp.rho + base_total;
    let disc = a * a + 4.0 * (y[0] + y[1]);
    if disc < 0.0 {
        return [0.0; 2];
    }
    let s = ((-a + disc.sqrt()) / 2.0).max(0.0);
    let denom = a + s;
    if denom <= 0.0 {
        return [0.0; 2];
    }
    let out = [y[0] / denom, y[1] / denom];
    if out.iter().all(|v| v.is_finite()) {
        out
    } else {
        [0.0; 2]
    }
}

/// Sunk cost of the marketing interaction, `sum_i MB_i * Inter_i`.
pub fn sunk_cost(mbs: [f64; 2], inters: [f64; 2]) -> f64 {
    mbs[0] * inters[0] + mbs[1] * inters[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spend_examples() {
        let s = marketing_spend(100.0, 0.2, 0.1, 1.0, 10.0).unwrap();
        assert_abs_diff_eq!(s.ad_s, 20.0);
        assert_eq!(marketing_spend(0.0, 0.3, 0.3, 1.0, 10.0).unwrap(), MarketingSpend::default());
        let s = marketing_spend(50.0, 0.3, 0.1, 2.0, 4.0).unwrap();
        assert_abs_diff_eq!(s.msr_spend, 10.0, epsilon = 1e-12);
        assert!(marketing_spend(1.0, 0.1, 0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn force_examples() {
        let w = ForceWeights([1.0, 1.0, 0.0]);
        assert_abs_diff_eq!(marketing_force(0.3, 0.2, 0.0, &w), 0.5, epsilon = 1e-15);
        assert_eq!(marketing_force(0.0, 0.0, 0.7, &ForceWeights::default()), 0.7);
        let w = ForceWeights([2.0, 1.0, 0.5]);
        assert_abs_diff_eq!(marketing_force(0.4, 0.2, 0.1, &w), 1.14, epsilon = 1e-12);
    }

    #[test]
    fn costate_examples() {
        let cp = CostateParams {
            rho: 0.3,
            delta1: 0.0,
            delta2: 0.0,
        };
        let next = update_costate([0.5, -0.5], &cp, 0.7, [2.0, 3.0], [0.5, 0.0], 0.1).unwrap();
        assert_abs_diff_eq!(next[0], 0.5 - 0.1 * 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(next[1], -0.5 - 0.1 * 3.0, epsilon = 1e-15);

        let cp = CostateParams::default();
        assert_eq!(
            update_costate([0.0, 0.0], &cp, 1.0, [0.0, 0.0], [0.3, 0.3], 0.1).unwrap(),
            [0.0, 0.0]
        );

        let cp = CostateParams {
            rho: 0.4,
            delta1: 1.0,
            delta2: 1.0,
        };
        let next = update_costate([1.0, 1.0], &cp, 0.6, [1.0, 1.0], [0.0, 0.0], 0.1).unwrap();
        assert_abs_diff_eq!(next[0], 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(next[1], 1.1, epsilon = 1e-12);
    }

    #[test]
    fn stationary_costate_is_a_rest_point() {
        let cp = CostateParams::default();
        let w = ForceWeights::default();
        let (ads, pms, prices) = ([0.15, 0.35], [0.25, 0.45], [1.4, 1.9]);
        let b = base_force(ads[0], pms[0], &w) + base_force(ads[1], pms[1], &w);
        let inter = stationary_costate(&cp, b, prices, pms);
        let f = b + inter[0] + inter[1];
        let next = update_costate(inter, &cp, f, prices, pms, 1.0).unwrap();
        assert_abs_diff_eq!(next[0], inter[0], epsilon = 1e-10);
        assert_abs_diff_eq!(next[1], inter[1], epsilon = 1e-10);
        assert!(inter[0] > 0.0 && inter[1] > 0.0);
    }

    #[test]
    fn sunk_cost_examples() {
        assert_eq!(sunk_cost([10.0, 20.0], [0.0, 0.0]), 0.0);
        assert_abs_diff_eq!(sunk_cost([100.0, 100.0], [0.1, 0.2]), 30.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sunk_cost([0.0, 50.0], [5.0, 0.2]), 10.0, epsilon = 1e-12);
    }
}
