use serde::{Deserialize, Serialize};

use super::params::SdParams;
use crate::error::{Error, Result};

/// Floor applied to inventory coverage before it is raised to a negative power.
pub const MIN_INV_COV: f64 = 1e-3;

/// Market expected price shared by both companies, plus the last effect
/// multipliers for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingState {
    pub mp: f64,
    pub f_c: [f64; 2],
    pub f_i: [f64; 2],
    pub price_cr: f64,
}

impl PricingState {
    pub fn new(mp: f64) -> Result<Self> {
        if !(mp > 0.0 && mp.is_finite()) {
            return Err(Error::State(format!("market expected price must be > 0, got {mp}")));
        }
        Ok(PricingState {
            mp,
            f_c: [1.0; 2],
            f_i: [1.0; 2],
            price_cr: 0.0,
        })
    }
}

/// Per-company inputs to the price equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceInputs {
    /// Cost level the retailer compares against the market price.
    pub cost: f64,
    pub inv_cov: f64,
    pub max_inv_cov: f64,
    pub psens_c: f64,
    pub psens_i: f64,
}

impl PriceInputs {
    pub fn from_params(p: &SdParams, inv_cov: f64) -> Self {
        PriceInputs {
            cost: p.mfg_price,
            inv_cov,
            max_inv_cov: p.max_inv_cov,
            psens_c: p.psens_c,
            psens_i: p.psens_i,
        }
    }
}

pub fn cost_effect(cost: f64, mp: f64, psens_c: f64) -> f64 {
    1.0 + psens_c * (cost / mp - 1.0)
}

pub fn inventory_effect(inv_cov: f64, max_inv_cov: f64, psens_i: f64) -> f64 {
    (inv_cov.max(MIN_INV_COV) / max_inv_cov).powf(psens_i)
}

/// Price of one company given the current market expected price.
pub fn company_price(mp: f64, input: &PriceInputs) -> Result<f64> {
    if !(mp > 0.0) {
        return Err(Error::State(format!("market expected price must be > 0, got {mp}")));
    }
    if !(input.inv_cov >= 0.0) {
        return Err(Error::State(format!("inventory coverage must be >= 0, got {}", input.inv_cov)));
    }
    Ok(mp
        * cost_effect(input.cost, mp, input.psens_c)
        * inventory_effect(input.inv_cov, input.max_inv_cov, input.psens_i))
}

/// Prices both companies from the shared expected price, then moves the
/// expected price toward their average over `mpft`.
pub fn step_pricing(
    shared: &PricingState,
    inputs: [&PriceInputs; 2],
    mpft: f64,
    dt: f64,
) -> Result<([f64; 2], PricingState)> {
    if !(mpft > 0.0 && dt > 0.0) {
        return Err(Error::param(format!("mpft and dt must be > 0, got {mpft}, {dt}")));
    }
    let mp = shared.mp;
    let mut prices = [0.0; 2];
    let mut next = *shared;
    for k in 0..2 {
        prices[k] = company_price(mp, inputs[k])?;
        next.f_c[k] = cost_effect(inputs[k].cost, mp, inputs[k].psens_c);
        next.f_i[k] = inventory_effect(inputs[k].inv_cov, inputs[k].max_inv_cov, inputs[k].psens_i);
    }
    next.price_cr = ((prices[0] + prices[1]) / 2.0 - mp) / mpft;
    next.mp = mp + dt * next.price_cr;
    if !(next.mp > 0.0 && next.mp.is_finite()) {
        return Err(Error::State(format!("market expected price left (0, inf): {}", next.mp)));
    }
    Ok((prices, next))
}

/// Expected price at which the pricing loop is stationary when both
/// companies hold inventory coverage fixed at `inv_cov`.
///
/// With `F_C = 1 - k + k a / MP`, stationarity of the average price gives
/// `MP = (sum k_i a_i F_I,i / 2) / (1 - sum (1 - k_i) F_I,i / 2)`.
pub fn stationary_market_price(inputs: [&PriceInputs; 2]) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 1.0;
    for x in inputs {
        let fi = inventory_effect(x.inv_cov, x.max_inv_cov, x.psens_i);
        num += x.psens_c * x.cost * fi / 2.0;
        den -= (1.0 - x.psens_c) * fi / 2.0;
    }
    let mp = num / den;
    (den > 0.0 && mp > 0.0 && mp.is_finite()).then_some(mp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inputs(psens_c: f64, psens_i: f64, inv_cov: f64) -> PriceInputs {
        PriceInputs {
            cost: 1.5,
            inv_cov,
            max_inv_cov: 10.0,
            psens_c,
            psens_i,
        }
    }

    #[test]
    fn neutral_multipliers_give_market_price() {
        assert_abs_diff_eq!(
            company_price(1.7, &inputs(0.0, -0.5, 10.0)).unwrap(),
            1.7,
            epsilon = 1e-15
        );
    }

    #[test]
    fn half_coverage_with_unit_sensitivity_doubles_price() {
        assert_abs_diff_eq!(
            company_price(1.7, &inputs(0.0, -1.0, 5.0)).unwrap(),
            3.4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn equal_prices_at_mp_leave_mp_stationary() {
        let s = PricingState::new(2.0).unwrap();
        let a = inputs(0.0, -0.3, 10.0);
        let (prices, next) = step_pricing(&s, [&a, &a], 5.0, 0.25).unwrap();
        assert_eq!(prices, [2.0, 2.0]);
        assert_eq!(next.price_cr, 0.0);
        assert_eq!(next.mp, 2.0);
    }

    #[test]
    fn stationary_price_is_fixed_point() {
        let a = inputs(0.4, -0.3, 7.0);
        let b = PriceInputs {
            cost: 1.0,
            ..inputs(0.8, -0.6, 4.0)
        };
        let mp = stationary_market_price([&a, &b]).unwrap();
        let (_, next) = step_pricing(&PricingState::new(mp).unwrap(), [&a, &b], 5.0, 0.25).unwrap();
        assert_abs_diff_eq!(next.mp, mp, epsilon = 1e-12);
    }

    #[test]
    fn nonpositive_mp_is_a_state_error() {
        assert!(matches!(PricingState::new(0.0), Err(Error::State(_))));
        assert!(company_price(-1.0, &inputs(0.5, -0.5, 3.0)).is_err());
    }
}
