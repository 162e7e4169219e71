//! Production, labor and logistics sub-steps for one company.
//!
//! Outflows are capped by what the stock holds, so stocks never need to be
//! clamped after the fact and the in/out ledgers stay exact.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::params::SdParams;
use super::state::{SdState, StockLedger};
use crate::error::{Error, Result};

/// Exponential moving average of a gap-closing rate:
/// `lambda * (desired - actual) / fulfill_time + (1 - lambda) * prev_adjust`.
pub fn smooth_adjust(
    desired: f64,
    actual: f64,
    fulfill_time: f64,
    prev_adjust: f64,
    lambda: f64,
) -> Result<f64> {
    if !(fulfill_time > 0.0) {
        return Err(Error::param(format!(
            "fulfillment time must be > 0, got {fulfill_time}"
        )));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::param(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    Ok(lambda * (desired - actual) / fulfill_time + (1.0 - lambda) * prev_adjust)
}

#[inline]
fn smooth(desired: f64, actual: f64, fulfill_time: f64, prev: f64, lambda: f64) -> f64 {
    lambda * (desired - actual) / fulfill_time + (1.0 - lambda) * prev
}

/// Share of desired shipments that inventory can cover, `clamp(inv / desired, 0, 1)`.
pub fn fulfillment_ratio(inv: f64, desired_inv: f64) -> Result<f64> {
    if !(desired_inv > 0.0) {
        return Err(Error::param(format!(
            "desired inventory must be > 0, got {desired_inv}"
        )));
    }
    Ok((inv / desired_inv).clamp(0.0, 1.0))
}

/// One day's noise draws in units, already scaled by the configured sigmas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SdNoise {
    pub order: f64,
    pub wip: f64,
    pub prod: f64,
    pub inv: f64,
}

impl SdNoise {
    pub fn draw<R: Rng + ?Sized>(p: &SdParams, rng: &mut R) -> Self {
        let mut z = || -> f64 { rng.sample(StandardNormal) };
        SdNoise {
            order: p.sigma_o * z(),
            wip: p.sigma_w * z(),
            prod: p.sigma_p * z(),
            inv: p.sigma_i * z(),
        }
    }
}

fn check_inputs(rate: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param(format!("dt must be > 0, got {dt}")));
    }
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::State(format!("rate input must be finite and >= 0, got {rate}")));
    }
    Ok(())
}

/// Customer order rate with its noise term, floored at zero.
pub fn noisy_order_rate(demand: f64, noise: &SdNoise) -> f64 {
    (demand + noise.order).max(0.0)
}

/// Desired finished-goods inventory for a given order rate.
pub fn desired_inventory(p: &SdParams, order_r: f64, noise: &SdNoise) -> f64 {
    ((p.opt + p.ss_cov) * order_r + noise.inv).max(0.0)
}

/// Rate at which raw material can be released to production starts.
///
/// Mirrors the finished-goods fulfillment rule: expected usage (last desired
/// production start rate) scaled by how well raw-material stock covers its
/// target, and never more than the stock can supply in one step.
pub fn material_supply_rate(state: &SdState, p: &SdParams, dt: f64) -> f64 {
    let usage = state.dprod_br.max(0.0);
    if usage == 0.0 {
        return 0.0;
    }
    let target = p.m_inv_cov * usage;
    let ratio = (state.m_inv / target).clamp(0.0, 1.0);
    (usage * ratio).min(state.m_inv / dt)
}

fn integrate(stock: &mut f64, ledger: &mut StockLedger, inflow: f64, outflow: f64, dt: f64) {
    ledger.inflow += inflow * dt;
    ledger.outflow += outflow * dt;
    // Rounding can leave -1 ulp when the outflow drains the stock exactly.
    *stock = (*stock + inflow * dt - outflow * dt).max(0.0);
}

/// Production, labor and vacancy dynamics for one sub-step.
///
/// `demand` is the noiseless order rate (TOR times market share); the order
/// noise is applied here and again, identically, in [`step_logistics`].
/// Sets `prod_cr`, which the logistics step uses as inventory inflow.
pub fn step_production(
    state: &mut SdState,
    p: &SdParams,
    demand: f64,
    material_rate: f64,
    noise: &SdNoise,
    dt: f64,
) -> Result<()> {
    check_inputs(demand, dt)?;
    check_inputs(material_rate, dt)?;
    let order_r = noisy_order_rate(demand, noise);
    let dinv = desired_inventory(p, order_r, noise);

    let aprod = smooth(dinv, state.inv, p.inv_ft, state.aprod, p.lambda_p);
    let dwip = ((aprod + order_r) * p.cycle_t + noise.wip).max(0.0);
    let awip = smooth(dwip, state.wip, p.wip_ft, state.awip, p.lambda_w);
    let dprod_br = awip + aprod + order_r + noise.prod;

    let capacity = state.labor * p.labor_productivity();
    let prod_br = capacity.min(material_rate).min(dprod_br).max(0.0);
    let prod_cr = (state.wip / p.cycle_t).min(state.wip / dt);

    let dlabor = dprod_br.max(0.0) / p.labor_productivity();
    let alabor = smooth(dlabor, state.labor, p.labor_ft, state.alabor, p.lambda_l);
    let mut retire_r = state.labor / p.employ_t;
    // Replacement hiring keeps the workforce stationary when ALabor = 0.
    let dhire_r = retire_r + alabor;
    let dvac = (p.vac_ft * dhire_r).max(0.0);
    let avac = smooth(dvac, state.vac, p.vac_ct, state.avac, p.lambda_v);
    let vac_br = (dhire_r + avac).max(0.0);
    let hire_r = (state.vac / p.vac_ft).min(state.vac / dt);
    let mut layoff_r = (-alabor).max(0.0).min(state.labor / p.layoff_t);
    if let Some(cap) = p.max_lr {
        layoff_r = layoff_r.min(cap);
    }
    let labor_out = (retire_r + layoff_r) * dt;
    if labor_out > state.labor && labor_out > 0.0 {
        let scale = state.labor / labor_out;
        retire_r *= scale;
        layoff_r *= scale;
    }

    state.order_r = order_r;
    state.dinv = dinv;
    state.aprod = aprod;
    state.dwip = dwip;
    state.awip = awip;
    state.dprod_br = dprod_br;
    state.prod_br = prod_br;
    state.prod_cr = prod_cr;
    state.msr = material_rate;
    state.dlabor = dlabor;
    state.alabor = alabor;
    state.dvac = dvac;
    state.avac = avac;
    state.retire_r = retire_r;
    state.layoff_r = layoff_r;
    state.vac_br = vac_br;
    state.hire_r = hire_r;

    let l = &mut state.ledgers;
    integrate(&mut state.wip, &mut l.wip, prod_br, prod_cr, dt);
    integrate(&mut state.labor, &mut l.labor, hire_r, retire_r + layoff_r, dt);
    integrate(&mut state.vac, &mut l.vac, vac_br, hire_r, dt);
    state.totals.units_produced += prod_br * dt;
    Ok(())
}

/// Shipping, backlog, finished-goods inventory and the raw-material chain
/// for one sub-step. Must run after [`step_production`] in the same sub-step.
pub fn step_logistics(
    state: &mut SdState,
    p: &SdParams,
    demand: f64,
    noise: &SdNoise,
    dt: f64,
) -> Result<()> {
    check_inputs(demand, dt)?;
    let order_r = noisy_order_rate(demand, noise);
    let dinv = desired_inventory(p, order_r, noise);

    let ratio = if dinv > 0.0 {
        fulfillment_ratio(state.inv, dinv)?
    } else {
        1.0
    };
    let desired_ship = order_r + state.backlog / p.opt;
    let ship_r = (desired_ship * ratio)
        .min(state.inv / dt)
        .min(order_r + state.backlog / dt);

    let inv_cov = if ship_r > 0.0 {
        state.inv / ship_r
    } else {
        p.max_inv_cov
    };

    // Raw-material ordering tracks expected usage and closes the gaps in
    // on-hand and in-transit stock. The upstream tier mirrors the product
    // tier, with the transport lead time acting as its fulfillment time.
    let usage = state.dprod_br.max(0.0);
    let dm_inv = p.m_inv_cov * usage;
    let dtransit = p.m_lt * usage;
    let m_order_r =
        (usage + (dm_inv - state.m_inv + dtransit - state.m_transit) / p.m_lt).max(0.0);
    let m_arrival_r = (state.m_transit / p.m_lt).min(state.m_transit / dt);

    state.order_r = order_r;
    state.dinv = dinv;
    state.ship_r = ship_r;
    state.inv_cov = inv_cov;
    state.m_order_r = m_order_r;
    state.m_arrival_r = m_arrival_r;

    let prod_cr = state.prod_cr;
    let prod_br = state.prod_br;
    let l = &mut state.ledgers;
    integrate(&mut state.backlog, &mut l.backlog, order_r, ship_r, dt);
    integrate(&mut state.inv, &mut l.inv, prod_cr, ship_r, dt);
    integrate(&mut state.m_transit, &mut l.m_transit, m_order_r, m_arrival_r, dt);
    integrate(&mut state.m_inv, &mut l.m_inv, m_arrival_r, prod_br, dt);

    let t = &mut state.totals;
    t.revenue += ship_r * state.price * dt;
    t.units_shipped += ship_r * dt;
    t.material_ordered += m_order_r * dt;
    t.inventory_unit_days += (state.inv + state.m_inv) * dt;
    t.backlog_unit_days += state.backlog * dt;
    Ok(())
}

/// One full sub-step: material release, production, then logistics.
pub fn substep(
    state: &mut SdState,
    p: &SdParams,
    demand: f64,
    noise: &SdNoise,
    dt: f64,
) -> Result<()> {
    let msr = material_supply_rate(state, p, dt);
    step_production(state, p, demand, msr, noise, dt)?;
    step_logistics(state, p, demand, noise, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn smooth_adjust_examples() {
        assert_eq!(smooth_adjust(5.0, 5.0, 3.0, 0.0, 0.7).unwrap(), 0.0);
        assert_eq!(smooth_adjust(10.0, 0.0, 2.0, 99.0, 1.0).unwrap(), 5.0);
        assert_abs_diff_eq!(smooth_adjust(10.0, 4.0, 3.0, 2.0, 0.5).unwrap(), 2.0);
        assert!(smooth_adjust(1.0, 0.0, 0.0, 0.0, 0.5).is_err());
        assert!(smooth_adjust(1.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn fulfillment_ratio_examples() {
        assert_eq!(fulfillment_ratio(7.0, 7.0).unwrap(), 1.0);
        assert_eq!(fulfillment_ratio(0.0, 7.0).unwrap(), 0.0);
        assert_abs_diff_eq!(fulfillment_ratio(0.4 * 7.0, 7.0).unwrap(), 0.4, epsilon = 1e-15);
        assert_eq!(fulfillment_ratio(20.0, 7.0).unwrap(), 1.0);
        assert!(fulfillment_ratio(1.0, 0.0).is_err());
    }

    fn quiet() -> SdParams {
        SdParams::default().without_noise()
    }

    #[test]
    fn zero_labor_means_zero_production() {
        let p = quiet();
        let mut s = SdState::steady_state(&p, 100.0, 1.5).unwrap();
        s.labor = 0.0;
        s.ledgers.labor = StockLedger::new(0.0);
        step_production(&mut s, &p, 100.0, 1e9, &SdNoise::default(), 0.25).unwrap();
        assert_eq!(s.prod_br, 0.0);
    }

    #[test]
    fn shipping_examples() {
        let p = quiet();
        // No orders and no backlog: nothing ships, inventory only receives.
        let mut s = SdState::steady_state(&p, 100.0, 1.5).unwrap();
        s.backlog = 0.0;
        let inv0 = s.inv;
        s.prod_cr = 3.0;
        s.prod_br = 0.0;
        step_logistics(&mut s, &p, 0.0, &SdNoise::default(), 0.25).unwrap();
        assert_eq!(s.ship_r, 0.0);
        assert_abs_diff_eq!(s.inv, inv0 + 0.75, epsilon = 1e-12);

        // Inventory above target: ship the full order rate.
        let mut s = SdState::steady_state(&p, 100.0, 1.5).unwrap();
        s.inv = 2.0 * s.dinv;
        s.ledgers.inv = StockLedger::new(s.inv);
        step_logistics(&mut s, &p, 100.0, &SdNoise::default(), 0.25).unwrap();
        assert_eq!(s.ship_r, 100.0);

        // Half the target inventory: half the orders ship.
        let mut s = SdState::steady_state(&p, 100.0, 1.5).unwrap();
        s.inv = 0.5 * s.dinv;
        s.ledgers.inv = StockLedger::new(s.inv);
        step_logistics(&mut s, &p, 100.0, &SdNoise::default(), 0.25).unwrap();
        assert_abs_diff_eq!(s.ship_r, 50.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = quiet();
        let mut s = SdState::steady_state(&p, 100.0, 1.5).unwrap();
        let n = SdNoise::default();
        assert!(matches!(
            step_production(&mut s, &p, 100.0, 100.0, &n, 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            step_production(&mut s, &p, f64::NAN, 100.0, &n, 0.25),
            Err(Error::State(_))
        ));
        assert!(matches!(
            step_logistics(&mut s, &p, -1.0, &n, 0.25),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        let p = quiet();
        let s0 = SdState::steady_state(&p, 100.0, 1.5).unwrap();
        let mut s = s0.clone();
        substep(&mut s, &p, 100.0, &SdNoise::default(), 0.25).unwrap();
        for ((name, a), (_, b)) in s0.stocks().iter().zip(s.stocks().iter()) {
            assert!((a - b).abs() < 1e-9, "{name}: {a} -> {b}");
        }
        assert_abs_diff_eq!(s.prod_br, 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.ship_r, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn hand_computed_step_from_cold_start() {
        // Default parameters except SSCov = 6, M_InvCov = M_LT = 3, zero
        // noise, all stocks at half their steady values, demand 100/day,
        // dt = 0.25. Expected values evaluated by hand.
        let p = SdParams {
            ss_cov: 6.0,
            m_inv_cov: 3.0,
            m_lt: 3.0,
            ..quiet()
        };
        let mut s = SdState::scaled_steady_state(&p, 100.0, 1.5, 0.5).unwrap();
        assert_abs_diff_eq!(s.wip, 100.0);
        assert_abs_diff_eq!(s.inv, 350.0);
        assert_abs_diff_eq!(s.labor, 5.0);
        assert_abs_diff_eq!(s.m_inv, 150.0);
        assert_abs_diff_eq!(s.m_transit, 150.0);
        let vac0 = 0.5 * 5.0 * 10.0 / 365.0;
        assert_abs_diff_eq!(s.vac, vac0, epsilon = 1e-15);

        // MSR: usage 100, target 300, ratio 0.5 -> 50 (cap 150/0.25 = 600).
        let msr = material_supply_rate(&s, &p, 0.25);
        assert_abs_diff_eq!(msr, 50.0);

        substep(&mut s, &p, 100.0, &SdNoise::default(), 0.25).unwrap();
        // DInv = 7*100 = 700; AProd = 0.5*(700-350)/8 = 21.875
        assert_abs_diff_eq!(s.aprod, 21.875);
        // DWIP = (21.875+100)*2 = 243.75; AWIP = 0.5*(243.75-100)/2 = 35.9375
        assert_abs_diff_eq!(s.dwip, 243.75);
        assert_abs_diff_eq!(s.awip, 35.9375);
        // DProdBR = 35.9375 + 21.875 + 100 = 157.8125
        assert_abs_diff_eq!(s.dprod_br, 157.8125);
        // capacity = 5*10 = 50, MSR = 50 -> ProdBR = 50
        assert_abs_diff_eq!(s.prod_br, 50.0);
        // ProdCR = 100/2 = 50
        assert_abs_diff_eq!(s.prod_cr, 50.0);
        // WIP unchanged: +50*0.25 - 50*0.25
        assert_abs_diff_eq!(s.wip, 100.0, epsilon = 1e-12);
        // DLabor = 15.78125; ALabor = 0.5*(15.78125-5)/8 = 0.673828125
        assert_abs_diff_eq!(s.alabor, 0.673_828_125);
        // Retire = 5/365; DHire = 5/365 + 0.673828125; DVac = 5*DHire
        let retire = 5.0 / 365.0;
        let dhire = retire + 0.673_828_125;
        assert_abs_diff_eq!(s.dvac, 5.0 * dhire, epsilon = 1e-12);
        // AVac = 0.5*(DVac - vac0)/3
        let avac = 0.5 * (5.0 * dhire - vac0) / 3.0;
        assert_abs_diff_eq!(s.avac, avac, epsilon = 1e-12);
        assert_abs_diff_eq!(s.vac_br, dhire + avac, epsilon = 1e-12);
        let hire = vac0 / 5.0;
        assert_abs_diff_eq!(s.hire_r, hire, epsilon = 1e-15);
        assert_eq!(s.layoff_r, 0.0);
        assert_abs_diff_eq!(s.labor, 5.0 + 0.25 * (hire - retire), epsilon = 1e-12);
        assert_abs_diff_eq!(
            s.vac,
            vac0 + 0.25 * (dhire + avac - hire),
            epsilon = 1e-12
        );
        // Ship: ratio 350/700 = 0.5 -> 50; Inv = 350 + 0.25*(50 - 50)
        assert_abs_diff_eq!(s.ship_r, 50.0);
        assert_abs_diff_eq!(s.inv, 350.0, epsilon = 1e-12);
        // Backlog = 0.25*(100 - 50) = 12.5
        assert_abs_diff_eq!(s.backlog, 12.5, epsilon = 1e-12);
        // Material orders: usage 157.8125, DM_Inv 473.4375, DTransit 473.4375
        // M_OrderR = 157.8125 + (473.4375-150 + 473.4375-150)/3 = 373.4375
        assert_abs_diff_eq!(s.m_order_r, 373.437_5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.m_arrival_r, 50.0);
        assert_abs_diff_eq!(s.m_transit, 150.0 + 0.25 * (373.437_5 - 50.0), epsilon = 1e-12);
        assert_abs_diff_eq!(s.m_inv, 150.0 + 0.25 * (50.0 - 50.0), epsilon = 1e-12);
        assert!(s.max_conservation_error() < 1e-12);
    }
}
