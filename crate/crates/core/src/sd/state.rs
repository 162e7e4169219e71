use serde::{Deserialize, Serialize};

use super::params::SdParams;
use crate::error::{Error, Result};

/// Running totals of what entered and left one stock, integrated with the
/// same `rate * dt` products that move the stock itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StockLedger {
    pub initial: f64,
    pub inflow: f64,
    pub outflow: f64,
}

impl StockLedger {
    pub fn new(initial: f64) -> Self {
        StockLedger {
            initial,
            inflow: 0.0,
            outflow: 0.0,
        }
    }

    pub fn expected(&self) -> f64 {
        self.initial + self.inflow - self.outflow
    }

    /// Relative discrepancy between the stock and its bookkeeping.
    pub fn relative_error(&self, current: f64) -> f64 {
        let scale = self
            .initial
            .abs()
            .max(self.inflow.abs())
            .max(self.outflow.abs())
            .max(1.0);
        (current - self.expected()).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Ledgers {
    pub wip: StockLedger,
    pub inv: StockLedger,
    pub labor: StockLedger,
    pub vac: StockLedger,
    pub backlog: StockLedger,
    pub m_inv: StockLedger,
    pub m_transit: StockLedger,
}

/// Physical totals accumulated over a run. Currency conversion happens in
/// the payoff calculation so that cost rates can be varied after the fact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    /// Revenue, `sum ShipR * Price * dt`.
    pub revenue: f64,
    pub units_produced: f64,
    pub units_shipped: f64,
    pub material_ordered: f64,
    /// Finished plus raw-material inventory, in unit-days.
    pub inventory_unit_days: f64,
    pub backlog_unit_days: f64,
}

/// Complete state of one company's supply chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdState {
    pub wip: f64,
    pub inv: f64,
    pub labor: f64,
    pub vac: f64,
    pub backlog: f64,
    pub m_inv: f64,
    pub m_transit: f64,

    pub awip: f64,
    pub aprod: f64,
    pub alabor: f64,
    pub avac: f64,

    pub dwip: f64,
    pub dinv: f64,
    /// Desired production start rate. May be negative before clamping.
    pub dprod_br: f64,
    pub dlabor: f64,
    pub dvac: f64,

    pub prod_br: f64,
    pub prod_cr: f64,
    pub ship_r: f64,
    pub order_r: f64,
    pub hire_r: f64,
    pub retire_r: f64,
    pub layoff_r: f64,
    pub vac_br: f64,
    /// Material supply rate available to production starts.
    pub msr: f64,
    pub m_order_r: f64,
    pub m_arrival_r: f64,

    pub inv_cov: f64,
    pub price: f64,

    pub ledgers: Ledgers,
    pub totals: Totals,
}

impl SdState {
    /// The equilibrium of the supply chain under a constant order rate: every
    /// desired level equals its actual level and all adjustments vanish.
    pub fn steady_state(p: &SdParams, order_rate: f64, price: f64) -> Result<Self> {
        Self::scaled_steady_state(p, order_rate, price, 1.0)
    }

    /// Steady state with every stock multiplied by `fill`, used as a cold
    /// start. Rates are left consistent with the scaled stocks.
    pub fn scaled_steady_state(
        p: &SdParams,
        order_rate: f64,
        price: f64,
        fill: f64,
    ) -> Result<Self> {
        p.validate()?;
        if !(order_rate >= 0.0 && order_rate.is_finite()) {
            return Err(Error::param(format!("order rate must be >= 0, got {order_rate}")));
        }
        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::param(format!("price must be > 0, got {price}")));
        }
        if !(fill >= 0.0 && fill.is_finite()) {
            return Err(Error::param(format!("fill must be >= 0, got {fill}")));
        }
        let labor_ss = order_rate / p.labor_productivity();
        let labor = fill * labor_ss;
        let vac = fill * p.vac_ft * labor_ss / p.employ_t;
        let wip = fill * p.cycle_t * order_rate;
        let dinv = (p.opt + p.ss_cov) * order_rate;
        let inv = fill * dinv;
        let m_inv = fill * p.m_inv_cov * order_rate;
        let m_transit = fill * p.m_lt * order_rate;
        let retire_r = labor / p.employ_t;

        let ship_r = order_rate;
        let inv_cov = if ship_r > 0.0 {
            inv / ship_r
        } else {
            p.max_inv_cov
        };

        Ok(SdState {
            wip,
            inv,
            labor,
            vac,
            backlog: 0.0,
            m_inv,
            m_transit,
            awip: 0.0,
            aprod: 0.0,
            alabor: 0.0,
            avac: 0.0,
            dwip: p.cycle_t * order_rate,
            dinv,
            dprod_br: order_rate,
            dlabor: labor_ss,
            dvac: vac,
            prod_br: order_rate,
            prod_cr: wip / p.cycle_t,
            ship_r,
            order_r: order_rate,
            hire_r: vac / p.vac_ft,
            retire_r,
            layoff_r: 0.0,
            vac_br: retire_r,
            msr: order_rate,
            m_order_r: order_rate,
            m_arrival_r: m_transit / p.m_lt,
            inv_cov,
            price,
            ledgers: Ledgers {
                wip: StockLedger::new(wip),
                inv: StockLedger::new(inv),
                labor: StockLedger::new(labor),
                vac: StockLedger::new(vac),
                backlog: StockLedger::new(0.0),
                m_inv: StockLedger::new(m_inv),
                m_transit: StockLedger::new(m_transit),
            },
            totals: Totals::default(),
        })
    }

    pub fn stocks(&self) -> [(&'static str, f64); 7] {
        [
            ("wip", self.wip),
            ("inv", self.inv),
            ("labor", self.labor),
            ("vac", self.vac),
            ("backlog", self.backlog),
            ("m_inv", self.m_inv),
            ("m_transit", self.m_transit),
        ]
    }

    /// Largest relative bookkeeping error over all stocks.
    pub fn max_conservation_error(&self) -> f64 {
        let l = &self.ledgers;
        [
            l.wip.relative_error(self.wip),
            l.inv.relative_error(self.inv),
            l.labor.relative_error(self.labor),
            l.vac.relative_error(self.vac),
            l.backlog.relative_error(self.backlog),
            l.m_inv.relative_error(self.m_inv),
            l.m_transit.relative_error(self.m_transit),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in self.stocks() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::State(format!("stock {name} = {v}")));
            }
        }
        if !(self.price > 0.0 && self.price.is_finite()) {
            return Err(Error::State(format!("price = {}", self.price)));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.stocks().iter().all(|(_, v)| v.is_finite())
            && [
                self.awip,
                self.aprod,
                self.alabor,
                self.avac,
                self.prod_br,
                self.ship_r,
                self.price,
            ]
            .iter()
            .all(|v| v.is_finite())
    }
}
