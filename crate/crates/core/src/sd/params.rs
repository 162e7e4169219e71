use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decision and exogenous parameters of one company's supply chain.
///
/// Times are in days. `alp` is output per labor-hour and `alt` working hours
/// per day, so `labor * alp * alt` is daily production capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdParams {
    /// WIP fulfillment time.
    pub wip_ft: f64,
    /// Inventory fulfillment time.
    pub inv_ft: f64,
    /// Labor fulfillment time.
    pub labor_ft: f64,
    /// Vacancy creation time: adjustment time of the vacancy gap.
    pub vac_ct: f64,
    /// Average time to lay off labor.
    pub layoff_t: f64,

    /// Expected manufacturing cycle time.
    pub cycle_t: f64,
    /// Expected time to fill a vacancy.
    pub vac_ft: f64,
    /// Expected employment duration.
    pub employ_t: f64,
    /// Order processing time.
    pub opt: f64,

    pub alp: f64,
    pub alt: f64,

    /// Product safety stock coverage.
    pub ss_cov: f64,
    /// Raw material inventory coverage.
    pub m_inv_cov: f64,
    /// Raw material transportation lead time.
    pub m_lt: f64,

    /// Price sensitivity to cost, in [0, 1].
    pub psens_c: f64,
    /// Price sensitivity to inventory coverage, in [-1, 0].
    pub psens_i: f64,
    /// Manufacturer expected price; anchors the cost effect on price.
    pub mfg_price: f64,

    pub max_inv_cov: f64,
    /// Fulfillment time of the market expected price.
    pub mpft: f64,

    pub lambda_w: f64,
    pub lambda_p: f64,
    pub lambda_l: f64,
    pub lambda_v: f64,

    pub sigma_w: f64,
    pub sigma_p: f64,
    pub sigma_o: f64,
    pub sigma_i: f64,

    /// Optional cap on the layoff rate (persons/day).
    pub max_lr: Option<f64>,
}

impl Default for SdParams {
    fn default() -> Self {
        SdParams {
            wip_ft: 2.0,
            inv_ft: 8.0,
            labor_ft: 8.0,
            vac_ct: 3.0,
            layoff_t: 5.0,
            cycle_t: 2.0,
            vac_ft: 5.0,
            employ_t: 365.0,
            opt: 1.0,
            alp: 1.25,
            alt: 8.0,
            ss_cov: 8.0,
            m_inv_cov: 4.0,
            m_lt: 4.0,
            psens_c: 0.5,
            psens_i: -0.5,
            mfg_price: 1.5,
            max_inv_cov: 10.0,
            mpft: 5.0,
            lambda_w: 0.5,
            lambda_p: 0.5,
            lambda_l: 0.5,
            lambda_v: 0.5,
            sigma_w: 5.0,
            sigma_p: 5.0,
            sigma_o: 10.0,
            sigma_i: 10.0,
            max_lr: None,
        }
    }
}

impl SdParams {
    pub fn without_noise(mut self) -> Self {
        self.sigma_w = 0.0;
        self.sigma_p = 0.0;
        self.sigma_o = 0.0;
        self.sigma_i = 0.0;
        self
    }

    /// Daily production capacity per worker.
    pub fn labor_productivity(&self) -> f64 {
        self.alp * self.alt
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wip_ft", self.wip_ft),
            ("inv_ft", self.inv_ft),
            ("labor_ft", self.labor_ft),
            ("vac_ct", self.vac_ct),
            ("layoff_t", self.layoff_t),
            ("cycle_t", self.cycle_t),
            ("vac_ft", self.vac_ft),
            ("employ_t", self.employ_t),
            ("opt", self.opt),
            ("alp", self.alp),
            ("alt", self.alt),
            ("m_lt", self.m_lt),
            ("m_inv_cov", self.m_inv_cov),
            ("mfg_price", self.mfg_price),
            ("max_inv_cov", self.max_inv_cov),
            ("mpft", self.mpft),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("sd.{key}"), format!("must be > 0, got {v}")));
            }
        }
        if !(self.ss_cov >= 0.0 && self.ss_cov.is_finite()) {
            return Err(Error::config("sd.ss_cov", format!("must be >= 0, got {}", self.ss_cov)));
        }
        if !(0.0..=1.0).contains(&self.psens_c) {
            return Err(Error::config(
                "sd.psens_c",
                format!("must lie in [0, 1], got {}", self.psens_c),
            ));
        }
        if !(-1.0..=0.0).contains(&self.psens_i) {
            return Err(Error::config(
                "sd.psens_i",
                format!("must lie in [-1, 0], got {}", self.psens_i),
            ));
        }
        for (key, v) in [
            ("lambda_w", self.lambda_w),
            ("lambda_p", self.lambda_p),
            ("lambda_l", self.lambda_l),
            ("lambda_v", self.lambda_v),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(format!("sd.{key}"), format!("must lie in (0, 1], got {v}")));
            }
        }
        for (key, v) in [
            ("sigma_w", self.sigma_w),
            ("sigma_p", self.sigma_p),
            ("sigma_o", self.sigma_o),
            ("sigma_i", self.sigma_i),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("sd.{key}"), format!("must be >= 0, got {v}")));
            }
        }
        if let Some(cap) = self.max_lr {
            if !(cap >= 0.0) {
                return Err(Error::config("sd.max_lr", format!("must be >= 0, got {cap}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SdParams::default().validate().unwrap();
    }

    #[test]
    fn range_violations_name_the_key() {
        let p = SdParams {
            psens_i: 0.5,
            ..SdParams::default()
        };
        match p.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "sd.psens_i"),
            other => panic!("expected config error, got {other:?}"),
        }
        let p = SdParams {
            lambda_p: 0.0,
            ..SdParams::default()
        };
        assert!(p.validate().is_err());
        let p = SdParams {
            cycle_t: -1.0,
            ..SdParams::default()
        };
        assert!(p.validate().is_err());
    }
}
