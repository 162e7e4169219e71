//! Catalogue of strategic factors: four aggregated factors, each standing for
//! a group of detailed decision parameters, and the level grids those
//! parameters take in the soft-drink case study.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sd::SdParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    L,
    ML,
    MH,
    H,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::L, Level::ML, Level::MH, Level::H];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Levels used at a given resolution: 2 gives L/H, 4 gives all four.
    pub fn grid(resolution: usize) -> Result<Vec<Level>> {
        match resolution {
            2 => Ok(vec![Level::L, Level::H]),
            4 => Ok(Level::ALL.to_vec()),
            r => Err(Error::param(format!("level resolution must be 2 or 4, got {r}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::L => "L",
            Level::ML => "ML",
            Level::MH => "MH",
            Level::H => "H",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Manufacturing,
    Logistics,
    Pricing,
    Marketing,
}

impl Aggregate {
    pub const ALL: [Aggregate; 4] = [
        Aggregate::Manufacturing,
        Aggregate::Logistics,
        Aggregate::Pricing,
        Aggregate::Marketing,
    ];

    pub fn members(self) -> &'static [Detailed] {
        use Detailed::*;
        match self {
            Aggregate::Manufacturing => &[VacancyCreationTime, LayoffTime, LaborFulfillmentTime, WipFulfillmentTime],
            Aggregate::Logistics => &[
                InventoryFulfillmentTime,
                RawMaterialLeadTime,
                SafetyStockCoverage,
                RawMaterialCoverage,
            ],
            Aggregate::Pricing => &[PriceSensitivityCost, PriceSensitivityInventory, ManufacturerPrice],
            Aggregate::Marketing => &[MarketingBudget, PromotionDepth, AdvertisingIntensity],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detailed {
    VacancyCreationTime,
    LayoffTime,
    LaborFulfillmentTime,
    WipFulfillmentTime,
    InventoryFulfillmentTime,
    RawMaterialLeadTime,
    SafetyStockCoverage,
    RawMaterialCoverage,
    PriceSensitivityCost,
    PriceSensitivityInventory,
    ManufacturerPrice,
    MarketingBudget,
    PromotionDepth,
    AdvertisingIntensity,
}

/// A factor value is either a number or an interval from which a uniform
/// draw is taken once per marketing period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorValue {
    Scalar(f64),
    Interval([f64; 2]),
}

fn spread(lo: f64, hi: f64) -> [FactorValue; 4] {
    let step = (hi - lo) / 3.0;
    [
        FactorValue::Scalar(lo),
        FactorValue::Scalar(lo + step),
        FactorValue::Scalar(lo + 2.0 * step),
        FactorValue::Scalar(hi),
    ]
}

fn intervals() -> [FactorValue; 4] {
    [
        FactorValue::Interval([0.1, 0.2]),
        FactorValue::Interval([0.2, 0.3]),
        FactorValue::Interval([0.3, 0.4]),
        FactorValue::Interval([0.4, 0.5]),
    ]
}

impl Detailed {
    pub const ALL: [Detailed; 14] = [
        Detailed::VacancyCreationTime,
        Detailed::LayoffTime,
        Detailed::LaborFulfillmentTime,
        Detailed::WipFulfillmentTime,
        Detailed::InventoryFulfillmentTime,
        Detailed::RawMaterialLeadTime,
        Detailed::SafetyStockCoverage,
        Detailed::RawMaterialCoverage,
        Detailed::PriceSensitivityCost,
        Detailed::PriceSensitivityInventory,
        Detailed::ManufacturerPrice,
        Detailed::MarketingBudget,
        Detailed::PromotionDepth,
        Detailed::AdvertisingIntensity,
    ];

    pub fn aggregate(self) -> Aggregate {
        use Detailed::*;
        match self {
            VacancyCreationTime | LayoffTime | LaborFulfillmentTime | WipFulfillmentTime => {
                Aggregate::Manufacturing
            }
            InventoryFulfillmentTime | RawMaterialLeadTime | SafetyStockCoverage
            | RawMaterialCoverage => Aggregate::Logistics,
            PriceSensitivityCost | PriceSensitivityInventory | ManufacturerPrice => {
                Aggregate::Pricing
            }
            MarketingBudget | PromotionDepth | AdvertisingIntensity => Aggregate::Marketing,
        }
    }

    pub fn label(self) -> &'static str {
        use Detailed::*;
        match self {
            VacancyCreationTime => "Vacancy creation time (days)",
            LayoffTime => "Average time for layoff labors (days)",
            LaborFulfillmentTime => "Labor fulfillment time (days)",
            WipFulfillmentTime => "WIP fulfillment time (days)",
            InventoryFulfillmentTime => "Inventory fulfillment time (days)",
            RawMaterialLeadTime => "Raw material transportation lead time (days)",
            SafetyStockCoverage => "Product safety stock coverage (days)",
            RawMaterialCoverage => "Raw material inventory coverage (days)",
            PriceSensitivityCost => "Price sensitivity to production cost",
            PriceSensitivityInventory => "Price sensitivity to inventory coverage",
            ManufacturerPrice => "Manufacturer expected price",
            MarketingBudget => "Marketing budget (share of revenue)",
            PromotionDepth => "Promotion depth (share of MB)",
            AdvertisingIntensity => "Advertising intensity (share of MB)",
        }
    }

    /// Values at L, ML, MH and H. Factors given only at two levels are
    /// interpolated linearly for the middle levels.
    pub fn levels(self) -> [FactorValue; 4] {
        use Detailed::*;
        match self {
            VacancyCreationTime => spread(1.0, 5.0),
            LayoffTime => spread(3.0, 7.0),
            LaborFulfillmentTime => spread(4.0, 12.0),
            WipFulfillmentTime => spread(1.0, 3.0),
            InventoryFulfillmentTime => spread(2.0, 14.0),
            RawMaterialLeadTime => spread(1.0, 7.0),
            SafetyStockCoverage => spread(2.0, 14.0),
            RawMaterialCoverage => spread(1.0, 7.0),
            PriceSensitivityCost => spread(0.1, 0.9),
            PriceSensitivityInventory => spread(-0.1, -0.9),
            ManufacturerPrice => spread(1.0, 2.0),
            MarketingBudget => spread(0.05, 0.15),
            PromotionDepth | AdvertisingIntensity => intervals(),
        }
    }

    pub fn value(self, level: Level) -> FactorValue {
        self.levels()[level.index()]
    }
}

/// Values every detailed factor takes at L, ML, MH and H.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorTable(BTreeMap<Detailed, [FactorValue; 4]>);

impl Default for FactorTable {
    fn default() -> Self {
        FactorTable(Detailed::ALL.iter().map(|&d| (d, d.levels())).collect())
    }
}

impl FactorTable {
    pub fn value(&self, factor: Detailed, level: Level) -> FactorValue {
        self.0.get(&factor).map_or_else(|| factor.value(level), |v| v[level.index()])
    }

    pub fn levels(&self, factor: Detailed) -> [FactorValue; 4] {
        self.0.get(&factor).copied().unwrap_or_else(|| factor.levels())
    }

    /// Replaces one factor's levels. Two values are read as L and H with
    /// the middle levels interpolated; four values are taken as given.
    pub fn set(&mut self, factor: Detailed, values: &[FactorValue]) -> Result<()> {
        let key = || FactorRef::Detailed(factor).to_string();
        let levels = match values {
            [lo, hi] => interpolate(*lo, *hi).ok_or_else(|| {
                Error::config(key(), "L and H must both be scalars or both intervals")
            })?,
            [a, b, c, d] => [*a, *b, *c, *d],
            _ => {
                return Err(Error::config(
                    key(),
                    format!("expects 2 (L, H) or 4 (L, ML, MH, H) values, got {}", values.len()),
                ))
            }
        };
        self.0.insert(factor, levels);
        Ok(())
    }

    /// Every level of every factor must yield a valid policy on `base`.
    pub fn validate(&self, base: &CompanyPolicy) -> Result<()> {
        for (&f, values) in &self.0 {
            for v in values {
                let mut p = base.clone();
                let key = FactorRef::Detailed(f).to_string();
                p.set(f, *v).map_err(|e| match e {
                    Error::Config { message, .. } => Error::config(key.clone(), message),
                    other => other,
                })?;
                p.validate().map_err(|e| match e {
                    Error::Config { message, .. } => Error::config(key.clone(), message),
                    other => other,
                })?;
            }
        }
        Ok(())
    }
}

fn interpolate(lo: FactorValue, hi: FactorValue) -> Option<[FactorValue; 4]> {
    let at = |a: f64, b: f64, t: f64| a + (b - a) * t;
    match (lo, hi) {
        (FactorValue::Scalar(a), FactorValue::Scalar(b)) => Some(spread(a, b)),
        (FactorValue::Interval(a), FactorValue::Interval(b)) => {
            let mid = |t: f64| FactorValue::Interval([at(a[0], b[0], t), at(a[1], b[1], t)]);
            Some([lo, mid(1.0 / 3.0), mid(2.0 / 3.0), hi])
        }
        _ => None,
    }
}

/// A factor as it appears in a plan: an aggregated factor moves all of its
/// members to the same level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorRef {
    Aggregate(Aggregate),
    Detailed(Detailed),
}

impl FactorRef {
    pub fn members(self) -> Vec<Detailed> {
        match self {
            FactorRef::Aggregate(a) => a.members().to_vec(),
            FactorRef::Detailed(d) => vec![d],
        }
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FactorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self {
            FactorRef::Aggregate(a) => serde_json::to_value(a),
            FactorRef::Detailed(d) => serde_json::to_value(d),
        }
        .map_err(|_| fmt::Error)?;
        f.write_str(v.as_str().ok_or(fmt::Error)?)
    }
}

impl FromStr for FactorRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let quoted = serde_json::Value::String(s.to_string());
        if let Ok(a) = serde_json::from_value::<Aggregate>(quoted.clone()) {
            return Ok(FactorRef::Aggregate(a));
        }
        serde_json::from_value::<Detailed>(quoted)
            .map(FactorRef::Detailed)
            .map_err(|_| Error::Parse(format!("unknown strategic factor `{s}`")))
    }
}

impl Serialize for FactorRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FactorRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "L" => Ok(Level::L),
            "ML" => Ok(Level::ML),
            "MH" => Ok(Level::MH),
            "H" => Ok(Level::H),
            other => Err(serde::de::Error::custom(format!("unknown level `{other}`"))),
        }
    }
}

/// Marketing decisions of one company.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketingPolicy {
    /// Marketing budget as a share of the previous period's revenue.
    pub mb_pct: f64,
    /// Interval of the advertising intensity drawn each period.
    pub ad: [f64; 2],
    /// Interval of the promotion depth drawn each period.
    pub pm: [f64; 2],
}

impl Default for MarketingPolicy {
    fn default() -> Self {
        MarketingPolicy {
            mb_pct: 0.10,
            ad: [0.25, 0.35],
            pm: [0.25, 0.35],
        }
    }
}

impl MarketingPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.mb_pct >= 0.0 && self.mb_pct <= 1.0) {
            return Err(Error::config("marketing.mb_pct", format!("must lie in [0, 1], got {}", self.mb_pct)));
        }
        for (key, [lo, hi]) in [("marketing.ad", self.ad), ("marketing.pm", self.pm)] {
            if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
                return Err(Error::config(key, format!("interval must satisfy 0 < lo <= hi < 1, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Every decision a company makes in one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CompanyPolicy {
    pub sd: SdParams,
    pub marketing: MarketingPolicy,
}

impl CompanyPolicy {
    pub fn validate(&self) -> Result<()> {
        self.sd.validate()?;
        self.marketing.validate()
    }

    /// Sets one detailed factor to the value it takes at `level`.
    pub fn apply(&mut self, factor: Detailed, level: Level) -> Result<()> {
        self.set(factor, factor.value(level))
    }

    pub fn set(&mut self, factor: Detailed, value: FactorValue) -> Result<()> {
        use Detailed::*;
        match (factor, value) {
            (PromotionDepth, FactorValue::Interval(iv)) => self.marketing.pm = iv,
            (AdvertisingIntensity, FactorValue::Interval(iv)) => self.marketing.ad = iv,
            (PromotionDepth | AdvertisingIntensity, FactorValue::Scalar(x)) => {
                return Err(Error::config(
                    format!("{factor:?}"),
                    format!("expects an interval, got scalar {x}"),
                ))
            }
            (_, FactorValue::Interval(iv)) => {
                return Err(Error::config(
                    format!("{factor:?}"),
                    format!("expects a scalar, got interval {iv:?}"),
                ))
            }
            (f, FactorValue::Scalar(x)) => {
                let slot = match f {
                    VacancyCreationTime => &mut self.sd.vac_ct,
                    LayoffTime => &mut self.sd.layoff_t,
                    LaborFulfillmentTime => &mut self.sd.labor_ft,
                    WipFulfillmentTime => &mut self.sd.wip_ft,
                    InventoryFulfillmentTime => &mut self.sd.inv_ft,
                    RawMaterialLeadTime => &mut self.sd.m_lt,
                    SafetyStockCoverage => &mut self.sd.ss_cov,
                    RawMaterialCoverage => &mut self.sd.m_inv_cov,
                    PriceSensitivityCost => &mut self.sd.psens_c,
                    PriceSensitivityInventory => &mut self.sd.psens_i,
                    ManufacturerPrice => &mut self.sd.mfg_price,
                    MarketingBudget => &mut self.marketing.mb_pct,
                    PromotionDepth | AdvertisingIntensity => unreachable!(),
                };
                *slot = x;
            }
        }
        Ok(())
    }

    /// Applies a strategy (one level per plan factor) on top of this baseline.
    pub fn with_levels(&self, factors: &[FactorRef], levels: &[Level]) -> Result<CompanyPolicy> {
        self.with_levels_in(&FactorTable::default(), factors, levels)
    }

    pub fn with_levels_in(
        &self,
        table: &FactorTable,
        factors: &[FactorRef],
        levels: &[Level],
    ) -> Result<CompanyPolicy> {
        if factors.len() != levels.len() {
            return Err(Error::config(
                "strategy",
                format!("{} levels given for {} factors", levels.len(), factors.len()),
            ));
        }
        let mut out = self.clone();
        for (f, &l) in factors.iter().zip(levels) {
            for d in f.members() {
                out.set(d, table.value(d, l))?;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_detailed_factor_belongs_to_its_aggregate() {
        for a in Aggregate::ALL {
            for d in a.members() {
                assert_eq!(d.aggregate(), a);
            }
        }
        let total: usize = Aggregate::ALL.iter().map(|a| a.members().len()).sum();
        assert_eq!(total, Detailed::ALL.len());
    }

    #[test]
    fn logistics_levels_match_the_grid() {
        let v: Vec<f64> = Detailed::SafetyStockCoverage
            .levels()
            .iter()
            .map(|v| match v {
                FactorValue::Scalar(x) => *x,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(v, vec![2.0, 6.0, 10.0, 14.0]);
    }

    #[test]
    fn all_levels_validate() {
        for l in Level::ALL {
            let mut p = CompanyPolicy::default();
            for d in Detailed::ALL {
                p.apply(d, l).unwrap();
            }
            p.validate().unwrap();
        }
    }

    #[test]
    fn aggregate_level_moves_all_members() {
        let base = CompanyPolicy::default();
        let p = base
            .with_levels(&[FactorRef::Aggregate(Aggregate::Logistics)], &[Level::H])
            .unwrap();
        assert_eq!(p.sd.inv_ft, 14.0);
        assert_eq!(p.sd.m_lt, 7.0);
        assert_eq!(p.sd.ss_cov, 14.0);
        assert_eq!(p.sd.m_inv_cov, 7.0);
        assert_eq!(p.sd.wip_ft, base.sd.wip_ft);
    }

    #[test]
    fn factor_names_round_trip() {
        for d in Detailed::ALL {
            let f = FactorRef::Detailed(d);
            assert_eq!(f.name().parse::<FactorRef>().unwrap(), f);
        }
        for a in Aggregate::ALL {
            let f = FactorRef::Aggregate(a);
            assert_eq!(f.name().parse::<FactorRef>().unwrap(), f);
        }
        assert!("nonsense".parse::<FactorRef>().is_err());
    }
}
