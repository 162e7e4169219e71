//! System-dynamics model of one company's supply chain: production with a
//! labor pool, finished-goods logistics with backlog, a mirrored raw-material
//! tier, and the shared price-formation loop. Integrated by forward Euler.

pub mod dynamics;
pub mod params;
pub mod pricing;
pub mod state;

pub use dynamics::{
    desired_inventory, fulfillment_ratio, material_supply_rate, noisy_order_rate,
    smooth_adjust, step_logistics, step_production, substep, SdNoise,
};
pub use params::SdParams;
pub use pricing::{
    company_price, step_pricing, stationary_market_price, PriceInputs, PricingState,
};
pub use state::{Ledgers, SdState, StockLedger, Totals};

/// Internal integration step in days.
pub const DT: f64 = 0.25;
/// Sub-steps per simulated day.
pub const SUBSTEPS_PER_DAY: usize = 4;
