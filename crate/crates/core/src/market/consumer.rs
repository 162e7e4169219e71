use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Brand-specific perception coefficients of one consumer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Perception {
    /// Susceptibility to advertising.
    pub sus_ad: f64,
    /// Sensitivity to promotion.
    pub sens_pm: f64,
    /// Weight on social influence.
    pub ft: f64,
}

/// Perceptions scale the consumer's initial values by the brand's marketing force.
pub fn update_perceptions(mf: f64, i_a: f64, i_p: f64, i_f: f64) -> Perception {
    Perception {
        sus_ad: mf * i_a,
        sens_pm: mf * i_p,
        ft: mf * i_f,
    }
}

/// `-s^(price_i (1 - pm_i) - price_ref) + m_agent`.
///
/// `price_ref` is the sum of both prices by default; see
/// [`PriceReference`](super::PriceReference).
pub fn price_sensitivity(price_i: f64, pm_i: f64, price_ref: f64, s: f64, m_agent: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::param(format!("price sensitivity base s must be > 1, got {s}")));
    }
    Ok(-s.powf(price_i * (1.0 - pm_i) - price_ref) + m_agent)
}

/// Purchasing motivation toward one brand.
pub fn motivation(sens_p: f64, perception: &Perception, price: f64, ad: f64, pm: f64, inf: f64) -> f64 {
    sens_p * price * (1.0 - pm) + perception.sus_ad * ad + perception.sens_pm * pm + perception.ft * inf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumerAgent {
    pub id: usize,
    /// Socio-economic offset of price sensitivity.
    pub m_agent: f64,
    /// Initial perceptions `(I_a, I_p, I_f)` toward each brand.
    pub initial: [[f64; 3]; 2],
    pub perception: [Perception; 2],
    pub sens_p: [f64; 2],
    pub inf: [f64; 2],
    /// Brand adopted at the last step; `None` before the first step.
    pub adopted: Option<usize>,
}

impl ConsumerAgent {
    pub fn new(id: usize, m_agent: f64, initial: [[f64; 3]; 2]) -> Self {
        ConsumerAgent {
            id,
            m_agent,
            initial,
            perception: [Perception::default(); 2],
            sens_p: [0.0; 2],
            inf: [0.0; 2],
            adopted: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perception_examples() {
        assert_eq!(update_perceptions(0.0, 0.3, 0.2, 0.1), Perception::default());
        let p = update_perceptions(1.0, 0.3, 0.2, 0.1);
        assert_eq!((p.sus_ad, p.sens_pm, p.ft), (0.3, 0.2, 0.1));
        let p = update_perceptions(2.0, 0.3, 0.2, 0.1);
        assert_abs_diff_eq!(p.sus_ad, 0.6);
        assert_abs_diff_eq!(p.sens_pm, 0.4);
        assert_abs_diff_eq!(p.ft, 0.2);
    }

    #[test]
    fn price_sensitivity_examples() {
        assert_abs_diff_eq!(price_sensitivity(1.0, 0.0, 2.0, 2.0, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(price_sensitivity(2.0, 0.5, 1.0, 3.0, 0.8).unwrap(), -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(price_sensitivity(3.0, 0.0, 2.0, 2.0, 0.0).unwrap(), -2.0);
        assert!(price_sensitivity(1.0, 0.0, 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn motivation_examples() {
        assert_eq!(motivation(0.0, &Perception::default(), 1.3, 0.2, 0.3, 0.5), 0.0);
        let p = Perception {
            sus_ad: 0.6,
            sens_pm: 0.0,
            ft: 0.0,
        };
        assert_abs_diff_eq!(motivation(0.5, &p, 1.0, 0.5, 0.0, 0.9), 0.8, epsilon = 1e-15);
    }
}
