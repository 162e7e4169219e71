use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{z_critical, SampleStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPolicy {
    /// Replications per profile before any extension.
    pub initial_n: usize,
    /// Extreme values dropped from each tail of the initial sample.
    pub trim_per_tail: usize,
    /// Cap `N_s` on the samples of one profile.
    pub max_samples: usize,
    /// `ECVI_L`: stop extending once the remaining value of information
    /// falls below this (currency).
    pub ecvi_limit: f64,
    /// Replications added per extension step.
    pub batch: usize,
    /// CI and test level.
    pub alpha: f64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            initial_n: 70,
            trim_per_tail: 10,
            max_samples: 500,
            ecvi_limit: 100.0,
            batch: 50,
            alpha: 0.05,
        }
    }
}

impl SamplingPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.initial_n < 2 {
            return Err(Error::config("sampling.initial_n", "must be >= 2"));
        }
        if 2 * self.trim_per_tail >= self.initial_n {
            return Err(Error::config(
                "sampling.trim_per_tail",
                format!("2 * trim must be < initial_n ({})", self.initial_n),
            ));
        }
        if self.max_samples < self.initial_n {
            return Err(Error::config(
                "sampling.max_samples",
                format!("must be >= initial_n ({})", self.initial_n),
            ));
        }
        if !(self.ecvi_limit >= 0.0) {
            return Err(Error::config("sampling.ecvi_limit", "must be >= 0"));
        }
        if self.batch == 0 {
            return Err(Error::config("sampling.batch", "must be >= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("sampling.alpha", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Per-tail trim for a sample of `n`, keeping the initial trim fraction.
    pub fn trim_for(&self, n: usize) -> usize {
        let k = (self.trim_per_tail as f64 * n as f64 / self.initial_n as f64).floor() as usize;
        k.min(n.saturating_sub(1) / 2)
    }
}

/// Expected reduction of the estimation error from `q` more samples when
/// `p` are in hand: `z_{alpha/2} * s * (1/sqrt(p) - 1/sqrt(p + q))`.
/// `q = None` is the limit of unboundedly many extra samples.
pub fn ecvi_gain(stats: &SampleStats, q: Option<usize>, alpha: f64) -> Result<f64> {
    let p = stats.n;
    if p < 2 {
        return Err(Error::InsufficientData(format!("ECVI needs p >= 2, got {p}")));
    }
    if q == Some(0) {
        return Err(Error::param("ECVI needs q >= 1"));
    }
    let z = z_critical(alpha)?;
    let s = stats.std_dev();
    let tail = q.map_or(0.0, |q| 1.0 / ((p + q) as f64).sqrt());
    Ok(z * s * (1.0 / (p as f64).sqrt() - tail))
}

/// Total sample size `p + q` for one profile: grow by `batch` from `p`
/// until the value of further sampling, `z * s / sqrt(T)`, drops below
/// `ECVI_L`, never exceeding `N_s`.
pub fn decide_sample_size(stats: &SampleStats, policy: &SamplingPolicy) -> Result<usize> {
    let mut t = stats.n;
    if t >= policy.max_samples {
        return Ok(t);
    }
    let z = z_critical(policy.alpha)?;
    let s = stats.std_dev();
    if stats.n < 2 {
        return Err(Error::InsufficientData("sample size decision needs n >= 2".into()));
    }
    while t < policy.max_samples && z * s / (t as f64).sqrt() >= policy.ecvi_limit {
        t = (t + policy.batch).min(policy.max_samples);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(n: usize, sd: f64) -> SampleStats {
        SampleStats {
            n,
            mean: 0.0,
            variance: sd * sd,
        }
    }

    #[test]
    fn gain_examples() {
        assert_eq!(ecvi_gain(&st(10, 0.0), Some(5), 0.05).unwrap(), 0.0);
        let g = ecvi_gain(&st(50, 100.0), Some(450), 0.05).unwrap();
        let z = z_critical(0.05).unwrap();
        assert!((g - z * 100.0 * (1.0 / 50f64.sqrt() - 1.0 / 500f64.sqrt())).abs() < 1e-9);
        assert!((g - 18.95).abs() < 0.02);
        let lim = ecvi_gain(&st(50, 100.0), None, 0.05).unwrap();
        assert!((lim - z * 100.0 / 50f64.sqrt()).abs() < 1e-12);
        assert!(ecvi_gain(&st(1, 1.0), Some(1), 0.05).is_err());
    }

    #[test]
    fn sample_size_examples() {
        let mut pol = SamplingPolicy {
            initial_n: 50,
            trim_per_tail: 0,
            max_samples: 500,
            ecvi_limit: 19.0,
            batch: 50,
            alpha: 0.05,
        };
        assert_eq!(decide_sample_size(&st(50, 0.0), &pol).unwrap(), 50);
        // 1.96*100/sqrt(T) < 19 first holds at T = 150.
        assert_eq!(decide_sample_size(&st(50, 100.0), &pol).unwrap(), 150);
        pol.ecvi_limit = 0.0;
        assert_eq!(decide_sample_size(&st(50, 100.0), &pol).unwrap(), 500);
    }

    #[test]
    fn trim_scaling() {
        let pol = SamplingPolicy::default();
        assert_eq!(pol.trim_for(70), 10);
        assert_eq!(pol.trim_for(500), 71);
    }
}
