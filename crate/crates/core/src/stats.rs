//! Sample statistics used across payoff estimation and equilibrium evaluation:
//! moments, symmetric trimming, t-based confidence intervals and Welch's
//! two-sample t-test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Count, mean and unbiased sample variance of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

impl SampleStats {
    pub fn from_slice(x: &[f64]) -> Self {
        SampleStats {
            n: x.len(),
            mean: mean(x),
            variance: sample_variance(x),
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance.max(0.0) / self.n as f64).sqrt()
    }
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased (n - 1) sample variance; 0 for fewer than two points.
pub fn sample_variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

/// Sorts the sample and drops the `k` smallest and `k` largest values.
pub fn trim_samples(samples: &[f64], k: usize) -> Result<Vec<f64>> {
    if samples.len() <= 2 * k {
        return Err(Error::InsufficientData(format!(
            "cannot trim {k} per tail from {} samples",
            samples.len()
        )));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::param("NaN in sample set"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[k..sorted.len() - k].to_vec())
}

/// Two-sided quantile `z_{alpha/2}` of the standard normal.
pub fn z_critical(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(1.0 - alpha / 2.0))
}

/// Two-sided quantile `t_{alpha/2, df}` of Student's t.
pub fn t_critical(alpha: f64, df: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if df <= 0.0 || df.is_nan() {
        return Err(Error::param(format!("degrees of freedom must be > 0, got {df}")));
    }
    let t = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::param(e.to_string()))?;
    Ok(t.inverse_cdf(1.0 - alpha / 2.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub half_width: f64,
    pub n: usize,
    /// Confidence level `1 - alpha`.
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }
}

/// `mean ± t_{alpha/2, n-1} · s / sqrt(n)`.
pub fn confidence_interval(samples: &[f64], alpha: f64) -> Result<ConfidenceInterval> {
    confidence_interval_from_stats(&SampleStats::from_slice(samples), alpha)
}

pub fn confidence_interval_from_stats(
    stats: &SampleStats,
    alpha: f64,
) -> Result<ConfidenceInterval> {
    if stats.n < 2 {
        return Err(Error::InsufficientData(format!(
            "confidence interval needs n >= 2, got {}",
            stats.n
        )));
    }
    let t = t_critical(alpha, (stats.n - 1) as f64)?;
    Ok(ConfidenceInterval {
        mean: stats.mean,
        half_width: t * stats.std_error(),
        n: stats.n,
        level: 1.0 - alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// H1: mu_a != mu_b
    TwoSided,
    /// H1: mu_a < mu_b
    Less,
    /// H1: mu_a > mu_b
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64], alternative: Alternative) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "t-test needs at least two samples per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    welch_from_stats(
        &SampleStats::from_slice(a),
        &SampleStats::from_slice(b),
        alternative,
    )
}

pub fn welch_from_stats(
    a: &SampleStats,
    b: &SampleStats,
    alternative: Alternative,
) -> Result<TTestResult> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::InsufficientData("t-test needs n >= 2 per group".into()));
    }
    let va = a.variance.max(0.0) / a.n as f64;
    let vb = b.variance.max(0.0) / b.n as f64;
    let se2 = va + vb;
    let diff = a.mean - b.mean;

    if se2 == 0.0 {
        // Degenerate: both samples constant.
        let df = (a.n + b.n - 2) as f64;
        let t = if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        let p_value = match alternative {
            Alternative::TwoSided => {
                if diff == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Alternative::Less => {
                if diff < 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Alternative::Greater => {
                if diff > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        };
        return Ok(TTestResult { t, df, p_value });
    }

    let t = diff / se2.sqrt();
    let df = se2 * se2
        / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::param(e.to_string()))?;
    let p_value = match alternative {
        Alternative::TwoSided => (2.0 * dist.sf(t.abs())).min(1.0),
        Alternative::Less => dist.cdf(t),
        Alternative::Greater => dist.sf(t),
    };
    Ok(TTestResult { t, df, p_value })
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub fn two_sided_p(t: f64, df: f64) -> Result<f64> {
    if t.is_infinite() {
        return Ok(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::param(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}
