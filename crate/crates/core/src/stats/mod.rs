//! Hypothesis testing kernel: paired t-tests, Bonferroni decisions and
//! Pearson correlation.

pub mod special;
mod ttest;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ttest::{paired_t_test, student_t_cdf, student_t_two_sided_p, t_test_on_differences, TTestResult};

pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_HYPOTHESES: u32 = 3;

/// A family of simultaneously tested hypotheses sharing one significance level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFamily {
    alpha: f64,
    m: u32,
}

impl HypothesisFamily {
    pub fn new(alpha: f64, m: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::validation(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if m == 0 {
            return Err(Error::validation("number of hypotheses must be at least 1"));
        }
        Ok(HypothesisFamily { alpha, m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Per-hypothesis rejection threshold `alpha / m`.
    pub fn threshold(&self) -> f64 {
        self.alpha / f64::from(self.m)
    }
}

impl Default for HypothesisFamily {
    fn default() -> Self {
        HypothesisFamily {
            alpha: DEFAULT_ALPHA,
            m: DEFAULT_HYPOTHESES,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonferroniDecision {
    pub adjusted_p: f64,
    pub reject: bool,
}

/// Rejects iff `p < alpha / m`; the adjusted p-value is `min(1, p·m)`.
pub fn bonferroni_decision(p: f64, family: &HypothesisFamily) -> BonferroniDecision {
    debug_assert!((0.0..=1.0).contains(&p) || p.is_nan());
    BonferroniDecision {
        adjusted_p: (p * f64::from(family.m)).min(1.0),
        reject: p < family.threshold(),
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::validation(format!(
            "correlation needs equal lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::validation("correlation needs at least 2 points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::validation("correlation undefined for a zero-variance series"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
