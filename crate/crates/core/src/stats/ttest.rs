//! Paired t-test with exact Student-t tail probabilities.

use serde::{Deserialize, Serialize};

use super::special::beta_reg_split;
use crate::error::{Error, Result};

/// Student-t CDF with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: u32) -> f64 {
    assert!(df >= 1, "Student-t needs at least one degree of freedom");
    if t.is_nan() {
        return f64::NAN;
    }
    let tail = 0.5 * two_sided_tail(t, df);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// P(|T| ≥ |t|) = I_{df/(df+t²)}(df/2, 1/2).
pub fn student_t_two_sided_p(t: f64, df: u32) -> f64 {
    assert!(df >= 1, "Student-t needs at least one degree of freedom");
    if t.is_nan() {
        return f64::NAN;
    }
    two_sided_tail(t, df).clamp(0.0, 1.0)
}

fn two_sided_tail(t: f64, df: u32) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    let nu = f64::from(df);
    let t2 = t * t;
    let denom = nu + t2;
    beta_reg_split(0.5 * nu, 0.5, nu / denom, t2 / denom)
}

/// Outcome of a paired t-test on the differences `a_i - b_i`.
///
/// `t_statistic` is `±∞` when every difference is the same nonzero value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub mean_difference: f64,
    #[serde(with = "crate::io::nonfinite")]
    pub t_statistic: f64,
    pub degrees_of_freedom: u32,
    pub p_two_sided: f64,
    pub n_pairs: usize,
}

impl TTestResult {
    pub fn t_is_infinite(&self) -> bool {
        self.t_statistic.is_infinite()
    }
}

/// Paired two-sided t-test of `mean(a - b) = 0`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "paired t-test needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    t_test_on_differences(&diffs)
}

/// One-sample t-test of `mean(d) = 0`, the core of the paired test.
pub fn t_test_on_differences(diffs: &[f64]) -> Result<TTestResult> {
    let n = diffs.len();
    if n < 2 {
        return Err(Error::validation(format!(
            "paired t-test needs at least 2 pairs, got {n}"
        )));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::validation("paired t-test input contains a non-finite value"));
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let df = u32::try_from(n - 1).map_err(|_| Error::validation("too many pairs"))?;

    let first = diffs[0];
    let (t, p) = if diffs.iter().all(|&d| d == first) {
        if first == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(first), 0.0)
        }
    } else {
        let ss: f64 = diffs.iter().map(|d| (d - mean).powi(2)).sum();
        let sd = (ss / (nf - 1.0)).sqrt();
        let t = mean / (sd / nf.sqrt());
        (t, student_t_two_sided_p(t, df))
    };

    Ok(TTestResult {
        mean_difference: mean,
        t_statistic: t,
        degrees_of_freedom: df,
        p_two_sided: p,
        n_pairs: n,
    })
}
