//! Independent oracles shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use serde::Deserialize;

/// Γ((ν+1)/2) / Γ(ν/2) by the recurrence r(ν+1) = (ν/2) / r(ν), which needs
/// no log-gamma.
fn half_gamma_ratio(df: u32) -> f64 {
    let mut r = 1.0 / std::f64::consts::PI.sqrt();
    for nu in 1..df {
        r = (nu as f64 / 2.0) / r;
    }
    r
}

fn t_density(x: f64, df: u32, norm: f64) -> f64 {
    let nu = df as f64;
    norm * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Student-t CDF by adaptive Simpson integration of the density over [0, |t|].
pub fn t_cdf_by_quadrature(t: f64, df: u32) -> f64 {
    let norm = half_gamma_ratio(df) / (df as f64 * std::f64::consts::PI).sqrt();
    let f = move |x: f64| t_density(x, df, norm);
    let b = t.abs();
    let (fa, fm, fb) = (f(0.0), f(b / 2.0), f(b));
    let whole = simpson(0.0, b, fa, fm, fb);
    let area = adaptive(&f, 0.0, b, fa, fm, fb, whole, 1e-14, 48);
    if t >= 0.0 {
        0.5 + area
    } else {
        0.5 - area
    }
}

/// 50 (t, df) evaluation points for the CDF comparison.
pub fn cdf_grid() -> Vec<(f64, u32)> {
    let ts = [-9.0, -3.5, -2.0, -0.7, -0.05, 0.3, 1.5, 2.6, 4.0, 12.0];
    let dfs = [1, 3, 9, 39, 399];
    dfs.iter().flat_map(|&df| ts.iter().map(move |&t| (t, df))).collect()
}

#[derive(Deserialize)]
pub struct OracleCase {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
    pub p: f64,
}

#[derive(Deserialize)]
struct OracleFile {
    cases: Vec<OracleCase>,
}

/// Paired samples with reference two-sided p-values from scipy's `ttest_rel`.
pub fn ttest_oracle() -> Vec<OracleCase> {
    let text = include_str!("../oracle/ttest_oracle.json");
    serde_json::from_str::<OracleFile>(text)
        .expect("oracle file parses")
        .cases
}

/// The p grid used for the Bonferroni check: 0.0001, 0.0002, ..., 0.0200.
pub fn bonferroni_p_grid() -> Vec<f64> {
    (1..=200).map(|k| k as f64 / 10_000.0).collect()
}
