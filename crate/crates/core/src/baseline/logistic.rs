//! L2-regularised binary logistic regression trained with full-batch L-BFGS.
//!
//! Objective: `mean_i [softplus(z_i) - y_i z_i] + (λ/2)‖w‖²` with
//! `z_i = w·x_i + b`; the bias is not penalised. Training starts from zero
//! and is fully deterministic.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::tfidf::SparseVector;
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
const HISTORY: usize = 10;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Consecutive steps without a representable decrease before giving up.
const STALL_LIMIT: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub iterations: usize,
    pub converged: bool,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub final_gradient_norm: f64,
    /// Objective after each accepted step, starting with the initial value.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_strength: f64,
    pub training: TrainingMetadata,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub l2_strength: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl TrainConfig {
    /// Default regularisation `1 / n_samples`, the mean-loss form of `C = 1`.
    pub fn for_samples(n_samples: usize) -> Self {
        TrainConfig {
            l2_strength: 1.0 / n_samples.max(1) as f64,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Regularised objective over a fixed design; parameters are `[w..., b]`.
pub struct Objective<'a> {
    rows: Vec<&'a SparseVector>,
    labels: Vec<f64>,
    dim: usize,
    l2: f64,
}

impl<'a> Objective<'a> {
    pub fn new(x: &'a [SparseVector], y: &[u8], dim: usize, l2: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::validation(format!(
                "{} feature rows but {} labels",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::validation("cannot train on an empty dataset"));
        }
        if let Some(bad) = y.iter().find(|&&l| l > 1) {
            return Err(Error::validation(format!("label {bad} is not 0 or 1")));
        }
        if !y.contains(&0) || !y.contains(&1) {
            return Err(Error::validation("training labels contain a single class"));
        }
        if !(l2 > 0.0 && l2.is_finite()) {
            return Err(Error::validation(format!("l2_strength must be positive, got {l2}")));
        }
        if let Some(max) = x.iter().filter_map(SparseVector::max_index).max() {
            if max >= dim {
                return Err(Error::validation(format!(
                    "feature index {max} outside dimension {dim}"
                )));
            }
        }

        // Canonical sample order makes the floating-point sums, and hence the
        // fitted weights, independent of the input order.
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&i, &j| sample_key_cmp(&x[i], y[i], &x[j], y[j]));
        Ok(Objective {
            rows: order.iter().map(|&i| &x[i]).collect(),
            labels: order.iter().map(|&i| f64::from(y[i])).collect(),
            dim,
            l2,
        })
    }

    pub fn n_params(&self) -> usize {
        self.dim + 1
    }

    /// Objective value and gradient at `params`.
    pub fn value_and_gradient(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let (w, b) = params.split_at(self.dim);
        let b = b[0];
        grad.fill(0.0);
        let n = self.rows.len() as f64;
        let mut loss = 0.0;
        let mut grad_b = 0.0;
        for (row, &y) in self.rows.iter().zip(&self.labels) {
            let z = row.dot(w) + b;
            loss += softplus(z) - y * z;
            let r = sigmoid(z) - y;
            grad_b += r;
            for &(i, v) in row.entries() {
                grad[i] += r * v;
            }
        }
        let mut penalty = 0.0;
        for (g, &wi) in grad[..self.dim].iter_mut().zip(w) {
            *g = *g / n + self.l2 * wi;
            penalty += wi * wi;
        }
        grad[self.dim] = grad_b / n;
        loss / n + 0.5 * self.l2 * penalty
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        let mut scratch = vec![0.0; params.len()];
        self.value_and_gradient(params, &mut scratch)
    }
}

fn sample_key_cmp(a: &SparseVector, ya: u8, b: &SparseVector, yb: u8) -> std::cmp::Ordering {
    ya.cmp(&yb).then_with(|| {
        let ka = a.entries().iter().map(|&(i, v)| (i, v.to_bits()));
        let kb = b.entries().iter().map(|&(i, v)| (i, v.to_bits()));
        ka.cmp(kb)
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits weights over `dim` features by minimising the regularised mean
/// negative log-likelihood.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks too
pub fn train_logistic(x: &[SparseVector], y: &[u8], dim: usize, config: &TrainConfig) -> Result<LogisticModel> {
    if !(config.tolerance > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let objective = Objective::new(x, y, dim, config.l2_strength)?;
    let n = objective.n_params();

    let mut params = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut f = objective.value_and_gradient(&params, &mut grad);
    if !f.is_finite() {
        return Err(Error::Training("initial objective is not finite".into()));
    }
    let initial = f;
    let mut trace = vec![f];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;
    let mut converged = inf_norm(&grad) < config.tolerance;

    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    let mut stalled = 0;
    while !converged && iterations < config.max_iterations {
        let mut direction = two_loop_direction(&grad, &history);
        let mut slope = dot(&grad, &direction);
        if !(slope < 0.0) {
            // Not a descent direction; restart from steepest descent.
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
        }

        let mut step = if history.is_empty() {
            (1.0 / inf_norm(&grad)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                trial[i] = params[i] + step * direction[i];
            }
            let f_new = objective.value_and_gradient(&trial, &mut trial_grad);
            if !f_new.is_finite() {
                return Err(Error::Training(format!(
                    "objective became non-finite at iteration {iterations}"
                )));
            }
            if f_new <= f + ARMIJO_C1 * step * slope {
                accepted = Some(f_new);
                break;
            }
            step *= 0.5;
        }
        let Some(f_new) = accepted else {
            // No decrease representable at this precision.
            break;
        };

        let s: Vec<f64> = trial.iter().zip(&params).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = trial_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * dot(&yv, &yv).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }

        if f - f_new <= f64::EPSILON * f.abs() {
            stalled += 1;
        } else {
            stalled = 0;
        }
        std::mem::swap(&mut params, &mut trial);
        std::mem::swap(&mut grad, &mut trial_grad);
        f = f_new;
        trace.push(f);
        iterations += 1;
        converged = inf_norm(&grad) < config.tolerance;
        if stalled >= STALL_LIMIT {
            break;
        }
    }

    let bias = params.pop().expect("bias parameter");
    Ok(LogisticModel {
        weights: params,
        bias,
        l2_strength: config.l2_strength,
        training: TrainingMetadata {
            iterations,
            converged,
            initial_objective: initial,
            final_objective: f,
            final_gradient_norm: inf_norm(&grad),
            objective_trace: trace,
        },
    })
}

fn two_loop_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    for qi in &mut q {
        *qi = -*qi;
    }
    q
}

impl LogisticModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// σ(w·v + b).
    pub fn predict_positive(&self, v: &SparseVector) -> Result<f64> {
        if let Some(max) = v.max_index() {
            if max >= self.weights.len() {
                return Err(Error::validation(format!(
                    "feature index {max} outside model dimension {}",
                    self.weights.len()
                )));
            }
        }
        Ok(sigmoid(v.dot(&self.weights) + self.bias))
    }
}
