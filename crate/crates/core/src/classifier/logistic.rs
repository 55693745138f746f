//! L2-regularized binary logistic regression over a sparse design matrix,
//! minimized with L-BFGS and a backtracking (Armijo) line search.
//!
//! Objective for labels `y_i ∈ {-1, +1}` and parameters `(w, b)`:
//!
//! ```text
//! f(w, b) = Σ_i ln(1 + exp(-y_i (w·x_i + b))) + λ/2 ‖w‖²
//! ```
//!
//! The bias is not regularized. Every accepted step satisfies the Armijo
//! condition, so the recorded loss sequence never increases.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

const HISTORY: usize = 8;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

/// Row-compressed training examples with their tag indices.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    dim: usize,
    row_starts: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Dataset {
            dim,
            row_starts: vec![0],
            ..Default::default()
        }
    }

    pub fn push(&mut self, x: &SparseVector, label: usize) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.dim(),
            });
        }
        self.indices.extend_from_slice(x.indices());
        self.values.extend_from_slice(x.values());
        self.row_starts.push(self.indices.len());
        self.labels.push(label);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let range = self.row_starts[i]..self.row_starts[i + 1];
        (&self.indices[range.clone()], &self.values[range])
    }
}

/// One-vs-rest binary problem: examples labeled `positive` against the rest.
pub struct BinaryProblem<'a> {
    data: &'a Dataset,
    positive: usize,
    lambda: f64,
    order: Vec<usize>,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl<'a> BinaryProblem<'a> {
    /// `seed` fixes the order in which examples are accumulated.
    pub fn new(data: &'a Dataset, positive: usize, lambda: f64, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        BinaryProblem {
            data,
            positive,
            lambda,
            order,
        }
    }

    /// Number of parameters: weights then bias.
    pub fn num_params(&self) -> usize {
        self.data.dim + 1
    }

    fn sign(&self, i: usize) -> f64 {
        if self.data.labels[i] == self.positive {
            1.0
        } else {
            -1.0
        }
    }

    fn margin(&self, i: usize, params: &[f64]) -> f64 {
        let (idx, val) = self.data.row(i);
        let bias = params[self.data.dim];
        idx.iter()
            .zip(val)
            .fold(bias, |acc, (&j, &v)| acc + params[j as usize] * v)
    }

    fn regularizer(&self, params: &[f64]) -> f64 {
        0.5 * self.lambda * params[..self.data.dim].iter().map(|w| w * w).sum::<f64>()
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let data_loss: f64 = self
            .order
            .iter()
            .map(|&i| softplus(-self.sign(i) * self.margin(i, params)))
            .sum();
        data_loss + self.regularizer(params)
    }

    /// Objective value and its gradient.
    pub fn loss_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let dim = self.data.dim;
        let mut grad: Vec<f64> = params.iter().map(|w| self.lambda * w).collect();
        grad[dim] = 0.0;
        let mut loss = self.regularizer(params);
        for &i in &self.order {
            let y = self.sign(i);
            let z = -y * self.margin(i, params);
            loss += softplus(z);
            let coef = -y * sigmoid(z);
            if coef == 0.0 {
                continue;
            }
            let (idx, val) = self.data.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                grad[j as usize] += coef * v;
            }
            grad[dim] += coef;
        }
        (loss, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub params: Vec<f64>,
    /// Objective at the start and after every epoch.
    pub losses: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes the problem from zero. One epoch is one L-BFGS iteration
/// (a full pass plus line-search passes over the data).
pub fn minimize(problem: &BinaryProblem<'_>, tolerance: f64, max_epochs: usize) -> Solution {
    let mut params = vec![0.0; problem.num_params()];
    let (mut loss, mut grad) = problem.loss_and_gradient(&params);
    let mut losses = vec![loss];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut converged = false;
    let mut epochs = 0;

    while epochs < max_epochs {
        let grad_norm = dot(&grad, &grad).sqrt();
        if grad_norm <= 1e-12 {
            converged = true;
            break;
        }
        let mut direction = two_loop(&grad, &history);
        let mut slope = dot(&grad, &direction);
        if slope >= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = -grad_norm * grad_norm;
        }
        let mut step = if history.is_empty() {
            1.0 / grad_norm
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + step * d)
                .collect();
            let (new_loss, new_grad) = problem.loss_and_gradient(&candidate);
            if new_loss <= loss + ARMIJO * step * slope {
                accepted = Some((candidate, new_loss, new_grad));
                break;
            }
            step *= 0.5;
        }
        epochs += 1;
        let Some((new_params, new_loss, new_grad)) = accepted else {
            // no step decreases the objective: at numerical precision
            losses.push(loss);
            converged = true;
            break;
        };

        let s: Vec<f64> = new_params.iter().zip(&params).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        let decrease = loss - new_loss;
        params = new_params;
        grad = new_grad;
        loss = new_loss;
        losses.push(loss);
        if decrease <= tolerance * loss.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Solution {
        params,
        losses,
        epochs,
        converged,
    }
}

fn two_loop(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= alpha * yi);
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (alpha - beta) * si);
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}
