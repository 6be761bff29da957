//! Activation tables for a network's hidden layer on a discretization.
//!
//! For hidden parameters `(W, b)` the table stores one cached activation
//! value per (node, unit) on every rule that carries a channel. Everything
//! the training loop needs per epoch is computed from it: the Gram matrix
//! and right-hand side of the activation least-squares system, the channel
//! values of `v = sum_j c_j sigma_j`, and the parameter gradient of the
//! objective.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forms::{Channel, DiffOp, Discretization};
use crate::linalg;
use crate::math;
use crate::network::ActivationSpec;

#[derive(Debug, Clone)]
pub struct Features {
    dim: usize,
    width: usize,
    weights: Vec<f64>,
    activation: ActivationSpec,
    /// Per rule: `len x width`, row-major; empty for rules without channels.
    raw: Vec<Vec<f64>>,
}

#[inline]
fn radial_unit(x: &[f64]) -> [f64; 2] {
    let r = math::sqrt(x[0] * x[0] + x[1] * x[1]);
    if r > 0.0 {
        [x[0] / r, x[1] / r]
    } else {
        [0.0, 0.0]
    }
}

impl Features {
    pub fn new(disc: &Discretization, weights: &[f64], biases: &[f64], activation: ActivationSpec) -> Result<Self> {
        let dim = disc.dim();
        let width = biases.len();
        if weights.len() != dim * width {
            return Err(Error::DimensionMismatch {
                expected: dim * width,
                got: weights.len(),
            });
        }
        let max_order = disc.orders().iter().copied().max().unwrap_or(0);
        activation.check_order(max_order)?;
        let mut used = vec![false; disc.rules().len()];
        for ch in disc.channels() {
            used[ch.rule] = true;
        }
        used[0] = true;
        let raw = disc
            .rules()
            .iter()
            .zip(&used)
            .map(|(rule, &u)| {
                if !u {
                    return Vec::new();
                }
                let mut t = Vec::with_capacity(rule.len() * width);
                for q in 0..rule.len() {
                    let x = rule.point(q);
                    for j in 0..width {
                        let mut z = biases[j];
                        for k in 0..dim {
                            z += x[k] * weights[k * width + j];
                        }
                        t.push(activation.raw(z));
                    }
                }
                t
            })
            .collect();
        Ok(Features {
            dim,
            width,
            weights: weights.to_vec(),
            activation,
            raw,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    fn w(&self, k: usize, j: usize) -> f64 {
        self.weights[k * self.width + j]
    }

    #[inline]
    fn w_sq(&self, j: usize) -> f64 {
        (0..self.dim).map(|k| self.w(k, j) * self.w(k, j)).sum()
    }

    /// Scalar channel value of unit `j` given its derivative stack.
    #[inline]
    fn unit_value(&self, op: DiffOp, g: &[f64; 4], j: usize, x: &[f64]) -> f64 {
        match op {
            DiffOp::Value => g[0],
            DiffOp::Derivative(k) => g[1] * self.w(k, j),
            DiffOp::Laplacian => g[2] * self.w_sq(j),
            DiffOp::Normal => {
                let n = radial_unit(x);
                g[1] * (self.w(0, j) * n[0] + self.w(1, j) * n[1])
            }
            DiffOp::Gradient => unreachable!("vector channel"),
        }
    }

    /// Matrix of channel values `B[q, j] = (op sigma_j)(x_q)` for a scalar
    /// channel, each row scaled by `row_scale[q]`. For the gradient channel
    /// this is the matrix of first activation derivatives.
    fn scaled_matrix(&self, disc: &Discretization, ch: &Channel, row_scale: &[f64]) -> Vec<f64> {
        let rule = &disc.rules()[ch.rule];
        let raw = &self.raw[ch.rule];
        let n = self.width;
        let mut out = vec![0.0; rule.len() * n];
        for q in 0..rule.len() {
            let x = rule.point(q);
            let s = row_scale[q];
            for j in 0..n {
                let g = self.activation.from_raw(raw[q * n + j]);
                out[q * n + j] = s * match ch.op {
                    DiffOp::Gradient => g[1],
                    op => self.unit_value(op, &g, j, x),
                };
            }
        }
        out
    }

    /// Gram matrix `K_ij = a(sigma_i, sigma_j)` (`width x width`).
    pub fn gram(&self, disc: &Discretization) -> Vec<f64> {
        let n = self.width;
        let mut k = vec![0.0; n * n];
        for ch in disc.channels() {
            if ch.a_coef == 0.0 {
                continue;
            }
            let rule = &disc.rules()[ch.rule];
            let scale: Vec<f64> = rule.weights().iter().map(|w| math::sqrt(ch.a_coef * w)).collect();
            let s = self.scaled_matrix(disc, ch, &scale);
            let part = linalg::gram_tn(&s, rule.len(), n);
            if ch.op == DiffOp::Gradient {
                // sum_k (g1 W_ki)(g1 W_kj) = (g1 g1)_ij * (W_i . W_j)
                for i in 0..n {
                    for j in 0..n {
                        let wij: f64 = (0..self.dim).map(|d| self.w(d, i) * self.w(d, j)).sum();
                        k[i * n + j] += part[i * n + j] * wij;
                    }
                }
            } else {
                for (a, b) in k.iter_mut().zip(&part) {
                    *a += b;
                }
            }
        }
        k
    }

    /// Stacked rows `sqrt(a_coef w_q) (op sigma_j)(x_q)` of all form
    /// channels, so that `gram = S^T S`. Returns `(S, rows)`.
    pub fn stacked_rows(&self, disc: &Discretization) -> (Vec<f64>, usize) {
        let n = self.width;
        let mut s = Vec::new();
        let mut rows = 0;
        for ch in disc.channels() {
            if ch.a_coef == 0.0 {
                continue;
            }
            let rule = &disc.rules()[ch.rule];
            let scale: Vec<f64> = rule.weights().iter().map(|w| math::sqrt(ch.a_coef * w)).collect();
            let m = self.scaled_matrix(disc, ch, &scale);
            if ch.op == DiffOp::Gradient {
                for q in 0..rule.len() {
                    for k in 0..self.dim {
                        s.extend((0..n).map(|j| m[q * n + j] * self.w(k, j)));
                        rows += 1;
                    }
                }
            } else {
                s.extend_from_slice(&m);
                rows += rule.len();
            }
        }
        (s, rows)
    }

    /// `F_j = sum_ch sum_q rho_ch(q) . (op sigma_j)(x_q)`.
    pub fn project(&self, disc: &Discretization, rho: &[Vec<f64>]) -> Vec<f64> {
        let n = self.width;
        let mut f = vec![0.0; n];
        for (ch, r) in disc.channels().iter().zip(rho) {
            if r.iter().all(|v| *v == 0.0) {
                continue;
            }
            let rule = &disc.rules()[ch.rule];
            let raw = &self.raw[ch.rule];
            let m = ch.components;
            for q in 0..rule.len() {
                let x = rule.point(q);
                let rq = &r[q * m..(q + 1) * m];
                if rq.iter().all(|v| *v == 0.0) {
                    continue;
                }
                for j in 0..n {
                    let g = self.activation.from_raw(raw[q * n + j]);
                    f[j] += match ch.op {
                        DiffOp::Gradient => g[1] * (0..self.dim).map(|k| self.w(k, j) * rq[k]).sum::<f64>(),
                        op => self.unit_value(op, &g, j, x) * rq[0],
                    };
                }
            }
        }
        f
    }

    /// Channel values of `v = sum_j c_j sigma_j`, `components` per node.
    pub fn channel_values(&self, disc: &Discretization, ch: &Channel, c: &[f64]) -> Vec<f64> {
        let rule = &disc.rules()[ch.rule];
        let raw = &self.raw[ch.rule];
        let n = self.width;
        let m = ch.components;
        let mut out = vec![0.0; rule.len() * m];
        for q in 0..rule.len() {
            let x = rule.point(q);
            let o = &mut out[q * m..(q + 1) * m];
            for j in 0..n {
                if c[j] == 0.0 {
                    continue;
                }
                let g = self.activation.from_raw(raw[q * n + j]);
                match ch.op {
                    DiffOp::Gradient => {
                        for k in 0..self.dim {
                            o[k] += c[j] * g[1] * self.w(k, j);
                        }
                    }
                    op => o[0] += c[j] * self.unit_value(op, &g, j, x),
                }
            }
        }
        out
    }

    /// Values of `v = sum_j c_j sigma_j` at the nodes of rule `r`.
    pub fn values(&self, disc: &Discretization, r: usize, c: &[f64]) -> Vec<f64> {
        let len = disc.rules()[r].len();
        let n = self.width;
        let raw = &self.raw[r];
        (0..len)
            .map(|q| {
                (0..n)
                    .map(|j| c[j] * self.activation.from_raw(raw[q * n + j])[0])
                    .sum()
            })
            .collect()
    }

    /// `sum_ch sum_q lambda_ch(q) . d(op v)(x_q)/dp` for every hidden
    /// parameter `p`, output layer `c` held fixed. Layout matches
    /// [`ShallowNetwork::param_gradient_stack`](crate::network::ShallowNetwork::param_gradient_stack).
    pub fn param_gradient(&self, disc: &Discretization, c: &[f64], lambda: &[Vec<f64>]) -> Result<Vec<f64>> {
        let max_op = disc
            .channels()
            .iter()
            .zip(lambda)
            .filter(|(_, l)| l.iter().any(|v| *v != 0.0))
            .map(|(ch, _)| ch.op.order())
            .max()
            .unwrap_or(0);
        self.activation.check_order(max_op + 1)?;
        let (d, n) = (self.dim, self.width);
        let mut grad = vec![0.0; n * (d + 1)];
        for (ch, lam) in disc.channels().iter().zip(lambda) {
            if lam.iter().all(|v| *v == 0.0) {
                continue;
            }
            let rule = &disc.rules()[ch.rule];
            let raw = &self.raw[ch.rule];
            let m = ch.components;
            for q in 0..rule.len() {
                let x = rule.point(q);
                let lq = &lam[q * m..(q + 1) * m];
                if lq.iter().all(|v| *v == 0.0) {
                    continue;
                }
                let nq = if ch.op == DiffOp::Normal { radial_unit(x) } else { [0.0; 2] };
                for j in 0..n {
                    if c[j] == 0.0 {
                        continue;
                    }
                    let g = self.activation.from_raw(raw[q * n + j]);
                    // a: derivative wrt b_j; extra[m]: W-derivative beyond x_m * a
                    let mut extra = [0.0; 2];
                    let a = match ch.op {
                        DiffOp::Value => g[1] * lq[0],
                        DiffOp::Derivative(k) => {
                            extra[k] = g[1] * lq[0];
                            g[2] * self.w(k, j) * lq[0]
                        }
                        DiffOp::Gradient => {
                            let wl: f64 = (0..d).map(|k| self.w(k, j) * lq[k]).sum();
                            for k in 0..d {
                                extra[k] = g[1] * lq[k];
                            }
                            g[2] * wl
                        }
                        DiffOp::Laplacian => {
                            for k in 0..d {
                                extra[k] = 2.0 * g[2] * self.w(k, j) * lq[0];
                            }
                            g[3] * self.w_sq(j) * lq[0]
                        }
                        DiffOp::Normal => {
                            let wn = self.w(0, j) * nq[0] + self.w(1, j) * nq[1];
                            extra = [g[1] * nq[0] * lq[0], g[1] * nq[1] * lq[0]];
                            g[2] * wn * lq[0]
                        }
                    };
                    let cj = c[j];
                    grad[d * n + j] += cj * a;
                    for k in 0..d {
                        grad[k * n + j] += cj * (x[k] * a + extra[k]);
                    }
                }
            }
        }
        Ok(grad)
    }
}
