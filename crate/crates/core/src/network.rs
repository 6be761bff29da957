//! Single-hidden-layer networks `v(x) = sum_j c_j sigma(beta (x . W_j + b_j))`
//! with analytic spatial derivatives and parameter gradients.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{invalid, Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        }
    }

    /// Highest derivative order the activation supplies.
    pub fn max_order(self) -> usize {
        match self {
            Activation::Tanh => 3,
            Activation::Relu => 1,
        }
    }
}

/// A base activation with its scale: `sigma_beta(t) = sigma(beta t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationSpec {
    pub base: Activation,
    pub scale: f64,
}

impl ActivationSpec {
    pub fn new(base: Activation, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid("activation scale must be positive and finite"));
        }
        Ok(ActivationSpec { base, scale })
    }

    pub fn tanh(scale: f64) -> Self {
        ActivationSpec {
            base: Activation::Tanh,
            scale,
        }
    }

    pub fn max_order(&self) -> usize {
        self.base.max_order()
    }

    pub(crate) fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order() {
            return Err(Error::UnsupportedOrder {
                activation: self.base.name(),
                requested: order,
                max: self.max_order(),
            });
        }
        Ok(())
    }

    /// Cached per-node quantity from which all derivatives follow cheaply:
    /// `tanh(beta z)` for tanh, `z` itself for relu.
    #[inline]
    pub(crate) fn raw(&self, z: f64) -> f64 {
        match self.base {
            Activation::Tanh => math::tanh(self.scale * z),
            Activation::Relu => z,
        }
    }

    #[inline]
    pub(crate) fn from_raw(&self, r: f64) -> [f64; 4] {
        let b = self.scale;
        match self.base {
            Activation::Tanh => {
                let s = 1.0 - r * r;
                [r, b * s, -2.0 * b * b * r * s, -2.0 * b * b * b * s * (1.0 - 3.0 * r * r)]
            }
            Activation::Relu => {
                if r > 0.0 {
                    [b * r, b, 0.0, 0.0]
                } else {
                    [0.0; 4]
                }
            }
        }
    }

    /// Derivatives of `z -> sigma(beta z)` up to order 3. Entries above the
    /// activation's supported order are zero.
    ///
    /// For tanh every derivative is formed from `t = tanh(beta z)` and
    /// carries the factor `1 - t^2`, so large `|z|` decays cleanly instead of
    /// cancelling.
    #[inline]
    pub fn derivatives(&self, z: f64) -> [f64; 4] {
        self.from_raw(self.raw(z))
    }
}

/// Number of distinct second derivatives in dimension `dim`.
pub fn second_count(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Values and spatial derivatives of a function at the nodes of a rule.
///
/// Second derivatives are stored as `[v'']` in 1D and `[v_xx, v_xy, v_yy]`
/// in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    dim: usize,
    order: usize,
    values: Vec<f64>,
    gradient: Vec<f64>,
    second: Vec<f64>,
}

impl FieldSample {
    pub fn zeros(dim: usize, len: usize, order: usize) -> Self {
        FieldSample {
            dim,
            order,
            values: vec![0.0; len],
            gradient: if order >= 1 { vec![0.0; len * dim] } else { Vec::new() },
            second: if order >= 2 {
                vec![0.0; len * second_count(dim)]
            } else {
                Vec::new()
            },
        }
    }

    pub fn from_parts(
        dim: usize,
        order: usize,
        values: Vec<f64>,
        gradient: Vec<f64>,
        second: Vec<f64>,
    ) -> Result<Self> {
        let n = values.len();
        let want_g = if order >= 1 { n * dim } else { 0 };
        let want_s = if order >= 2 { n * second_count(dim) } else { 0 };
        if gradient.len() != want_g || second.len() != want_s || order > 2 {
            return Err(invalid("field sample blocks do not match order"));
        }
        Ok(FieldSample {
            dim,
            order,
            values,
            gradient,
            second,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn second(&self) -> &[f64] {
        &self.second
    }

    #[inline]
    pub fn value(&self, q: usize) -> f64 {
        self.values[q]
    }

    #[inline]
    pub fn grad(&self, q: usize, k: usize) -> f64 {
        self.gradient[q * self.dim + k]
    }

    /// Laplacian at node `q` (`v''` in 1D).
    #[inline]
    pub fn laplacian(&self, q: usize) -> f64 {
        let s = second_count(self.dim);
        let row = &self.second[q * s..(q + 1) * s];
        if self.dim == 1 {
            row[0]
        } else {
            row[0] + row[2]
        }
    }

    /// `self += alpha * other`, over the blocks both samples carry.
    pub fn axpy(&mut self, alpha: f64, other: &FieldSample) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        if self.order >= 1 && other.order >= 1 {
            for (a, b) in self.gradient.iter_mut().zip(&other.gradient) {
                *a += alpha * b;
            }
        }
        if self.order >= 2 && other.order >= 2 {
            for (a, b) in self.second.iter_mut().zip(&other.second) {
                *a += alpha * b;
            }
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.values.iter_mut().for_each(|v| *v *= alpha);
        self.gradient.iter_mut().for_each(|v| *v *= alpha);
        self.second.iter_mut().for_each(|v| *v *= alpha);
    }
}

/// Shallow network with `dim` inputs and `width` hidden units.
///
/// `W` is stored row-major as a `dim x width` matrix, so the weight of
/// input `k` into unit `j` is `weights[k * width + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNetwork {
    dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    coeffs: Vec<f64>,
    activation: ActivationSpec,
}

impl ShallowNetwork {
    pub fn new(
        dim: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        coeffs: Vec<f64>,
        activation: ActivationSpec,
    ) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(invalid("network input dimension must be 1 or 2"));
        }
        let n = biases.len();
        if n == 0 {
            return Err(invalid("network width must be >= 1"));
        }
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.len(),
            });
        }
        if weights.len() != dim * n {
            return Err(Error::DimensionMismatch {
                expected: dim * n,
                got: weights.len(),
            });
        }
        Ok(ShallowNetwork {
            dim,
            weights,
            biases,
            coeffs,
            activation,
        })
    }

    /// Network with the given hidden parameters and zero output layer.
    pub fn from_hidden(dim: usize, weights: Vec<f64>, biases: Vec<f64>, activation: ActivationSpec) -> Result<Self> {
        let n = biases.len();
        Self::new(dim, weights, biases, vec![0.0; n], activation)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.biases.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn activation(&self) -> ActivationSpec {
        self.activation
    }

    #[inline]
    pub fn weight(&self, k: usize, j: usize) -> f64 {
        self.weights[k * self.width() + j]
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub fn set_coeffs(&mut self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                got: coeffs.len(),
            });
        }
        self.coeffs.copy_from_slice(coeffs);
        Ok(())
    }

    /// `max |W| + max |b| + max |c|`.
    pub fn param_norm(&self) -> f64 {
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        max_abs(&self.weights) + max_abs(&self.biases) + max_abs(&self.coeffs)
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.biases)
            .chain(&self.coeffs)
            .all(|v| v.is_finite())
    }

    /// Pre-activation `x . W_j + b_j`.
    #[inline]
    pub fn preactivation(&self, x: &[f64], j: usize) -> f64 {
        let n = self.width();
        let mut z = self.biases[j];
        for (k, xk) in x.iter().enumerate() {
            z += xk * self.weights[k * n + j];
        }
        z
    }

    /// Copy with output coefficients multiplied by `s`.
    pub fn scale_output(&self, s: f64) -> ShallowNetwork {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    fn check_points(&self, points: &[f64]) -> Result<usize> {
        if points.len() % self.dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: points.len() % self.dim,
            });
        }
        Ok(points.len() / self.dim)
    }

    /// Values and spatial derivatives up to `order` at `points`
    /// (`dim` coordinates per point).
    pub fn eval_stack(&self, points: &[f64], order: usize) -> Result<FieldSample> {
        if order > 2 {
            return Err(invalid("field samples carry derivatives up to order 2"));
        }
        self.activation.check_order(order)?;
        let len = self.check_points(points)?;
        let d = self.dim;
        let n = self.width();
        let sc = second_count(d);
        let mut out = FieldSample::zeros(d, len, order);
        for q in 0..len {
            let x = &points[q * d..(q + 1) * d];
            let mut value = 0.0;
            let mut grad = [0.0; 2];
            let mut sec = [0.0; 3];
            for j in 0..n {
                let c = self.coeffs[j];
                if c == 0.0 {
                    continue;
                }
                let g = self.activation.derivatives(self.preactivation(x, j));
                value += c * g[0];
                if order >= 1 {
                    for (k, gk) in grad.iter_mut().enumerate().take(d) {
                        *gk += c * g[1] * self.weights[k * n + j];
                    }
                }
                if order >= 2 {
                    if d == 1 {
                        let w = self.weights[j];
                        sec[0] += c * g[2] * w * w;
                    } else {
                        let (w0, w1) = (self.weights[j], self.weights[n + j]);
                        sec[0] += c * g[2] * w0 * w0;
                        sec[1] += c * g[2] * w0 * w1;
                        sec[2] += c * g[2] * w1 * w1;
                    }
                }
            }
            out.values[q] = value;
            if order >= 1 {
                out.gradient[q * d..(q + 1) * d].copy_from_slice(&grad[..d]);
            }
            if order >= 2 {
                out.second[q * sc..(q + 1) * sc].copy_from_slice(&sec[..sc]);
            }
        }
        Ok(out)
    }

    /// Derivatives of [`eval_stack`](Self::eval_stack) with respect to every
    /// hidden parameter, output layer held fixed.
    ///
    /// The result has `width * (dim + 1)` samples: first `W` in its
    /// row-major order (`k * width + j`), then `b_j`.
    pub fn param_gradient_stack(&self, points: &[f64], order: usize) -> Result<Vec<FieldSample>> {
        if order > 2 {
            return Err(invalid("field samples carry derivatives up to order 2"));
        }
        self.activation.check_order(order + 1)?;
        let len = self.check_points(points)?;
        let d = self.dim;
        let n = self.width();
        let sc = second_count(d);
        let mut out: Vec<FieldSample> = (0..n * (d + 1))
            .map(|_| FieldSample::zeros(d, len, order))
            .collect();
        // second-derivative index pairs (k, l) in storage order
        let pairs: &[(usize, usize)] = if d == 1 { &[(0, 0)] } else { &[(0, 0), (0, 1), (1, 1)] };
        for q in 0..len {
            let x = &points[q * d..(q + 1) * d];
            for j in 0..n {
                let c = self.coeffs[j];
                let g = self.activation.derivatives(self.preactivation(x, j));
                let w = |k: usize| self.weights[k * n + j];
                // bias
                {
                    let s = &mut out[d * n + j];
                    s.values[q] = c * g[1];
                    if order >= 1 {
                        for k in 0..d {
                            s.gradient[q * d + k] = c * g[2] * w(k);
                        }
                    }
                    if order >= 2 {
                        for (idx, &(k, l)) in pairs.iter().enumerate() {
                            s.second[q * sc + idx] = c * g[3] * w(k) * w(l);
                        }
                    }
                }
                for m in 0..d {
                    let s = &mut out[m * n + j];
                    s.values[q] = c * g[1] * x[m];
                    if order >= 1 {
                        for k in 0..d {
                            let delta = if k == m { g[1] } else { 0.0 };
                            s.gradient[q * d + k] = c * (g[2] * x[m] * w(k) + delta);
                        }
                    }
                    if order >= 2 {
                        for (idx, &(k, l)) in pairs.iter().enumerate() {
                            let mut t = g[3] * x[m] * w(k) * w(l);
                            if k == m {
                                t += g[2] * w(l);
                            }
                            if l == m {
                                t += g[2] * w(k);
                            }
                            s.second[q * sc + idx] = c * t;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Hidden-layer initialization schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitStrategy {
    /// `W_j = 1`, `b_j = -j/n`: transitions spread uniformly over (0, 1].
    UniformBias1d,
    /// Directions cycled through the normals of the lines `y = 0`, `x = 0`,
    /// `y = x`, `y = -x`; within each family the hyperplanes are evenly
    /// spaced across the box `[lo, hi]`.
    AxisDiagonal2d { lo: [f64; 2], hi: [f64; 2] },
    /// Random unit directions; each hyperplane passes through a point drawn
    /// uniformly from the box `[lo, hi]` (1D uses the first coordinate), so
    /// every hyperplane meets the box.
    Box { lo: [f64; 2], hi: [f64; 2] },
}

struct Uniform01(ChaCha8Rng);

impl Uniform01 {
    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Hidden parameters `(W, b)` for a network of width `n` in dimension `d`.
/// `W` uses the row-major `d x n` layout of [`ShallowNetwork`].
pub fn init_hidden(strategy: InitStrategy, n: usize, d: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(invalid("network width must be >= 1"));
    }
    match strategy {
        InitStrategy::UniformBias1d => {
            if d != 1 {
                return Err(invalid("uniform_bias_1d requires a 1D network"));
            }
            let h = 1.0 / n as f64;
            let b = (1..=n).map(|j| -(j as f64) * h).collect();
            Ok((vec![1.0; n], b))
        }
        InitStrategy::AxisDiagonal2d { lo, hi } => {
            if d != 2 {
                return Err(invalid("axis_diagonal_2d requires a 2D network"));
            }
            let r = core::f64::consts::FRAC_1_SQRT_2;
            let dirs = [[0.0, 1.0], [1.0, 0.0], [r, -r], [r, r]];
            let mut w = vec![0.0; 2 * n];
            let mut b = vec![0.0; n];
            for (f, dir) in dirs.iter().enumerate() {
                let members: Vec<usize> = (f..n).step_by(4).collect();
                let m = members.len();
                if m == 0 {
                    continue;
                }
                let (pmin, pmax) = projection_range(dir, lo, hi);
                for (k, &j) in members.iter().enumerate() {
                    let t = pmin + (k as f64 + 0.5) / m as f64 * (pmax - pmin);
                    w[j] = dir[0];
                    w[n + j] = dir[1];
                    b[j] = -t;
                }
            }
            Ok((w, b))
        }
        InitStrategy::Box { lo, hi } => {
            let mut rng = Uniform01(ChaCha8Rng::seed_from_u64(seed));
            let mut w = vec![0.0; d * n];
            let mut b = vec![0.0; n];
            for j in 0..n {
                let mut dir = [0.0; 2];
                if d == 1 {
                    dir[0] = if rng.next() < 0.5 { -1.0 } else { 1.0 };
                } else {
                    let theta = 2.0 * PI * rng.next();
                    dir = [math::cos(theta), math::sin(theta)];
                }
                let mut dot = 0.0;
                for k in 0..d {
                    let p = lo[k] + rng.next() * (hi[k] - lo[k]);
                    w[k * n + j] = dir[k];
                    dot += p * dir[k];
                }
                b[j] = -dot;
            }
            Ok((w, b))
        }
    }
}

fn projection_range(dir: &[f64; 2], lo: [f64; 2], hi: [f64; 2]) -> (f64, f64) {
    let corners = [[lo[0], lo[1]], [lo[0], hi[1]], [hi[0], lo[1]], [hi[0], hi[1]]];
    corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
        let p = c[0] * dir[0] + c[1] * dir[1];
        (a.min(p), b.max(p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / (1u64 << 53) as f64 * 2.0 - 1.0
        }
    }

    fn random_net(dim: usize, n: usize, seed: u64, beta: f64) -> ShallowNetwork {
        let mut r = Lcg(seed);
        let w = (0..dim * n).map(|_| 2.0 * r.next()).collect();
        let b = (0..n).map(|_| r.next()).collect();
        let c = (0..n).map(|_| r.next()).collect();
        ShallowNetwork::new(dim, w, b, c, ActivationSpec::tanh(beta)).unwrap()
    }

    #[test]
    fn unit_tanh_at_origin() {
        let net = ShallowNetwork::new(1, vec![1.0], vec![0.0], vec![1.0], ActivationSpec::tanh(1.0)).unwrap();
        let s = net.eval_stack(&[0.0], 2).unwrap();
        assert_eq!(s.values(), &[0.0]);
        assert_eq!(s.gradient(), &[1.0]);
        assert_eq!(s.second(), &[0.0]);
        let p = net.param_gradient_stack(&[0.0], 0).unwrap();
        // [dv/dW, dv/db]
        assert_eq!(p[1].values(), &[1.0]);
    }

    #[test]
    fn zero_output_layer_gives_zero_everything() {
        let mut net = random_net(2, 5, 3, 1.5);
        net.set_coeffs(&[0.0; 5]).unwrap();
        let pts = [0.1, 0.2, -0.4, 0.9];
        let s = net.eval_stack(&pts, 2).unwrap();
        assert!(s.values().iter().chain(s.gradient()).chain(s.second()).all(|v| *v == 0.0));
        for g in net.param_gradient_stack(&pts, 2).unwrap() {
            assert!(g.values().iter().chain(g.gradient()).chain(g.second()).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn activation_derivatives_match_finite_differences() {
        let h = 1e-5;
        for spec in [ActivationSpec::tanh(1.0), ActivationSpec::tanh(3.7), ActivationSpec::tanh(0.4)] {
            for i in 0..20 {
                let z = -2.0 + 4.0 * i as f64 / 19.0 + 0.013;
                let d = spec.derivatives(z);
                let p = spec.derivatives(z + h);
                let m = spec.derivatives(z - h);
                for k in 0..3 {
                    let fd = (p[k] - m[k]) / (2.0 * h);
                    let scale = d[k + 1].abs().max(1e-3 * spec.scale.powi(k as i32 + 1));
                    assert!((fd - d[k + 1]).abs() / scale < 1e-6, "beta={} z={z} k={k}", spec.scale);
                }
            }
        }
        let relu = ActivationSpec::new(Activation::Relu, 2.0).unwrap();
        assert_eq!(relu.derivatives(0.5), [1.0, 2.0, 0.0, 0.0]);
        assert_eq!(relu.derivatives(-0.5), [0.0; 4]);
    }

    #[test]
    fn second_derivative_matches_fd_of_first() {
        let net = random_net(1, 7, 11, 2.0);
        let h = 1e-5;
        for i in 0..5 {
            let x = -0.8 + 0.37 * i as f64;
            let s = net.eval_stack(&[x], 2).unwrap();
            let p = net.eval_stack(&[x + h], 1).unwrap();
            let m = net.eval_stack(&[x - h], 1).unwrap();
            let fd = (p.gradient()[0] - m.gradient()[0]) / (2.0 * h);
            assert!((fd - s.second()[0]).abs() / s.second()[0].abs().max(1e-2) < 1e-6);
        }
    }

    #[test]
    fn relu_rejects_second_order() {
        let net = ShallowNetwork::new(
            1,
            vec![1.0],
            vec![0.0],
            vec![1.0],
            ActivationSpec::new(Activation::Relu, 1.0).unwrap(),
        )
        .unwrap();
        assert!(net.eval_stack(&[0.3], 1).is_ok());
        assert!(matches!(net.eval_stack(&[0.3], 2), Err(Error::UnsupportedOrder { .. })));
        assert!(net.param_gradient_stack(&[0.3], 0).is_ok());
        assert!(net.param_gradient_stack(&[0.3], 1).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let net = random_net(2, 3, 1, 1.0);
        assert!(matches!(net.eval_stack(&[0.1, 0.2, 0.3], 0), Err(Error::DimensionMismatch { .. })));
        assert!(ShallowNetwork::new(2, vec![1.0; 3], vec![0.0; 2], vec![0.0; 2], ActivationSpec::tanh(1.0)).is_err());
    }

    #[test]
    fn scale_output_is_linear() {
        let net = random_net(2, 6, 5, 1.0);
        let pts = [0.1, 0.2, 0.5, -0.3, -0.9, 0.7];
        let a = net.eval_stack(&pts, 2).unwrap();
        let same = net.scale_output(1.0).eval_stack(&pts, 2).unwrap();
        assert_eq!(a, same);
        let zero = net.scale_output(0.0).eval_stack(&pts, 0).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));
        let b = net.scale_output(2.0).eval_stack(&pts, 0).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(2.0 * x, *y);
        }
    }

    #[test]
    fn param_gradients_match_finite_differences() {
        let h = 1e-5;
        for (dim, seed) in [(1usize, 7u64), (2, 9), (2, 21)] {
            let net = random_net(dim, 4, seed, 1.3);
            let pts: Vec<f64> = (0..3 * dim).map(|i| -0.7 + 0.45 * i as f64).collect();
            let grads = net.param_gradient_stack(&pts, 2).unwrap();
            let n = net.width();
            for p in 0..n * (dim + 1) {
                let bump = |delta: f64| {
                    let mut m = net.clone();
                    if p < dim * n {
                        m.weights_mut()[p] += delta;
                    } else {
                        m.biases_mut()[p - dim * n] += delta;
                    }
                    m.eval_stack(&pts, 2).unwrap()
                };
                let (plus, minus) = (bump(h), bump(-h));
                let analytic = &grads[p];
                let blocks = [
                    (plus.values(), minus.values(), analytic.values()),
                    (plus.gradient(), minus.gradient(), analytic.gradient()),
                    (plus.second(), minus.second(), analytic.second()),
                ];
                for (pl, mi, an) in blocks {
                    for i in 0..an.len() {
                        let fd = (pl[i] - mi[i]) / (2.0 * h);
                        let scale = an[i].abs().max(1e-3);
                        assert!((fd - an[i]).abs() / scale < 1e-6, "dim={dim} p={p} i={i}: {fd} vs {}", an[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_bias_init() {
        let (w, b) = init_hidden(InitStrategy::UniformBias1d, 4, 1, 0).unwrap();
        assert_eq!(w, vec![1.0; 4]);
        assert_eq!(b, vec![-0.25, -0.5, -0.75, -1.0]);
        assert!(init_hidden(InitStrategy::UniformBias1d, 4, 2, 0).is_err());
    }

    #[test]
    fn axis_diagonal_init_uses_four_families() {
        let s = InitStrategy::AxisDiagonal2d { lo: [-1.0, -1.0], hi: [1.0, 1.0] };
        let (w, _) = init_hidden(s, 4, 2, 0).unwrap();
        let dirs: Vec<(f64, f64)> = (0..4).map(|j| (w[j], w[4 + j])).collect();
        for i in 0..4 {
            for j in 0..i {
                assert!((dirs[i].0 - dirs[j].0).abs() + (dirs[i].1 - dirs[j].1).abs() > 1e-3);
            }
        }
        assert!(init_hidden(s, 4, 1, 0).is_err());
    }

    #[test]
    fn box_init_hyperplanes_cut_the_box() {
        let lo = [0.0, 0.0];
        let hi = [1.0, 1.0];
        let (w, b) = init_hidden(InitStrategy::Box { lo, hi }, 100, 2, 42).unwrap();
        for j in 0..100 {
            let vals: Vec<f64> = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
                .iter()
                .map(|c| c[0] * w[j] + c[1] * w[100 + j] + b[j])
                .collect();
            let has_neg = vals.iter().any(|v| *v <= 0.0);
            let has_pos = vals.iter().any(|v| *v >= 0.0);
            assert!(has_neg && has_pos, "unit {j} misses the box");
            let norm = (w[j] * w[j] + w[100 + j] * w[100 + j]).sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
        let again = init_hidden(InitStrategy::Box { lo, hi }, 100, 2, 42).unwrap();
        assert_eq!(again, (w, b));
    }
}
