//! Basis-function generation: maximize the normalized residual
//! `eta(u_prev, v) = (L(v) - a(u_prev, v)) / |||v|||` over one shallow
//! network, alternating a single Adam step on the hidden parameters with a
//! fresh least-squares solve for the output layer.

use alloc::vec;
use alloc::vec::Vec;

use crate::driver::Clock;
use crate::error::{Error, Result};
use crate::features::Features;
use crate::forms::{Discretization, SampleBundle, VariationalProblem};
use crate::galerkin::{lsq_with_features, residual_weights};
use crate::linalg::SolveMethod;
use crate::math;
use crate::network::{init_hidden, ActivationSpec, InitStrategy, ShallowNetwork};

/// Hyperparameters of one call to [`augment_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub width: usize,
    pub activation: ActivationSpec,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init: InitStrategy,
    pub seed: u64,
    /// Galerkin iteration this call belongs to; only used in diagnostics.
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainRecord {
    pub epoch: usize,
    pub eta: f64,
    /// `||v||_L2` of the unnormalized least-squares network.
    pub l2_eta: f64,
    pub param_norm: f64,
    pub wall_time: f64,
}

/// Adam with the usual defaults `beta1 = 0.9`, `beta2 = 0.999`,
/// `eps = 1e-8`. [`step`](Self::step) descends along the given gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step_count: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize, learning_rate: f64) -> Self {
        AdamState {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step_count: 0,
            first: vec![0.0; len],
            second: vec![0.0; len],
        }
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.first
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.second
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        debug_assert_eq!(params.len(), grad.len());
        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - math::powi(self.beta1, t);
        let bc2 = 1.0 - math::powi(self.beta2, t);
        for i in 0..params.len() {
            let g = grad[i];
            self.first[i] = self.beta1 * self.first[i] + (1.0 - self.beta1) * g;
            self.second[i] = self.beta2 * self.second[i] + (1.0 - self.beta2) * g * g;
            let m = self.first[i] / bc1;
            let v = self.second[i] / bc2;
            params[i] -= self.learning_rate * m / (math::sqrt(v) + self.eps);
        }
    }
}

/// Result of one basis-generation run.
#[derive(Debug, Clone)]
pub struct Augmentation {
    /// `v / |||v|||`, or `None` when the residual vanishes on every
    /// network tried.
    pub basis: Option<ShallowNetwork>,
    pub eta: f64,
    pub l2_eta: f64,
    pub records: Vec<TrainRecord>,
    /// Least-squares solves that needed a regularized fallback.
    pub lsq_fallbacks: usize,
}

struct Evaluation {
    eta: f64,
    norm: f64,
    values: Vec<Vec<f64>>,
}

/// Residual weights of a fixed `u_prev` on the training discretization.
struct Objective<'a> {
    disc: &'a Discretization,
    rho: Vec<Vec<f64>>,
}

impl<'a> Objective<'a> {
    fn new(problem: &'a VariationalProblem, u_prev: &SampleBundle) -> Result<Self> {
        let disc = problem.training();
        Ok(Objective {
            disc,
            rho: residual_weights(disc, u_prev)?,
        })
    }

    fn is_zero(&self) -> bool {
        self.rho.iter().all(|r| r.iter().all(|v| *v == 0.0))
    }

    fn evaluate(&self, feats: &Features, c: &[f64]) -> Evaluation {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut values = Vec::with_capacity(self.disc.channels().len());
        for (ch, rho) in self.disc.channels().iter().zip(&self.rho) {
            let v = feats.channel_values(self.disc, ch, c);
            num += rho.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
            if ch.a_coef != 0.0 {
                let w = self.disc.rules()[ch.rule].weights();
                let m = ch.components;
                let s: f64 = v.iter().enumerate().map(|(i, x)| w[i / m] * x * x).sum();
                den += ch.a_coef * s;
            }
            values.push(v);
        }
        let norm = math::sqrt(den.max(0.0));
        let eta = if norm > 0.0 { num / norm } else { 0.0 };
        Evaluation { eta, norm, values }
    }

    /// `d eta / d(W, b)` with `c` frozen.
    fn gradient(&self, feats: &Features, c: &[f64], ev: &Evaluation) -> Result<Vec<f64>> {
        if !(ev.norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let s = ev.eta / ev.norm;
        let lambda: Vec<Vec<f64>> = self
            .disc
            .channels()
            .iter()
            .zip(&self.rho)
            .zip(&ev.values)
            .map(|((ch, rho), v)| {
                let w = self.disc.rules()[ch.rule].weights();
                let m = ch.components;
                rho.iter()
                    .zip(v)
                    .enumerate()
                    .map(|(i, (r, x))| r - s * ch.a_coef * w[i / m] * x)
                    .collect()
            })
            .collect();
        let mut g = feats.param_gradient(self.disc, c, &lambda)?;
        g.iter_mut().for_each(|x| *x /= ev.norm);
        Ok(g)
    }
}

/// `eta(u_prev, v)` on the training rules.
pub fn eta(problem: &VariationalProblem, u_prev: &SampleBundle, v: &ShallowNetwork) -> Result<f64> {
    let vb = problem.training().sample_network(v)?;
    let norm = problem.energy_norm(&vb)?.value;
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(problem.residual(u_prev, &vb)? / norm)
}

/// Gradient of [`eta`] with respect to the hidden parameters of `net`, its
/// output layer held fixed. Layout: `W` row-major, then `b`.
pub fn eta_gradient(problem: &VariationalProblem, u_prev: &SampleBundle, net: &ShallowNetwork) -> Result<Vec<f64>> {
    let obj = Objective::new(problem, u_prev)?;
    let feats = Features::new(obj.disc, net.weights(), net.biases(), net.activation())?;
    let ev = obj.evaluate(&feats, net.coeffs());
    obj.gradient(&feats, net.coeffs(), &ev)
}

fn l2_of(disc: &Discretization, feats: &Features, c: &[f64]) -> f64 {
    let w = disc.rules()[0].weights();
    let v = feats.values(disc, 0, c);
    math::sqrt(w.iter().zip(&v).map(|(a, b)| a * b * b).sum())
}

fn param_norm(params: &[f64], split: usize, c: &[f64]) -> f64 {
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    max_abs(&params[..split]) + max_abs(&params[split..]) + max_abs(c)
}

/// Trains one network to approximate the normalized error direction of
/// `u_prev` and returns it normalized in the energy norm, together with
/// the estimate `eta(u_prev, phi)`.
pub fn augment_basis(
    problem: &VariationalProblem,
    u_prev: &SampleBundle,
    cfg: &TrainConfig,
    clock: &dyn Clock,
) -> Result<Augmentation> {
    let start = clock.now();
    let obj = Objective::new(problem, u_prev)?;
    let dim = problem.dim();
    if obj.is_zero() {
        return Ok(Augmentation {
            basis: None,
            eta: 0.0,
            l2_eta: 0.0,
            records: vec![TrainRecord {
                epoch: 0,
                eta: 0.0,
                l2_eta: 0.0,
                param_norm: 0.0,
                wall_time: clock.now() - start,
            }],
            lsq_fallbacks: 0,
        });
    }
    let n = cfg.width;
    let (w, b) = init_hidden(cfg.init, n, dim, cfg.seed)?;
    let split = w.len();
    let mut params = w;
    params.extend_from_slice(&b);
    let mut adam = AdamState::new(params.len(), cfg.learning_rate);
    let mut fallbacks = 0;
    let non_finite = |epoch| Error::NonFinite {
        iteration: cfg.iteration,
        epoch,
    };

    let solve = |params: &[f64], fallbacks: &mut usize| -> Result<(Features, Vec<f64>)> {
        let feats = Features::new(obj.disc, &params[..split], &params[split..], cfg.activation)?;
        let (c, method) = lsq_with_features(obj.disc, &feats, &obj.rho)?;
        if method != SolveMethod::Cholesky {
            *fallbacks += 1;
        }
        Ok((feats, c))
    };

    let (mut feats, mut c) = solve(&params, &mut fallbacks)?;
    let mut ev = obj.evaluate(&feats, &c);
    let mut records = Vec::with_capacity(cfg.epochs + 1);
    let mut record = |epoch: usize, ev: &Evaluation, feats: &Features, c: &[f64], params: &[f64]| -> Result<()> {
        let rec = TrainRecord {
            epoch,
            eta: ev.eta,
            l2_eta: l2_of(obj.disc, feats, c),
            param_norm: param_norm(params, split, c),
            wall_time: clock.now() - start,
        };
        if !rec.eta.is_finite() || !rec.param_norm.is_finite() {
            return Err(non_finite(epoch));
        }
        records.push(rec);
        Ok(())
    };
    record(0, &ev, &feats, &c, &params)?;

    for epoch in 1..=cfg.epochs {
        if !(ev.norm > 0.0) {
            break;
        }
        let mut g = obj.gradient(&feats, &c, &ev)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(non_finite(epoch));
        }
        // ascend eta
        g.iter_mut().for_each(|v| *v = -*v);
        adam.step(&mut params, &g);
        if params.iter().any(|v| !v.is_finite()) {
            return Err(non_finite(epoch));
        }
        let (f, cc) = solve(&params, &mut fallbacks)?;
        feats = f;
        c = cc;
        ev = obj.evaluate(&feats, &c);
        record(epoch, &ev, &feats, &c, &params)?;
    }

    let l2_eta = l2_of(obj.disc, &feats, &c);
    if !(ev.norm > 0.0) {
        return Ok(Augmentation {
            basis: None,
            eta: 0.0,
            l2_eta: 0.0,
            records,
            lsq_fallbacks: fallbacks,
        });
    }
    let v = ShallowNetwork::new(
        dim,
        params[..split].to_vec(),
        params[split..].to_vec(),
        c,
        cfg.activation,
    )?;
    let phi = v.scale_output(1.0 / ev.norm);
    if !phi.is_finite() {
        return Err(non_finite(cfg.epochs));
    }
    Ok(Augmentation {
        basis: Some(phi),
        eta: ev.eta,
        l2_eta,
        records,
        lsq_fallbacks: fallbacks,
    })
}
