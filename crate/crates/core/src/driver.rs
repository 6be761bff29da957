//! The outer adaptive loop: estimate, test, augment, solve.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::forms::{SampleBundle, VariationalProblem};
use crate::galerkin::{self, COND_CAP};
use crate::math;
use crate::network::{Activation, ActivationSpec, FieldSample, InitStrategy, ShallowNetwork};
use crate::training::{augment_basis, TrainConfig, TrainRecord};

/// Source of elapsed time in seconds. Only differences are used.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that always reads zero; keeps histories reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

/// Network widths per Galerkin iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum WidthSchedule {
    /// `round(base * ratio^(i-1))`.
    Geometric { base: usize, ratio: f64 },
    /// `base + floor((i-1)/every) * increment`.
    Stepped { base: usize, increment: usize, every: usize },
    /// Explicit list; the last entry repeats.
    List(Vec<usize>),
}

impl WidthSchedule {
    pub fn fixed(n: usize) -> Self {
        WidthSchedule::Geometric { base: n, ratio: 1.0 }
    }

    pub fn at(&self, i: usize) -> usize {
        let k = i.saturating_sub(1);
        match self {
            WidthSchedule::Geometric { base, ratio } => {
                math::floor(*base as f64 * math::powi(*ratio, k as i32) + 0.5) as usize
            }
            WidthSchedule::Stepped { base, increment, every } => base + (k / (*every).max(1)) * increment,
            WidthSchedule::List(v) => v[k.min(v.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            WidthSchedule::Geometric { base, ratio } if *base >= 1 && *ratio >= 1.0 => Ok(()),
            WidthSchedule::Stepped { base, every, .. } if *base >= 1 && *every >= 1 => Ok(()),
            WidthSchedule::List(v) if !v.is_empty() && v.iter().all(|n| *n >= 1) => Ok(()),
            _ => Err(invalid("width schedule needs N >= 1 and r >= 1")),
        }
    }
}

/// Activation scale per Galerkin iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleSchedule {
    /// `start + step * (i-1)`.
    Affine { start: f64, step: f64 },
    /// `offset + factor * ratio^(i-1)`.
    Geometric { offset: f64, factor: f64, ratio: f64 },
    /// Explicit list; the last entry repeats.
    List(Vec<f64>),
}

impl ScaleSchedule {
    pub fn constant(beta: f64) -> Self {
        ScaleSchedule::Affine { start: beta, step: 0.0 }
    }

    pub fn at(&self, i: usize) -> f64 {
        let k = i.saturating_sub(1);
        match self {
            ScaleSchedule::Affine { start, step } => start + step * k as f64,
            ScaleSchedule::Geometric { offset, factor, ratio } => offset + factor * math::powi(*ratio, k as i32),
            ScaleSchedule::List(v) => v[k.min(v.len() - 1)],
        }
    }
}

/// `alpha_i = initial / decay^(i-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRate {
    pub initial: f64,
    pub decay: f64,
}

impl LearningRate {
    pub fn at(&self, i: usize) -> f64 {
        self.initial / math::powi(self.decay, i.saturating_sub(1) as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedules {
    pub width: WidthSchedule,
    pub scale: ScaleSchedule,
    pub learning_rate: LearningRate,
    pub epochs: usize,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Schedules {
    pub fn validate(&self) -> Result<()> {
        self.width.validate()?;
        if !(self.learning_rate.initial > 0.0) || !(self.learning_rate.decay >= 1.0) {
            return Err(invalid("learning rate needs A > 0 and rho >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be >= 1"));
        }
        for i in 1..=self.max_iterations {
            let b = self.scale.at(i);
            if !(b > 0.0) || !b.is_finite() {
                return Err(invalid("activation scale must stay positive"));
            }
        }
        Ok(())
    }
}

/// Everything a run needs besides the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub schedules: Schedules,
    pub activation: Activation,
    pub init: InitStrategy,
    pub seed: u64,
    /// Abort when `cond(K)` of the basis Gram matrix exceeds this.
    pub cond_cap: f64,
}

impl RunOptions {
    pub fn new(schedules: Schedules, init: InitStrategy) -> Self {
        RunOptions {
            schedules,
            activation: Activation::Tanh,
            init,
            seed: 0,
            cond_cap: COND_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TerminationReason {
    TolReached,
    MaxIterations,
    /// Numerical failure; the history up to the failure is kept.
    Degenerate(String),
}

impl TerminationReason {
    pub fn name(&self) -> &'static str {
        match self {
            TerminationReason::TolReached => "tol_reached",
            TerminationReason::MaxIterations => "max_iterations",
            TerminationReason::Degenerate(_) => "degenerate",
        }
    }
}

/// One Galerkin iteration `i`: the estimate `eta(u_{i-1}, phi_i)`, the true
/// errors of `u_{i-1}` and, when `phi_i` was accepted, the state of the
/// solve that produced `u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub width: usize,
    pub scale: f64,
    pub learning_rate: f64,
    pub eta: f64,
    pub l2_eta: f64,
    pub true_l2: Option<f64>,
    pub true_energy: Option<f64>,
    /// `cond(K^(i))` after adding `phi_i`.
    pub cond: Option<f64>,
    /// `max_k |L(phi_k) - a(u_i, phi_k)| / (|L(phi_k)| + 1)`.
    pub orthogonality: Option<f64>,
    /// `| |||phi_i||| - 1 |` on the training rules.
    pub normalization: Option<f64>,
    pub param_norm: f64,
    pub lsq_fallbacks: usize,
    pub accepted: bool,
    pub wall_time: f64,
}

/// Per-epoch record tagged with its Galerkin iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub iteration: usize,
    pub record: TrainRecord,
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub dim: usize,
    /// Energy-normalized basis functions `phi_1, ..., phi_m`.
    pub basis: Vec<ShallowNetwork>,
    /// Coefficients of `u_m = sum_j coeffs_j phi_j`.
    pub coefficients: Vec<f64>,
    /// Row-major Gram matrix of the basis.
    pub gram: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub epochs: Vec<EpochRecord>,
    pub termination: TerminationReason,
}

impl SolverState {
    pub fn iteration(&self) -> usize {
        self.history.len()
    }

    pub fn final_eta(&self) -> Option<f64> {
        self.history.last().map(|r| r.eta)
    }
}

fn combine(bundles: &[SampleBundle], coeffs: &[f64], zero: SampleBundle) -> SampleBundle {
    let mut u = zero;
    for (b, c) in bundles.iter().zip(coeffs) {
        u.axpy(*c, b);
    }
    u
}

fn iteration_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs the adaptive loop with `u_0 = 0`.
pub fn run_adaptive(problem: &VariationalProblem, opts: &RunOptions, clock: &dyn Clock) -> Result<SolverState> {
    run_adaptive_observed(problem, opts, clock, &mut |_| {})
}

/// [`run_adaptive`] calling `observe` after every iteration.
pub fn run_adaptive_observed(
    problem: &VariationalProblem,
    opts: &RunOptions,
    clock: &dyn Clock,
    observe: &mut dyn FnMut(&IterationRecord),
) -> Result<SolverState> {
    opts.schedules.validate()?;
    let train = problem.training();
    let valid = problem.validation();
    let start = clock.now();
    let mut state = SolverState {
        dim: problem.dim(),
        basis: Vec::new(),
        coefficients: Vec::new(),
        gram: Vec::new(),
        history: Vec::new(),
        epochs: Vec::new(),
        termination: TerminationReason::MaxIterations,
    };
    let mut train_bundles: Vec<SampleBundle> = Vec::new();
    let mut valid_bundles: Vec<SampleBundle> = Vec::new();
    let mut u_train = train.zero_bundle();
    let mut u_valid = valid.zero_bundle();
    let s = &opts.schedules;

    for i in 1..=s.max_iterations {
        let (true_l2, true_energy) = match problem.exact {
            Some(_) => {
                let (l2, en) = problem.exact_error(&u_valid)?;
                (Some(l2), Some(en))
            }
            None => (None, None),
        };
        let cfg = TrainConfig {
            width: s.width.at(i),
            activation: ActivationSpec::new(opts.activation, s.scale.at(i))?,
            learning_rate: s.learning_rate.at(i),
            epochs: s.epochs,
            init: opts.init,
            seed: iteration_seed(opts.seed, i),
            iteration: i,
        };
        let mut rec = IterationRecord {
            iteration: i,
            width: cfg.width,
            scale: cfg.activation.scale,
            learning_rate: cfg.learning_rate,
            eta: f64::NAN,
            l2_eta: f64::NAN,
            true_l2,
            true_energy,
            cond: None,
            orthogonality: None,
            normalization: None,
            param_norm: 0.0,
            lsq_fallbacks: 0,
            accepted: false,
            wall_time: 0.0,
        };
        let aug = match augment_basis(problem, &u_train, &cfg, clock) {
            Ok(a) => a,
            Err(e @ (Error::NonFinite { .. } | Error::SolveFailed(_) | Error::ZeroNorm)) => {
                rec.wall_time = clock.now() - start;
                state.history.push(rec);
                state.termination = TerminationReason::Degenerate(format!("{e}"));
                return Ok(state);
            }
            Err(e) => return Err(e),
        };
        state
            .epochs
            .extend(aug.records.iter().map(|r| EpochRecord { iteration: i, record: *r }));
        rec.eta = aug.eta;
        rec.l2_eta = aug.l2_eta;
        rec.lsq_fallbacks = aug.lsq_fallbacks;
        rec.param_norm = aug.records.last().map(|r| r.param_norm).unwrap_or(0.0);

        let phi = match aug.basis {
            Some(phi) if aug.eta > s.tol => phi,
            _ => {
                rec.wall_time = clock.now() - start;
                observe(&rec);
                state.history.push(rec);
                state.termination = TerminationReason::TolReached;
                return Ok(state);
            }
        };
        let pt = train.sample_network(&phi)?;
        let pv = valid.sample_network(&phi)?;
        rec.normalization = Some((train.energy_norm(&pt)?.value - 1.0).abs());
        train_bundles.push(pt);
        valid_bundles.push(pv);
        let sol = match galerkin::galerkin_solve(train, &train_bundles, opts.cond_cap) {
            Ok(sol) => sol,
            Err(e @ (Error::IllConditioned { .. } | Error::SolveFailed(_))) => {
                rec.wall_time = clock.now() - start;
                state.history.push(rec);
                state.termination = TerminationReason::Degenerate(format!("{e}"));
                return Ok(state);
            }
            Err(e) => return Err(e),
        };
        state.basis.push(phi);
        u_train = combine(&train_bundles, &sol.coeffs, train.zero_bundle());
        u_valid = combine(&valid_bundles, &sol.coeffs, valid.zero_bundle());
        rec.cond = Some(sol.cond.value);
        rec.orthogonality = Some(galerkin::orthogonality_residual(train, &u_train, &train_bundles)?);
        rec.accepted = true;
        rec.wall_time = clock.now() - start;
        state.coefficients = sol.coeffs;
        state.gram = sol.system.k;
        observe(&rec);
        state.history.push(rec);
    }
    state.termination = TerminationReason::MaxIterations;
    Ok(state)
}

/// `u_m(x)` and its derivatives up to `order` at `points`.
pub fn evaluate_solution(state: &SolverState, points: &[f64], order: usize) -> Result<FieldSample> {
    let first = state.basis.first().ok_or(Error::EmptyBasis)?;
    let mut out = first.eval_stack(points, order)?;
    out.scale(state.coefficients[0]);
    for (phi, c) in state.basis.iter().zip(&state.coefficients).skip(1) {
        out.axpy(*c, &phi.eval_stack(points, order)?);
    }
    Ok(out)
}

/// Running sum of `n_i^3` over the history, the dominant cost of the
/// least-squares solves.
pub fn cumulative_cost(history: &[IterationRecord]) -> Vec<f64> {
    let mut total = 0.0;
    history
        .iter()
        .map(|r| {
            let n = r.width as f64;
            total += n * n * n;
            total
        })
        .collect()
}

/// Paired runs with fixed and growing widths, identical otherwise.
#[derive(Debug, Clone)]
pub struct StagnationStudy {
    pub fixed: SolverState,
    pub growing: SolverState,
}

/// Runs `opts` once with its own width schedule and once with every width
/// set to `fixed_width`.
pub fn stagnation_study(
    problem: &VariationalProblem,
    opts: &RunOptions,
    fixed_width: usize,
    clock: &dyn Clock,
) -> Result<StagnationStudy> {
    let mut fixed_opts = opts.clone();
    fixed_opts.schedules.width = WidthSchedule::fixed(fixed_width);
    let fixed = run_adaptive(problem, &fixed_opts, clock)?;
    let growing = run_adaptive(problem, opts, clock)?;
    Ok(StagnationStudy { fixed, growing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        let w = WidthSchedule::Geometric { base: 4, ratio: 2.0 };
        assert_eq!((1..=4).map(|i| w.at(i)).collect::<Vec<_>>(), vec![4, 8, 16, 32]);
        let m = WidthSchedule::Stepped { base: 200, increment: 100, every: 2 };
        assert_eq!((1..=5).map(|i| m.at(i)).collect::<Vec<_>>(), vec![200, 200, 300, 300, 400]);
        let l = WidthSchedule::List(vec![3, 5]);
        assert_eq!(l.at(4), 5);
        let b = ScaleSchedule::Geometric { offset: 1.0, factor: 3.0, ratio: 2.0 };
        assert_eq!((1..=3).map(|i| b.at(i)).collect::<Vec<_>>(), vec![4.0, 7.0, 13.0]);
        let a = ScaleSchedule::Affine { start: 1.0, step: 3.0 };
        assert_eq!(a.at(3), 7.0);
        let lr = LearningRate { initial: 2e-2, decay: 1.1 };
        assert!((lr.at(3) - 2e-2 / 1.21).abs() < 1e-17);
    }

    #[test]
    fn invalid_schedules_rejected() {
        let ok = Schedules {
            width: WidthSchedule::fixed(4),
            scale: ScaleSchedule::constant(1.0),
            learning_rate: LearningRate { initial: 1e-2, decay: 1.0 },
            epochs: 1,
            tol: 1e-3,
            max_iterations: 2,
        };
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.tol = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.width = WidthSchedule::Geometric { base: 4, ratio: 0.5 };
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.learning_rate.decay = 0.9;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.max_iterations = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cost_model_accumulates_cubes() {
        let mk = |w| IterationRecord {
            iteration: 1,
            width: w,
            scale: 1.0,
            learning_rate: 1.0,
            eta: 0.0,
            l2_eta: 0.0,
            true_l2: None,
            true_energy: None,
            cond: None,
            orthogonality: None,
            normalization: None,
            param_norm: 0.0,
            lsq_fallbacks: 0,
            accepted: true,
            wall_time: 0.0,
        };
        assert_eq!(cumulative_cost(&[mk(2), mk(3)]), vec![8.0, 35.0]);
    }
}
