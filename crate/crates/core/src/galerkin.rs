//! The two linear systems of the method: least squares over the
//! activations of one network, and the Galerkin projection onto the
//! accumulated basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::Features;
use crate::forms::{Discretization, SampleBundle, VariationalProblem};
use crate::linalg::{self, Condition, SolveMethod};
use crate::math;
use crate::network::ActivationSpec;

pub use crate::linalg::{condition_number, spd_solve};

/// Default cap on `cond(K)` for the basis Gram matrix.
pub const COND_CAP: f64 = 1e12;

/// Per-channel residual weights `rho` with
/// `L(v) - a(u_prev, v) = sum_ch sum_q rho_ch(q) . (op v)(x_q)`.
pub fn residual_weights(disc: &Discretization, u_prev: &SampleBundle) -> Result<Vec<Vec<f64>>> {
    disc.check_bundle(u_prev)?;
    Ok(disc
        .channels()
        .iter()
        .map(|ch| {
            let mut rho = ch.load.clone();
            if ch.a_coef != 0.0 {
                let vals = disc.channel_values(ch, u_prev.sample(ch.rule));
                let w = disc.rules()[ch.rule].weights();
                let m = ch.components;
                for (i, r) in rho.iter_mut().enumerate() {
                    *r -= ch.a_coef * w[i / m] * vals[i];
                }
            }
            rho
        })
        .collect())
}

/// Output coefficients `c` with `sum_j a(sigma_j, sigma_k) c_j = rho(sigma_k)`.
///
/// When the form rows are fewer than the activations and every residual
/// channel is also a form channel, the minimum-norm solution is computed
/// from the smaller row-space system `(S S^T) z = y`, `c = S^T z`.
pub(crate) fn lsq_with_features(
    disc: &Discretization,
    feats: &Features,
    rho: &[Vec<f64>],
) -> Result<(Vec<f64>, SolveMethod)> {
    let n = feats.width();
    let rows: usize = disc
        .channels()
        .iter()
        .filter(|c| c.a_coef != 0.0)
        .map(|c| disc.rules()[c.rule].len() * c.components)
        .sum();
    let row_space = rows < n
        && disc
            .channels()
            .iter()
            .zip(rho)
            .all(|(c, r)| c.a_coef != 0.0 || r.iter().all(|v| *v == 0.0));
    if row_space {
        let (s, m) = feats.stacked_rows(disc);
        let mut y = Vec::with_capacity(m);
        for (ch, r) in disc.channels().iter().zip(rho) {
            if ch.a_coef == 0.0 {
                continue;
            }
            let w = disc.rules()[ch.rule].weights();
            let comps = ch.components;
            for (i, v) in r.iter().enumerate() {
                y.push(v / math::sqrt(ch.a_coef * w[i / comps]));
            }
        }
        let k = linalg::gram_nt(&s, m, n);
        let (z, method) = linalg::spd_solve(&k, m, &y)?;
        return Ok((linalg::mat_t_vec(&s, m, n, &z), method));
    }
    let k = feats.gram(disc);
    let f = feats.project(disc, rho);
    linalg::spd_solve(&k, n, &f)
}

/// Least-squares output layer for hidden parameters `(W, b)`: the `c` that
/// makes the residual of `u_prev` a-orthogonal to every activation.
pub fn galerkin_lsq(
    weights: &[f64],
    biases: &[f64],
    activation: ActivationSpec,
    problem: &VariationalProblem,
    u_prev: &SampleBundle,
) -> Result<Vec<f64>> {
    let disc = problem.training();
    let feats = Features::new(disc, weights, biases, activation)?;
    let rho = residual_weights(disc, u_prev)?;
    Ok(lsq_with_features(disc, &feats, &rho)?.0)
}

/// Gram matrix and load vector of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub size: usize,
    /// Row-major `size x size`.
    pub k: Vec<f64>,
    pub f: Vec<f64>,
}

impl GramSystem {
    pub fn assemble(disc: &Discretization, basis: &[SampleBundle]) -> Result<Self> {
        let m = basis.len();
        let mut k = vec![0.0; m * m];
        let mut f = vec![0.0; m];
        for i in 0..m {
            f[i] = disc.load(&basis[i])?;
            for j in 0..=i {
                let v = disc.bilinear(&basis[i], &basis[j])?;
                k[i * m + j] = v;
                k[j * m + i] = v;
            }
        }
        Ok(GramSystem { size: m, k, f })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSolution {
    pub coeffs: Vec<f64>,
    pub system: GramSystem,
    pub cond: Condition,
    pub method: SolveMethod,
}

/// Projects the solution onto the span of `basis` (sampled on `disc`).
/// Fails when `cond(K)` exceeds `cond_cap`.
pub fn galerkin_solve(disc: &Discretization, basis: &[SampleBundle], cond_cap: f64) -> Result<GalerkinSolution> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let system = GramSystem::assemble(disc, basis)?;
    let cond = linalg::condition_number(&system.k, system.size);
    if !(cond.value <= cond_cap) {
        return Err(Error::IllConditioned {
            cond: cond.value,
            cap: cond_cap,
        });
    }
    let (coeffs, method) = linalg::spd_solve(&system.k, system.size, &system.f)?;
    Ok(GalerkinSolution {
        coeffs,
        system,
        cond,
        method,
    })
}

/// `max_k |L(phi_k) - a(u, phi_k)| / (|L(phi_k)| + 1)`.
pub fn orthogonality_residual(disc: &Discretization, u: &SampleBundle, basis: &[SampleBundle]) -> Result<f64> {
    let mut worst = 0.0f64;
    for phi in basis {
        let l = disc.load(phi)?;
        let r = l - disc.bilinear(u, phi)?;
        worst = worst.max(r.abs() / (l.abs() + 1.0));
    }
    Ok(worst)
}
