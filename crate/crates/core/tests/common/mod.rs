#![allow(dead_code)]

use galerkin_nn::catalog::{self, QuadratureOverrides};
use galerkin_nn::forms::{DiffOp, Domain, FormKind, FormTerm, LoadKind, LoadTerm, ProblemSpec, Source};
use galerkin_nn::network::init_hidden;
use galerkin_nn::quadrature::gauss_legendre_on;
use galerkin_nn::{eta, ActivationSpec, InitStrategy, SampleBundle, ShallowNetwork, VariationalProblem};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

/// Random tanh network whose hyperplanes cross the problem's bounding box.
pub fn random_net(p: &VariationalProblem, width: usize, rng: &mut Rng) -> ShallowNetwork {
    let (lo, hi) = p.domain.bounding_box();
    let d = p.dim();
    let seed = rng.0.next_u64();
    let (mut w, b) = init_hidden(InitStrategy::Box { lo, hi }, width, d, seed).unwrap();
    // vary the steepness per unit
    let mut b = b;
    for j in 0..width {
        let s = rng.uniform(0.5, 3.0);
        for k in 0..d {
            w[k * width + j] *= s;
        }
        b[j] *= s;
    }
    let c = (0..width).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let beta = rng.uniform(0.7, 2.0);
    ShallowNetwork::new(d, w, b, c, ActivationSpec::tanh(beta)).unwrap()
}

/// L2 fit of `f` on (0, 1) with an `n`-point Gauss-Legendre rule.
pub fn fit_problem(n: usize, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> VariationalProblem {
    let rule = gauss_legendre_on(n, 0.0, 1.0).unwrap();
    VariationalProblem::new(
        ProblemSpec {
            name: "fit".into(),
            domain: Domain::Interval { a: 0.0, b: 1.0 },
            form_kind: FormKind::L2Fit,
            load_kind: LoadKind::Density,
            penalties: vec![],
            terms: vec![FormTerm { rule: 0, op: DiffOp::Value, coef: 1.0 }],
            loads: vec![LoadTerm { rule: 0, op: DiffOp::Value, coef: 1.0, source: Source::field(move |x| f(x[0])) }],
            exact: None,
        },
        vec![rule.clone()],
        vec![rule],
    )
    .unwrap()
}

/// Central differences of `eta` over every hidden parameter of `net`.
pub fn fd_gradient(p: &VariationalProblem, u: &SampleBundle, net: &ShallowNetwork, h: f64) -> Vec<f64> {
    let nw = net.weights().len();
    let nb = net.biases().len();
    let mut out = Vec::with_capacity(nw + nb);
    for i in 0..nw + nb {
        let shift = |s: f64| {
            let mut m = net.clone();
            if i < nw {
                m.weights_mut()[i] += s;
            } else {
                m.biases_mut()[i - nw] += s;
            }
            eta(p, u, &m).unwrap()
        };
        out.push((shift(h) - shift(-h)) / (2.0 * h));
    }
    out
}

pub fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / norm
}

/// Catalog problem with a coarse interior rule and at most 32 boundary nodes.
pub fn small(name: &str, interior: usize) -> VariationalProblem {
    let ov = QuadratureOverrides {
        interior: Some(interior),
        boundary: catalog::default_sizes(name).unwrap().boundary.map(|b| b.min(32)),
        ..Default::default()
    };
    catalog::build(name, &ov).unwrap()
}

/// Worst relative weak residual `|L(v) - a(u, v)| / (|L(v)| + |a(u, v)|)` of
/// the exact solution over `nets` random width-6 networks.
pub fn consistency(p: &VariationalProblem, nets: usize, seed: u64) -> f64 {
    let mut rng = Rng::new(seed);
    let d = p.validation();
    let u = d.sample_exact(p.exact.as_ref().unwrap());
    let mut worst = 0.0f64;
    for _ in 0..nets {
        let v = d.sample_network(&random_net(p, 6, &mut rng)).unwrap();
        let l = d.load(&v).unwrap();
        let a = d.bilinear(&u, &v).unwrap();
        worst = worst.max((l - a).abs() / (l.abs() + a.abs()));
    }
    worst
}
