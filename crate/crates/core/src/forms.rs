//! Symmetric coercive variational problems `a(u, v) = L(v)` evaluated on
//! sampled fields.
//!
//! A problem is a list of bilinear terms `coef * (D u, D v)_rule` and load
//! terms `coef * (g, D v)_rule`. Terms that share a rule and a derivative
//! operator are merged into a [`Channel`]; the bilinear form is the weighted
//! sum over channels of `sum_q w_q (D u)(x_q) . (D v)(x_q)` and the load is
//! the dot product of the channel's load vector with `D v`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::math;
use crate::network::{FieldSample, ShallowNetwork};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    L2Fit,
    H1Penalty,
    H2Penalty,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::L2Fit => "l2_fit",
            FormKind::H1Penalty => "h1_penalty",
            FormKind::H2Penalty => "h2_penalty",
        }
    }

    pub fn required_order(self) -> usize {
        match self {
            FormKind::L2Fit => 0,
            FormKind::H1Penalty => 1,
            FormKind::H2Penalty => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadKind {
    Density,
    LineSource,
    PointValue,
    PointDerivative,
}

impl LoadKind {
    pub fn name(self) -> &'static str {
        match self {
            LoadKind::Density => "density",
            LoadKind::LineSource => "line_source",
            LoadKind::PointValue => "point_value",
            LoadKind::PointDerivative => "point_derivative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Disk { radius: f64 },
    /// `(-1,1)^2` minus `(-1,0]^2`.
    LShape,
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Closed-domain membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Domain::Interval { a, b } => x[0] >= a && x[0] <= b,
            Domain::Disk { radius } => x[0] * x[0] + x[1] * x[1] <= radius * radius * (1.0 + 1e-14),
            Domain::LShape => {
                let inside_box = x[0].abs() <= 1.0 && x[1].abs() <= 1.0;
                inside_box && !(x[0] < 0.0 && x[1] < 0.0)
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`; 1D domains use the first entry.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            Domain::Interval { a, b } => ([a, 0.0], [b, 0.0]),
            Domain::Disk { radius } => ([-radius, -radius], [radius, radius]),
            Domain::LShape => ([-1.0, -1.0], [1.0, 1.0]),
        }
    }
}

/// Spatial derivative a form term acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOp {
    Value,
    /// Partial derivative along one coordinate.
    Derivative(usize),
    /// Full gradient; the term contributes `grad u . grad v`.
    Gradient,
    /// `v''` in 1D, `v_xx + v_yy` in 2D.
    Laplacian,
    /// Radial derivative `grad v . x / |x|`, the outward normal derivative
    /// on circles centered at the origin.
    Normal,
}

impl DiffOp {
    pub fn order(self) -> usize {
        match self {
            DiffOp::Value => 0,
            DiffOp::Derivative(_) | DiffOp::Gradient | DiffOp::Normal => 1,
            DiffOp::Laplacian => 2,
        }
    }

    /// Number of components the operator produces at each node.
    pub fn components(self, dim: usize) -> usize {
        match self {
            DiffOp::Gradient => dim,
            _ => 1,
        }
    }

    fn normalized(self, dim: usize) -> Result<DiffOp> {
        match self {
            DiffOp::Gradient if dim == 1 => Ok(DiffOp::Derivative(0)),
            DiffOp::Derivative(k) if k >= dim => Err(invalid("derivative index exceeds dimension")),
            DiffOp::Normal if dim != 2 => Err(invalid("normal derivatives are only defined in 2D")),
            op => Ok(op),
        }
    }

    /// Applies the operator to sample `q` of `s` located at `x`, writing
    /// the components to `out`.
    #[inline]
    pub fn apply(self, s: &FieldSample, x: &[f64], q: usize, out: &mut [f64; 2]) {
        match self {
            DiffOp::Value => out[0] = s.value(q),
            DiffOp::Derivative(k) => out[0] = s.grad(q, k),
            DiffOp::Gradient => {
                for k in 0..s.dim() {
                    out[k] = s.grad(q, k);
                }
            }
            DiffOp::Laplacian => out[0] = s.laplacian(q),
            DiffOp::Normal => {
                let r = math::sqrt(x[0] * x[0] + x[1] * x[1]);
                out[0] = if r > 0.0 {
                    (s.grad(q, 0) * x[0] + s.grad(q, 1) * x[1]) / r
                } else {
                    0.0
                };
            }
        }
    }
}

/// Value and derivatives of a closed-form function at one point. Second
/// derivatives use the [`FieldSample`] layout.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub second: [f64; 3],
}

type JetFn = dyn Fn(&[f64]) -> Jet + Send + Sync;
type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Closed-form solution with derivatives through order two.
#[derive(Clone)]
pub struct ExactSolution(Arc<JetFn>);

impl ExactSolution {
    pub fn new(f: impl Fn(&[f64]) -> Jet + Send + Sync + 'static) -> Self {
        ExactSolution(Arc::new(f))
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        (self.0)(x)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.0)(x).value
    }

    /// Samples the solution at the nodes of `rule`.
    pub fn sample(&self, rule: &QuadratureRule, order: usize) -> FieldSample {
        let d = rule.dim();
        let n = rule.len();
        let sc = crate::network::second_count(d);
        let mut values = Vec::with_capacity(n);
        let mut gradient = Vec::new();
        let mut second = Vec::new();
        for q in 0..n {
            let j = self.jet(rule.point(q));
            values.push(j.value);
            if order >= 1 {
                gradient.extend_from_slice(&j.grad[..d]);
            }
            if order >= 2 {
                second.extend_from_slice(&j.second[..sc]);
            }
        }
        FieldSample::from_parts(d, order.min(2), values, gradient, second)
            .expect("sample blocks are sized by construction")
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution(..)")
    }
}

/// Data multiplying the test function in a load term.
#[derive(Clone)]
pub enum Source {
    Constant(f64),
    Field(Arc<ScalarFn>),
}

impl Source {
    pub fn field(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Source::Field(Arc::new(f))
    }

    pub fn at(&self, x: &[f64]) -> f64 {
        match self {
            Source::Constant(c) => *c,
            Source::Field(f) => f(x),
        }
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Constant(c) => write!(f, "Constant({c})"),
            Source::Field(_) => f.write_str("Field(..)"),
        }
    }
}

/// `coef * sum_q w_q (op u)(x_q) . (op v)(x_q)` over rule `rule`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormTerm {
    pub rule: usize,
    pub op: DiffOp,
    pub coef: f64,
}

/// `coef * sum_q w_q g(x_q) (op v)(x_q)` over rule `rule`. Point functionals
/// use a point-set rule with unit weights.
#[derive(Debug, Clone)]
pub struct LoadTerm {
    pub rule: usize,
    pub op: DiffOp,
    pub coef: f64,
    pub source: Source,
}

/// Merged form and load data for one (rule, operator) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub rule: usize,
    pub op: DiffOp,
    /// Sum of bilinear coefficients on this pair (zero for load-only pairs).
    pub a_coef: f64,
    /// Per-node load weights `coef * w_q * g(x_q)`, `components` entries
    /// per node; all zero when no load acts on this pair.
    pub load: Vec<f64>,
    pub components: usize,
}

impl Channel {
    pub fn has_load(&self) -> bool {
        self.load.iter().any(|v| *v != 0.0)
    }
}

/// The rules of one problem at one resolution together with the compiled
/// channels.
#[derive(Debug, Clone)]
pub struct Discretization {
    dim: usize,
    rules: Vec<QuadratureRule>,
    channels: Vec<Channel>,
    orders: Vec<usize>,
}

impl Discretization {
    fn compile(dim: usize, rules: Vec<QuadratureRule>, terms: &[FormTerm], loads: &[LoadTerm]) -> Result<Self> {
        if rules.iter().any(|r| r.dim() != dim) {
            return Err(invalid("rule dimension differs from problem dimension"));
        }
        let mut channels: Vec<Channel> = Vec::new();
        let find = |channels: &mut Vec<Channel>, rule: usize, op: DiffOp| -> Result<usize> {
            if rule >= rules.len() {
                return Err(invalid("form term refers to a missing rule"));
            }
            if let Some(i) = channels.iter().position(|c| c.rule == rule && c.op == op) {
                return Ok(i);
            }
            let components = op.components(dim);
            channels.push(Channel {
                rule,
                op,
                a_coef: 0.0,
                load: vec![0.0; rules[rule].len() * components],
                components,
            });
            Ok(channels.len() - 1)
        };
        for t in terms {
            if !(t.coef > 0.0) || !t.coef.is_finite() {
                return Err(invalid("bilinear coefficients must be positive"));
            }
            let op = t.op.normalized(dim)?;
            let i = find(&mut channels, t.rule, op)?;
            channels[i].a_coef += t.coef;
        }
        for l in loads {
            let op = l.op.normalized(dim)?;
            if op.components(dim) != 1 {
                return Err(invalid("load terms act on scalar operators"));
            }
            let i = find(&mut channels, l.rule, op)?;
            let rule = &rules[l.rule];
            for q in 0..rule.len() {
                channels[i].load[q] += l.coef * rule.weights()[q] * l.source.at(rule.point(q));
            }
        }
        let mut orders = vec![0usize; rules.len()];
        for c in &channels {
            orders[c.rule] = orders[c.rule].max(c.op.order());
        }
        Ok(Discretization {
            dim,
            rules,
            channels,
            orders,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rules(&self) -> &[QuadratureRule] {
        &self.rules
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Derivative order each rule must be sampled at.
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Total number of quadrature nodes over all rules.
    pub fn node_count(&self) -> usize {
        self.rules.iter().map(|r| r.len()).sum()
    }

    pub fn sample_network(&self, net: &ShallowNetwork) -> Result<SampleBundle> {
        let samples = self
            .rules
            .iter()
            .zip(&self.orders)
            .map(|(r, &o)| net.eval_stack(r.points(), o))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleBundle { samples })
    }

    pub fn sample_exact(&self, exact: &ExactSolution) -> SampleBundle {
        SampleBundle {
            samples: self
                .rules
                .iter()
                .zip(&self.orders)
                .map(|(r, &o)| exact.sample(r, o))
                .collect(),
        }
    }

    pub fn zero_bundle(&self) -> SampleBundle {
        SampleBundle {
            samples: self
                .rules
                .iter()
                .zip(&self.orders)
                .map(|(r, &o)| FieldSample::zeros(self.dim, r.len(), o))
                .collect(),
        }
    }

    pub fn check_bundle(&self, b: &SampleBundle) -> Result<()> {
        if b.samples.len() != self.rules.len() {
            return Err(Error::MissingSamples(
                "bundle has a different number of rules".to_string(),
            ));
        }
        for ((s, r), &o) in b.samples.iter().zip(&self.rules).zip(&self.orders) {
            if s.len() != r.len() {
                return Err(Error::MissingSamples("sample count differs from rule size".to_string()));
            }
            if s.order() < o {
                return Err(Error::MissingSamples("sample derivative order too low".to_string()));
            }
            if s.dim() != self.dim {
                return Err(Error::MissingSamples("sample dimension differs".to_string()));
            }
        }
        Ok(())
    }

    /// Operator values of `s` on channel `ch`, `components` entries per node.
    pub fn channel_values(&self, ch: &Channel, s: &FieldSample) -> Vec<f64> {
        let rule = &self.rules[ch.rule];
        let m = ch.components;
        let mut out = vec![0.0; rule.len() * m];
        let mut buf = [0.0; 2];
        for q in 0..rule.len() {
            ch.op.apply(s, rule.point(q), q, &mut buf);
            out[q * m..(q + 1) * m].copy_from_slice(&buf[..m]);
        }
        out
    }

    /// `a(u, v)`.
    pub fn bilinear(&self, u: &SampleBundle, v: &SampleBundle) -> Result<f64> {
        self.check_bundle(u)?;
        self.check_bundle(v)?;
        let mut total = 0.0;
        let (mut bu, mut bv) = ([0.0; 2], [0.0; 2]);
        for ch in &self.channels {
            if ch.a_coef == 0.0 {
                continue;
            }
            let rule = &self.rules[ch.rule];
            let (su, sv) = (&u.samples[ch.rule], &v.samples[ch.rule]);
            let mut acc = 0.0;
            for q in 0..rule.len() {
                let x = rule.point(q);
                ch.op.apply(su, x, q, &mut bu);
                ch.op.apply(sv, x, q, &mut bv);
                let dot: f64 = (0..ch.components).map(|k| bu[k] * bv[k]).sum();
                acc += rule.weights()[q] * dot;
            }
            total += ch.a_coef * acc;
        }
        Ok(total)
    }

    /// `L(v)`.
    pub fn load(&self, v: &SampleBundle) -> Result<f64> {
        self.check_bundle(v)?;
        let mut total = 0.0;
        let mut bv = [0.0; 2];
        for ch in &self.channels {
            if !ch.has_load() {
                continue;
            }
            let rule = &self.rules[ch.rule];
            let sv = &v.samples[ch.rule];
            for q in 0..rule.len() {
                ch.op.apply(sv, rule.point(q), q, &mut bv);
                total += ch.load[q] * bv[0];
            }
        }
        Ok(total)
    }

    /// `L(v) - a(u_prev, v)`.
    pub fn residual(&self, u_prev: &SampleBundle, v: &SampleBundle) -> Result<f64> {
        Ok(self.load(v)? - self.bilinear(u_prev, v)?)
    }

    /// `sqrt(a(v, v))`. Slightly negative values from rounding are clamped
    /// to zero; anything below `-1e-12` is an error.
    pub fn energy_norm(&self, v: &SampleBundle) -> Result<EnergyValue> {
        let a = self.bilinear(v, v)?;
        if a < -1e-12 {
            return Err(Error::NotPositive(a));
        }
        Ok(EnergyValue {
            value: math::sqrt(a.max(0.0)),
        })
    }

    /// L2 norm over the domain rule (rule 0).
    pub fn l2_norm(&self, v: &SampleBundle) -> f64 {
        let r = &self.rules[0];
        let s = &v.samples[0];
        let sum: f64 = r.weights().iter().zip(s.values()).map(|(w, x)| w * x * x).sum();
        math::sqrt(sum)
    }
}

/// Samples of one function on every rule of a [`Discretization`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBundle {
    samples: Vec<FieldSample>,
}

impl SampleBundle {
    pub fn new(samples: Vec<FieldSample>) -> Self {
        SampleBundle { samples }
    }

    pub fn samples(&self) -> &[FieldSample] {
        &self.samples
    }

    pub fn sample(&self, rule: usize) -> &FieldSample {
        &self.samples[rule]
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SampleBundle) {
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            a.axpy(alpha, b);
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.samples.iter_mut().for_each(|s| s.scale(alpha));
    }

    pub fn scaled(&self, alpha: f64) -> SampleBundle {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }
}

/// An energy norm `|||v|||`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EnergyValue {
    pub value: f64,
}

/// Everything needed to assemble a problem except the rules themselves.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub form_kind: FormKind,
    pub load_kind: LoadKind,
    /// Named penalty parameters, e.g. `("eps", 1e-4)`.
    pub penalties: Vec<(String, f64)>,
    pub terms: Vec<FormTerm>,
    pub loads: Vec<LoadTerm>,
    pub exact: Option<ExactSolution>,
}

/// A variational problem with its training and validation discretizations.
///
/// Both rule lists share one layout: rule 0 is the domain rule; the others
/// are boundaries, interfaces or point sets referred to by index from the
/// terms.
#[derive(Debug, Clone)]
pub struct VariationalProblem {
    pub name: String,
    pub domain: Domain,
    pub form_kind: FormKind,
    pub load_kind: LoadKind,
    pub penalties: Vec<(String, f64)>,
    pub terms: Vec<FormTerm>,
    pub loads: Vec<LoadTerm>,
    pub exact: Option<ExactSolution>,
    training: Discretization,
    validation: Discretization,
}

impl VariationalProblem {
    pub fn new(spec: ProblemSpec, training: Vec<QuadratureRule>, validation: Vec<QuadratureRule>) -> Result<Self> {
        if spec.penalties.iter().any(|(_, p)| !(*p > 0.0)) {
            return Err(invalid("penalty parameters must be positive"));
        }
        if training.is_empty() || training.len() != validation.len() {
            return Err(invalid("training and validation rule lists must have the same layout"));
        }
        let dim = spec.domain.dim();
        let max_order = spec
            .terms
            .iter()
            .map(|t| t.op.order())
            .chain(spec.loads.iter().map(|l| l.op.order()))
            .max()
            .unwrap_or(0);
        if max_order > spec.form_kind.required_order() {
            return Err(invalid("term order exceeds the form kind's derivative order"));
        }
        for rules in [&training, &validation] {
            for l in &spec.loads {
                if let Some(r) = rules.get(l.rule) {
                    if r.tag() == crate::quadrature::DomainTag::PointSet {
                        for q in 0..r.len() {
                            let p = r.point(q);
                            if !spec.domain.contains(p) {
                                let mut at = [0.0; 2];
                                at[..dim].copy_from_slice(p);
                                return Err(Error::PointOutsideDomain(at));
                            }
                        }
                    }
                }
            }
        }
        let training = Discretization::compile(dim, training, &spec.terms, &spec.loads)?;
        let validation = Discretization::compile(dim, validation, &spec.terms, &spec.loads)?;
        Ok(VariationalProblem {
            name: spec.name,
            domain: spec.domain,
            form_kind: spec.form_kind,
            load_kind: spec.load_kind,
            penalties: spec.penalties,
            terms: spec.terms,
            loads: spec.loads,
            exact: spec.exact,
            training,
            validation,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn derivative_order(&self) -> usize {
        self.form_kind.required_order()
    }

    pub fn training(&self) -> &Discretization {
        &self.training
    }

    pub fn validation(&self) -> &Discretization {
        &self.validation
    }

    pub fn penalty(&self, name: &str) -> Option<f64> {
        self.penalties.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// `a(u, v)` on the training rules.
    pub fn bilinear(&self, u: &SampleBundle, v: &SampleBundle) -> Result<f64> {
        self.training.bilinear(u, v)
    }

    pub fn load(&self, v: &SampleBundle) -> Result<f64> {
        self.training.load(v)
    }

    pub fn residual(&self, u_prev: &SampleBundle, v: &SampleBundle) -> Result<f64> {
        self.training.residual(u_prev, v)
    }

    pub fn energy_norm(&self, v: &SampleBundle) -> Result<EnergyValue> {
        self.training.energy_norm(v)
    }

    /// `(||u - u_num||_L2, |||u - u_num|||)` for samples on the validation
    /// rules.
    pub fn exact_error(&self, u_num: &SampleBundle) -> Result<(f64, f64)> {
        let exact = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::NoExactSolution(self.name.clone()))?;
        self.validation.check_bundle(u_num)?;
        let mut e = self.validation.sample_exact(exact);
        e.axpy(-1.0, u_num);
        let l2 = self.validation.l2_norm(&e);
        let energy = self.validation.energy_norm(&e)?.value;
        Ok((l2, energy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_legendre_on, QuadratureRule};

    fn poly_sample(rule: &QuadratureRule, coeffs: &[f64], order: usize) -> FieldSample {
        // 1D polynomial sum c_k x^k
        let mut v = Vec::new();
        let mut g = Vec::new();
        let mut s = Vec::new();
        for q in 0..rule.len() {
            let x = rule.point(q)[0];
            let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
            for (k, c) in coeffs.iter().enumerate() {
                let k = k as i32;
                p += c * x.powi(k);
                if k >= 1 {
                    dp += c * k as f64 * x.powi(k - 1);
                }
                if k >= 2 {
                    ddp += c * (k * (k - 1)) as f64 * x.powi(k - 2);
                }
            }
            v.push(p);
            if order >= 1 {
                g.push(dp);
            }
            if order >= 2 {
                s.push(ddp);
            }
        }
        FieldSample::from_parts(1, order, v, g, s).unwrap()
    }

    fn ends() -> QuadratureRule {
        QuadratureRule::point_set(1, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap()
    }

    fn spec_1d(form_kind: FormKind, terms: Vec<FormTerm>, loads: Vec<LoadTerm>) -> ProblemSpec {
        ProblemSpec {
            name: "t".into(),
            domain: Domain::Interval { a: 0.0, b: 1.0 },
            form_kind,
            load_kind: LoadKind::Density,
            penalties: vec![],
            terms,
            loads,
            exact: None,
        }
    }

    fn bundle(p: &VariationalProblem, coeffs: &[f64]) -> SampleBundle {
        let d = p.training();
        SampleBundle::new(
            d.rules()
                .iter()
                .zip(d.orders())
                .map(|(r, &o)| poly_sample(r, coeffs, o))
                .collect(),
        )
    }

    #[test]
    fn l2_fit_constant() {
        let rule = gauss_legendre_on(8, 0.0, 1.0).unwrap();
        let p = VariationalProblem::new(
            spec_1d(
                FormKind::L2Fit,
                vec![FormTerm { rule: 0, op: DiffOp::Value, coef: 1.0 }],
                vec![],
            ),
            vec![rule.clone()],
            vec![rule],
        )
        .unwrap();
        let one = bundle(&p, &[1.0]);
        assert!((p.bilinear(&one, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!((p.energy_norm(&one).unwrap().value - 1.0).abs() < 1e-14);
        let zero = bundle(&p, &[0.0]);
        assert_eq!(p.energy_norm(&zero).unwrap().value, 0.0);
    }

    #[test]
    fn h1_penalty_hand_values() {
        let rule = gauss_legendre_on(8, 0.0, 1.0).unwrap();
        let p = VariationalProblem::new(
            spec_1d(
                FormKind::H1Penalty,
                vec![
                    FormTerm { rule: 0, op: DiffOp::Gradient, coef: 1.0 },
                    FormTerm { rule: 1, op: DiffOp::Value, coef: 1.0 },
                ],
                vec![],
            ),
            vec![rule.clone(), ends()],
            vec![rule, ends()],
        )
        .unwrap();
        let x = bundle(&p, &[0.0, 1.0]);
        assert!((p.bilinear(&x, &x).unwrap() - 2.0).abs() < 1e-14);
        assert!((p.energy_norm(&x).unwrap().value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn h2_penalty_hand_value() {
        let rule = gauss_legendre_on(8, 0.0, 1.0).unwrap();
        let p = VariationalProblem::new(
            spec_1d(
                FormKind::H2Penalty,
                vec![
                    FormTerm { rule: 0, op: DiffOp::Laplacian, coef: 1.0 },
                    FormTerm { rule: 1, op: DiffOp::Value, coef: 1.0 },
                    FormTerm { rule: 1, op: DiffOp::Derivative(0), coef: 1.0 },
                ],
                vec![],
            ),
            vec![rule.clone(), ends()],
            vec![rule, ends()],
        )
        .unwrap();
        let x2 = bundle(&p, &[0.0, 0.0, 1.0]);
        assert!((p.bilinear(&x2, &x2).unwrap() - 9.0).abs() < 1e-13);
    }

    #[test]
    fn point_derivative_load() {
        let rule = gauss_legendre_on(8, 0.0, 1.0).unwrap();
        let mid = QuadratureRule::point_set(1, vec![0.5], vec![1.0]).unwrap();
        let p = VariationalProblem::new(
            spec_1d(
                FormKind::H2Penalty,
                vec![FormTerm { rule: 0, op: DiffOp::Laplacian, coef: 1.0 }],
                vec![LoadTerm { rule: 1, op: DiffOp::Derivative(0), coef: -1.0, source: Source::Constant(1.0) }],
            ),
            vec![rule.clone(), mid.clone()],
            vec![rule, mid],
        )
        .unwrap();
        let x = bundle(&p, &[0.0, 1.0]);
        assert_eq!(p.load(&x).unwrap(), -1.0);
        let zero = bundle(&p, &[0.0]);
        assert_eq!(p.residual(&x, &zero).unwrap(), 0.0);
        assert_eq!(p.residual(&zero, &x).unwrap(), p.load(&x).unwrap());
    }

    #[test]
    fn load_point_outside_domain_rejected() {
        let rule = gauss_legendre_on(4, 0.0, 1.0).unwrap();
        let out = QuadratureRule::point_set(1, vec![1.5], vec![1.0]).unwrap();
        let r = VariationalProblem::new(
            spec_1d(
                FormKind::L2Fit,
                vec![FormTerm { rule: 0, op: DiffOp::Value, coef: 1.0 }],
                vec![LoadTerm { rule: 1, op: DiffOp::Value, coef: 1.0, source: Source::Constant(1.0) }],
            ),
            vec![rule.clone(), out.clone()],
            vec![rule, out],
        );
        assert!(matches!(r, Err(Error::PointOutsideDomain(_))));
    }

    #[test]
    fn missing_order_rejected() {
        let rule = gauss_legendre_on(4, 0.0, 1.0).unwrap();
        let p = VariationalProblem::new(
            spec_1d(
                FormKind::H1Penalty,
                vec![FormTerm { rule: 0, op: DiffOp::Gradient, coef: 1.0 }],
                vec![],
            ),
            vec![rule.clone()],
            vec![rule.clone()],
        )
        .unwrap();
        let low = SampleBundle::new(vec![poly_sample(&rule, &[1.0], 0)]);
        assert!(matches!(p.bilinear(&low, &low), Err(Error::MissingSamples(_))));
    }

    #[test]
    fn order_above_form_kind_rejected() {
        let rule = gauss_legendre_on(4, 0.0, 1.0).unwrap();
        let r = VariationalProblem::new(
            spec_1d(
                FormKind::L2Fit,
                vec![FormTerm { rule: 0, op: DiffOp::Gradient, coef: 1.0 }],
                vec![],
            ),
            vec![rule.clone()],
            vec![rule],
        );
        assert!(r.is_err());
    }
}
