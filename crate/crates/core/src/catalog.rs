//! The nine built-in problems with their default rules and run settings.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::driver::{LearningRate, RunOptions, ScaleSchedule, Schedules, WidthSchedule};
use crate::error::{invalid, Result};
use crate::forms::{
    DiffOp, Domain, ExactSolution, FormKind, FormTerm, Jet, LoadKind, LoadTerm, ProblemSpec, Source,
    VariationalProblem,
};
use crate::math;
use crate::network::InitStrategy;
use crate::quadrature::{
    circle_boundary, disk_interior, disk_interior_composite, gauss_legendre_on, l_shaped_rules, riemann_left,
    QuadratureRule,
};

pub const NAMES: [&str; 9] = [
    "l2_fit",
    "string_1d",
    "membrane_2d",
    "line_source_1",
    "line_source_2",
    "l_shaped",
    "beam_1d",
    "beam_couple_1d",
    "plate_point_load",
];

/// Outer radius of the line-source disk.
pub const LINE_SOURCE_RE: f64 = 1.0 - 1.0 / (PI * PI);

pub fn line_source_r0(case: usize) -> f64 {
    if case == 1 {
        1.0 / math::sqrt(29.0)
    } else {
        7.0 / (6.0 * core::f64::consts::SQRT_2)
    }
}

/// Interior rule family for 1D problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleKind {
    #[default]
    Gauss,
    Riemann,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Gauss => "gauss",
            RuleKind::Riemann => "riemann",
        }
    }
}

/// Node counts replacing the defaults. `interior` is the node count in 1D
/// and the per-direction count in 2D (radial and angular on disks, per
/// square on the L-shape). `boundary` counts nodes on a circle or per
/// L-shape edge; `interface` counts nodes on the line-source circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuadratureOverrides {
    pub interior: Option<usize>,
    pub boundary: Option<usize>,
    pub interface: Option<usize>,
    pub validation: Option<usize>,
    pub interior_kind: RuleKind,
}

/// Resolved node counts of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSizes {
    pub interior: usize,
    pub boundary: Option<usize>,
    pub interface: Option<usize>,
    pub validation: usize,
    pub interior_kind: RuleKind,
}

pub fn default_sizes(name: &str) -> Result<QuadratureSizes> {
    let (interior, boundary, interface, validation) = match name {
        "l2_fit" => (512, None, None, 1000),
        "string_1d" | "beam_1d" => (512, Some(2), None, 1000),
        "beam_couple_1d" => (1024, Some(2), None, 500),
        "membrane_2d" => (128, Some(256), None, 160),
        "line_source_1" | "line_source_2" => (128, Some(512), Some(512), 160),
        "l_shaped" => (128, Some(128), None, 160),
        "plate_point_load" => (100, Some(256), None, 160),
        _ => return Err(unknown(name)),
    };
    Ok(QuadratureSizes {
        interior,
        boundary,
        interface,
        validation,
        interior_kind: RuleKind::Gauss,
    })
}

fn unknown(name: &str) -> crate::error::Error {
    invalid(format!("unknown problem '{}'; available: {}", name, NAMES.join(", ")))
}

/// Default sizes with `ov` applied.
pub fn resolve_sizes(name: &str, ov: &QuadratureOverrides) -> Result<QuadratureSizes> {
    let d = default_sizes(name)?;
    let check = |v: Option<usize>| match v {
        Some(0) => Err(invalid("quadrature overrides must be positive")),
        _ => Ok(()),
    };
    for v in [ov.interior, ov.boundary, ov.interface, ov.validation] {
        check(v)?;
    }
    if ov.interior_kind == RuleKind::Riemann && !is_1d(name) {
        return Err(invalid("riemann rules are only available for 1D problems"));
    }
    Ok(QuadratureSizes {
        interior: ov.interior.unwrap_or(d.interior),
        boundary: d.boundary.map(|b| ov.boundary.unwrap_or(b)),
        interface: d.interface.map(|b| ov.interface.unwrap_or(b)),
        validation: ov.validation.unwrap_or(d.validation),
        interior_kind: ov.interior_kind,
    })
}

fn is_1d(name: &str) -> bool {
    matches!(name, "l2_fit" | "string_1d" | "beam_1d" | "beam_couple_1d")
}

fn interval_rule(n: usize, kind: RuleKind) -> Result<QuadratureRule> {
    match kind {
        RuleKind::Gauss => gauss_legendre_on(n, 0.0, 1.0),
        RuleKind::Riemann => riemann_left(n, 0.0, 1.0),
    }
}

fn ends() -> QuadratureRule {
    QuadratureRule::point_set(1, vec![0.0, 1.0], vec![1.0, 1.0]).expect("two nodes")
}

fn term(rule: usize, op: DiffOp, coef: f64) -> FormTerm {
    FormTerm { rule, op, coef }
}

fn load(rule: usize, op: DiffOp, coef: f64, source: Source) -> LoadTerm {
    LoadTerm { rule, op, coef, source }
}

/// Jet of a radial function `u(r)` given `(u, u', u'')` at `r`.
fn radial_jet(x: &[f64], f: impl Fn(f64) -> (f64, f64, f64)) -> Jet {
    let r = math::sqrt(x[0] * x[0] + x[1] * x[1]);
    let (u, du, ddu) = f(r);
    if r == 0.0 {
        return Jet {
            value: u,
            grad: [0.0; 2],
            second: [ddu, 0.0, ddu],
        };
    }
    let (nx, ny) = (x[0] / r, x[1] / r);
    let t = du / r;
    Jet {
        value: u,
        grad: [du * nx, du * ny],
        second: [
            ddu * nx * nx + t * (1.0 - nx * nx),
            (ddu - t) * nx * ny,
            ddu * ny * ny + t * (1.0 - ny * ny),
        ],
    }
}

/// Jet of the cubic `p0 + p1 x + p2 x^2 + p3 x^3`.
fn cubic_jet(p: [f64; 4], x: f64) -> Jet {
    Jet {
        value: p[0] + x * (p[1] + x * (p[2] + x * p[3])),
        grad: [p[1] + x * (2.0 * p[2] + 3.0 * x * p[3]), 0.0],
        second: [2.0 * p[2] + 6.0 * p[3] * x, 0.0, 0.0],
    }
}

/// Coefficients of `s * (2x - 1)(q0 + q1 x + q2 x^2)`.
fn odd_cubic(q: [f64; 3], s: f64) -> [f64; 4] {
    [
        -s * q[0],
        s * (2.0 * q[0] - q[1]),
        s * (2.0 * q[1] - q[2]),
        s * 2.0 * q[2],
    ]
}

fn fit_exact() -> ExactSolution {
    ExactSolution::new(|x| {
        let mut j = Jet::default();
        for k in [1.0, 3.0, 5.0, 7.0] {
            let w = k * PI;
            j.value += math::sin(w * x[0]) / k;
            j.grad[0] += w * math::cos(w * x[0]) / k;
            j.second[0] -= w * w * math::sin(w * x[0]) / k;
        }
        j
    })
}

fn string_exact(eps: f64) -> ExactSolution {
    ExactSolution::new(move |x| {
        let mut j = Jet::default();
        for k in 1..=3 {
            let w = 2.0 * PI * k as f64;
            j.value += math::sin(w * x[0]);
            j.grad[0] += w * math::cos(w * x[0]);
            j.second[0] -= w * w * math::sin(w * x[0]);
        }
        let s = 12.0 * PI * eps / (1.0 + 2.0 * eps);
        j.value += s * (1.0 - 2.0 * x[0]);
        j.grad[0] -= 2.0 * s;
        j
    })
}

fn beam_exact(e1: f64, e2: f64) -> ExactSolution {
    let d = 24.0 * e1 + 6.0 * e2 + 1.0;
    let pi2 = PI * PI;
    let q = [
        4.0 * e1 * (pi2 * (6.0 * e2 + 1.0) + 3.0),
        8.0 * e1 * pi2 - 1.0,
        1.0 - 8.0 * e1 * pi2,
    ];
    let p = odd_cubic(q, -2.0 * PI / d);
    ExactSolution::new(move |x| {
        let w = 2.0 * PI;
        let mut j = cubic_jet(p, x[0]);
        j.value += math::sin(w * x[0]);
        j.grad[0] += w * math::cos(w * x[0]);
        j.second[0] -= w * w * math::sin(w * x[0]);
        j
    })
}

fn couple_exact(e1: f64, e2: f64) -> ExactSolution {
    let d = 24.0 * e1 + 6.0 * e2 + 1.0;
    let s = -1.0 / (8.0 * d);
    let left = odd_cubic([48.0 * e1 * e2 + 12.0 * e1, 24.0 * e1 + 2.0 * e2, 4.0 * e2 + 1.0], s);
    let right = odd_cubic(
        [
            48.0 * e1 * e2 + 36.0 * e1 + 6.0 * e2 + 1.0,
            -24.0 * e1 - 10.0 * e2 - 2.0,
            4.0 * e2 + 1.0,
        ],
        s,
    );
    ExactSolution::new(move |x| cubic_jet(if x[0] <= 0.5 { left } else { right }, x[0]))
}

fn membrane_exact(eps: f64) -> ExactSolution {
    ExactSolution::new(move |x| radial_jet(x, |r| (-0.5 * r * r + eps + 0.5, -r, -1.0)))
}

fn line_source_exact(eps: f64, r0: f64, re: f64) -> ExactSolution {
    let shift = eps * r0 / re;
    let inner = -r0 * math::ln(r0 / re) + shift;
    ExactSolution::new(move |x| {
        radial_jet(x, |r| {
            if r <= r0 {
                (inner, 0.0, 0.0)
            } else {
                (-r0 * math::ln(r / re) + shift, -r0 / r, r0 / (r * r))
            }
        })
    })
}

fn plate_exact(e1: f64, e2: f64) -> ExactSolution {
    let c1 = -(1.0 / (2.0 * PI) + e2 / (8.0 * PI)) / (4.0 + 2.0 * e2);
    let c2 = -c1 + e1 / (2.0 * PI);
    let k = 1.0 / (8.0 * PI);
    ExactSolution::new(move |x| {
        radial_jet(x, |r| {
            if r == 0.0 {
                return (c2, 0.0, 0.0);
            }
            let l = math::ln(r);
            (
                k * r * r * l + c1 * r * r + c2,
                k * r * (2.0 * l + 1.0) + 2.0 * c1 * r,
                k * (2.0 * l + 3.0) + 2.0 * c1,
            )
        })
    })
}

fn schedules(width: WidthSchedule, scale: ScaleSchedule, initial: f64, decay: f64, tol: f64) -> Schedules {
    Schedules {
        width,
        scale,
        learning_rate: LearningRate { initial, decay },
        epochs: 500,
        tol,
        max_iterations: 12,
    }
}

fn geometric(base: usize) -> WidthSchedule {
    WidthSchedule::Geometric { base, ratio: 2.0 }
}

/// Default run settings of a catalog problem.
pub fn default_options(name: &str) -> Result<RunOptions> {
    let square = |r: f64| InitStrategy::Box {
        lo: [-r, -r],
        hi: [r, r],
    };
    let affine = |start, step| ScaleSchedule::Affine { start, step };
    let (s, init) = match name {
        "l2_fit" => (
            schedules(geometric(4), affine(1.0, 3.0), 2e-2, 1.1, 1e-6),
            InitStrategy::UniformBias1d,
        ),
        "string_1d" => (
            schedules(WidthSchedule::fixed(400), affine(1.0, 1.0), 2e-2, 1.0, 2e-6),
            InitStrategy::UniformBias1d,
        ),
        "membrane_2d" => (
            schedules(
                WidthSchedule::Stepped {
                    base: 200,
                    increment: 100,
                    every: 2,
                },
                ScaleSchedule::constant(1.0),
                1e-2,
                1.1,
                2e-6,
            ),
            InitStrategy::AxisDiagonal2d {
                lo: [-1.0, -1.0],
                hi: [1.0, 1.0],
            },
        ),
        "line_source_1" | "line_source_2" => {
            let tol = if name == "line_source_1" { 0.2 } else { 1.0 };
            (
                schedules(geometric(30), affine(1.0, 1.0), 2e-2, 1.1, tol),
                square(LINE_SOURCE_RE),
            )
        }
        "l_shaped" => (
            schedules(geometric(20), ScaleSchedule::constant(1.0), 2e-2, 1.1, 2e-2),
            square(1.0),
        ),
        "beam_1d" => (
            schedules(geometric(30), affine(1.0, 3.0), 2e-2, 1.1, 3e-5),
            InitStrategy::UniformBias1d,
        ),
        "beam_couple_1d" => (
            schedules(
                geometric(10),
                ScaleSchedule::Geometric {
                    offset: 1.0,
                    factor: 3.0,
                    ratio: 2.0,
                },
                1e-2,
                1.4,
                4e-3,
            ),
            InitStrategy::UniformBias1d,
        ),
        "plate_point_load" => (
            schedules(geometric(20), ScaleSchedule::constant(1.0), 1e-2, 1.1, 5e-3),
            square(1.0),
        ),
        _ => return Err(unknown(name)),
    };
    Ok(RunOptions::new(s, init))
}

/// Catalog problem `name` with default rules.
pub fn problem(name: &str) -> Result<VariationalProblem> {
    build(name, &QuadratureOverrides::default())
}

/// Catalog problem `name` with the node counts in `ov`.
pub fn build(name: &str, ov: &QuadratureOverrides) -> Result<VariationalProblem> {
    let sz = resolve_sizes(name, ov)?;
    let n = sz.interior;
    let nb = sz.boundary.unwrap_or(0);
    let nv = sz.validation;
    let penalties = |v: &[(&str, f64)]| v.iter().map(|(k, x)| (k.to_string(), *x)).collect::<Vec<(String, f64)>>();
    let (spec, training, validation) = match name {
        "l2_fit" => {
            let f = fit_exact();
            let g = f.clone();
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Interval { a: 0.0, b: 1.0 },
                form_kind: FormKind::L2Fit,
                load_kind: LoadKind::Density,
                penalties: vec![],
                terms: vec![term(0, DiffOp::Value, 1.0)],
                loads: vec![load(0, DiffOp::Value, 1.0, Source::field(move |x| g.value(x)))],
                exact: Some(f),
            };
            (spec, vec![interval_rule(n, sz.interior_kind)?], vec![gauss_legendre_on(nv, 0.0, 1.0)?])
        }
        "string_1d" => {
            let eps = 1e-4;
            let f = |x: &[f64]| {
                (1..=3)
                    .map(|k| {
                        let w = 2.0 * PI * k as f64;
                        w * w * math::sin(w * x[0])
                    })
                    .sum()
            };
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Interval { a: 0.0, b: 1.0 },
                form_kind: FormKind::H1Penalty,
                load_kind: LoadKind::Density,
                penalties: penalties(&[("eps", eps)]),
                terms: vec![term(0, DiffOp::Gradient, 1.0), term(1, DiffOp::Value, 1.0 / eps)],
                loads: vec![load(0, DiffOp::Value, 1.0, Source::field(f))],
                exact: Some(string_exact(eps)),
            };
            (
                spec,
                vec![interval_rule(n, sz.interior_kind)?, ends()],
                vec![gauss_legendre_on(nv, 0.0, 1.0)?, ends()],
            )
        }
        "beam_1d" => {
            let (e1, e2) = (1e-4, 1e-4);
            let w = 2.0 * PI;
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Interval { a: 0.0, b: 1.0 },
                form_kind: FormKind::H2Penalty,
                load_kind: LoadKind::Density,
                penalties: penalties(&[("eps1", e1), ("eps2", e2)]),
                terms: vec![
                    term(0, DiffOp::Laplacian, 1.0),
                    term(1, DiffOp::Value, 1.0 / e1),
                    term(1, DiffOp::Derivative(0), 1.0 / e2),
                ],
                loads: vec![load(
                    0,
                    DiffOp::Value,
                    1.0,
                    Source::field(move |x| w * w * w * w * math::sin(w * x[0])),
                )],
                exact: Some(beam_exact(e1, e2)),
            };
            (
                spec,
                vec![interval_rule(n, sz.interior_kind)?, ends()],
                vec![gauss_legendre_on(nv, 0.0, 1.0)?, ends()],
            )
        }
        "beam_couple_1d" => {
            let (e1, e2) = (1e-5, 1e-5);
            let mid = QuadratureRule::point_set(1, vec![0.5], vec![1.0])?;
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Interval { a: 0.0, b: 1.0 },
                form_kind: FormKind::H2Penalty,
                load_kind: LoadKind::PointDerivative,
                penalties: penalties(&[("eps1", e1), ("eps2", e2)]),
                terms: vec![
                    term(0, DiffOp::Laplacian, 1.0),
                    term(1, DiffOp::Value, 1.0 / e1),
                    term(1, DiffOp::Derivative(0), 1.0 / e2),
                ],
                loads: vec![load(2, DiffOp::Derivative(0), -1.0, Source::Constant(1.0))],
                exact: Some(couple_exact(e1, e2)),
            };
            let split = QuadratureRule::union(
                &[gauss_legendre_on(nv, 0.0, 0.5)?, gauss_legendre_on(nv, 0.5, 1.0)?],
                crate::quadrature::DomainTag::Interval { a: 0.0, b: 1.0 },
            )?;
            (
                spec,
                vec![interval_rule(n, sz.interior_kind)?, ends(), mid.clone()],
                vec![split, ends(), mid],
            )
        }
        "membrane_2d" => {
            let eps = 1e-4;
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Disk { radius: 1.0 },
                form_kind: FormKind::H1Penalty,
                load_kind: LoadKind::Density,
                penalties: penalties(&[("eps", eps)]),
                terms: vec![term(0, DiffOp::Gradient, 1.0), term(1, DiffOp::Value, 1.0 / eps)],
                loads: vec![load(0, DiffOp::Value, 2.0, Source::Constant(1.0))],
                exact: Some(membrane_exact(eps)),
            };
            (
                spec,
                vec![disk_interior(n, n, 1.0)?, circle_boundary(nb, 1.0)?],
                vec![disk_interior(nv, nv, 1.0)?, circle_boundary(2 * nb.max(256), 1.0)?],
            )
        }
        "line_source_1" | "line_source_2" => {
            let eps = 1e-3;
            let re = LINE_SOURCE_RE;
            let r0 = line_source_r0(if name == "line_source_1" { 1 } else { 2 });
            let ni = sz.interface.unwrap_or(nb);
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Disk { radius: re },
                form_kind: FormKind::H1Penalty,
                load_kind: LoadKind::LineSource,
                penalties: penalties(&[("eps", eps), ("r0", r0), ("re", re)]),
                terms: vec![term(0, DiffOp::Gradient, 1.0), term(1, DiffOp::Value, 1.0 / eps)],
                loads: vec![load(2, DiffOp::Value, 1.0, Source::Constant(1.0))],
                exact: Some(line_source_exact(eps, r0, re)),
            };
            (
                spec,
                vec![disk_interior(n, n, re)?, circle_boundary(nb, re)?, circle_boundary(ni, r0)?],
                vec![
                    disk_interior_composite(&[r0, re], nv, nv)?,
                    circle_boundary(2 * nb, re)?,
                    circle_boundary(2 * ni, r0)?,
                ],
            )
        }
        "l_shaped" => {
            let eps = 1e-4;
            let (interior, boundary) = l_shaped_rules(n, nb)?;
            let (vi, vb) = l_shaped_rules(nv, 2 * nb)?;
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::LShape,
                form_kind: FormKind::H1Penalty,
                load_kind: LoadKind::Density,
                penalties: penalties(&[("eps", eps)]),
                terms: vec![term(0, DiffOp::Gradient, 1.0), term(1, DiffOp::Value, 1.0 / eps)],
                loads: vec![load(0, DiffOp::Value, 1.0, Source::Constant(1.0))],
                exact: None,
            };
            (spec, vec![interior, boundary], vec![vi, vb])
        }
        "plate_point_load" => {
            let (e1, e2) = (1e-5, 1e-5);
            let origin = QuadratureRule::point_set(2, vec![0.0, 0.0], vec![1.0])?;
            let spec = ProblemSpec {
                name: name.into(),
                domain: Domain::Disk { radius: 1.0 },
                form_kind: FormKind::H2Penalty,
                load_kind: LoadKind::PointValue,
                penalties: penalties(&[("eps1", e1), ("eps2", e2)]),
                terms: vec![
                    term(0, DiffOp::Laplacian, 1.0),
                    term(1, DiffOp::Value, 1.0 / e1),
                    term(1, DiffOp::Normal, e2),
                ],
                loads: vec![load(2, DiffOp::Value, 1.0, Source::Constant(1.0))],
                exact: Some(plate_exact(e1, e2)),
            };
            (
                spec,
                vec![disk_interior(n, n, 1.0)?, circle_boundary(nb, 1.0)?, origin.clone()],
                vec![disk_interior(nv, nv, 1.0)?, circle_boundary(2 * nb, 1.0)?, origin],
            )
        }
        _ => return Err(unknown(name)),
    };
    VariationalProblem::new(spec, training, validation)
}

/// All nine catalog problems with default rules.
pub fn problem_catalog() -> Vec<VariationalProblem> {
    NAMES
        .iter()
        .map(|n| problem(n).expect("catalog problems are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(e: &ExactSolution, x: &[f64]) {
        let h = 1e-5;
        let j = e.jet(x);
        let d = x.len();
        for k in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let g = (e.value(&xp) - e.value(&xm)) / (2.0 * h);
            assert!((g - j.grad[k]).abs() < 1e-6 * (1.0 + g.abs()), "grad {k} at {x:?}: {g} vs {}", j.grad[k]);
            let (jp, jm) = (e.jet(&xp), e.jet(&xm));
            let s = (jp.grad[0] - jm.grad[0]) / (2.0 * h);
            let idx = if k == 0 { 0 } else { 1 };
            assert!((s - j.second[idx]).abs() < 1e-5 * (1.0 + s.abs()), "second at {x:?}");
        }
        if d == 2 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[1] += h;
            xm[1] -= h;
            let s = (e.jet(&xp).grad[1] - e.jet(&xm).grad[1]) / (2.0 * h);
            assert!((s - j.second[2]).abs() < 1e-5 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn catalog_has_nine_entries() {
        let c = problem_catalog();
        assert_eq!(c.len(), 9);
        assert!(c.iter().find(|p| p.name == "l_shaped").unwrap().exact.is_none());
        assert_eq!(c.iter().filter(|p| p.exact.is_some()).count(), 8);
    }

    #[test]
    fn string_exact_at_origin() {
        let p = problem("string_1d").unwrap();
        let eps = 1e-4;
        let u0 = p.exact.as_ref().unwrap().value(&[0.0]);
        assert!((u0 - 12.0 * PI * eps / (1.0 + 2.0 * eps)).abs() < 1e-15);
        assert!((u0 - 3.7697e-3).abs() < 1e-6);
    }

    #[test]
    fn membrane_exact_at_origin() {
        let p = problem("membrane_2d").unwrap();
        assert!((p.exact.as_ref().unwrap().value(&[0.0, 0.0]) - 0.5001).abs() < 1e-15);
    }

    #[test]
    fn couple_reduces_to_clamped_solution() {
        let e = couple_exact(0.0, 0.0);
        for x in [0.1f64, 0.3, 0.5, 0.7, 0.95] {
            let s = x - 0.5;
            let u = 0.25 * s * s.abs() - 0.25 * x * x * x + 0.375 * x * x - 0.25 * x + 1.0 / 16.0;
            assert!((e.value(&[x]) - u).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_jets_match_finite_differences() {
        fd_check(&fit_exact(), &[0.37]);
        fd_check(&string_exact(1e-4), &[0.61]);
        fd_check(&beam_exact(1e-4, 1e-4), &[0.23]);
        fd_check(&couple_exact(1e-5, 1e-5), &[0.3]);
        fd_check(&couple_exact(1e-5, 1e-5), &[0.8]);
        fd_check(&membrane_exact(1e-4), &[0.3, -0.4]);
        fd_check(&line_source_exact(1e-3, 0.2, LINE_SOURCE_RE), &[0.5, 0.4]);
        fd_check(&plate_exact(1e-5, 1e-5), &[-0.2, 0.55]);
    }

    #[test]
    fn unknown_problem_lists_catalog() {
        let e = problem("nope").unwrap_err();
        assert!(format!("{e}").contains("membrane_2d"));
    }

    #[test]
    fn riemann_only_in_1d() {
        let ov = QuadratureOverrides {
            interior_kind: RuleKind::Riemann,
            ..Default::default()
        };
        assert!(build("l2_fit", &ov).is_ok());
        assert!(build("membrane_2d", &ov).is_err());
    }

    #[test]
    fn default_options_validate() {
        for n in NAMES {
            default_options(n).unwrap().schedules.validate().unwrap();
        }
    }
}
