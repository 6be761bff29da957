//! Quadrature rules over intervals, circles, disks, rectangles and the
//! L-shaped domain.
//!
//! Every inner product in the training objective and in both Galerkin
//! systems is a weighted sum over the nodes of one of these rules. Rules are
//! immutable once built.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::math;

/// Geometric support of a rule. Determines the measure its weights sum to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainTag {
    Interval { a: f64, b: f64 },
    CircleBoundary { radius: f64 },
    DiskInterior { radius: f64 },
    Rectangle { x: (f64, f64), y: (f64, f64) },
    /// Union of straight edges, e.g. the boundary of the L-shaped domain.
    Polyline { length: f64 },
    /// Union of disjoint planar pieces, e.g. the interior of the L-shape.
    Union { area: f64 },
    /// Isolated points with unit (counting) weights.
    PointSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    tag: DomainTag,
}

impl QuadratureRule {
    fn from_parts(dim: usize, points: Vec<f64>, weights: Vec<f64>, tag: DomainTag) -> Self {
        debug_assert_eq!(points.len(), dim * weights.len());
        QuadratureRule {
            dim,
            points,
            weights,
            tag,
        }
    }

    /// A rule supported on explicit points, e.g. the two end points of an
    /// interval or the location of a point load.
    pub fn point_set(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(invalid("point set dimension must be 1 or 2"));
        }
        if weights.is_empty() || points.len() != dim * weights.len() {
            return Err(invalid("point set needs one weight per point"));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(invalid("point set weights must be positive"));
        }
        Ok(Self::from_parts(dim, points, weights, DomainTag::PointSet))
    }

    /// Spatial dimension of the nodes.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Node coordinates, `dim` entries per node.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }

    /// Measure of the tagged domain (length, arc length or area). For point
    /// sets this is the total weight.
    pub fn measure(&self) -> f64 {
        match self.tag {
            DomainTag::Interval { a, b } => b - a,
            DomainTag::CircleBoundary { radius } => 2.0 * PI * radius,
            DomainTag::DiskInterior { radius } => PI * radius * radius,
            DomainTag::Rectangle { x, y } => (x.1 - x.0) * (y.1 - y.0),
            DomainTag::Polyline { length } => length,
            DomainTag::Union { area } => area,
            DomainTag::PointSet => self.weight_sum(),
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted sum of `f` over the nodes.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * f(self.point(i)))
            .sum()
    }

    /// Concatenates rules of equal dimension. The measure of the result is
    /// the sum of the parts.
    pub fn union(parts: &[QuadratureRule], tag: DomainTag) -> Result<Self> {
        let first = parts.first().ok_or_else(|| invalid("empty union"))?;
        let dim = first.dim;
        if parts.iter().any(|p| p.dim != dim) {
            return Err(invalid("union of rules with different dimensions"));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for p in parts {
            points.extend_from_slice(&p.points);
            weights.extend_from_slice(&p.weights);
        }
        Ok(Self::from_parts(dim, points, weights, tag))
    }
}

/// Legendre polynomial `P_n(x)` together with `P_{n-1}(x)`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITERS: usize = 100;

/// `n`-point Gauss-Legendre rule on (-1, 1), exact for degree `2n - 1`.
///
/// Nodes are roots of `P_n`, found by Newton iteration from the
/// asymptotic guesses `cos(pi (k - 1/4) / (n + 1/2))`. Only the
/// non-negative half is computed; the rule is mirrored so it is exactly
/// symmetric.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("Gauss-Legendre rule needs n >= 1"));
    }
    let nf = n as f64;
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let half = n.div_ceil(2);
    for k in 1..=half {
        let mut x = math::cos(PI * (k as f64 - 0.25) / (nf + 0.5));
        if n % 2 == 1 && k == half {
            x = 0.0;
        } else {
            for _ in 0..NEWTON_MAX_ITERS {
                let (p, p_prev) = legendre_pair(n, x);
                let dp = nf * (x * p - p_prev) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < NEWTON_TOL {
                    break;
                }
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        let dp = nf * (x * p - p_prev) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // k-th guess approaches +1 first; store descending from the right end.
        nodes[n - k] = x;
        weights[n - k] = w;
        nodes[k - 1] = -x;
        weights[k - 1] = w;
    }
    Ok(QuadratureRule::from_parts(
        1,
        nodes,
        weights,
        DomainTag::Interval { a: -1.0, b: 1.0 },
    ))
}

/// `n`-point Gauss-Lobatto rule on [-1, 1], including both end points and
/// exact for degree `2n - 3`.
///
/// Interior nodes are roots of `P'_{n-1}`, refined by Newton iteration with
/// `P''` taken from the Legendre differential equation.
pub fn gauss_lobatto(n: usize) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(invalid("Gauss-Lobatto rule needs n >= 2"));
    }
    let m = n - 1;
    let mf = m as f64;
    let end_w = 2.0 / (mf * (mf + 1.0));
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    nodes[0] = -1.0;
    nodes[m] = 1.0;
    weights[0] = end_w;
    weights[m] = end_w;
    let interior = n - 2;
    let half = interior.div_ceil(2);
    for k in 1..=half {
        let mut x = math::cos(PI * k as f64 / mf);
        let odd_middle = interior % 2 == 1 && k == half;
        if odd_middle {
            x = 0.0;
        } else {
            for _ in 0..NEWTON_MAX_ITERS {
                let (p, p_prev) = legendre_pair(m, x);
                let dp = mf * (x * p - p_prev) / (x * x - 1.0);
                let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
                let dx = dp / d2p;
                x -= dx;
                if dx.abs() < NEWTON_TOL {
                    break;
                }
            }
        }
        let (p, _) = legendre_pair(m, x);
        let w = end_w / (p * p);
        nodes[m - k] = x;
        weights[m - k] = w;
        nodes[k] = -x;
        weights[k] = w;
    }
    Ok(QuadratureRule::from_parts(
        1,
        nodes,
        weights,
        DomainTag::Interval { a: -1.0, b: 1.0 },
    ))
}

/// Left Riemann sum on (a, b): nodes `a + k h`, `k = 0..n`, weights `h`.
pub fn riemann_left(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("Riemann rule needs n >= 1"));
    }
    if !(a < b) {
        return Err(invalid("Riemann rule needs a < b"));
    }
    let h = (b - a) / n as f64;
    let nodes = (0..n).map(|k| a + k as f64 * h).collect();
    Ok(QuadratureRule::from_parts(
        1,
        nodes,
        alloc::vec![h; n],
        DomainTag::Interval { a, b },
    ))
}

/// Affine image of a rule on (-1, 1) onto (a, b).
pub fn map_to_interval(rule: &QuadratureRule, a: f64, b: f64) -> Result<QuadratureRule> {
    match rule.tag {
        DomainTag::Interval { a: ra, b: rb } if ra == -1.0 && rb == 1.0 && rule.dim == 1 => {}
        _ => return Err(invalid("map_to_interval expects a rule on (-1, 1)")),
    }
    if !(a < b) {
        return Err(invalid("map_to_interval needs a < b"));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let nodes = rule.points.iter().map(|t| mid + half * t).collect();
    let weights = rule.weights.iter().map(|w| w * half).collect();
    Ok(QuadratureRule::from_parts(
        1,
        nodes,
        weights,
        DomainTag::Interval { a, b },
    ))
}

/// Gauss-Legendre rule mapped onto (a, b).
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    map_to_interval(&gauss_legendre(n)?, a, b)
}

/// Cartesian product of two interval rules. Node `(x_i, y_j)` is stored at
/// index `i * ny + j`.
pub fn tensor_rectangle(rx: &QuadratureRule, ry: &QuadratureRule) -> Result<QuadratureRule> {
    let (xa, xb) = interval_bounds(rx)?;
    let (ya, yb) = interval_bounds(ry)?;
    let mut points = Vec::with_capacity(2 * rx.len() * ry.len());
    let mut weights = Vec::with_capacity(rx.len() * ry.len());
    for (i, wx) in rx.weights.iter().enumerate() {
        for (j, wy) in ry.weights.iter().enumerate() {
            points.push(rx.points[i]);
            points.push(ry.points[j]);
            weights.push(wx * wy);
        }
    }
    Ok(QuadratureRule::from_parts(
        2,
        points,
        weights,
        DomainTag::Rectangle {
            x: (xa, xb),
            y: (ya, yb),
        },
    ))
}

fn interval_bounds(rule: &QuadratureRule) -> Result<(f64, f64)> {
    match rule.tag {
        DomainTag::Interval { a, b } if rule.dim == 1 => Ok((a, b)),
        _ => Err(invalid("tensor_rectangle expects interval rules")),
    }
}

/// Polar tensor rule on the disk of radius `radius`: Gauss-Legendre in the
/// radius, periodic trapezoid in the angle, Jacobian `r` folded into the
/// weights.
pub fn disk_interior(n_r: usize, n_t: usize, radius: f64) -> Result<QuadratureRule> {
    disk_interior_composite(&[radius], n_r, n_t)
}

/// Polar rule with the radial direction split at `breaks` (increasing, the
/// last entry is the disk radius). Each radial segment receives `n_r`
/// Gauss-Legendre nodes. Used where an integrand has a radial kink.
pub fn disk_interior_composite(breaks: &[f64], n_r: usize, n_t: usize) -> Result<QuadratureRule> {
    if n_r == 0 || n_t == 0 {
        return Err(invalid("disk rule needs n_r, n_t >= 1"));
    }
    let radius = *breaks.last().ok_or_else(|| invalid("disk rule needs a radius"))?;
    let mut lo = 0.0;
    for &r in breaks {
        if !(r > lo) {
            return Err(invalid("disk radii must be positive and increasing"));
        }
        lo = r;
    }
    let base = gauss_legendre(n_r)?;
    let dtheta = 2.0 * PI / n_t as f64;
    let angles: Vec<(f64, f64)> = (0..n_t)
        .map(|k| {
            let t = k as f64 * dtheta;
            (math::cos(t), math::sin(t))
        })
        .collect();
    let mut points = Vec::with_capacity(2 * n_r * n_t * breaks.len());
    let mut weights = Vec::with_capacity(n_r * n_t * breaks.len());
    let mut inner = 0.0;
    for &outer in breaks {
        let radial = map_to_interval(&base, inner, outer)?;
        for (r, wr) in radial.points.iter().zip(&radial.weights) {
            for &(c, s) in &angles {
                points.push(r * c);
                points.push(r * s);
                weights.push(wr * r * dtheta);
            }
        }
        inner = outer;
    }
    Ok(QuadratureRule::from_parts(
        2,
        points,
        weights,
        DomainTag::DiskInterior { radius },
    ))
}

/// `n` equally spaced nodes on the circle of radius `radius`, each with
/// weight `2 pi R / n`.
pub fn circle_boundary(n: usize, radius: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("circle rule needs n >= 1"));
    }
    if !(radius > 0.0) {
        return Err(invalid("circle radius must be positive"));
    }
    let dtheta = 2.0 * PI / n as f64;
    let mut points = Vec::with_capacity(2 * n);
    for k in 0..n {
        let t = k as f64 * dtheta;
        points.push(radius * math::cos(t));
        points.push(radius * math::sin(t));
    }
    Ok(QuadratureRule::from_parts(
        2,
        points,
        alloc::vec![radius * dtheta; n],
        DomainTag::CircleBoundary { radius },
    ))
}

/// Rule on the straight segment from `p` to `q` built from a rule on (-1, 1).
fn segment_rule(base: &QuadratureRule, p: [f64; 2], q: [f64; 2]) -> QuadratureRule {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let len = math::sqrt(dx * dx + dy * dy);
    let mut points = Vec::with_capacity(2 * base.len());
    let mut weights = Vec::with_capacity(base.len());
    for (t, w) in base.points.iter().zip(&base.weights) {
        let s = 0.5 * (t + 1.0);
        points.push(p[0] + s * (q[0] - p[0]));
        points.push(p[1] + s * (q[1] - p[1]));
        weights.push(0.5 * len * w);
    }
    QuadratureRule::from_parts(2, points, weights, DomainTag::Polyline { length: len })
}

/// Interior and boundary rules for the L-shaped domain (-1,1)^2 \ (-1,0]^2.
///
/// The interior is the union of three unit squares, each with an
/// `n_per_square x n_per_square` Gauss-Legendre tensor rule. The boundary
/// uses Gauss-Lobatto on the two re-entrant edges meeting at the origin and
/// Gauss-Legendre on the six remaining unit edges, `n_edge` nodes each.
pub fn l_shaped_rules(n_per_square: usize, n_edge: usize) -> Result<(QuadratureRule, QuadratureRule)> {
    if n_per_square < 2 || n_edge < 2 {
        return Err(invalid("L-shaped rules need at least 2 nodes per direction"));
    }
    let gl_neg = gauss_legendre_on(n_per_square, -1.0, 0.0)?;
    let gl_pos = gauss_legendre_on(n_per_square, 0.0, 1.0)?;
    let squares = [
        tensor_rectangle(&gl_neg, &gl_pos)?,
        tensor_rectangle(&gl_pos, &gl_pos)?,
        tensor_rectangle(&gl_pos, &gl_neg)?,
    ];
    let interior = QuadratureRule::union(&squares, DomainTag::Union { area: 3.0 })?;

    let gl = gauss_legendre(n_edge)?;
    let gll = gauss_lobatto(n_edge)?;
    let edges = [
        segment_rule(&gl, [-1.0, 0.0], [-1.0, 1.0]),
        segment_rule(&gl, [-1.0, 1.0], [0.0, 1.0]),
        segment_rule(&gl, [0.0, 1.0], [1.0, 1.0]),
        segment_rule(&gl, [1.0, 1.0], [1.0, 0.0]),
        segment_rule(&gl, [1.0, 0.0], [1.0, -1.0]),
        segment_rule(&gl, [1.0, -1.0], [0.0, -1.0]),
        segment_rule(&gll, [0.0, -1.0], [0.0, 0.0]),
        segment_rule(&gll, [0.0, 0.0], [-1.0, 0.0]),
    ];
    let boundary = QuadratureRule::union(&edges, DomainTag::Polyline { length: 8.0 })?;
    Ok((interior, boundary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_integral(k: u32) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.points(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);

        let r2 = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.points()[0] + s).abs() < 1e-15);
        assert!((r2.points()[1] - s).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-15);
        assert!((r2.weights()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_t8_with_five_nodes() {
        let r = gauss_legendre(5).unwrap();
        let v = r.integrate(|x| x[0].powi(8));
        assert!((v - 2.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_exact_through_degree_2n_minus_1() {
        for n in [1usize, 2, 3, 7, 16, 64, 128, 512, 1000] {
            let r = gauss_legendre(n).unwrap();
            assert_eq!(r.len(), n);
            assert!((r.weight_sum() - 2.0).abs() < 1e-12 * 2.0);
            let top = (2 * n - 1).min(60) as u32;
            for k in 0..=top {
                let exact = monomial_integral(k);
                let v = r.integrate(|x| x[0].powi(k as i32));
                let scale = exact.abs().max(1e-300);
                if exact == 0.0 {
                    assert!(v.abs() < 1e-13, "n={n} k={k} v={v}");
                } else {
                    assert!(((v - exact) / scale).abs() < 1e-12, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_rejects_zero() {
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn gauss_lobatto_small_rules() {
        let r2 = gauss_lobatto(2).unwrap();
        assert_eq!(r2.points(), &[-1.0, 1.0]);
        assert_eq!(r2.weights(), &[1.0, 1.0]);
        let r3 = gauss_lobatto(3).unwrap();
        assert_eq!(r3.points(), &[-1.0, 0.0, 1.0]);
        assert!((r3.weights()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r3.weights()[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((r3.weights()[2] - 1.0 / 3.0).abs() < 1e-15);
        let r4 = gauss_lobatto(4).unwrap();
        assert!((r4.integrate(|x| x[0].powi(4)) - 0.4).abs() < 1e-13);
    }

    #[test]
    fn gauss_lobatto_exact_through_degree_2n_minus_3() {
        for n in [2usize, 3, 4, 5, 8, 17, 64, 128] {
            let r = gauss_lobatto(n).unwrap();
            assert_eq!(r.len(), n);
            assert_eq!(r.points()[0], -1.0);
            assert_eq!(r.points()[n - 1], 1.0);
            assert!(r.weights().iter().all(|w| *w > 0.0));
            for k in 0..=((2 * n - 3).min(60) as u32) {
                let exact = monomial_integral(k);
                let v = r.integrate(|x| x[0].powi(k as i32));
                if exact == 0.0 {
                    assert!(v.abs() < 1e-13, "n={n} k={k}");
                } else {
                    assert!(((v - exact) / exact).abs() < 1e-12, "n={n} k={k}");
                }
            }
        }
        assert!(gauss_lobatto(1).is_err());
    }

    #[test]
    fn riemann_left_sums() {
        let r = riemann_left(1, 0.0, 1.0).unwrap();
        assert_eq!(r.points(), &[0.0]);
        assert_eq!(r.weights(), &[1.0]);
        let r4 = riemann_left(4, 0.0, 1.0).unwrap();
        assert_eq!(r4.integrate(|_| 1.0), 1.0);
        let r100 = riemann_left(100, 0.0, 1.0).unwrap();
        // h^2 * (n-1) n / 2 with h = 1/100
        assert!((r100.integrate(|x| x[0]) - 0.495).abs() < 1e-14);
        assert!(riemann_left(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn map_to_interval_behaviour() {
        let r = gauss_legendre(2).unwrap();
        assert_eq!(map_to_interval(&r, -1.0, 1.0).unwrap().points(), r.points());
        let m = map_to_interval(&r, 0.0, 1.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((m.points()[0] - (1.0 - s) / 2.0).abs() < 1e-15);
        assert!((m.points()[1] - (1.0 + s) / 2.0).abs() < 1e-15);
        assert!(m.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));
        assert!((m.integrate(|x| x[0].powi(3)) - 0.25).abs() < 1e-14);
        assert!(map_to_interval(&r, 1.0, 0.0).is_err());
        assert!(map_to_interval(&m, 0.0, 2.0).is_err());
    }

    #[test]
    fn tensor_rectangle_rules() {
        let mid = gauss_legendre_on(1, 0.0, 1.0).unwrap();
        let t = tensor_rectangle(&mid, &mid).unwrap();
        assert_eq!(t.points(), &[0.5, 0.5]);
        assert_eq!(t.weights(), &[1.0]);
        let g = gauss_legendre_on(2, 0.0, 1.0).unwrap();
        let t2 = tensor_rectangle(&g, &g).unwrap();
        assert!((t2.weight_sum() - 1.0).abs() < 1e-15);
        assert!((t2.integrate(|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / 9.0).abs() < 1e-14);
        let gy = gauss_legendre_on(3, -2.0, 1.0).unwrap();
        let t3 = tensor_rectangle(&g, &gy).unwrap();
        assert!((t3.weight_sum() - t3.measure()).abs() < 1e-12 * 3.0);
    }

    #[test]
    fn disk_interior_moments() {
        let d = disk_interior(16, 32, 1.0).unwrap();
        assert_eq!(d.len(), 16 * 32);
        assert!((d.integrate(|_| 1.0) - PI).abs() < 1e-12);
        assert!(d.integrate(|p| p[0]).abs() < 1e-12);
        assert!((d.integrate(|p| p[0] * p[0] + p[1] * p[1]) - PI / 2.0).abs() < 1e-10);
        let d2 = disk_interior(5, 9, 2.5).unwrap();
        assert!((d2.weight_sum() - d2.measure()).abs() < 1e-12 * d2.measure());
    }

    #[test]
    fn disk_interior_polynomial_exactness() {
        // total degree <= min(2 n_r - 2, n_t - 1)
        let (n_r, n_t) = (4usize, 7usize);
        let d = disk_interior(n_r, n_t, 1.0).unwrap();
        let max_deg = (2 * n_r - 2).min(n_t - 1);
        // x^(2a) y^(2b) over the unit disk: 2 Γ(a+1/2) Γ(b+1/2) / ((2a+2b+2) Γ(a+b+1))
        for a in 0..=max_deg / 2 {
            for b in 0..=(max_deg / 2 - a) {
                let exact = disk_even_moment(a, b);
                let v = d.integrate(|p| p[0].powi(2 * a as i32) * p[1].powi(2 * b as i32));
                assert!((v - exact).abs() < 1e-10, "a={a} b={b}: {v} vs {exact}");
            }
        }
        let v = d.integrate(|p| p[0].powi(3) * p[1]);
        assert!(v.abs() < 1e-10);
    }

    fn disk_even_moment(a: usize, b: usize) -> f64 {
        // Γ(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
        fn gamma_half(k: usize) -> f64 {
            let mut g = PI.sqrt();
            for j in 0..k {
                g *= j as f64 + 0.5;
            }
            g
        }
        fn fact(k: usize) -> f64 {
            (1..=k).map(|j| j as f64).product()
        }
        2.0 * gamma_half(a) * gamma_half(b) / ((2 * (a + b) + 2) as f64 * fact(a + b))
    }

    #[test]
    fn circle_boundary_moments() {
        let c = circle_boundary(10, 2.0).unwrap();
        assert!((c.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-12);
        assert!(c.integrate(|p| p[0]).abs() < 1e-12);
        let u = circle_boundary(64, 1.0).unwrap();
        assert!((u.integrate(|p| p[0] * p[0]) - PI).abs() < 1e-12);
    }

    #[test]
    fn l_shaped_measures() {
        let (interior, boundary) = l_shaped_rules(8, 6).unwrap();
        assert_eq!(interior.len(), 3 * 64);
        assert_eq!(boundary.len(), 8 * 6);
        assert!((interior.weight_sum() - 3.0).abs() < 1e-12);
        assert!((boundary.weight_sum() - 8.0).abs() < 1e-12);
        assert!((interior.integrate(|p| p[0] + p[1]) - 1.0).abs() < 1e-10);
        // no interior node inside the removed quadrant
        for i in 0..interior.len() {
            let p = interior.point(i);
            assert!(!(p[0] <= 0.0 && p[1] <= 0.0));
        }
        // the re-entrant corner is a node of the Lobatto edges
        let has_corner = (0..boundary.len()).any(|i| boundary.point(i) == [0.0, 0.0]);
        assert!(has_corner);
    }

    #[test]
    fn point_set_validation() {
        assert!(QuadratureRule::point_set(1, alloc::vec![0.0, 1.0], alloc::vec![1.0, 1.0]).is_ok());
        assert!(QuadratureRule::point_set(1, alloc::vec![0.0], alloc::vec![1.0, 1.0]).is_err());
        assert!(QuadratureRule::point_set(3, alloc::vec![0.0; 3], alloc::vec![1.0]).is_err());
    }
}
