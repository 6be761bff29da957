//! Dense symmetric linear algebra: Gram products, SPD solves with a
//! regularization fallback chain, and symmetric eigensolvers.
//!
//! Matrices are row-major `Vec<f64>`.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// `C = A B` for row-major `A (m x k)` and `B (k x n)` with arbitrary
/// strides, accumulating `beta * C`.
#[allow(unsafe_code, clippy::too_many_arguments)]
fn gemm_strided(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
) {
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c[..m * n].iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    assert!((m - 1) * rsa + (k - 1) * csa < a.len());
    assert!((k - 1) * rsb + (n - 1) * csb < b.len());
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above bound every index the kernel touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `A^T A` for a row-major `rows x cols` matrix.
pub fn gram_tn(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols * cols];
    gemm_strided(cols, rows, cols, a, (1, cols), a, (cols, 1), &mut out);
    symmetrize(&mut out, cols);
    out
}

/// `A A^T` for a row-major `rows x cols` matrix.
pub fn gram_nt(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * rows];
    gemm_strided(rows, cols, rows, a, (cols, 1), a, (1, cols), &mut out);
    symmetrize(&mut out, rows);
    out
}

/// `A^T x` for row-major `A (rows x cols)`.
pub fn mat_t_vec(a: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (row, xi) in a.chunks_exact(cols).take(rows).zip(x) {
        if *xi == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += v * xi;
        }
    }
    out
}

/// `A x` for row-major `A (rows x cols)`.
pub fn mat_vec(a: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    a.chunks_exact(cols)
        .take(rows)
        .map(|row| row.iter().zip(x).map(|(v, xi)| v * xi).sum())
        .collect()
}

fn symmetrize(a: &mut [f64], m: usize) {
    for i in 0..m {
        for j in 0..i {
            let v = 0.5 * (a[i * m + j] + a[j * m + i]);
            a[i * m + j] = v;
            a[j * m + i] = v;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Smallest admissible Cholesky pivot on the equilibrated matrix.
const PIVOT_FLOOR: f64 = 64.0 * f64::EPSILON;
const JITTER: f64 = 1e-12;
const EIGEN_CUTOFF: f64 = 1e-12;

/// In-place lower Cholesky factor. Fails when a pivot drops to
/// `PIVOT_FLOOR` times the largest diagonal entry or below.
fn cholesky(a: &mut [f64], m: usize) -> bool {
    let scale = (0..m).fold(0.0f64, |s, i| s.max(a[i * m + i]));
    if !(scale > 0.0) {
        return false;
    }
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > PIVOT_FLOOR * scale) {
            return false;
        }
        let d = math::sqrt(d);
        a[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], m: usize, b: &mut [f64]) {
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * m + k] * b[k];
        }
        b[i] = s / l[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = b[i];
        for k in i + 1..m {
            s -= l[k * m + i] * b[k];
        }
        b[i] = s / l[i * m + i];
    }
}

/// Which stage of the fallback chain produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Cholesky,
    Jitter,
    TruncatedEigen,
}

/// Solves `K x = f` for symmetric positive (semi-)definite `K`.
///
/// The matrix is first equilibrated by its diagonal. Cholesky is tried
/// as is, then with `1e-12 * trace / m` added to the (equilibrated)
/// diagonal, and finally by an eigendecomposition that discards
/// eigenvalues below `1e-12 * lambda_max`, which gives the minimum-norm
/// solution on the numerically resolvable subspace.
pub fn spd_solve(k: &[f64], m: usize, f: &[f64]) -> Result<(Vec<f64>, SolveMethod)> {
    if k.len() != m * m || f.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m * m,
            got: k.len(),
        });
    }
    if m == 0 {
        return Ok((Vec::new(), SolveMethod::Cholesky));
    }
    if k.iter().chain(f).any(|v| !v.is_finite()) {
        return Err(Error::SolveFailed("non-finite matrix or right-hand side".to_string()));
    }
    // zero rows (vanishing features) are left out of the scaling
    let d: Vec<f64> = (0..m)
        .map(|i| {
            let kii = k[i * m + i];
            if kii > 0.0 {
                1.0 / math::sqrt(kii)
            } else {
                0.0
            }
        })
        .collect();
    let mut ks = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            ks[i * m + j] = d[i] * k[i * m + j] * d[j];
        }
    }
    let fs: Vec<f64> = f.iter().zip(&d).map(|(a, b)| a * b).collect();
    let unscale = |y: Vec<f64>| -> Vec<f64> { y.iter().zip(&d).map(|(a, b)| a * b).collect() };

    let mut l = ks.clone();
    if d.iter().all(|v| *v > 0.0) && cholesky(&mut l, m) {
        let mut y = fs.clone();
        cholesky_solve(&l, m, &mut y);
        return Ok((unscale(y), SolveMethod::Cholesky));
    }
    let trace: f64 = (0..m).map(|i| ks[i * m + i]).sum();
    let mut l = ks.clone();
    let jitter = JITTER * trace / m as f64;
    if jitter > 0.0 {
        for i in 0..m {
            l[i * m + i] += jitter;
        }
        if cholesky(&mut l, m) {
            let mut y = fs.clone();
            cholesky_solve(&l, m, &mut y);
            if y.iter().all(|v| v.is_finite()) {
                return Ok((unscale(y), SolveMethod::Jitter));
            }
        }
    }
    let (vals, vecs) = symmetric_eigen(&ks, m)?;
    let lmax = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(lmax > 0.0) {
        return Err(Error::SolveFailed("matrix is zero".to_string()));
    }
    let mut y = vec![0.0; m];
    for (p, &lam) in vals.iter().enumerate() {
        if lam < EIGEN_CUTOFF * lmax {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..m {
            proj += vecs[i * m + p] * fs[i];
        }
        let s = proj / lam;
        for i in 0..m {
            y[i] += s * vecs[i * m + p];
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolveFailed("all fallbacks exhausted".to_string()));
    }
    Ok((unscale(y), SolveMethod::TruncatedEigen))
}

/// Eigenvalues (ascending) and eigenvectors (column `p` of the row-major
/// result) of a symmetric matrix, by Householder tridiagonalization and the
/// implicit QL algorithm.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, n);
    tql2(&mut v, &mut d, &mut e, n)?;
    Ok((d, v))
}

#[allow(clippy::needless_range_loop)]
fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = math::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

#[allow(clippy::needless_range_loop)]
fn tql2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::SolveFailed("eigen iteration did not converge".to_string()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[idx(k, i + 1)];
                        v[idx(k, i + 1)] = s * v[idx(k, i)] + c * h;
                        v[idx(k, i)] = c * v[idx(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // selection sort, ascending, carrying vectors along
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in i + 1..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap(idx(j, i), idx(j, k));
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
/// until the off-diagonal Frobenius norm is below `1e-12 ||A||_F`.
/// Returned in ascending order.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut a = a.to_vec();
    let fro = math::sqrt(a.iter().map(|v| v * v).sum());
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        math::sqrt(s)
    };
    for _sweep in 0..100 {
        if off(&a) <= 1e-12 * fro {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    vals
}

/// Spectral condition number of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    /// `lambda_max / lambda_min`, or `+inf` when not positive definite.
    pub value: f64,
    pub positive_definite: bool,
}

pub fn condition_number(k: &[f64], m: usize) -> Condition {
    if m == 0 {
        return Condition {
            value: 1.0,
            positive_definite: true,
        };
    }
    let vals = jacobi_eigenvalues(k, m);
    let (lo, hi) = (vals[0], vals[m - 1]);
    if !(lo > 0.0) {
        return Condition {
            value: f64::INFINITY,
            positive_definite: false,
        };
    }
    Condition {
        value: hi / lo,
        positive_definite: true,
    }
}
