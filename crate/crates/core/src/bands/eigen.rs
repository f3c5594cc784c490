//! Dense generalized eigensolver for `A x = ω B x`.
//!
//! Hermitian `A` with Hermitian positive-definite `B` goes through a Cholesky
//! reduction to a Hermitian eigenproblem. Everything else is solved as the
//! standard problem `B⁻¹A x = ω x` with a complex Schur decomposition
//! (Householder Hessenberg reduction, single-shift QR with Wilkinson shifts)
//! followed by triangular back-substitution for the eigenvectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<Complex64>,
    /// Eigenvectors as columns, each with unit Euclidean norm.
    pub vectors: CMatrix,
}

/// Reciprocal condition estimate from a triangular factor's diagonal.
fn diag_rcond(diag: impl Iterator<Item = f64>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for d in diag {
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if hi > 0.0 {
        lo / hi
    } else {
        0.0
    }
}

/// Thresholds below which the overlap matrix is treated as singular.
pub const MIN_RCOND: f64 = 1e-12;

/// Reciprocal condition estimate of `b` from its LU pivots.
pub fn overlap_rcond(b: &CMatrix) -> f64 {
    let lu = b.clone().lu();
    diag_rcond(lu.u().diagonal().iter().map(|d| d.norm()))
}

fn is_hermitian(m: &CMatrix) -> bool {
    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let n = m.nrows();
    (0..n).all(|i| (i..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

fn normalize_columns(v: &mut CMatrix) {
    for mut col in v.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
}

/// Hermitian-definite path; `None` when `B` is not Hermitian positive definite
/// or `A` is not Hermitian.
pub fn hermitian_definite(a: &CMatrix, b: &CMatrix) -> Option<Eigenpairs> {
    if !is_hermitian(a) || !is_hermitian(b) {
        return None;
    }
    let chol = b.clone().cholesky()?;
    let l = chol.l();
    let rcond = diag_rcond(l.diagonal().iter().map(|d| d.norm()));
    if rcond * rcond < MIN_RCOND {
        return None;
    }
    let x = l.solve_lower_triangular(a)?;
    let mut c = l.solve_lower_triangular(&x.adjoint())?;
    c = (&c + c.adjoint()) * Complex64::from(0.5);
    let eig = SymmetricEigen::new(c);
    let mut vectors = l.adjoint().solve_upper_triangular(&eig.eigenvectors)?;
    normalize_columns(&mut vectors);
    Some(Eigenpairs { values: eig.eigenvalues.iter().map(|&w| Complex64::from(w)).collect(), vectors })
}

/// General path through `B⁻¹A`.
pub fn general(a: &CMatrix, b: &CMatrix) -> Result<Eigenpairs> {
    let lu = b.clone().lu();
    let m = lu.solve(a).ok_or_else(|| Error::Convergence("overlap matrix is singular".into()))?;
    let (q, t) = complex_schur(m)?;
    let y = triangular_eigenvectors(&t);
    let mut vectors = q * y;
    normalize_columns(&mut vectors);
    Ok(Eigenpairs { values: t.diagonal().iter().copied().collect(), vectors })
}

/// Solves `A x = ω B x`, preferring the Hermitian-definite reduction.
pub fn solve_generalized(a: &CMatrix, b: &CMatrix) -> Result<Eigenpairs> {
    match hermitian_definite(a, b) {
        Some(p) => Ok(p),
        None => general(a, b),
    }
}

/// Plane rotation `[[c, s], [-s̄, c]]` mapping `(x, y)` to `(r, 0)`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn new(x: Complex64, y: Complex64) -> Self {
        let ay = y.norm();
        if ay == 0.0 {
            return Self { c: 1.0, s: Complex64::ZERO };
        }
        let ax = x.norm();
        if ax == 0.0 {
            return Self { c: 0.0, s: y.conj() / ay };
        }
        let nrm = ax.hypot(ay);
        Self { c: ax / nrm, s: (x / ax) * y.conj() / nrm }
    }

    /// `M ← G M` on rows `k`, `k+1`, columns `cols`.
    fn rows(&self, m: &mut CMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let (h1, h2) = (m[(k, j)], m[(k + 1, j)]);
            m[(k, j)] = h1 * self.c + self.s * h2;
            m[(k + 1, j)] = -self.s.conj() * h1 + h2 * self.c;
        }
    }

    /// `M ← M Gᴴ` on columns `k`, `k+1`, rows `rows`.
    fn cols(&self, m: &mut CMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let (h1, h2) = (m[(i, k)], m[(i, k + 1)]);
            m[(i, k)] = h1 * self.c + self.s.conj() * h2;
            m[(i, k + 1)] = -self.s * h1 + h2 * self.c;
        }
    }
}

/// Householder reduction to upper Hessenberg form; returns `(Q, H)` with
/// `M = Q H Qᴴ`.
fn hessenberg(mut h: CMatrix) -> (CMatrix, CMatrix) {
    let n = h.nrows();
    let mut q = CMatrix::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x: DVector<Complex64> = h.view((k + 1, k), (n - k - 1, 1)).column(0).into_owned();
        let xnorm = x.norm();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::ONE };
        let mut v = x;
        v[0] += phase * xnorm;
        let vn = v.norm();
        v.unscale_mut(vn);
        // H ← (I − 2vvᴴ) H (I − 2vvᴴ) on the trailing block.
        let two = Complex64::from(2.0);
        {
            let mut rows = h.rows_mut(k + 1, n - k - 1);
            let w = rows.adjoint() * &v;
            rows -= &v * w.adjoint() * two;
        }
        {
            let mut cols = h.columns_mut(k + 1, n - k - 1);
            let w = &cols * &v;
            cols -= w * v.adjoint() * two;
        }
        {
            let mut cols = q.columns_mut(k + 1, n - k - 1);
            let w = &cols * &v;
            cols -= w * v.adjoint() * two;
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::ZERO;
        }
    }
    (q, h)
}

/// Complex Schur decomposition `M = Q T Qᴴ` with `T` upper triangular.
pub fn complex_schur(m: CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((m.clone(), m));
    }
    let (mut q, mut h) = hessenberg(m);
    let norm = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(10);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == 0.0 {
                s = norm;
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::Convergence(format!("complex QR did not converge after {total} iterations")));
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() + h[(hi - 1, hi.saturating_sub(2).max(lo))].norm()
        } else {
            let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let mu1 = (a + d) * 0.5 + disc;
            let mu2 = (a + d) * 0.5 - disc;
            if (mu1 - d).norm() < (mu2 - d).norm() {
                mu1
            } else {
                mu2
            }
        };
        for k in lo..hi {
            let g = if k == lo {
                Givens::new(h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                Givens::new(h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let first_col = if k == lo { lo } else { k - 1 };
            g.rows(&mut h, k, first_col..n);
            if k > lo {
                h[(k + 1, k - 1)] = Complex64::ZERO;
            }
            g.cols(&mut h, k, 0..(k + 3).min(hi + 1));
            g.cols(&mut q, k, 0..n);
        }
    }
    Ok((q, h))
}

/// Eigenvectors of an upper-triangular matrix by back-substitution.
pub fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let norm = t.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * norm).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        y[(i, i)] = Complex64::ONE;
        for j in (0..i).rev() {
            let mut acc = Complex64::ZERO;
            for l in j + 1..=i {
                acc += t[(j, l)] * y[(l, i)];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < small {
                den = Complex64::from(small);
            }
            y[(j, i)] = -acc / den;
            let big = y[(j, i)].norm();
            if big > 1e100 {
                for r in j..=i {
                    y[(r, i)] /= big;
                }
            }
        }
    }
    y
}
