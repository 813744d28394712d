//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `h[p][q]` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that zeroes it.
//! Sweeps run over all pivots in row order and stop once the off-diagonal
//! Frobenius norm is at most `1e-12 · ‖H‖_F`. At that point every eigenvalue
//! estimate (the diagonal) is within the off-diagonal norm of an exact
//! eigenvalue, so the absolute accuracy is about `1e-12 · ‖H‖_F`.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative off-diagonal threshold for convergence.
const OFF_DIAGONAL_REL_TOL: f64 = 1e-12;

/// Sweep cap; quadratic convergence means small matrices need well under ten.
pub const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `H = V diag(values) V†`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Full eigen-decomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `‖h − h†‖_max > tol`.
pub fn eigh(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let deviation = h.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let n = h.dim();
    let mut a: Vec<Complex64> = h.as_slice().to_vec();
    // symmetrize so the rotations see an exactly Hermitian matrix
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in i + 1..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n)?.into_vec();

    let threshold = OFF_DIAGONAL_REL_TOL * h.frobenius_norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut sorted = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            sorted[row * n + new_col] = v[row * n + old_col];
        }
    }
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::from_vec(n, sorted)?,
    })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigenvalues(h: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    Ok(eigh(h, tol)?.values)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix, tol: f64) -> Result<f64> {
    Ok(eigenvalues(h, tol)?[0])
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let phase = apq / g; // e^{i phi}

    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = diag(1, e^{-i phi}) on (p, q) followed by the real rotation [[c, s], [-s, c]].
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    // A <- A U
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * u_pp + akq * u_qp;
        a[k * n + q] = akp * u_pq + akq * u_qq;
    }
    // A <- U† A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

    // V <- V U
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * u_pp + vkq * u_qp;
        v[k * n + q] = vkp * u_pq + vkq * u_qq;
    }
}
