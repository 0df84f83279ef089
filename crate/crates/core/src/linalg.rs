//! Dense complex linear algebra used by the solvers.
//!
//! Matrices live in `ndarray` on the physics side; factorizations and
//! eigenvalue problems are delegated to `faer`. Everything here is for
//! Hermitian or general dense matrices of modest size (up to a few
//! thousand rows), where dense methods are the right tool.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix alias used throughout the crate.
pub type CMat = Array2<Complex64>;

fn to_faer(a: &CMat) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Solve the square system `a x = b` by LU with partial pivoting.
pub fn solve_vec(a: &CMat, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "solve_vec requires a square matrix");
    assert_eq!(n, b.len());
    let lu = to_faer(a).partial_piv_lu();
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    let out = Array1::from_iter((0..n).map(|i| x[(i, 0)]));
    if out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonConvergence(f64::INFINITY))
    }
}

/// Solve `a x = b` for a matrix right-hand side.
pub fn solve_mat(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.nrows());
    let lu = to_faer(a).partial_piv_lu();
    let x = lu.solve(&to_faer(b));
    Array2::from_shape_fn((n, b.ncols()), |(i, j)| x[(i, j)])
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Only the lower triangle is referenced, so slightly non-Hermitian
/// round-off in the upper triangle is harmless.
pub fn eigvalsh(h: &CMat) -> Result<Vec<f64>> {
    to_faer(h)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NonConvergence(f64::NAN))
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending plus the
/// matrix of column eigenvectors.
pub fn eigh(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = h.nrows();
    let evd = to_faer(h)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NonConvergence(f64::NAN))?;
    let s = evd.S().column_vector();
    let vals: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let u = evd.U();
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((vals, vecs))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigvalsh(h: &CMat) -> Result<f64> {
    Ok(eigvalsh(h)?[0])
}

/// Trace norm of a Hermitian matrix: sum of |eigenvalue|.
pub fn trace_norm_hermitian(h: &CMat) -> Result<f64> {
    Ok(eigvalsh(h)?.iter().map(|l| l.abs()).sum())
}

/// Trace distance (1/2)||a - b||_1 between two Hermitian matrices.
pub fn trace_distance(a: &CMat, b: &CMat) -> Result<f64> {
    Ok(0.5 * trace_norm_hermitian(&(a - b))?)
}

/// Two smallest singular values of a general square matrix, via the
/// eigenvalues of `a^dagger a`. Used to diagnose null-space degeneracy.
pub fn smallest_two_singular_values(a: &CMat) -> Result<(f64, f64)> {
    let ata = a.t().mapv(|z| z.conj()).dot(a);
    let ev = eigvalsh(&ata)?;
    let s0 = ev[0].max(0.0).sqrt();
    let s1 = ev[1].max(0.0).sqrt();
    Ok((s0, s1))
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Frobenius norm.
pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Max-abs norm over entries.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Identity matrix of size `n`.
pub fn eye(n: usize) -> CMat {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

/// Adjoint (conjugate transpose).
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = ndarray::array![
            [c(2.0, 0.0), c(0.0, 1.0)],
            [c(0.0, -1.0), c(3.0, 0.0)]
        ];
        let x_true = ndarray::array![c(1.0, 2.0), c(-0.5, 0.3)];
        let b = a.dot(&x_true);
        let x = solve_vec(&a, &b).unwrap();
        for (u, v) in x.iter().zip(x_true.iter()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn eigvalsh_diagonal() {
        let h = Array2::from_diag(&ndarray::arr1(&[c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]));
        let ev = eigvalsh(&h).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14);
        assert!((ev[1] - 2.0).abs() < 1e-14);
        assert!((ev[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_of_pauli_z_like() {
        let h = Array2::from_diag(&ndarray::arr1(&[c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!((trace_norm_hermitian(&h).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kron_matches_hand_expansion() {
        let a = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let b = ndarray::array![[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 0]], c(0.0, 1.0));
        assert_eq!(k[[0, 2]], c(0.0, 2.0));
        assert_eq!(k[[1, 3]], c(2.0, 0.0));
        assert_eq!(k[[3, 3]], c(1.0, 0.0));
    }
}
