use num_complex::Complex;

use super::{CMatrix, Tolerances};
use crate::scalar::Real;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order together with a unitary matrix
/// whose columns are the matching eigenvectors. Each eigenvector carries
/// a deterministic phase: its largest-magnitude component is real and
/// positive. A matrix that is already diagonal is left in the standard
/// basis, so degenerate diagonal input keeps product eigenvectors.
pub fn eigh<T: Real>(h: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(
            "eigendecomposition needs a square matrix".into(),
        ));
    }
    let norm = h.frobenius_norm();
    let herm_tol = T::epsilon().sqrt() * (T::one() + norm);
    let residual = h.hermiticity_residual();
    if residual > herm_tol {
        return Err(Error::NotHermitian {
            residual: residual.as_f64(),
        });
    }

    let n = h.rows();
    let mut a = h.hermitize();
    let mut v = CMatrix::<T>::identity(n);

    let off = |a: &CMatrix<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s = s + a[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };

    let stop = T::epsilon() * (T::one() + norm) * T::of(n as f64);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::epsilon() * (T::one() + norm) {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Angle zeroing the (p,q) entry of U† A U for the unitary
                // U = [[c, -s·e^{iφ}], [s·e^{-iφ}, c]] with apq = |apq|·e^{iφ}.
                let theta = T::of(0.5) * T::atan2(mag + mag, app - aqq);
                let (s, c) = theta.sin_cos();
                let phase = apq / Complex::new(mag, T::zero());
                let u_pq = -phase.scale(s);
                let u_qp = phase.conj().scale(s);

                // A ← U† A U, applied in place on rows/columns p and q.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip.scale(c) + aiq * u_qp;
                    a[(i, q)] = aip * u_pq + aiq.scale(c);
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj.scale(c) + u_qp.conj() * aqj;
                    a[(q, j)] = u_pq.conj() * apj + aqj.scale(c);
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip.scale(c) + viq * u_qp;
                    v[(i, q)] = vip * u_pq + viq.scale(c);
                }
            }
        }
    }
    if !converged && off(&a) > stop * T::of(1e3) {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());

    let eigenvalues: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let column = v.column(src);
        // Phase convention: largest-magnitude component real positive.
        let (mut imax, mut best) = (0, T::zero());
        for (i, z) in column.iter().enumerate() {
            let m = z.norm();
            if m > best {
                best = m;
                imax = i;
            }
        }
        let phase = if best > T::zero() {
            column[imax].conj() / Complex::new(best, T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        for (i, z) in column.iter().enumerate() {
            vectors[(i, col)] = z * phase;
        }
    }
    Ok((eigenvalues, vectors))
}

/// Singular values in nonincreasing order, via one-sided Jacobi
/// orthogonalization of the columns (high relative accuracy for the
/// small singular values that rank decisions depend on).
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let work = if a.rows() < a.cols() {
        a.adjoint()
    } else {
        a.clone()
    };
    let (m, n) = (work.rows(), work.cols());
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| work.column(j)).collect();
    let scale = work.frobenius_norm();
    if scale == T::zero() {
        return vec![T::zero(); n];
    }
    let tol = T::epsilon() * scale * scale;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Complex::new(T::zero(), T::zero());
                for i in 0..m {
                    alpha = alpha + cols[p][i].norm_sqr();
                    beta = beta + cols[q][i].norm_sqr();
                    gamma = gamma + cols[p][i].conj() * cols[q][i];
                }
                let mag = gamma.norm();
                if mag <= tol || mag * mag <= T::epsilon() * T::epsilon() * alpha * beta {
                    continue;
                }
                rotated = true;
                let theta = T::of(0.5) * T::atan2(mag + mag, alpha - beta);
                let (s, c) = theta.sin_cos();
                let phase = gamma / Complex::new(mag, T::zero());
                let u_pq = -phase.scale(s);
                let u_qp = phase.conj().scale(s);
                for i in 0..m {
                    let cp = cols[p][i];
                    let cq = cols[q][i];
                    cols[p][i] = cp.scale(c) + cq * u_qp;
                    cols[q][i] = cp * u_pq + cq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = cols
        .iter()
        .map(|col| {
            col.iter()
                .map(|z| z.norm_sqr())
                .fold(T::zero(), |a, b| a + b)
                .sqrt()
        })
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Count of singular values above `rank_rel · σ_max`; zero for the zero matrix.
pub fn numerical_rank<T: Real>(a: &CMatrix<T>, tol: &Tolerances<T>) -> usize {
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(T::zero());
    if smax == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_rel * smax).count()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(h: &CMatrix<T>) -> Result<T> {
    let (vals, _) = eigh(h)?;
    Ok(vals[0])
}

/// Positive semidefiniteness up to the `psd_abs` floor.
pub fn is_psd<T: Real>(h: &CMatrix<T>, tol: &Tolerances<T>) -> Result<bool> {
    let (vals, _) = eigh(h)?;
    let min = vals[0];
    let max_abs = vals
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |a, b| a.max(b));
    Ok(min >= -tol.psd_abs * (T::one() + max_abs))
}
