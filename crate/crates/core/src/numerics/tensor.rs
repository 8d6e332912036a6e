use num_complex::Complex;

use super::CMatrix;
use crate::scalar::Real;
use crate::{Error, Result};

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn check_side<T: Real>(m: &CMatrix<T>, dims: &[usize]) -> Result<usize> {
    let side: usize = dims.iter().product();
    if !m.is_square() || m.rows() != side {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {} does not match factor dimensions {:?}",
            m.rows(),
            dims
        )));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::DimensionMismatch("zero factor dimension".into()));
    }
    Ok(side)
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

fn compose(keep_digits: &[usize], traced_digits: &[usize], keep: &[usize], dims: &[usize]) -> usize {
    let mut full = vec![0; dims.len()];
    for (slot, &pos) in keep.iter().enumerate() {
        full[pos] = keep_digits[slot];
    }
    let mut t = 0;
    for (pos, slot) in full.iter_mut().enumerate() {
        if !keep.contains(&pos) {
            *slot = traced_digits[t];
            t += 1;
        }
    }
    full.iter().zip(dims).fold(0, |acc, (&d, &dim)| acc * dim + d)
}

/// Traces out every tensor factor not listed in `keep` (0-based indices).
pub fn partial_trace<T: Real>(
    m: &CMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<CMatrix<T>> {
    check_side(m, dims)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(
            "kept factor index out of range".into(),
        ));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = (0..dims.len())
        .filter(|p| !keep.contains(p))
        .map(|p| dims[p])
        .collect();
    let kept_side: usize = kept_dims.iter().product::<usize>().max(1);
    let traced_side: usize = traced_dims.iter().product::<usize>().max(1);

    let mut out = CMatrix::zeros(kept_side, kept_side);
    for r in 0..kept_side {
        let rd = digits(r, &kept_dims);
        for c in 0..kept_side {
            let cd = digits(c, &kept_dims);
            let mut acc = Complex::new(T::zero(), T::zero());
            for t in 0..traced_side {
                let td = digits(t, &traced_dims);
                let fr = compose(&rd, &td, &keep, dims);
                let fc = compose(&cd, &td, &keep, dims);
                acc = acc + m[(fr, fc)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the chosen factor (0 = A, 1 = B) of a bipartite operator.
pub fn partial_transpose<T: Real>(
    m: &CMatrix<T>,
    dims: [usize; 2],
    subsystem: usize,
) -> Result<CMatrix<T>> {
    let [da, db] = dims;
    check_side(m, &dims)?;
    if subsystem > 1 {
        return Err(Error::DimensionMismatch(
            "bipartite subsystem index must be 0 or 1".into(),
        ));
    }
    Ok(CMatrix::from_fn(da * db, da * db, |r, c| {
        let (a1, b1) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        if subsystem == 0 {
            m[(a2 * db + b1, a1 * db + b2)]
        } else {
            m[(a1 * db + b2, a2 * db + b1)]
        }
    }))
}
