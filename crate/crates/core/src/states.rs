//! Pure and mixed bipartite states, the vector–operator isomorphism,
//! maximally entangled and isotropic families, Schmidt decomposition.
//!
//! Index convention: a vector `ψ = Σ x_ij e_i ⊗ e_j` maps to the operator
//! `F` with `x_ij = <j|F|i>`, i.e. `F` is the *transpose* of the
//! coefficient matrix, so that `ψ = Σ e_i ⊗ F e_i`. Off-by-transpose is
//! the classic bug here; every reshape in this crate goes through
//! [`vec_to_op`] / [`op_to_vec`].

use num_complex::Complex;

use crate::numerics::{
    self, eigh, kron, numerical_rank, singular_values, CMatrix, Tolerances,
};
use crate::scalar::{re, Real};
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Normalized pure state with explicit subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    amplitudes: Vec<Complex<T>>,
    dims: Vec<usize>,
}

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: Vec<Complex<T>>, dims: Vec<usize>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(
                "subsystem dimensions must be positive".into(),
            ));
        }
        if len != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector of length {} does not match dims {:?}",
                amplitudes.len(),
                dims
            )));
        }
        let norm_sq = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        if (norm_sq - T::one()).abs() > T::of(NORM_TOL) * T::of(1e2) {
            return Err(Error::InvalidInput(format!(
                "state vector is not normalized (|ψ|² = {})",
                norm_sq.as_f64()
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(mut amplitudes: Vec<Complex<T>>, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm == T::zero() {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        for z in &mut amplitudes {
            *z = z.unscale(norm);
        }
        Self::new(amplitudes, dims)
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Density matrix `|ψ><ψ|`.
    pub fn projector(&self) -> DensityMatrix<T> {
        let m = CMatrix::outer(&self.amplitudes, &self.amplitudes);
        DensityMatrix {
            matrix: m,
            dims: self.dims.clone(),
        }
    }

    /// Reorders tensor factors; `perm[k]` is the old position moved to slot `k`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidParameter(format!(
                "{:?} is not a permutation of {} factors",
                perm, n
            )));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); self.amplitudes.len()];
        let len = self.amplitudes.len();
        for idx in 0..len {
            // Decompose idx in the old dims, reassemble in permuted order.
            let mut old_digits = vec![0usize; n];
            let mut rest = idx;
            for k in (0..n).rev() {
                old_digits[k] = rest % self.dims[k];
                rest /= self.dims[k];
            }
            let mut new_idx = 0;
            for k in 0..n {
                new_idx = new_idx * new_dims[k] + old_digits[perm[k]];
            }
            amplitudes[new_idx] = self.amplitudes[idx];
        }
        Ok(Self {
            amplitudes,
            dims: new_dims,
        })
    }
}

/// Trace-one positive-semidefinite matrix with subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
    dims: Vec<usize>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if dims.is_empty() || !matrix.is_square() || matrix.rows() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix side {} does not match dims {:?}",
                matrix.rows(),
                dims
            )));
        }
        let residual = matrix.hermiticity_residual();
        if residual > T::of(1e-9) * (T::one() + matrix.frobenius_norm()) {
            return Err(Error::NotHermitian {
                residual: residual.as_f64(),
            });
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > T::of(1e-10) {
            return Err(Error::InvalidInput(format!(
                "density matrix trace is {}, expected 1",
                tr.as_f64()
            )));
        }
        let min = numerics::min_eigenvalue(&matrix)?;
        if min < -T::of(1e-9) {
            return Err(Error::NotPsd {
                min_eigenvalue: min.as_f64(),
            });
        }
        Ok(Self { matrix, dims })
    }

    /// Skips the spectral checks; for matrices constructed to be valid.
    pub(crate) fn new_unchecked(matrix: CMatrix<T>, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    /// Local dimension for a `d x d` bipartite state with equal factors.
    pub fn equal_local_dim(&self) -> Result<usize> {
        match self.dims.as_slice() {
            [a, b] if a == b => Ok(*a),
            _ => Err(Error::DimensionMismatch(format!(
                "expected a bipartite state with equal local dimensions, got {:?}",
                self.dims
            ))),
        }
    }
}

/// The operator side of the ψ ↔ F isomorphism: columns are indexed by
/// the A factor, rows by the B factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitionOperator<T> {
    f: CMatrix<T>,
    dims_a: Vec<usize>,
    dims_b: Vec<usize>,
}

impl<T: Real> BipartitionOperator<T> {
    pub fn new(f: CMatrix<T>, dims_a: Vec<usize>, dims_b: Vec<usize>) -> Result<Self> {
        let da: usize = dims_a.iter().product();
        let db: usize = dims_b.iter().product();
        if f.rows() != db || f.cols() != da {
            return Err(Error::DimensionMismatch(format!(
                "operator shape {}x{} does not match dims B {:?} x A {:?}",
                f.rows(),
                f.cols(),
                dims_b,
                dims_a
            )));
        }
        Ok(Self { f, dims_a, dims_b })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.f
    }

    pub fn dims_a(&self) -> &[usize] {
        &self.dims_a
    }

    pub fn dims_b(&self) -> &[usize] {
        &self.dims_b
    }
}

/// `ψ⁺_d = d^{-1/2} Σ e_k ⊗ e_k`.
pub fn max_entangled<T: Real>(d: usize) -> PureState<T> {
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); d * d];
    let amp = T::one() / T::of(d as f64).sqrt();
    for k in 0..d {
        amplitudes[k * d + k] = re(amp);
    }
    PureState {
        amplitudes,
        dims: vec![d, d],
    }
}

/// Projector onto the maximally entangled state, `P⁺_d`.
pub fn max_entangled_projector<T: Real>(d: usize) -> CMatrix<T> {
    max_entangled::<T>(d).projector().matrix.clone()
}

/// Reshapes `ψ = Σ e_i ⊗ F e_i` into its bipartition operator at `cut`.
pub fn vec_to_op<T: Real>(psi: &PureState<T>, cut: usize) -> Result<BipartitionOperator<T>> {
    let n = psi.dims.len();
    if cut == 0 || cut >= n {
        return Err(Error::InvalidParameter(format!(
            "cut {} outside 1..{}",
            cut,
            n - 1
        )));
    }
    let dims_a = psi.dims[..cut].to_vec();
    let dims_b = psi.dims[cut..].to_vec();
    let da: usize = dims_a.iter().product();
    let db: usize = dims_b.iter().product();
    let f = CMatrix::from_fn(db, da, |j, i| psi.amplitudes[i * db + j]);
    Ok(BipartitionOperator { f, dims_a, dims_b })
}

/// Inverse of [`vec_to_op`].
pub fn op_to_vec<T: Real>(op: &BipartitionOperator<T>) -> Result<PureState<T>> {
    let da = op.f.cols();
    let db = op.f.rows();
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); da * db];
    for i in 0..da {
        for j in 0..db {
            amplitudes[i * db + j] = op.f[(j, i)];
        }
    }
    let mut dims = op.dims_a.clone();
    dims.extend_from_slice(&op.dims_b);
    PureState::new(amplitudes, dims)
}

/// Schmidt coefficients across `cut`, nonincreasing; their squares sum to 1.
pub fn schmidt_coefficients<T: Real>(psi: &PureState<T>, cut: usize) -> Result<Vec<T>> {
    let op = vec_to_op(psi, cut)?;
    Ok(singular_values(op.matrix()))
}

/// Number of non-vanishing Schmidt coefficients across `cut`.
pub fn schmidt_rank<T: Real>(psi: &PureState<T>, cut: usize, tol: &Tolerances<T>) -> Result<usize> {
    let op = vec_to_op(psi, cut)?;
    Ok(numerical_rank(op.matrix(), tol))
}

/// Isotropic state `(1-λ)/d² I⊗I + λ P⁺` for `-1/(d²-1) ≤ λ ≤ 1`.
pub fn isotropic_lambda<T: Real>(d: usize, lambda: T) -> Result<DensityMatrix<T>> {
    let d2 = T::of((d * d) as f64);
    let lo = -T::one() / (d2 - T::one());
    let slack = T::of(1e-12);
    if lambda < lo - slack || lambda > T::one() + slack {
        return Err(Error::InvalidParameter(format!(
            "λ = {} outside [-1/(d²-1), 1] for d = {d}",
            lambda.as_f64()
        )));
    }
    let idid = CMatrix::identity(d * d).scale_re((T::one() - lambda) / d2);
    let p = max_entangled_projector::<T>(d).scale_re(lambda);
    Ok(DensityMatrix::new_unchecked(&idid + &p, vec![d, d]))
}

/// Isotropic state parameterized by fidelity with `ψ⁺_d`.
pub fn isotropic_fidelity<T: Real>(d: usize, f: T) -> Result<DensityMatrix<T>> {
    let slack = T::of(1e-12);
    if f < -slack || f > T::one() + slack {
        return Err(Error::InvalidParameter(format!(
            "fidelity f = {} outside [0, 1]",
            f.as_f64()
        )));
    }
    let d2 = T::of((d * d) as f64);
    let p = max_entangled_projector::<T>(d);
    let complement = &CMatrix::identity(d * d) - &p;
    let m = &complement.scale_re((T::one() - f) / (d2 - T::one())) + &p.scale_re(f);
    Ok(DensityMatrix::new_unchecked(m, vec![d, d]))
}

/// `f = Tr(ρ P⁺_d)`.
pub fn fidelity_with_max_entangled<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let d = rho.equal_local_dim()?;
    let p = max_entangled_projector::<T>(d);
    Ok((&p * rho.matrix()).trace().re)
}

/// `|ψ_F><ψ_F| = Σ e_ij ⊗ F e_ij F†` for a unit-trace-norm operator `F`.
pub fn projector_from_operator<T: Real>(op: &BipartitionOperator<T>) -> Result<DensityMatrix<T>> {
    let gram = (&op.f.adjoint() * &op.f).trace().re;
    if (gram - T::one()).abs() > T::of(1e-10) {
        return Err(Error::InvalidInput(format!(
            "Tr(F†F) = {}, expected 1",
            gram.as_f64()
        )));
    }
    Ok(op_to_vec(op)?.projector())
}

/// Unnormalized `Σ e_ij ⊗ F e_ij F†`; equals `|ψ_F><ψ_F|` scaled by `Tr(F†F)`.
pub fn operator_projection<T: Real>(f: &CMatrix<T>) -> CMatrix<T> {
    let da = f.cols();
    let db = f.rows();
    let mut out = CMatrix::zeros(da * db, da * db);
    for r in 0..da * db {
        let (i1, j1) = (r / db, r % db);
        for c in 0..da * db {
            let (i2, j2) = (c / db, c % db);
            // (e_{i1 i2} ⊗ F e_{i1 i2} F†)[r][c] = F[j1][i1] conj(F[j2][i2])
            out[(r, c)] = f[(j1, i1)] * f[(j2, i2)].conj();
        }
    }
    out
}

/// Spectral decomposition of a density matrix into `(weight, pure state)`
/// pairs, dropping eigenvalues at or below the PSD floor.
pub fn spectral_decomposition<T: Real>(
    rho: &DensityMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<(T, PureState<T>)>> {
    let (vals, vecs) = eigh(rho.matrix())?;
    let floor = tol.psd_abs;
    let mut out = Vec::new();
    for (idx, &v) in vals.iter().enumerate() {
        if v <= floor {
            continue;
        }
        let psi = PureState::from_unnormalized(vecs.column(idx), rho.dims().to_vec())?;
        out.push((v, psi));
    }
    Ok(out)
}

/// Tensor product of two pure states (A factors first).
pub fn tensor_states<T: Real>(a: &PureState<T>, b: &PureState<T>) -> PureState<T> {
    let ka = CMatrix::from_fn(a.amplitudes.len(), 1, |i, _| a.amplitudes[i]);
    let kb = CMatrix::from_fn(b.amplitudes.len(), 1, |i, _| b.amplitudes[i]);
    let prod = kron(&ka, &kb);
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    PureState {
        amplitudes: prod.data().to_vec(),
        dims,
    }
}
