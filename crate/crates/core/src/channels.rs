//! Quantum channels in Kraus form, Choi-state duality in both
//! directions, the named channel families, and the (generally non-CP)
//! reduction-type witness map.
//!
//! Choi matrices carry the state normalization `ρ_Φ = (id ⊗ Φ)P⁺_d`
//! (trace 1), so the Schmidt number of a channel is literally the
//! Schmidt number of its Choi state.

use num_complex::Complex;

use crate::numerics::{
    self, eigh, is_psd, partial_trace, partial_transpose, CMatrix, Tolerances,
};
use crate::scalar::Real;
use crate::states::{self, DensityMatrix};
use crate::{Error, Result};

const TP_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T> {
    kraus_ops: Vec<CMatrix<T>>,
    d_in: usize,
    d_out: usize,
}

impl<T: Real> KrausChannel<T> {
    pub fn identity(d: usize) -> Self {
        Self {
            kraus_ops: vec![CMatrix::identity(d)],
            d_in: d,
            d_out: d,
        }
    }

    pub fn kraus_ops(&self) -> &[CMatrix<T>] {
        &self.kraus_ops
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Largest numerical rank among the Kraus operators.
    pub fn max_kraus_rank(&self, tol: &Tolerances<T>) -> usize {
        self.kraus_ops
            .iter()
            .map(|k| numerics::numerical_rank(k, tol))
            .max()
            .unwrap_or(0)
    }
}

/// Validates `Σ K†K = I` and packages the operators into a channel.
pub fn channel_from_kraus<T: Real>(ops: Vec<CMatrix<T>>) -> Result<KrausChannel<T>> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidInput("empty Kraus list".into()))?;
    let (d_out, d_in) = (first.rows(), first.cols());
    if ops.iter().any(|k| k.rows() != d_out || k.cols() != d_in) {
        return Err(Error::DimensionMismatch(
            "Kraus operators must share one shape".into(),
        ));
    }
    let mut sum = CMatrix::zeros(d_in, d_in);
    for k in &ops {
        sum = &sum + &(&k.adjoint() * k);
    }
    let residual = (&sum - &CMatrix::identity(d_in)).frobenius_norm();
    if residual > T::of(TP_TOL) * T::of(d_in as f64) {
        return Err(Error::NotTracePreserving {
            residual: residual.as_f64(),
        });
    }
    Ok(KrausChannel {
        kraus_ops: ops,
        d_in,
        d_out,
    })
}

/// `Φ(ρ) = Σ K ρ K†`.
pub fn apply<T: Real>(phi: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho.side() != phi.d_in {
        return Err(Error::DimensionMismatch(format!(
            "channel input dimension {} vs state side {}",
            phi.d_in,
            rho.side()
        )));
    }
    let out = apply_matrix(phi, rho.matrix());
    Ok(DensityMatrix::new_unchecked(out, vec![phi.d_out]))
}

fn apply_matrix<T: Real>(phi: &KrausChannel<T>, m: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(phi.d_out, phi.d_out);
    for k in &phi.kraus_ops {
        out = &out + &(&(k * m) * &k.adjoint());
    }
    out
}

/// Choi state of a trace-preserving channel: PSD, trace 1, B-marginal `I/d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<T> {
    matrix: CMatrix<T>,
    d: usize,
}

impl<T: Real> ChoiMatrix<T> {
    /// Validates PSD, unit trace, and the `Tr_B = I/d` marginal.
    pub fn new(matrix: CMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let side = matrix.rows();
        let d = (side as f64).sqrt().round() as usize;
        if !matrix.is_square() || d * d != side {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix side {side} is not a perfect square"
            )));
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > T::of(1e-8) {
            return Err(Error::InvalidInput(format!(
                "Choi trace is {}, expected 1",
                tr.as_f64()
            )));
        }
        if !is_psd(&matrix, tol)? {
            let min = numerics::min_eigenvalue(&matrix)?;
            return Err(Error::NotPsd {
                min_eigenvalue: min.as_f64(),
            });
        }
        let marginal = partial_trace(&matrix, &[d, d], &[0])?;
        let expect = CMatrix::identity(d).scale_re(T::one() / T::of(d as f64));
        let residual = (&marginal - &expect).frobenius_norm();
        if residual > T::of(1e-8) {
            return Err(Error::NotTracePreserving {
                residual: residual.as_f64(),
            });
        }
        Ok(Self { matrix, d })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix<T>, d: usize) -> Self {
        Self { matrix, d }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// View of the Choi matrix as a bipartite `d x d` state.
    pub fn as_state(&self) -> DensityMatrix<T> {
        DensityMatrix::new_unchecked(self.matrix.clone(), vec![self.d, self.d])
    }
}

/// `ρ_Φ = (id ⊗ Φ) P⁺_d = (1/d) Σ e_ij ⊗ Φ(e_ij)`.
pub fn choi<T: Real>(phi: &KrausChannel<T>) -> Result<ChoiMatrix<T>> {
    if phi.d_in != phi.d_out {
        return Err(Error::DimensionMismatch(
            "Choi duality needs d_in = d_out".into(),
        ));
    }
    let d = phi.d_in;
    let matrix = choi_of(d, |m| apply_matrix(phi, m));
    Ok(ChoiMatrix::new_unchecked(matrix, d))
}

fn choi_of<T: Real>(d: usize, mut action: impl FnMut(&CMatrix<T>) -> CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(d * d, d * d);
    let inv_d = T::one() / T::of(d as f64);
    for i in 0..d {
        for j in 0..d {
            let block = action(&CMatrix::unit(d, i, j)).scale_re(inv_d);
            for r in 0..d {
                for c in 0..d {
                    out[(i * d + r, j * d + c)] = block[(r, c)];
                }
            }
        }
    }
    out
}

/// Canonical Kraus extraction from the Choi spectrum: eigenvectors above
/// the PSD floor reshape into `K = √(dλ) F_v`.
pub fn kraus_from_choi<T: Real>(c: &ChoiMatrix<T>, tol: &Tolerances<T>) -> Result<KrausChannel<T>> {
    let validated = ChoiMatrix::new(c.matrix.clone(), tol)?;
    let d = validated.d;
    let (vals, vecs) = eigh(&validated.matrix)?;
    let mut ops = Vec::new();
    for (idx, &lam) in vals.iter().enumerate() {
        if lam <= tol.psd_abs {
            continue;
        }
        let v = vecs.column(idx);
        let scale = (T::of(d as f64) * lam).sqrt();
        // Column vector on C^{d²} reshaped with the ψ ↔ F convention.
        let k = CMatrix::from_fn(d, d, |j, i| v[i * d + j].scale(scale));
        ops.push(k);
    }
    channel_from_kraus(ops)
}

/// Generalized shift/clock unitaries `U_{mn} = X^m Z^n`, trace-orthogonal:
/// `Tr(U_α U_β†) = d δ_αβ`.
pub fn weyl_unitaries<T: Real>(d: usize) -> Vec<CMatrix<T>> {
    let tau = T::of(2.0) * T::PI() / T::of(d as f64);
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            out.push(CMatrix::from_fn(d, d, |r, c| {
                if r == (c + m) % d {
                    let angle = tau * T::of((n * c) as f64);
                    Complex::new(angle.cos(), angle.sin())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }));
        }
    }
    out
}

/// Mixed-unitary channel `K_α = √p_α U_α` over the shift/clock family.
pub fn mixed_unitary_channel<T: Real>(d: usize, p: &[T]) -> Result<KrausChannel<T>> {
    if p.len() != d * d {
        return Err(Error::InvalidParameter(format!(
            "probability vector length {} != d² = {}",
            p.len(),
            d * d
        )));
    }
    let sum = p.iter().fold(T::zero(), |a, &b| a + b);
    if p.iter().any(|&x| x < -T::of(1e-12)) || (sum - T::one()).abs() > T::of(1e-10) {
        return Err(Error::InvalidParameter(
            "probabilities must be nonnegative and sum to 1".into(),
        ));
    }
    let ops: Vec<CMatrix<T>> = weyl_unitaries::<T>(d)
        .into_iter()
        .zip(p)
        .filter(|(_, &w)| w > T::zero())
        .map(|(u, &w)| u.scale_re(w.sqrt()))
        .collect();
    channel_from_kraus(ops)
}

/// The completely depolarizing channel, `p` uniform over the Weyl family.
pub fn depolarizing_channel<T: Real>(d: usize) -> KrausChannel<T> {
    let p = vec![T::one() / T::of((d * d) as f64); d * d];
    mixed_unitary_channel(d, &p).expect("uniform mixture is a valid channel")
}

/// `Φ_λ(ρ) = (1-λ)/d Trρ I + λ ρ`; its Choi state is the isotropic `I_λ`.
pub fn phi_lambda<T: Real>(d: usize, lambda: T) -> Result<KrausChannel<T>> {
    let rho = states::isotropic_lambda(d, lambda)?;
    let c = ChoiMatrix::new_unchecked(rho.matrix().clone(), d);
    kraus_from_choi(&c, &Tolerances::default())
}

/// `Φ_λ` with a nontrivial inner map `Ψ`: `ρ ↦ (1-λ)/d Trρ I + λ Ψ(ρ)`.
pub fn phi_lambda_with<T: Real>(
    d: usize,
    lambda: T,
    psi: HermitianPreservingMap<T>,
) -> Result<HermitianPreservingMap<T>> {
    states::isotropic_lambda::<T>(d, lambda)?; // range check
    if psi.d_in() != d || psi.d_out() != d {
        return Err(Error::DimensionMismatch(
            "inner map must act on M_d".into(),
        ));
    }
    Ok(HermitianPreservingMap {
        d_in: d,
        d_out: d,
        kind: MapKind::Affine {
            trace_coeff: (T::one() - lambda) / T::of(d as f64),
            inner_coeff: lambda,
            inner: Box::new(psi),
        },
    })
}

/// `Φ_f(ρ) = d(1-f)/(d²-1) Trρ I + (d²f-1)/(d²-1) ρ`, the channel whose
/// Choi state is the fidelity-`f` isotropic state.
pub fn phi_f<T: Real>(d: usize, f: T) -> Result<KrausChannel<T>> {
    let d2 = T::of((d * d) as f64);
    let slack = T::of(1e-12);
    if f < T::one() / d2 - slack || f > T::one() + slack {
        // Outside the accepted range; report where the Choi spectrum sits.
        let min = states::isotropic_fidelity(d, f)
            .and_then(|rho| numerics::min_eigenvalue(rho.matrix()))
            .map(|m| m.as_f64())
            .unwrap_or(f64::NAN);
        return Err(Error::InvalidParameter(format!(
            "f = {} outside [1/d², 1] (Choi min eigenvalue {:.3e})",
            f.as_f64(),
            min
        )));
    }
    let rho = states::isotropic_fidelity(d, f)?;
    let c = ChoiMatrix::new_unchecked(rho.matrix().clone(), d);
    kraus_from_choi(&c, &Tolerances::default())
}

/// Hermiticity-preserving map given by an evaluation kernel. Covers maps
/// with no Kraus form, such as the reduction map for μ > 1/d.
#[derive(Debug, Clone)]
pub struct HermitianPreservingMap<T> {
    d_in: usize,
    d_out: usize,
    kind: MapKind<T>,
}

#[derive(Debug, Clone)]
enum MapKind<T> {
    Kraus(KrausChannel<T>),
    /// `σ ↦ I Trσ − μσ`.
    Reduction { mu: T },
    /// `σ ↦ trace_coeff · Trσ · I + inner_coeff · inner(σ)`.
    Affine {
        trace_coeff: T,
        inner_coeff: T,
        inner: Box<HermitianPreservingMap<T>>,
    },
    /// `outer ∘ inner`.
    Composed {
        outer: Box<HermitianPreservingMap<T>>,
        inner: Box<HermitianPreservingMap<T>>,
    },
}

impl<T: Real> HermitianPreservingMap<T> {
    pub fn from_channel(phi: KrausChannel<T>) -> Self {
        Self {
            d_in: phi.d_in,
            d_out: phi.d_out,
            kind: MapKind::Kraus(phi),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_channel(KrausChannel::identity(d))
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Evaluates the map on a matrix from `M_{d_in}`.
    pub fn eval(&self, sigma: &CMatrix<T>) -> Result<CMatrix<T>> {
        if !sigma.is_square() || sigma.rows() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "map expects side {}, got {}",
                self.d_in,
                sigma.rows()
            )));
        }
        Ok(match &self.kind {
            MapKind::Kraus(phi) => apply_matrix(phi, sigma),
            MapKind::Reduction { mu } => {
                let tr = sigma.trace();
                &CMatrix::identity(self.d_in).scale(tr) - &sigma.scale_re(*mu)
            }
            MapKind::Affine {
                trace_coeff,
                inner_coeff,
                inner,
            } => {
                let tr = sigma.trace();
                &CMatrix::identity(self.d_out).scale(tr.scale(*trace_coeff))
                    + &inner.eval(sigma)?.scale_re(*inner_coeff)
            }
            MapKind::Composed { outer, inner } => outer.eval(&inner.eval(sigma)?)?,
        })
    }

    /// `(id ⊗ Λ) P⁺_d`; Hermitian but PSD only when the map is CP.
    pub fn choi_matrix(&self) -> Result<CMatrix<T>> {
        if self.d_in != self.d_out {
            return Err(Error::DimensionMismatch(
                "Choi form needs d_in = d_out".into(),
            ));
        }
        let d = self.d_in;
        let mut out = CMatrix::zeros(d * d, d * d);
        let inv_d = T::one() / T::of(d as f64);
        for i in 0..d {
            for j in 0..d {
                let block = self.eval(&CMatrix::unit(d, i, j))?.scale_re(inv_d);
                for r in 0..d {
                    for c in 0..d {
                        out[(i * d + r, j * d + c)] = block[(r, c)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Complete positivity, decided from the Choi spectrum.
    pub fn is_cp(&self, tol: &Tolerances<T>) -> Result<bool> {
        is_psd(&self.choi_matrix()?, tol)
    }

    pub fn as_kraus(&self) -> Option<&KrausChannel<T>> {
        match &self.kind {
            MapKind::Kraus(phi) => Some(phi),
            _ => None,
        }
    }

    /// For the reduction map: the level `k` at which `Λ_μ` is `k`- but
    /// not `(k+1)`-positive, i.e. `1/(k+1) ≤ μ ≤ 1/k`.
    pub fn positivity_level(&self) -> Option<usize> {
        match &self.kind {
            MapKind::Reduction { mu } => {
                let inv = T::one() / *mu;
                Some((inv + T::of(1e-9)).floor().as_f64() as usize)
            }
            _ => None,
        }
    }
}

/// The reduction-type map `Λ_μ(σ) = I Trσ − μσ` on `M_d`.
pub fn reduction_map<T: Real>(d: usize, mu: T) -> Result<HermitianPreservingMap<T>> {
    if mu <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "μ = {} must be positive",
            mu.as_f64()
        )));
    }
    Ok(HermitianPreservingMap {
        d_in: d,
        d_out: d,
        kind: MapKind::Reduction { mu },
    })
}

/// `(id ⊗ m) ρ` for a bipartite state on `C^d ⊗ C^d`, applied blockwise.
pub fn extend_apply<T: Real>(
    m: &HermitianPreservingMap<T>,
    rho: &DensityMatrix<T>,
) -> Result<CMatrix<T>> {
    let d = m.d_in();
    let side = rho.side();
    if side % d != 0 {
        return Err(Error::DimensionMismatch(format!(
            "state side {side} is not divisible into blocks of {d}"
        )));
    }
    let da = side / d;
    extend_apply_matrix(m, rho.matrix(), da)
}

pub(crate) fn extend_apply_matrix<T: Real>(
    m: &HermitianPreservingMap<T>,
    rho: &CMatrix<T>,
    da: usize,
) -> Result<CMatrix<T>> {
    let d = m.d_in();
    if rho.rows() != da * d {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {} != {da}·{d}",
            rho.rows()
        )));
    }
    let d_out = m.d_out();
    let mut out = CMatrix::zeros(da * d_out, da * d_out);
    for i in 0..da {
        for j in 0..da {
            let block = CMatrix::from_fn(d, d, |r, c| rho[(i * d + r, j * d + c)]);
            let mapped = m.eval(&block)?;
            for r in 0..d_out {
                for c in 0..d_out {
                    out[(i * d_out + r, j * d_out + c)] = mapped[(r, c)];
                }
            }
        }
    }
    Ok(out)
}

/// `(id ⊗ Φ) ρ` for a Kraus channel, returned as a validated-by-construction state.
pub fn extend_apply_channel<T: Real>(
    phi: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    let m = HermitianPreservingMap::from_channel(phi.clone());
    let d = phi.d_in;
    let da = rho.side() / d;
    if da * d != rho.side() {
        return Err(Error::DimensionMismatch(format!(
            "state side {} is not a multiple of channel dimension {d}",
            rho.side()
        )));
    }
    let out = extend_apply_matrix(&m, rho.matrix(), da)?;
    Ok(DensityMatrix::new_unchecked(out, vec![da, phi.d_out]))
}

/// Function composition `a ∘ b`; Kraus composition when both are channels.
pub fn compose<T: Real>(
    a: &HermitianPreservingMap<T>,
    b: &HermitianPreservingMap<T>,
) -> Result<HermitianPreservingMap<T>> {
    if a.d_in() != b.d_out() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose: inner output {} != outer input {}",
            b.d_out(),
            a.d_in()
        )));
    }
    if let (Some(ka), Some(kb)) = (a.as_kraus(), b.as_kraus()) {
        let mut ops = Vec::with_capacity(ka.kraus_ops.len() * kb.kraus_ops.len());
        for x in &ka.kraus_ops {
            for y in &kb.kraus_ops {
                ops.push(x * y);
            }
        }
        return Ok(HermitianPreservingMap::from_channel(channel_from_kraus(
            ops,
        )?));
    }
    Ok(HermitianPreservingMap {
        d_in: b.d_in(),
        d_out: a.d_out(),
        kind: MapKind::Composed {
            outer: Box::new(a.clone()),
            inner: Box::new(b.clone()),
        },
    })
}

/// Complete co-positivity: the partial transpose of the Choi state is PSD.
pub fn is_ccp<T: Real>(phi: &KrausChannel<T>, tol: &Tolerances<T>) -> Result<bool> {
    let c = choi(phi)?;
    let d = c.d();
    let pt = partial_transpose(c.matrix(), [d, d], 1)?;
    is_psd(&pt, tol)
}
