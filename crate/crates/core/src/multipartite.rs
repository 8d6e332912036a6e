//! N-party machinery: operator representations of multipartite pure
//! states across contiguous-prefix bipartitions, slice operators,
//! reduced density matrices, GHZ/W constructors, and the even-party
//! state-to-channel correspondence.

use num_complex::Complex;

use crate::channels::{channel_from_kraus, choi, KrausChannel};
use crate::numerics::{CMatrix, Tolerances};
use crate::scalar::{re, Real};
use crate::states::{operator_projection, vec_to_op, BipartitionOperator, DensityMatrix, PureState};
use crate::{Error, Result};

/// Family of `d x d` operators indexed by the first `N-2` factor indices,
/// from the slice representation `ψ = Σ e_{i1} ⊗ … ⊗ e_{i_{N-1}} ⊗ F_{i1…i_{N-2}} e_{i_{N-1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceOperators<T> {
    ops: Vec<CMatrix<T>>,
    d: usize,
}

impl<T: Real> SliceOperators<T> {
    pub fn ops(&self) -> &[CMatrix<T>] {
        &self.ops
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `Σ Tr(F†F)` over the family; 1 for a normalized source state.
    pub fn total_trace_norm(&self) -> T {
        self.ops
            .iter()
            .map(|f| (&f.adjoint() * f).trace().re)
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Bipartition operator for the cut "first `k` factors vs the rest".
pub fn bipartition_operator<T: Real>(
    psi: &PureState<T>,
    k: usize,
) -> Result<BipartitionOperator<T>> {
    vec_to_op(psi, k)
}

/// Reduced states of both sides of the cut: `ρ_A = F†F`, `ρ_B = FF†`.
pub fn reduced_states<T: Real>(
    psi: &PureState<T>,
    k: usize,
) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
    let op = vec_to_op(psi, k)?;
    let f = op.matrix();
    let rho_a = &f.adjoint() * f;
    let rho_b = f * &f.adjoint();
    Ok((
        DensityMatrix::new(rho_a, op.dims_a().to_vec())?,
        DensityMatrix::new(rho_b, op.dims_b().to_vec())?,
    ))
}

/// Slice operators of a state with equal factor dimensions.
pub fn slice_operators<T: Real>(psi: &PureState<T>) -> Result<SliceOperators<T>> {
    let dims = psi.dims();
    let n = dims.len();
    if n < 2 {
        return Err(Error::DimensionMismatch("need at least two factors".into()));
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::DimensionMismatch(format!(
            "slice operators need equal factor dimensions, got {:?}",
            dims
        )));
    }
    let prefix = d.pow((n - 2) as u32);
    let amps = psi.amplitudes();
    let mut ops = Vec::with_capacity(prefix);
    for idx in 0..prefix {
        // F_{i1…i_{N-2}}[i_N][i_{N-1}] = ψ[i1, …, iN]
        ops.push(CMatrix::from_fn(d, d, |row, col| {
            amps[(idx * d + col) * d + row]
        }));
    }
    Ok(SliceOperators { ops, d })
}

/// Three-qubit GHZ state `(|000> + |111>)/√2`.
pub fn ghz<T: Real>() -> PureState<T> {
    let s = T::one() / T::of(2.0).sqrt();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 8];
    amps[0] = re(s);
    amps[7] = re(s);
    PureState::new(amps, vec![2, 2, 2]).expect("GHZ is normalized")
}

/// Three-qubit W state `(|100> + |010> + |001>)/√3`.
pub fn w_state<T: Real>() -> PureState<T> {
    let s = T::one() / T::of(3.0).sqrt();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 8];
    amps[1] = re(s);
    amps[2] = re(s);
    amps[4] = re(s);
    PureState::new(amps, vec![2, 2, 2]).expect("W is normalized")
}

/// Builds the channel on `M_{d^K}` whose Choi state is the given
/// `2K`-party state, from a decomposition `{p_α, F_α}` of that state:
/// `K_α = √(d^K p_α) F_α`.
pub fn even_party_channel<T: Real>(
    rho: &DensityMatrix<T>,
    decomposition: &[(T, CMatrix<T>)],
    tol: &Tolerances<T>,
) -> Result<KrausChannel<T>> {
    let side = rho.side();
    let dk = (side as f64).sqrt().round() as usize;
    if dk * dk != side {
        return Err(Error::DimensionMismatch(
            "even-party correspondence needs a square total dimension".into(),
        ));
    }
    let mut recon = CMatrix::zeros(side, side);
    let mut ops = Vec::with_capacity(decomposition.len());
    for (p, f) in decomposition {
        if f.rows() != dk || f.cols() != dk || *p < -T::of(1e-12) {
            return Err(Error::InvalidInput(
                "decomposition operators must be d^K x d^K with nonnegative weights".into(),
            ));
        }
        recon = &recon + &operator_projection(f).scale_re(*p);
        if *p > T::zero() {
            ops.push(f.scale_re((T::of(dk as f64) * *p).sqrt()));
        }
    }
    if !recon.approx_eq(rho.matrix(), T::of(1e-9) * (T::one() + rho.matrix().frobenius_norm())) {
        return Err(Error::InvalidInput(
            "decomposition does not reassemble the state".into(),
        ));
    }
    let channel = channel_from_kraus(ops)?;
    // Cross-check the duality: the Choi state of the built channel is ρ.
    let c = choi(&channel)?;
    if !c
        .matrix()
        .approx_eq(rho.matrix(), T::of(1e-8) * (T::one() + rho.matrix().frobenius_norm()))
    {
        return Err(Error::InvalidInput(
            "decomposition is inconsistent with the Choi duality".into(),
        ));
    }
    let _ = tol;
    Ok(channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{self, partial_trace};
    use crate::scalar::c;
    use crate::states::{max_entangled, max_entangled_projector, op_to_vec, schmidt_rank};

    type M = CMatrix<f64>;
    const TOL: f64 = 1e-12;

    fn tols() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn ghz_and_w_are_the_expected_vectors() {
        let g = ghz::<f64>();
        let w = w_state::<f64>();
        assert!((g.inner(&g) - c::<f64>(1.0, 0.0)).norm() < TOL);
        assert!((w.inner(&w) - c::<f64>(1.0, 0.0)).norm() < TOL);
        assert!(g.inner(&w).norm() < TOL);
        assert_eq!(schmidt_rank(&g, 1, &tols()).unwrap(), 2);
        assert_eq!(schmidt_rank(&w, 1, &tols()).unwrap(), 2);
    }

    #[test]
    fn ghz_bipartition_operator_matches_known_matrix() {
        // F' for the GHZ state at K = 2 is (1/√2) [[1,0,0,0],[0,0,0,1]].
        let op = bipartition_operator(&ghz::<f64>(), 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expect = M::from_rows(&[
            vec![(s, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            vec![(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (s, 0.0)],
        ])
        .unwrap();
        assert!(op.matrix().approx_eq(&expect, TOL));
    }

    #[test]
    fn w_bipartition_operator_matches_known_matrix() {
        // F̃' for the W state at K = 2 is (1/√3) [[0,1,1,0],[1,0,0,0]].
        let op = bipartition_operator(&w_state::<f64>(), 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let expect = M::from_rows(&[
            vec![(0.0, 0.0), (s, 0.0), (s, 0.0), (0.0, 0.0)],
            vec![(s, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        ])
        .unwrap();
        assert!(op.matrix().approx_eq(&expect, TOL));
    }

    #[test]
    fn round_trip_through_bipartition_operator() {
        for k in 1..=2 {
            for psi in [ghz::<f64>(), w_state::<f64>()] {
                let op = bipartition_operator(&psi, k).unwrap();
                let back = op_to_vec(&op).unwrap();
                assert_eq!(back.amplitudes(), psi.amplitudes());
            }
        }
    }

    #[test]
    fn reduced_states_match_partial_trace() {
        // GHZ at K = 1: ρ_B = (|00><00| + |11><11|)/2.
        let (rho_a, rho_b) = reduced_states(&ghz::<f64>(), 1).unwrap();
        let mut expect = M::zeros(4, 4);
        expect[(0, 0)] = c(0.5, 0.0);
        expect[(3, 3)] = c(0.5, 0.0);
        assert!(rho_b.matrix().approx_eq(&expect, TOL));
        assert!(rho_a
            .matrix()
            .approx_eq(&M::identity(2).scale_re(0.5), TOL));

        // Against the direct partial-trace oracle.
        let proj = ghz::<f64>().projector();
        let oracle = partial_trace(proj.matrix(), &[2, 2, 2], &[1, 2]).unwrap();
        assert!(rho_b.matrix().approx_eq(&oracle, TOL));

        // ψ⁺_d at K = 1: both marginals are I/d.
        let (a, b) = reduced_states(&max_entangled::<f64>(3), 1).unwrap();
        assert!(a.matrix().approx_eq(&M::identity(3).scale_re(1.0 / 3.0), TOL));
        assert!(b.matrix().approx_eq(&M::identity(3).scale_re(1.0 / 3.0), TOL));

        // W at K = 1: ρ_B = (1/3)|00><00| + (2/3)|Ψ⁺><Ψ⁺|.
        let (_, rho_b) = reduced_states(&w_state::<f64>(), 1).unwrap();
        let mut expect = M::zeros(4, 4);
        expect[(0, 0)] = c(1.0 / 3.0, 0.0);
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            expect[(i, j)] = c(1.0 / 3.0, 0.0);
        }
        assert!(rho_b.matrix().approx_eq(&expect, TOL));
    }

    #[test]
    fn marginals_share_their_nonzero_spectrum() {
        let (a, b) = reduced_states(&w_state::<f64>(), 1).unwrap();
        let (va, _) = numerics::eigh(a.matrix()).unwrap();
        let (vb, _) = numerics::eigh(b.matrix()).unwrap();
        let nz_a: Vec<f64> = va.into_iter().filter(|x| *x > 1e-9).collect();
        let nz_b: Vec<f64> = vb.into_iter().filter(|x| *x > 1e-9).collect();
        assert_eq!(nz_a.len(), nz_b.len());
        for (x, y) in nz_a.iter().zip(&nz_b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_operator_ranks_separate_ghz_from_w() {
        let t = tols();
        let sg = slice_operators(&ghz::<f64>()).unwrap();
        let ranks: Vec<usize> = sg
            .ops()
            .iter()
            .map(|f| numerics::numerical_rank(f, &t))
            .collect();
        assert_eq!(ranks, vec![1, 1]);
        assert!((sg.total_trace_norm() - 1.0).abs() < TOL);

        let sw = slice_operators(&w_state::<f64>()).unwrap();
        let ranks: Vec<usize> = sw
            .ops()
            .iter()
            .map(|f| numerics::numerical_rank(f, &t))
            .collect();
        assert_eq!(ranks, vec![2, 1]);
        assert!((sw.total_trace_norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn slice_index_relation_holds() {
        // <e_{iN}|F_{i1…}|e_{i_{N-1}}> equals the matching entry of the
        // cut-(N-1) bipartition operator.
        let psi = w_state::<f64>();
        let slices = slice_operators(&psi).unwrap();
        let g = bipartition_operator(&psi, 2).unwrap();
        for i1 in 0..2 {
            for i2 in 0..2 {
                for i3 in 0..2 {
                    let lhs = slices.ops()[i1][(i3, i2)];
                    let rhs = g.matrix()[(i3, i1 * 2 + i2)];
                    assert!((lhs - rhs).norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn even_party_channel_examples() {
        let t = tols();
        // P⁺ decomposed by F = I/√d gives the identity channel.
        let d = 2;
        let rho = DensityMatrix::new(max_entangled_projector::<f64>(d), vec![d, d]).unwrap();
        let decomp = vec![(1.0, M::identity(d).scale_re(1.0 / (d as f64).sqrt()))];
        let ch = even_party_channel(&rho, &decomp, &t).unwrap();
        let cid = choi(&ch).unwrap();
        assert!(cid.matrix().approx_eq(rho.matrix(), 1e-10));

        // Rank-one decomposition operators give an EBT channel.
        let mut m = M::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        let rho = DensityMatrix::new(m, vec![2, 2]).unwrap();
        let decomp = vec![
            (0.5, M::unit(2, 0, 0)),
            (0.5, M::unit(2, 0, 1)),
        ];
        let ch = even_party_channel(&rho, &decomp, &t).unwrap();
        assert_eq!(ch.max_kraus_rank(&t), 1);
    }
}
