//! Shared random generators for the integration suites.
#![allow(dead_code)] // each test target uses a different subset

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpebt_core::channels::{channel_from_kraus, KrausChannel};
use qpebt_core::numerics::{eigh, CMatrix, Tolerances};
use qpebt_core::states::{spectral_decomposition, vec_to_op, DensityMatrix, PureState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let g = random_matrix(rng, n, n);
    (&g + &g.adjoint()).scale_re(0.5)
}

pub fn random_density(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> DensityMatrix<f64> {
    let n: usize = dims.iter().product();
    let g = random_matrix(rng, n, n);
    let gram = &g * &g.adjoint();
    let rho = gram.scale_re(1.0 / gram.trace().re);
    DensityMatrix::new(rho, dims).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> PureState<f64> {
    let n: usize = dims.iter().product();
    let amps = (0..n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PureState::from_unnormalized(amps, dims).unwrap()
}

/// Inverse square root of a positive definite matrix via its spectrum.
fn inv_sqrt(m: &CMatrix<f64>) -> CMatrix<f64> {
    let (vals, vecs) = eigh(m).unwrap();
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        out = &out + &CMatrix::outer(&col, &col).scale_re(1.0 / v.sqrt());
    }
    out
}

/// Random channel with `k` Kraus operators: raw maps `A_α` are whitened
/// by `S^{-1/2}` where `S = Σ A†A`, which enforces the trace condition.
pub fn random_channel(rng: &mut ChaCha8Rng, d: usize, k: usize) -> KrausChannel<f64> {
    let raw: Vec<CMatrix<f64>> = (0..k).map(|_| random_matrix(rng, d, d)).collect();
    let mut s = CMatrix::zeros(d, d);
    for a in &raw {
        s = &s + &(&a.adjoint() * a);
    }
    let w = inv_sqrt(&s);
    channel_from_kraus(raw.iter().map(|a| a * &w).collect()).unwrap()
}

/// Random channel whose Kraus operators all have rank at most `r`.
pub fn random_rank_capped_channel(
    rng: &mut ChaCha8Rng,
    d: usize,
    k: usize,
    r: usize,
) -> KrausChannel<f64> {
    let raw: Vec<CMatrix<f64>> = (0..k)
        .map(|_| {
            let mut a = CMatrix::zeros(d, d);
            for _ in 0..r {
                let u: Vec<Complex<f64>> = (0..d)
                    .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let v: Vec<Complex<f64>> = (0..d)
                    .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                a = &a + &CMatrix::outer(&u, &v);
            }
            a
        })
        .collect();
    let mut s = CMatrix::zeros(d, d);
    for a in &raw {
        s = &s + &(&a.adjoint() * a);
    }
    let w = inv_sqrt(&s);
    channel_from_kraus(raw.iter().map(|a| a * &w).collect()).unwrap()
}

/// Spectral decomposition of a random bipartite state, returned in the
/// `{p_β, F_β}` operator form with `Tr F†F = 1`.
pub fn random_decomposition(
    rng: &mut ChaCha8Rng,
    d: usize,
    tol: &Tolerances<f64>,
) -> Vec<(f64, CMatrix<f64>)> {
    let rho = random_density(rng, vec![d, d]);
    spectral_decomposition(&rho, tol)
        .unwrap()
        .iter()
        .map(|(p, psi)| (*p, vec_to_op(psi, 1).unwrap().matrix().clone()))
        .collect()
}
