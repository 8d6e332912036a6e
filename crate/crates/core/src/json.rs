//! Serde-friendly wire formats. Matrices are encoded as
//! `{"rows": n, "cols": m, "data": [[re, im], ...]}` row-major with
//! IEEE-754 doubles, regardless of the in-memory scalar type.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channels::{channel_from_kraus, ChoiMatrix, KrausChannel};
use crate::numerics::{CMatrix, Tolerances};
use crate::scalar::Real;
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        let data = self
            .data
            .iter()
            .map(|&[re, im]| Complex::new(T::of(re), T::of(im)))
            .collect();
        CMatrix::new(self.rows, self.cols, data)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureStateJson {
    pub dims: Vec<usize>,
    pub vector: Vec<[f64; 2]>,
}

impl PureStateJson {
    pub fn from_state<T: Real>(psi: &PureState<T>) -> Self {
        Self {
            dims: psi.dims().to_vec(),
            vector: psi
                .amplitudes()
                .iter()
                .map(|z| [z.re.as_f64(), z.im.as_f64()])
                .collect(),
        }
    }

    pub fn to_state<T: Real>(&self) -> Result<PureState<T>> {
        let amps = self
            .vector
            .iter()
            .map(|&[re, im]| Complex::new(T::of(re), T::of(im)))
            .collect();
        PureState::new(amps, self.dims.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub dims: Vec<usize>,
    pub matrix: MatrixJson,
}

impl DensityMatrixJson {
    pub fn from_state<T: Real>(rho: &DensityMatrix<T>) -> Self {
        Self {
            dims: rho.dims().to_vec(),
            matrix: MatrixJson::from_matrix(rho.matrix()),
        }
    }

    pub fn to_state<T: Real>(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.matrix.to_matrix()?, self.dims.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel<T: Real>(phi: &KrausChannel<T>) -> Self {
        Self {
            d_in: phi.d_in(),
            d_out: phi.d_out(),
            kraus: phi.kraus_ops().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel<T: Real>(&self) -> Result<KrausChannel<T>> {
        let ops = self
            .kraus
            .iter()
            .map(|m| m.to_matrix())
            .collect::<Result<Vec<_>>>()?;
        let phi = channel_from_kraus(ops)?;
        if phi.d_in() != self.d_in || phi.d_out() != self.d_out {
            return Err(Error::DimensionMismatch(format!(
                "declared dimensions {}x{} do not match the Kraus operators",
                self.d_out, self.d_in
            )));
        }
        Ok(phi)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChoiJson {
    pub d: usize,
    pub matrix: MatrixJson,
}

impl ChoiJson {
    pub fn from_choi<T: Real>(c: &ChoiMatrix<T>) -> Self {
        Self {
            d: c.d(),
            matrix: MatrixJson::from_matrix(c.matrix()),
        }
    }

    pub fn to_choi<T: Real>(&self, tol: &Tolerances<T>) -> Result<ChoiMatrix<T>> {
        let m = self.matrix.to_matrix()?;
        let c = ChoiMatrix::new(m, tol)?;
        if c.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "declared d = {} does not match matrix side {}",
                self.d,
                self.matrix.rows
            )));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::phi_f;
    use crate::states::max_entangled;

    #[test]
    fn matrix_round_trip() {
        let m = crate::CMatrix64::from_rows(&[
            vec![(1.0, -2.0), (0.5, 0.0)],
            vec![(0.0, 3.0), (-1.5, 0.25)],
        ])
        .unwrap();
        let json = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix::<f64>().unwrap(), m);
    }

    #[test]
    fn channel_round_trip() {
        let phi = phi_f(2, 0.7).unwrap();
        let json = serde_json::to_string(&ChannelJson::from_channel(&phi)).unwrap();
        let back: ChannelJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_channel::<f64>().unwrap().kraus_ops(), phi.kraus_ops());
    }

    #[test]
    fn state_round_trip() {
        let psi = max_entangled::<f64>(3);
        let json = serde_json::to_string(&PureStateJson::from_state(&psi)).unwrap();
        let back: PureStateJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_state::<f64>().unwrap().amplitudes(), psi.amplitudes());
    }

    #[test]
    fn invalid_channel_is_rejected() {
        let bad = ChannelJson {
            d_in: 2,
            d_out: 2,
            kraus: vec![MatrixJson {
                rows: 2,
                cols: 2,
                data: vec![[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],
            }],
        };
        assert!(bad.to_channel::<f64>().is_err());
    }
}
