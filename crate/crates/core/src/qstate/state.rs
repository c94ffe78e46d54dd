use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kernels::{self, C64};
use super::{Mat2, Operator, OperatorKind, PauliAxis};
use crate::error::{Error, Result};

/// Applications between two explicit re-normalizations.
const RENORMALIZE_EVERY: u32 = 1000;

/// Normalized pure state of `n_q` qubits; qubit `q` is bit `q` of the
/// basis index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateVector {
    n_q: usize,
    amplitudes: Vec<C64>,
    #[serde(skip)]
    since_normalized: u32,
}

impl PartialEq for StateVector {
    fn eq(&self, other: &Self) -> bool {
        self.n_q == other.n_q && self.amplitudes == other.amplitudes
    }
}

impl StateVector {
    pub fn basis(n_q: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_q;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_q} qubits"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self {
            n_q,
            amplitudes,
            since_normalized: 0,
        })
    }

    /// Wraps amplitudes, normalizing them. Fails on the zero vector or a
    /// length that is not `2^n_q`.
    pub fn from_amplitudes(n_q: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_q {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_q,
                actual: amplitudes.len(),
            });
        }
        let mut s = Self {
            n_q,
            amplitudes,
            since_normalized: 0,
        };
        if s.norm() == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        s.normalize();
        Ok(s)
    }

    /// Haar-ish random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n_q: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n_q)
            .map(|_| C64::new(gaussian(rng), gaussian(rng)))
            .collect();
        Self::from_amplitudes(n_q, amps).expect("gaussian vector is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_q
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        self.amplitudes.iter_mut().for_each(|z| *z /= n);
        self.since_normalized = 0;
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply_mat2(&mut self, q: usize, u: &Mat2) {
        kernels::apply_mat2_rows(&mut self.amplitudes, 1, q, u);
        self.touch();
    }

    pub fn apply_pauli(&mut self, frame: &[PauliAxis]) {
        kernels::apply_pauli_rows(&mut self.amplitudes, 1, super::pauli_masks(frame));
        self.touch();
    }

    pub fn apply_cphase(&mut self, a: usize, b: usize, phi: f64) {
        kernels::apply_cphase_rows(&mut self.amplitudes, 1, a, b, phi);
        self.touch();
    }

    /// Dense operator application without tag checks; used by executors that
    /// already hold verified unitaries.
    pub(crate) fn apply_dense(&mut self, u: &Operator) {
        self.amplitudes = u.matvec(&self.amplitudes);
        self.touch();
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    /// Counts an application and re-normalizes after every thousandth.
    pub(crate) fn touch(&mut self) {
        self.since_normalized += 1;
        if self.since_normalized >= RENORMALIZE_EVERY {
            self.normalize();
        }
    }

    /// Reorders qubits: qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permute_qubits(&self, perm: &[usize]) -> StateVector {
        assert_eq!(perm.len(), self.n_q);
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (src, amp) in self.amplitudes.iter().enumerate() {
            let mut dst = 0usize;
            for (q, &p) in perm.iter().enumerate() {
                dst |= ((src >> p) & 1) << q;
            }
            out[dst] = *amp;
        }
        StateVector {
            n_q: self.n_q,
            amplitudes: out,
            since_normalized: self.since_normalized,
        }
    }
}

/// `u * state`; `u` must be tagged unitary and match the dimension.
pub fn apply_unitary(mut state: StateVector, u: &Operator) -> Result<StateVector> {
    if u.kind() != OperatorKind::Unitary {
        return Err(Error::WrongKind {
            expected: "unitary",
        });
    }
    if u.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: u.dim(),
        });
    }
    state.apply_dense(u);
    Ok(state)
}

/// `|<a|b>|^2`.
pub fn state_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
