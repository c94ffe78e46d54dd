use super::kernels::{self, C64};
use super::{Mat2, Operator, StateVector};
use crate::error::{Error, Result};

const RENORMALIZE_EVERY: u32 = 1000;

/// Several states of one register evolved together, one per row of a
/// row-major `rows x 2^n_q` buffer. Whole-batch dense operators become a
/// single matrix product.
#[derive(Clone, Debug, PartialEq)]
pub struct StateBatch {
    n_q: usize,
    rows: usize,
    data: Vec<C64>,
    since_normalized: u32,
}

impl StateBatch {
    pub fn from_states(states: &[StateVector]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty state batch".into()))?;
        let n_q = first.n_qubits();
        let mut data = Vec::with_capacity(states.len() << n_q);
        for s in states {
            if s.n_qubits() != n_q {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    actual: s.dim(),
                });
            }
            data.extend_from_slice(s.amplitudes());
        }
        Ok(Self {
            n_q,
            rows: states.len(),
            data,
            since_normalized: 0,
        })
    }

    pub fn replicate(state: &StateVector, rows: usize) -> Self {
        let mut data = Vec::with_capacity(rows * state.dim());
        for _ in 0..rows {
            data.extend_from_slice(state.amplitudes());
        }
        Self {
            n_q: state.n_qubits(),
            rows,
            data,
            since_normalized: 0,
        }
    }

    /// All computational basis states, row `b` holding `|b>`.
    pub fn basis_states(n_q: usize) -> Self {
        let dim = 1usize << n_q;
        Self {
            n_q,
            rows: dim,
            data: Operator::identity(dim).as_slice().to_vec(),
            since_normalized: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_q
    }

    pub fn dim(&self) -> usize {
        1 << self.n_q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn row(&self, r: usize) -> &[C64] {
        let d = self.dim();
        &self.data[r * d..(r + 1) * d]
    }

    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [C64] {
        let d = self.dim();
        &mut self.data[r * d..(r + 1) * d]
    }

    pub fn state(&self, r: usize) -> StateVector {
        StateVector::from_amplitudes(self.n_q, self.row(r).to_vec())
            .expect("batch rows are normalized")
    }

    pub fn apply_mat2(&mut self, q: usize, u: &Mat2) {
        // Seen as one long vector; pairs split by qubit q never straddle
        // rows because each row is an aligned power-of-two block.
        kernels::apply_mat2_rows(&mut self.data, 1, q, u);
        self.touch();
    }

    pub fn apply_mat2_row(&mut self, r: usize, q: usize, u: &Mat2) {
        kernels::apply_mat2_rows(self.row_mut(r), 1, q, u);
    }

    /// Rows `start..start + count` as one contiguous buffer.
    pub(crate) fn rows_mut(&mut self, start: usize, count: usize) -> &mut [C64] {
        let d = self.dim();
        &mut self.data[start * d..(start + count) * d]
    }

    pub fn apply_cphase(&mut self, a: usize, b: usize, phi: f64) {
        let dim = self.dim();
        for r in 0..self.rows {
            kernels::apply_cphase_rows(&mut self.data[r * dim..(r + 1) * dim], 1, a, b, phi);
        }
        self.touch();
    }

    pub fn apply_mat4(&mut self, q0: usize, q1: usize, m: &[[C64; 4]; 4]) {
        let dim = self.dim();
        for r in 0..self.rows {
            kernels::apply_mat4_rows(&mut self.data[r * dim..(r + 1) * dim], 1, q0, q1, m);
        }
        self.touch();
    }

    /// Every row `v <- U v`.
    pub fn apply_operator(&mut self, u: &Operator) {
        let dim = self.dim();
        assert_eq!(u.dim(), dim, "dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.data.len()];
        kernels::gemm_bt(self.rows, dim, dim, &self.data, u.as_slice(), &mut out);
        self.data = out;
        self.touch();
    }

    /// Counts an application and re-normalizes every row after every
    /// thousandth.
    pub(crate) fn touch(&mut self) {
        self.since_normalized += 1;
        if self.since_normalized >= RENORMALIZE_EVERY {
            let dim = self.dim();
            for row in self.data.chunks_exact_mut(dim) {
                let n = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                row.iter_mut().for_each(|z| *z /= n);
            }
            self.since_normalized = 0;
        }
    }
}
