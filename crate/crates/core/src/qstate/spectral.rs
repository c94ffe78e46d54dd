//! Spectral factorization of Hermitian operators and the propagators built
//! from it.
//!
//! Hamiltonians that conserve some quantum number (the dipolar coupling
//! conserves total magnetization) are block diagonal in the computational
//! basis. The factorization finds those blocks from the sparsity pattern and
//! diagonalizes each one separately, so the propagators it hands out are
//! block sparse as well.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use super::kernels::{self, C64};
use super::{Operator, OperatorKind};
use crate::error::{Error, Result};

/// Default tolerance for accepting an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
struct EigenBlock {
    indices: Vec<usize>,
    /// Eigenvectors as columns, row-major `s x s`.
    vectors: Vec<C64>,
    values: Vec<f64>,
}

/// Eigendecomposition of a Hermitian operator with a per-duration cache of
/// its propagators.
#[derive(Debug)]
pub struct Spectral {
    dim: usize,
    blocks: Vec<EigenBlock>,
    cache: Mutex<HashMap<u64, Arc<BlockPropagator>>>,
}

impl Spectral {
    pub fn new(h: &Operator) -> Result<Self> {
        let scale = h.max_abs().max(1.0);
        let err = h.hermiticity_error();
        if err > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(err));
        }
        let dim = h.dim();
        let blocks = connected_blocks(h)
            .into_iter()
            .map(|indices| diagonalize_block(h, indices))
            .collect();
        Ok(Self {
            dim,
            blocks,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues, unsorted.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }

    /// Block-sparse `exp(-i h tau)`, cached by the bit pattern of `tau`.
    pub fn block_propagator(&self, tau: f64) -> Arc<BlockPropagator> {
        let key = tau.to_bits();
        let mut cache = self.cache.lock().expect("propagator cache poisoned");
        cache
            .entry(key)
            .or_insert_with(|| Arc::new(self.build(tau)))
            .clone()
    }

    /// Dense `exp(-i h tau)`.
    pub fn propagator(&self, tau: f64) -> Operator {
        self.block_propagator(tau).to_dense()
    }

    fn build(&self, tau: f64) -> BlockPropagator {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let s = b.indices.len();
                // U = V diag(exp(-i w tau)) V^dagger
                let mut vd = b.vectors.clone();
                for r in 0..s {
                    for c in 0..s {
                        vd[r * s + c] *= C64::from_polar(1.0, -b.values[c] * tau);
                    }
                }
                let mut vh = vec![C64::new(0.0, 0.0); s * s];
                for r in 0..s {
                    for c in 0..s {
                        vh[r * s + c] = b.vectors[c * s + r].conj();
                    }
                }
                let mut u = vec![C64::new(0.0, 0.0); s * s];
                kernels::gemm(s, s, s, &vd, &vh, &mut u);
                (b.indices.clone(), u)
            })
            .collect();
        BlockPropagator {
            dim: self.dim,
            blocks,
        }
    }
}

/// Unitary that is block diagonal up to a permutation of the basis.
#[derive(Clone, Debug)]
pub struct BlockPropagator {
    dim: usize,
    blocks: Vec<(Vec<usize>, Vec<C64>)>,
}

impl BlockPropagator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_dense(&self) -> Operator {
        let mut op = Operator::zeros(self.dim);
        for (idx, u) in &self.blocks {
            let s = idx.len();
            for (r, &gr) in idx.iter().enumerate() {
                for (c, &gc) in idx.iter().enumerate() {
                    op[(gr, gc)] = u[r * s + c];
                }
            }
        }
        op.with_kind(OperatorKind::Unitary)
    }

    /// `rows <- U * rows` for a row-major `dim x cols` buffer.
    pub(crate) fn apply_rows(&self, data: &mut [C64], cols: usize) {
        debug_assert_eq!(data.len(), self.dim * cols);
        let mut gathered = Vec::new();
        let mut out = Vec::new();
        for (idx, u) in &self.blocks {
            let s = idx.len();
            if s == 1 {
                let ph = u[0];
                let r = idx[0];
                data[r * cols..(r + 1) * cols]
                    .iter_mut()
                    .for_each(|z| *z *= ph);
                continue;
            }
            gathered.clear();
            for &r in idx {
                gathered.extend_from_slice(&data[r * cols..(r + 1) * cols]);
            }
            out.resize(s * cols, C64::new(0.0, 0.0));
            kernels::gemm(s, s, cols, u, &gathered, &mut out);
            for (k, &r) in idx.iter().enumerate() {
                data[r * cols..(r + 1) * cols].copy_from_slice(&out[k * cols..(k + 1) * cols]);
            }
        }
    }
}

/// `exp(-i h tau)` for Hermitian `h`.
pub fn propagator(h: &Operator, tau: f64) -> Result<Operator> {
    Ok(Spectral::new(h)?.propagator(tau))
}

fn connected_blocks(h: &Operator) -> Vec<Vec<usize>> {
    let n = h.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..n {
        for c in r + 1..n {
            if h[(r, c)] != C64::new(0.0, 0.0) || h[(c, r)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    blocks
}

fn diagonalize_block(h: &Operator, indices: Vec<usize>) -> EigenBlock {
    let s = indices.len();
    if s == 1 {
        return EigenBlock {
            values: vec![h[(indices[0], indices[0])].re],
            vectors: vec![C64::new(1.0, 0.0)],
            indices,
        };
    }
    // Symmetrize explicitly so round-off in the input cannot leak into the
    // eigensolver.
    let m = DMatrix::from_fn(s, s, |r, c| {
        let a = h[(indices[r], indices[c])];
        let b = h[(indices[c], indices[r])].conj();
        (a + b) * 0.5
    });
    let eig = m.symmetric_eigen();
    let mut vectors = vec![C64::new(0.0, 0.0); s * s];
    for r in 0..s {
        for c in 0..s {
            vectors[r * s + c] = eig.eigenvectors[(r, c)];
        }
    }
    EigenBlock {
        indices,
        vectors,
        values: eig.eigenvalues.iter().copied().collect(),
    }
}
