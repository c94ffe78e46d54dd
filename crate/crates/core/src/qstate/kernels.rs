//! Row-oriented kernels shared by operators, single states and state batches.
//!
//! Every buffer here is a row-major `rows x cols` block of complex numbers
//! where the row index is a computational basis index (qubit `q` is bit `q`).
//! A single state is the `cols == 1` case, a dense operator acting from the
//! left is the `cols == dim` case.

use num_complex::Complex64;

use super::Mat2;

pub type C64 = Complex64;

/// `rows <- (u on qubit q) * rows`.
pub(crate) fn apply_mat2_rows(data: &mut [C64], cols: usize, q: usize, u: &Mat2) {
    let rows = data.len() / cols;
    let stride = 1usize << q;
    debug_assert!(stride < rows);
    let [[u00, u01], [u10, u11]] = *u;
    let mut base = 0;
    while base < rows {
        for r0 in base..base + stride {
            let r1 = r0 + stride;
            let (lo, hi) = data.split_at_mut(r1 * cols);
            let row0 = &mut lo[r0 * cols..(r0 + 1) * cols];
            let row1 = &mut hi[..cols];
            for (a, b) in row0.iter_mut().zip(row1.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = u00 * x + u01 * y;
                *b = u10 * x + u11 * y;
            }
        }
        base += stride << 1;
    }
}

/// Two-qubit diagonal phase `exp(i phi)` on rows where both bits are set.
pub(crate) fn apply_cphase_rows(data: &mut [C64], cols: usize, a: usize, b: usize, phi: f64) {
    let mask = (1usize << a) | (1usize << b);
    let ph = C64::from_polar(1.0, phi);
    for (r, row) in data.chunks_exact_mut(cols).enumerate() {
        if r & mask == mask {
            row.iter_mut().for_each(|z| *z *= ph);
        }
    }
}

/// Pauli string given as bit masks: `x_mask` marks X or Y factors, `z_mask`
/// marks Z or Y factors, `n_y` counts the Y factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub(crate) struct PauliMasks {
    pub x_mask: usize,
    pub z_mask: usize,
    pub n_y: u32,
}

impl PauliMasks {
    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    fn global(&self) -> C64 {
        match self.n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

/// `rows <- P * rows` for a Pauli string `P = i^{n_y} X^x Z^z`.
pub(crate) fn apply_pauli_rows(data: &mut [C64], cols: usize, p: PauliMasks) {
    if p.is_identity() {
        return;
    }
    let rows = data.len() / cols;
    let g = p.global();
    // Z part first, in place.
    for (r, row) in data.chunks_exact_mut(cols).enumerate() {
        let odd = (r & p.z_mask).count_ones() & 1 == 1;
        let f = if odd { -g } else { g };
        row.iter_mut().for_each(|z| *z *= f);
    }
    // X part: swap row r with row r ^ x_mask.
    if p.x_mask != 0 {
        for r in 0..rows {
            let s = r ^ p.x_mask;
            if s > r {
                let (lo, hi) = data.split_at_mut(s * cols);
                lo[r * cols..(r + 1) * cols].swap_with_slice(&mut hi[..cols]);
            }
        }
    }
}

/// `c <- a * b` for row-major `a (m x k)`, `b (k x n)`, `c (m x n)`.
pub(crate) fn gemm(m: usize, k: usize, n: usize, a: &[C64], b: &[C64], c: &mut [C64]) {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    assert_eq!(c.len(), m * n);
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c.fill(C64::new(0.0, 0.0));
        return;
    }
    // SAFETY: Complex64 is repr(C) { re, im }, layout-identical to [f64; 2];
    // the slice lengths were checked against the strides above.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            n as isize,
            1,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
}

/// `c <- a * b^T` for row-major `a (m x k)`, `b (n x k)`, `c (m x n)`.
pub(crate) fn gemm_bt(m: usize, k: usize, n: usize, a: &[C64], b: &[C64], c: &mut [C64]) {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), n * k);
    assert_eq!(c.len(), m * n);
    if m == 0 || n == 0 || k == 0 {
        c.fill(C64::new(0.0, 0.0));
        return;
    }
    // SAFETY: as in `gemm`; `b` is read with row stride 1 and column
    // stride k, which stays inside its n * k elements.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
}

/// Two-qubit gate `m` on qubits `(q0, q1)`; `q0` is the low bit of the
/// local index.
pub(crate) fn apply_mat4_rows(
    data: &mut [C64],
    cols: usize,
    q0: usize,
    q1: usize,
    m: &[[C64; 4]; 4],
) {
    let rows = data.len() / cols;
    let (b0, b1) = (1usize << q0, 1usize << q1);
    let mut gathered = [C64::new(0.0, 0.0); 4];
    for base in 0..rows {
        if base & (b0 | b1) != 0 {
            continue;
        }
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        for c in 0..cols {
            for (g, &r) in gathered.iter_mut().zip(&idx) {
                *g = data[r * cols + c];
            }
            for (i, &r) in idx.iter().enumerate() {
                data[r * cols + c] = (0..4).map(|j| m[i][j] * gathered[j]).sum();
            }
        }
    }
}
