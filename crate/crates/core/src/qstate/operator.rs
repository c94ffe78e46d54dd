use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::kernels::{self, C64};
use super::Mat2;
use crate::error::{Error, Result};

/// Role tag carried by an [`Operator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    General,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Hermitian => "hermitian",
            OperatorKind::Unitary => "unitary",
            OperatorKind::General => "general",
        })
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
    kind: OperatorKind,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}, {})", self.dim, self.dim, self.kind)?;
        if self.dim <= 8 {
            for r in 0..self.dim {
                for c in 0..self.dim {
                    let z = self[(r, c)];
                    write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
            kind: OperatorKind::Hermitian,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        op.kind = OperatorKind::Unitary;
        op
    }

    /// Builds an operator from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>, kind: OperatorKind) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data, kind })
    }

    pub fn from_fn(dim: usize, kind: OperatorKind, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data, kind }
    }

    pub fn from_mat2(m: &Mat2, kind: OperatorKind) -> Self {
        Self::from_fn(2, kind, |r, c| m[r][c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits, if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: OperatorKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, self.kind, |r, c| self.data[c * n + r].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let kind = if s.im == 0.0 && self.kind == OperatorKind::Hermitian {
            OperatorKind::Hermitian
        } else {
            OperatorKind::General
        };
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
            kind,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`, keeping the tag of `self`.
    pub fn add_scaled(&mut self, s: C64, other: &Operator) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        kernels::gemm(n, n, n, &self.data, &other.data, &mut out);
        let kind = if self.kind == OperatorKind::Unitary && other.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Operator {
            dim: n,
            data: out,
            kind,
        }
    }

    /// `[self, other]`. Tagged general; the commutator of two Hermitian
    /// operators is anti-Hermitian.
    pub fn commutator(&self, other: &Operator) -> Operator {
        let mut ab = self.matmul(other);
        let ba = other.matmul(self);
        for (x, y) in ab.data.iter_mut().zip(&ba.data) {
            *x -= y;
        }
        ab.kind = OperatorKind::General;
        ab
    }

    /// `U^dagger self U`.
    pub fn conjugate_by(&self, u: &Operator) -> Operator {
        let out = u.adjoint().matmul(&self.matmul(u));
        out.with_kind(self.kind)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        kernels::gemm(self.dim, self.dim, 1, &self.data, v, &mut out);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation `|H - H^dagger|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                let d = self.data[r * n + c] - self.data[c * n + r].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Largest entry of `U^dagger U - 1`.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((g.data[r * n + c] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Operator norm of a Hermitian operator (largest eigenvalue magnitude).
    pub fn hermitian_norm(&self) -> Result<f64> {
        let spec = super::Spectral::new(self)?;
        Ok(spec
            .eigenvalues()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs())))
    }

    /// Kronecker product `self ⊗ other`; `other` occupies the low bits.
    pub fn kron(&self, other: &Operator) -> Operator {
        let (n, m) = (self.dim, other.dim);
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Unitary, OperatorKind::Unitary) => OperatorKind::Unitary,
            (OperatorKind::Hermitian, OperatorKind::Hermitian) => OperatorKind::Hermitian,
            _ => OperatorKind::General,
        };
        Operator::from_fn(n * m, kind, |r, c| {
            self.data[(r / m) * n + c / m] * other.data[(r % m) * m + c % m]
        })
    }

    /// Left-multiplies by a single-qubit gate on qubit `q`.
    pub fn apply_mat2_left(&mut self, q: usize, u: &Mat2) {
        kernels::apply_mat2_rows(&mut self.data, self.dim, q, u);
    }

    /// Distance to `other` after optimally removing a global phase:
    /// `min_phi || self - e^{i phi} other ||_F`.
    pub fn phase_insensitive_distance(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim);
        let overlap: C64 = other
            .data
            .iter()
            .zip(&self.data)
            .map(|(b, a)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Operator {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let kind = if self.kind == OperatorKind::Hermitian && rhs.kind == OperatorKind::Hermitian {
            OperatorKind::Hermitian
        } else {
            OperatorKind::General
        };
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
            kind,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let kind = if self.kind == OperatorKind::Hermitian && rhs.kind == OperatorKind::Hermitian {
            OperatorKind::Hermitian
        } else {
            OperatorKind::General
        };
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
            kind,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}
