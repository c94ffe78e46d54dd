//! Average Hamiltonian theory for piecewise-constant Hamiltonians, up to
//! second order, and the calibration of the pulse spacing derived from it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpinSystem;
use crate::qstate::{pauli_masks, Operator, OperatorKind, PauliAxis, C64};

/// Time-ordered segments `(H_j, tau_j)`.
#[derive(Clone, Debug)]
pub struct PiecewiseHamiltonian {
    segments: Vec<(Operator, f64)>,
}

impl PiecewiseHamiltonian {
    pub fn new(segments: Vec<(Operator, f64)>) -> Result<Self> {
        let first = segments.first().ok_or(Error::EmptySegments)?;
        let dim = first.0.dim();
        for (h, tau) in &segments {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: h.dim(),
                });
            }
            if !(*tau > 0.0) {
                return Err(Error::InvalidDuration(*tau));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[(Operator, f64)] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.segments[0].0.dim()
    }

    pub fn cycle_time(&self) -> f64 {
        self.segments.iter().map(|s| s.1).sum()
    }

    /// Largest `|H_j - H_{n+1-j}|` entry; zero for a time-symmetric sequence.
    pub fn palindrome_error(&self) -> f64 {
        let n = self.segments.len();
        (0..n / 2)
            .map(|j| {
                let (a, ta) = &self.segments[j];
                let (b, tb) = &self.segments[n - 1 - j];
                if ta != tb {
                    f64::INFINITY
                } else {
                    (a - b).max_abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Average Hamiltonians of orders 0, 1 and 2. Orders above the requested
/// one are left as zero operators.
#[derive(Clone, Debug)]
pub struct AhtTerms {
    pub h0: Operator,
    pub h1: Operator,
    pub h2: Operator,
}

impl AhtTerms {
    pub fn total(&self) -> Operator {
        &(&self.h0 + &self.h1) + &self.h2
    }
}

fn comm(a: &Operator, b: &Operator) -> Operator {
    a.commutator(b)
}

/// Average Hamiltonian terms of a piecewise-constant Hamiltonian.
///
/// With `T` the cycle time and segments ordered in time,
///
/// ```text
/// h0 = sum_j tau_j H_j / T
/// h1 = -i/(2T) sum_{a<b} tau_a tau_b [H_b, H_a]
/// h2 = -1/(6T) * integral_{t1<t2<t3} ([H3,[H2,H1]] + [[H3,H2],H1])
/// ```
///
/// The triple integral of step functions splits into the cases where the
/// three times lie in distinct segments (weight `tau_a tau_b tau_c`) or two
/// of them share a segment (weight `tau^2/2` times the other duration). The
/// sums are evaluated with running prefix and suffix sums, so the cost is
/// linear in the number of segments.
pub fn aht_terms(pw: &PiecewiseHamiltonian, max_order: u8) -> Result<AhtTerms> {
    if max_order > 2 {
        return Err(Error::InvalidParameter(format!(
            "average Hamiltonian order {max_order} is not supported"
        )));
    }
    let segs = pw.segments();
    let dim = pw.dim();
    let t = pw.cycle_time();
    let zero = Operator::zeros(dim);

    let mut h0 = zero.clone();
    for (h, tau) in segs {
        h0.add_scaled(C64::new(*tau, 0.0), h);
    }
    h0 = h0.scale_real(1.0 / t).with_kind(OperatorKind::Hermitian);
    if max_order == 0 {
        return Ok(AhtTerms {
            h0,
            h1: zero.clone(),
            h2: zero,
        });
    }

    // prefix[b] = sum_{a<b} tau_a H_a
    let mut prefix = Vec::with_capacity(segs.len());
    let mut acc = zero.clone();
    for (h, tau) in segs {
        prefix.push(acc.clone());
        acc.add_scaled(C64::new(*tau, 0.0), h);
    }
    // inner[b] = [H_b, prefix[b]]
    let inner: Vec<Operator> = segs
        .iter()
        .zip(&prefix)
        .map(|((h, _), p)| comm(h, p))
        .collect();

    let mut h1 = zero.clone();
    for ((_, tau), c) in segs.iter().zip(&inner) {
        h1.add_scaled(C64::new(*tau, 0.0), c);
    }
    h1 = h1
        .scale(C64::new(0.0, -1.0 / (2.0 * t)))
        .with_kind(OperatorKind::Hermitian);
    if max_order == 1 {
        return Ok(AhtTerms { h0, h1, h2: zero });
    }

    // suffix[b] = sum_{c>b} tau_c H_c
    let mut suffix = vec![zero.clone(); segs.len()];
    let mut acc = zero.clone();
    for b in (0..segs.len()).rev() {
        suffix[b] = acc.clone();
        acc.add_scaled(C64::new(segs[b].1, 0.0), &segs[b].0);
    }

    let mut sum = zero.clone();
    // Distinct segments a<b<c. The first commutator sums to
    // sum_c tau_c [H_c, C_c] with C_c = sum_{b<c} tau_b [H_b, prefix_b];
    // the second is rewritten by the Jacobi identity as the first minus
    // sum_b tau_b [H_b, [suffix_b, prefix_b]].
    let mut nested = zero.clone();
    let mut distinct = zero.clone();
    for (c, (h, tau)) in segs.iter().enumerate() {
        distinct.add_scaled(C64::new(*tau, 0.0), &comm(h, &nested));
        nested.add_scaled(C64::new(*tau, 0.0), &inner[c]);
    }
    sum.add_scaled(C64::new(2.0, 0.0), &distinct);
    for (b, (h, tau)) in segs.iter().enumerate() {
        let jac = comm(h, &comm(&suffix[b], &prefix[b]));
        sum.add_scaled(C64::new(-tau, 0.0), &jac);
    }
    // t1, t2 share segment b: [[H_c, H_b], H_b] with c > b.
    // t2, t3 share segment c: [H_c, [H_c, H_a]] with a < c.
    for (b, (h, tau)) in segs.iter().enumerate() {
        let w = C64::new(tau * tau / 2.0, 0.0);
        sum.add_scaled(w, &comm(&comm(&suffix[b], h), h));
        sum.add_scaled(w, &comm(h, &inner[b]));
    }
    let h2 = sum
        .scale_real(-1.0 / (6.0 * t))
        .with_kind(OperatorKind::Hermitian);
    Ok(AhtTerms { h0, h1, h2 })
}

/// Normalized Hilbert-Schmidt coefficient `Tr(h P) / 2^n` of the Pauli
/// string `P` given by `assignments`.
pub fn extract_pauli_coefficient(
    h: &Operator,
    n_q: usize,
    assignments: &[(usize, PauliAxis)],
) -> Result<f64> {
    let dim = 1usize << n_q;
    if h.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: h.dim(),
        });
    }
    let mut frame = vec![PauliAxis::I; n_q];
    for &(q, p) in assignments {
        if q >= n_q {
            return Err(Error::QubitOutOfRange { index: q, n_q });
        }
        frame[q] = p;
    }
    let m = pauli_masks(&frame);
    let g = match m.n_y % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    // P e_r = g (-1)^{|r & z|} e_{r ^ x}, so Tr(h P) = sum_r h[r, r^x] P[r^x, r].
    let mut tr = C64::new(0.0, 0.0);
    for r in 0..dim {
        let s = if (r & m.z_mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        tr += h[(r, r ^ m.x_mask)] * g * s;
    }
    Ok(tr.re / dim as f64)
}

/// Effective isotropic exchange of a recoupled pair: `j0` at zeroth order
/// and the coefficient `j2` of `tau^2` at second order after symmetrization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecouplingStrengths {
    pub j0: f64,
    pub j2: f64,
}

/// `j0 = (J_kl / 4)(8 / 9)` and the spectator sum for `j2`.
pub fn j2_coefficient(system: &SpinSystem, k: usize, l: usize) -> Result<RecouplingStrengths> {
    if k == l {
        return Err(Error::SamePair(k));
    }
    let n = system.n_qubits();
    for q in [k, l] {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_q: n });
        }
    }
    let jkl = system.coupling(k, l);
    let mut j2 = 0.0;
    for a in (0..n).filter(|&a| a != k && a != l) {
        let (jak, jal) = (system.coupling(a, k), system.coupling(a, l));
        j2 += (jal * jal * jak + jak * jak * jal) / 12.0 + 217.0 / 108.0 * jal * jak * jkl
            - 103.0 / 72.0 * (jak * jak * jkl + jal * jal * jkl);
    }
    Ok(RecouplingStrengths {
        j0: jkl / 4.0 * 8.0 / 9.0,
        j2,
    })
}

/// Order of the recoupling strength used to fix `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum CalibrationOrder {
    Zeroth,
    Second,
}

impl TryFrom<u8> for CalibrationOrder {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(CalibrationOrder::Zeroth),
            2 => Ok(CalibrationOrder::Second),
            other => Err(Error::InvalidParameter(format!(
                "calibration order must be 0 or 2, got {other}"
            ))),
        }
    }
}

impl From<CalibrationOrder> for u8 {
    fn from(c: CalibrationOrder) -> u8 {
        match c {
            CalibrationOrder::Zeroth => 0,
            CalibrationOrder::Second => 2,
        }
    }
}

impl fmt::Display for CalibrationOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Pulse spacing that accumulates phase `phi` over `n_swhh` blocks of 36
/// intervals.
///
/// Zeroth order solves `j0 * 36 n tau = phi`. Second order solves
/// `(j0 + j2 tau^2) * 36 n tau = phi` on the branch through the zeroth-order
/// solution, by Newton steps safeguarded by bisection on `[0, 2 tau0]`.
pub fn solve_tau(
    phi: f64,
    n_swhh: usize,
    strengths: RecouplingStrengths,
    order: CalibrationOrder,
) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "phase must be positive, got {phi}"
        )));
    }
    if n_swhh == 0 {
        return Err(Error::InvalidParameter("n_swhh must be at least 1".into()));
    }
    let RecouplingStrengths { j0, j2 } = strengths;
    if !(j0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zeroth-order strength must be positive, got {j0}"
        )));
    }
    let m = 36.0 * n_swhh as f64;
    let tau0 = phi / (m * j0);
    if order == CalibrationOrder::Zeroth || j2 == 0.0 {
        return Ok(tau0);
    }
    let f = |t: f64| (j0 + j2 * t * t) * m * t - phi;
    let df = |t: f64| m * (j0 + 3.0 * j2 * t * t);
    let upper = 2.0 * tau0;
    let (mut lo, mut hi) = (0.0, upper);
    if f(hi) < 0.0 {
        return Err(Error::NoCalibrationRoot { upper });
    }
    let mut t = tau0;
    for _ in 0..200 {
        let v = f(t);
        if v.abs() <= 1e-13 * phi {
            return Ok(t);
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = df(t);
        let next = t - v / d;
        t = if d > 0.0 && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    if f(t).abs() <= 1e-12 * phi {
        Ok(t)
    } else {
        Err(Error::NoCalibrationRoot { upper })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInput {
    /// Largest eigenvalue magnitude of the residual Hamiltonian.
    pub h_norm: f64,
    /// Time between consecutive random pulses.
    pub delta_t: f64,
    pub total_time: f64,
}

/// `1 - |H|^2 dt T`, a lower bound on the mean fidelity of a randomly
/// decoupled evolution.
pub fn fidelity_lower_bound(b: BoundInput) -> f64 {
    1.0 - b.h_norm * b.h_norm * b.delta_t * b.total_time
}

/// Published second-order coefficients of the recoupled block on a
/// three-spin system `(a, k, l)`, in units of `tau^2 / 1728`. Rows are the
/// `xx`, `yy`, `zz` terms on `(k, l)`; columns multiply the coupling
/// monomials in [`REFERENCE_MONOMIALS`].
pub const REFERENCE_H2_ROWS: [[i64; 5]; 3] = [
    [-322, 446, 3628, -2906, -1370],
    [308, 308, 3208, -2588, -2588],
    [446, -322, 3580, -1922, -3458],
];

/// Exponents of `(J_ak, J_al, J_kl)` for each column of
/// [`REFERENCE_H2_ROWS`].
pub const REFERENCE_MONOMIALS: [(u32, u32, u32); 5] =
    [(1, 2, 0), (2, 1, 0), (1, 1, 1), (2, 0, 1), (0, 2, 1)];

pub const H2_DENOMINATOR: i64 = 1728;

/// Published `j2 / J^3` for the two pair classes of the 3x3 grid: pairs
/// along an edge of the grid, and pairs touching the centre qubit.
pub fn reference_grid_j2() -> [(f64, &'static [(usize, usize)]); 2] {
    let s2 = 2f64.sqrt();
    [
        (
            -923.0 / 192.0 + 113.0 / (54.0 * s2),
            &[
                (0, 1),
                (1, 2),
                (6, 7),
                (7, 8),
                (0, 3),
                (3, 6),
                (2, 5),
                (5, 8),
            ],
        ),
        (
            -2357.0 / 288.0 + 113.0 / (27.0 * s2),
            &[(1, 4), (4, 7), (3, 4), (4, 5)],
        ),
    ]
}

#[cfg(test)]
mod tests;
