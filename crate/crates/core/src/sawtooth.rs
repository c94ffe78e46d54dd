//! The quantum sawtooth map as a logical circuit.
//!
//! One iteration is `exp(-i T p^2 / 2) exp(-i k V(theta) / 2)` with
//! `V = (theta - pi)^2`. The computational basis is the momentum basis:
//! index `m` has `p = m - N/2` for `N = 2^n_q`, so momenta fill the window
//! `[-N/2, N/2)`. Positions are `theta_j = 2 pi j / N`, reached by the
//! Fourier matrix `F[j][m] = exp(2 pi i j m / N) / sqrt N`. Circuit and
//! oracle share this convention.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::processor::GateEvent;
use crate::qstate::{Mat2, StateVector, C64};

/// Momentum eigenstate used as initial state on nine qubits.
pub const INITIAL_INDEX_9: usize = 0b100110011;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SawtoothParams {
    pub n_q: usize,
    /// Classical parameter `K = k T`.
    #[serde(rename = "K")]
    pub k_classical: f64,
}

impl Default for SawtoothParams {
    fn default() -> Self {
        Self {
            n_q: 9,
            k_classical: -0.5,
        }
    }
}

impl SawtoothParams {
    pub fn new(n_q: usize, k_classical: f64) -> Result<Self> {
        if !(2..=crate::qstate::MAX_DENSE_QUBITS).contains(&n_q) {
            return Err(Error::InvalidParameter(format!(
                "sawtooth needs 2 to {} qubits, got {n_q}",
                crate::qstate::MAX_DENSE_QUBITS
            )));
        }
        Ok(Self { n_q, k_classical })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_q
    }

    /// Kick period `T = 2 pi / N`.
    pub fn t_kick(&self) -> f64 {
        2.0 * PI / self.dim() as f64
    }

    /// Kick strength `k = K / T`.
    pub fn k_strength(&self) -> f64 {
        self.k_classical / self.t_kick()
    }

    pub fn momentum(&self, m: usize) -> f64 {
        m as f64 - (self.dim() / 2) as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.dim() as f64
    }

    /// Coefficient `a` of the kinetic phase `a (m - N/2)^2`.
    fn kinetic_alpha(&self) -> f64 {
        -PI / self.dim() as f64
    }

    /// Coefficient `a` of the potential phase `a (j - N/2)^2`.
    fn potential_alpha(&self) -> f64 {
        self.k_classical * self.kinetic_alpha()
    }

    /// Gates per iteration, `2 n^2 + 2 n`.
    pub fn gate_count(&self) -> usize {
        2 * self.n_q * self.n_q + 2 * self.n_q
    }
}

fn hadamard() -> Mat2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn phase_gate(phi: f64) -> Mat2 {
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::from_polar(1.0, phi)],
    ]
}

fn cphase(a: usize, b: usize, phi: f64) -> GateEvent {
    GateEvent::TwoQubit {
        kind: GateKind::Cphase(phi),
        a,
        b,
    }
}

/// Fourier transform without the final qubit reversal: qubit `j` ends up
/// holding output bit `n - 1 - j`.
fn qft_noswap(n: usize) -> Vec<GateEvent> {
    let mut c = Vec::with_capacity(n * (n + 1) / 2);
    for j in (0..n).rev() {
        c.push(GateEvent::SingleQubit {
            qubit: j,
            u: hadamard(),
        });
        for m in (0..j).rev() {
            c.push(cphase(j, m, PI / (1u64 << (j - m)) as f64));
        }
    }
    c
}

fn qft_noswap_inverse(n: usize) -> Vec<GateEvent> {
    let mut c = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for m in 0..j {
            c.push(cphase(j, m, -PI / (1u64 << (j - m)) as f64));
        }
        c.push(GateEvent::SingleQubit {
            qubit: j,
            u: hadamard(),
        });
    }
    c
}

/// `exp(i a (x - N/2)^2)` on the register integer `x`. Expanding the
/// square over bits gives one phase gate per qubit and one controlled
/// phase per pair; the constant is dropped.
fn quadratic_phase(n: usize, a: f64) -> Vec<GateEvent> {
    let d = -((1u64 << n) as f64) / 2.0;
    let mut c = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        let cj = (1u64 << j) as f64;
        c.push(GateEvent::SingleQubit {
            qubit: j,
            u: phase_gate(a * (cj * cj + 2.0 * d * cj)),
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            c.push(cphase(i, j, 2.0 * a * (1u64 << (i + j)) as f64));
        }
    }
    c
}

fn reversal(n: usize) -> GateEvent {
    GateEvent::Relabel {
        perm: (0..n).rev().collect(),
    }
}

/// One iteration of the map as logical events. The bit reversals of the
/// Fourier transforms are relabelings, so the logical qubits return to
/// their order at the end of every iteration.
pub fn sawtooth_circuit(params: &SawtoothParams) -> Vec<GateEvent> {
    let n = params.n_q;
    let mut c = qft_noswap(n);
    c.push(reversal(n));
    c.extend(quadratic_phase(n, params.potential_alpha()));
    c.push(reversal(n));
    c.extend(qft_noswap_inverse(n));
    c.extend(quadratic_phase(n, params.kinetic_alpha()));
    c
}

/// Momentum eigenstate `|100110011>` on nine qubits. Other sizes use the
/// basis state at the same relative momentum, `307 N / 512`.
pub fn initial_state(params: &SawtoothParams) -> StateVector {
    let index = INITIAL_INDEX_9 * params.dim() / 512;
    StateVector::basis(params.n_q, index).expect("index below 2^n_q")
}

/// Exact iteration through discrete Fourier transforms.
pub fn exact_step(state: &StateVector, params: &SawtoothParams) -> Result<StateVector> {
    let n = params.dim();
    if state.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: state.dim(),
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    let scale = 1.0 / (n as f64).sqrt();
    let half = (n / 2) as f64;
    // Position amplitudes: sum_m exp(+2 pi i j m / N) psi_m / sqrt N.
    let mut buf = state.amplitudes().to_vec();
    planner.plan_fft_inverse(n).process(&mut buf);
    let a_v = params.potential_alpha();
    for (j, z) in buf.iter_mut().enumerate() {
        let x = j as f64 - half;
        *z *= C64::from_polar(scale, a_v * x * x);
    }
    planner.plan_fft_forward(n).process(&mut buf);
    let a_p = params.kinetic_alpha();
    for (m, z) in buf.iter_mut().enumerate() {
        let x = m as f64 - half;
        *z *= C64::from_polar(scale, a_p * x * x);
    }
    StateVector::from_amplitudes(params.n_q, buf)
}
