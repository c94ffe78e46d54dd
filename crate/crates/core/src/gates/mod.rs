//! Two-qubit gates from recoupling: the `U_phi` gate, its realization as
//! calibrated recoupling blocks, and Swap, CNot and controlled-phase built
//! from `U_{pi/8}` and single-qubit rotations.

mod engine;

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use engine::UphiEngine;

use crate::aht::{j2_coefficient, solve_tau, CalibrationOrder};
use crate::error::{Error, Result};
use crate::model::SpinSystem;
use crate::qstate::{
    embed_local, propagator, rotation, Mat4, Operator, OperatorKind, PauliAxis, StateBatch, C64,
};
use crate::rng::run_rng;
use crate::sequences::{randomize_blocks, super_whh_schedule, Evolution, Schedule, SchemeVariant};

/// Phase of the elementary block used in circuits.
pub const BLOCK_PHI: f64 = PI / 8.0;

/// Parameters of one noisy `U_phi` gate on the pair `(k, l)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UPhiSpec {
    pub k: usize,
    pub l: usize,
    pub phi: f64,
    pub n_swhh: usize,
    pub variant: SchemeVariant,
    pub calibration: CalibrationOrder,
}

impl UPhiSpec {
    fn validate(&self) -> Result<()> {
        if self.k == self.l {
            return Err(Error::SamePair(self.k));
        }
        if self.n_swhh == 0 {
            return Err(Error::InvalidParameter("n_swhh must be at least 1".into()));
        }
        if !(self.phi > 0.0 && self.phi <= PI) {
            return Err(Error::InvalidParameter(format!(
                "phase {} outside (0, pi]",
                self.phi
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "phi", rename_all = "snake_case")]
pub enum GateKind {
    Swap,
    /// Control is the first operand.
    Cnot,
    /// `diag(1, 1, 1, e^{i phi})`.
    Cphase(f64),
    Uphi(f64),
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Swap => f.write_str("swap"),
            GateKind::Cnot => f.write_str("cnot"),
            GateKind::Cphase(p) => write!(f, "cphase({p})"),
            GateKind::Uphi(p) => write!(f, "uphi({p})"),
        }
    }
}

/// Element of a decomposition. Qubit indices are local: 0 is the first
/// operand of the gate, 1 the second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum Layer {
    /// `exp(-i sigma_axis angle / 2)`; a negative angle is the rotation
    /// about the reversed axis.
    SingleQubit {
        qubit: usize,
        axis: PauliAxis,
        angle: f64,
    },
    /// One `U_{pi/8}` block on the pair.
    UphiBlock,
}

/// Time-ordered layers realizing a two-qubit gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRealization {
    pub kind: GateKind,
    pub layers: Vec<Layer>,
}

impl GateRealization {
    pub fn uphi_blocks(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| matches!(l, Layer::UphiBlock))
            .count()
    }

    /// Matrix of the layers with exact `U_{pi/8}` blocks.
    pub fn compile_ideal(&self) -> Operator {
        let mut u = Operator::identity(4);
        let block = ideal_uphi(BLOCK_PHI);
        for layer in &self.layers {
            match *layer {
                Layer::SingleQubit { qubit, axis, angle } => {
                    u.apply_mat2_left(qubit, &rotation(axis, angle));
                }
                Layer::UphiBlock => u = block.matmul(&u),
            }
        }
        u.with_kind(OperatorKind::Unitary)
    }
}

fn iso_generator() -> Operator {
    let mut g = Operator::zeros(4);
    for a in PauliAxis::NONTRIVIAL {
        let p = crate::qstate::pauli_string(2, &[(0, a), (1, a)]).expect("two qubits");
        g = &g + &p;
    }
    g
}

/// `exp(-i phi (XX + YY + ZZ))`.
pub fn ideal_uphi(phi: f64) -> Operator {
    propagator(&iso_generator(), phi).expect("generator is Hermitian")
}

/// Same as [`ideal_uphi`] as a fixed-size array.
pub fn ideal_uphi_mat4(phi: f64) -> Mat4 {
    to_mat4(&ideal_uphi(phi))
}

pub(crate) fn to_mat4(u: &Operator) -> Mat4 {
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, z) in row.iter_mut().enumerate() {
            *z = u[(r, c)];
        }
    }
    m
}

/// Target matrix of a gate; the first operand is local bit 0.
pub fn ideal_gate(kind: GateKind) -> Operator {
    let o = C64::new(1.0, 0.0);
    let mut u = Operator::zeros(4);
    match kind {
        GateKind::Swap => {
            for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                u[(r, c)] = o;
            }
        }
        GateKind::Cnot => {
            // Control bit 0, target bit 1: |c t> with index c + 2t.
            for (r, c) in [(0, 0), (2, 2), (3, 1), (1, 3)] {
                u[(r, c)] = o;
            }
        }
        GateKind::Cphase(phi) => {
            for i in 0..3 {
                u[(i, i)] = o;
            }
            u[(3, 3)] = C64::from_polar(1.0, phi);
        }
        GateKind::Uphi(phi) => return ideal_uphi(phi),
    }
    u.with_kind(OperatorKind::Unitary)
}

fn single(qubit: usize, axis: PauliAxis, angle: f64) -> Layer {
    Layer::SingleQubit { qubit, axis, angle }
}

/// `exp(-i pi/4 ZZ)` from two blocks: conjugating one block by `Z` on a
/// qubit flips the sign of its `XX + YY` part, so the pair multiplies to a
/// pure `ZZ` rotation. The controlled-Z then follows by local `z`
/// rotations.
fn cz_layers(first: usize) -> Vec<Layer> {
    let other = 1 - first;
    vec![
        single(first, PauliAxis::Z, PI),
        Layer::UphiBlock,
        single(first, PauliAxis::Z, PI),
        Layer::UphiBlock,
        single(first, PauliAxis::Z, -PI / 2.0),
        single(other, PauliAxis::Z, -PI / 2.0),
    ]
}

fn cnot_layers(control: usize, target: usize) -> Vec<Layer> {
    let mut l = vec![single(target, PauliAxis::Y, -PI / 2.0)];
    l.extend(cz_layers(control));
    l.push(single(target, PauliAxis::Y, PI / 2.0));
    l
}

/// Decomposition into `U_{pi/8}` blocks and single-qubit rotations,
/// checked against [`ideal_gate`] up to a global phase.
///
/// Swap takes two blocks, CNot two, and a general controlled phase four
/// (two CNots around `z` rotations). The first single-qubit layer of the
/// controlled phase acts on local qubit 0.
pub fn decompose_gate(kind: GateKind) -> Result<GateRealization> {
    let layers = match kind {
        GateKind::Swap => vec![Layer::UphiBlock, Layer::UphiBlock],
        GateKind::Cnot => cnot_layers(0, 1),
        GateKind::Cphase(phi) => {
            let mut l = cnot_layers(1, 0);
            l.push(single(0, PauliAxis::Z, -phi / 2.0));
            l.extend(cnot_layers(1, 0));
            l.push(single(0, PauliAxis::Z, phi / 2.0));
            l.push(single(1, PauliAxis::Z, phi / 2.0));
            l
        }
        GateKind::Uphi(_) => {
            return Err(Error::UnsupportedGate(format!(
                "{kind} is realized directly, not decomposed"
            )))
        }
    };
    let g = GateRealization { kind, layers };
    let err = g
        .compile_ideal()
        .phase_insensitive_distance(&ideal_gate(kind));
    if err > 1e-10 {
        return Err(Error::UnsupportedGate(format!(
            "{kind} decomposition is off by {err:e}"
        )));
    }
    Ok(g)
}

/// Calibrated spacing of the recoupling blocks for `spec`.
pub fn calibrated_tau(system: &SpinSystem, spec: &UPhiSpec) -> Result<f64> {
    spec.validate()?;
    if system.coupling(spec.k, spec.l) == 0.0 {
        return Err(Error::UncoupledPair(spec.k, spec.l));
    }
    let strengths = j2_coefficient(system, spec.k, spec.l)?;
    solve_tau(spec.phi, spec.n_swhh, strengths, spec.calibration)
}

/// Pulse schedule of a noisy `U_phi`: `n_swhh` recoupling blocks spaced by
/// the calibrated `tau`, dressed per `spec.variant`.
pub fn realize_uphi<R: Rng + ?Sized>(
    system: &SpinSystem,
    spec: &UPhiSpec,
    rng: &mut R,
) -> Result<Schedule> {
    let tau = calibrated_tau(system, spec)?;
    let block = super_whh_schedule(spec.k, spec.l, tau)?;
    let blocks = vec![block; spec.n_swhh];
    randomize_blocks(
        &blocks,
        system.n_qubits(),
        spec.k,
        spec.l,
        spec.variant,
        rng,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityStat {
    pub mean: f64,
    /// Standard error of the mean over runs.
    pub stderr: f64,
    pub runs: usize,
    pub basis_states: usize,
}

/// Mean of `|<b| T^dagger U |b>|^2` over every computational basis state
/// `b` of the register and over `runs` noisy realizations, where `T` is
/// `target` on `(k, l)` and identity elsewhere. Run `r` draws its frames
/// from stream `r` of `master_seed`.
pub fn avg_gate_fidelity(
    system: &SpinSystem,
    spec: &UPhiSpec,
    target: &Operator,
    runs: usize,
    master_seed: u64,
) -> Result<FidelityStat> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let n_q = system.n_qubits();
    let t = embed_local(target, &[spec.k, spec.l], n_q)?;
    let evolution = Evolution::new(system);
    let mut per_run = Vec::with_capacity(runs);
    for r in 0..runs {
        let mut rng = run_rng(master_seed, r);
        let schedule = realize_uphi(system, spec, &mut rng)?;
        let u = evolution.compile(&schedule)?;
        per_run.push(basis_mean_fidelity(&t, &u));
    }
    Ok(summarize(&per_run, 1 << n_q))
}

/// As [`avg_gate_fidelity`], evolving all basis states at once through the
/// cached block unitaries of `engine`. Frames match the schedule path for
/// equal seeds.
pub fn avg_gate_fidelity_fast(
    engine: &UphiEngine,
    k: usize,
    l: usize,
    target: &Operator,
    runs: usize,
    master_seed: u64,
) -> Result<FidelityStat> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let n_q = engine.n_qubits();
    let t = embed_local(target, &[k, l], n_q)?;
    let mut per_run = Vec::with_capacity(runs);
    for r in 0..runs {
        let mut rngs = [run_rng(master_seed, r)];
        let mut batch = StateBatch::basis_states(n_q);
        engine.apply(&mut batch, k, l, &mut rngs)?;
        // Row b holds U|b>, so the fidelity is |(T^dagger U)_{bb}|^2.
        let mut sum = 0.0;
        for b in 0..batch.rows() {
            let ub = batch.row(b);
            let overlap: C64 = (0..ub.len()).map(|i| t[(i, b)].conj() * ub[i]).sum();
            sum += overlap.norm_sqr();
        }
        per_run.push(sum / batch.rows() as f64);
    }
    Ok(summarize(&per_run, 1 << n_q))
}

fn basis_mean_fidelity(target: &Operator, u: &Operator) -> f64 {
    let dim = u.dim();
    let mut sum = 0.0;
    for b in 0..dim {
        let overlap: C64 = (0..dim).map(|i| target[(i, b)].conj() * u[(i, b)]).sum();
        sum += overlap.norm_sqr();
    }
    sum / dim as f64
}

fn summarize(per_run: &[f64], basis_states: usize) -> FidelityStat {
    let n = per_run.len() as f64;
    let mean = per_run.iter().sum::<f64>() / n;
    let stderr = if per_run.len() > 1 {
        let var = per_run.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    FidelityStat {
        mean: mean.clamp(0.0, 1.0),
        stderr,
        runs: per_run.len(),
        basis_states,
    }
}
