//! Pulse schedules: the four-pulse decoupling cycle, the 36-interval
//! selective recoupling block, random frame dressing and execution.

mod frames;
mod pulse;

use rand::Rng;

pub use frames::{draw_block_frame, BlockFrame, PauliFrame, SchemeVariant};
pub use pulse::{Pulse, Schedule, ScheduleItem};

use crate::aht::PiecewiseHamiltonian;
use crate::error::{Error, Result};
use crate::model::{dipole_hamiltonian, SpinSystem};
use crate::qstate::{
    apply_mat2_rows, apply_pauli_rows, mat2_adjoint, mat2_mul, pauli_masks, Mat2, Operator,
    OperatorKind, PauliAxis, Spectral, StateVector, C64,
};

/// Free intervals in one four-pulse cycle.
pub const WHH4_INTERVALS: usize = 6;
/// Free intervals in one recoupling block.
pub const SUPER_WHH_INTERVALS: usize = 36;

/// The four-pulse cycle with pulses at `tau, 2 tau, 4 tau, 5 tau`.
///
/// With a `toggle` every free interval is sandwiched by it, so the block
/// sees the Hamiltonian `Q H Q` throughout. The toggle must be a Pauli
/// pulse (an involution).
pub fn whh4_schedule(tau: f64, toggle: Option<&Pulse>) -> Result<Schedule> {
    if !(tau > 0.0) {
        return Err(Error::InvalidDuration(tau));
    }
    if let Some(t) = toggle {
        if !matches!(t, Pulse::PauliFrame { .. } | Pulse::SelectivePi { .. }) {
            return Err(Error::InvalidParameter(format!(
                "toggle must be a Pauli pulse, got {t}"
            )));
        }
    }
    let pulses = [
        Pulse::broadband(PauliAxis::X, false),
        Pulse::broadband(PauliAxis::Y, true),
        Pulse::broadband(PauliAxis::Y, false),
        Pulse::broadband(PauliAxis::X, true),
    ];
    // Interval j (0-based) is followed by pulses[..] at these positions.
    let after = [Some(0), Some(1), None, Some(2), Some(3), None];
    let mut items: Vec<ScheduleItem> = Vec::with_capacity(20);
    let push_toggle = |items: &mut Vec<ScheduleItem>| {
        if let Some(t) = toggle {
            let t = ScheduleItem::Pulse(t.clone());
            if items.last() == Some(&t) {
                items.pop();
            } else {
                items.push(t);
            }
        }
    };
    for slot in after {
        push_toggle(&mut items);
        items.push(ScheduleItem::Free(tau));
        push_toggle(&mut items);
        if let Some(p) = slot {
            items.push(ScheduleItem::Pulse(pulses[p].clone()));
        }
    }
    Ok(Schedule::from_items(items))
}

/// Toggle operator of each four-pulse block, in time order. The qubit with
/// the smaller label takes the first role of the mixed toggles.
pub fn super_whh_toggles(k: usize, l: usize) -> Result<[Pulse; 6]> {
    if k == l {
        return Err(Error::SamePair(k));
    }
    let (a, b) = (k.min(l), k.max(l));
    let t = |pa: PauliAxis, pb: PauliAxis| Pulse::PauliFrame {
        assignments: vec![(a, pa), (b, pb)],
    };
    let zz = t(PauliAxis::Z, PauliAxis::Z);
    let xy = t(PauliAxis::X, PauliAxis::Y);
    let yx = t(PauliAxis::Y, PauliAxis::X);
    Ok([zz.clone(), xy.clone(), yx.clone(), yx, xy, zz])
}

/// One 36-interval recoupling block for the pair `(k, l)`.
///
/// The six toggled four-pulse blocks run in the order `zz, xy, yx, yx, xy,
/// zz`; each four-pulse block is itself time symmetric, so the whole toggled
/// sequence is a palindrome and every odd average-Hamiltonian order
/// vanishes.
pub fn super_whh_schedule(k: usize, l: usize, tau: f64) -> Result<Schedule> {
    let mut s = Schedule::new();
    for toggle in super_whh_toggles(k, l)? {
        s.extend(&whh4_schedule(tau, Some(&toggle))?);
    }
    Ok(s)
}

/// Wraps `block` in `frame`: Pauli frame, pair rotations, block, inverse
/// rotations, Pauli frame.
pub fn dress_block(block: &Schedule, frame: &BlockFrame, k: usize, l: usize) -> Schedule {
    let mut s = Schedule::new();
    let pauli = (!frame.pauli.is_identity()).then(|| frame.pauli.to_pulse());
    let rot = |negative: bool| {
        frame.alpha.map(|axis| {
            [k, l].map(|qubit| Pulse::SelectiveHalfPi {
                qubit,
                axis,
                negative,
            })
        })
    };
    if let Some(p) = &pauli {
        s.push_pulse(p.clone());
    }
    for p in rot(false).into_iter().flatten() {
        s.push_pulse(p);
    }
    s.extend(block);
    for p in rot(true).into_iter().flatten() {
        s.push_pulse(p);
    }
    if let Some(p) = pauli {
        s.push_pulse(p);
    }
    s
}

/// Concatenates `blocks`, dressing each with an independent frame drawn by
/// [`draw_block_frame`].
pub fn randomize_blocks<R: Rng + ?Sized>(
    blocks: &[Schedule],
    n_q: usize,
    k: usize,
    l: usize,
    variant: SchemeVariant,
    rng: &mut R,
) -> Result<Schedule> {
    Ok(randomize_blocks_with_frames(blocks, n_q, k, l, variant, rng)?.0)
}

/// As [`randomize_blocks`], also returning the frames used.
pub fn randomize_blocks_with_frames<R: Rng + ?Sized>(
    blocks: &[Schedule],
    n_q: usize,
    k: usize,
    l: usize,
    variant: SchemeVariant,
    rng: &mut R,
) -> Result<(Schedule, Vec<BlockFrame>)> {
    if blocks.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    if k == l {
        return Err(Error::SamePair(k));
    }
    let mut out = Schedule::new();
    let mut frames = Vec::with_capacity(blocks.len());
    for block in blocks {
        let frame = draw_block_frame(n_q, k, l, variant, rng);
        out.extend(&dress_block(block, &frame, k, l));
        frames.push(frame);
    }
    Ok((out, frames))
}

/// Toggling-frame Hamiltonians `U_j^dagger h U_j`, one per free interval,
/// where `U_j` is the product of all pulses before interval `j`.
pub fn toggled_sequence(schedule: &Schedule, h: &Operator) -> Result<PiecewiseHamiltonian> {
    let n_q = h
        .n_qubits()
        .ok_or_else(|| Error::InvalidParameter("dimension is not a power of two".into()))?;
    schedule.validate(n_q)?;
    let id: Mat2 = PauliAxis::I.matrix();
    let mut frame = vec![id; n_q];
    let mut segments = Vec::with_capacity(schedule.free_intervals());
    let mut current: Option<Operator> = None;
    for item in schedule.items() {
        match item {
            ScheduleItem::Pulse(p) => {
                for (q, u) in p.factors(n_q) {
                    frame[q] = mat2_mul(&u, &frame[q]);
                }
                current = None;
            }
            ScheduleItem::Free(tau) => {
                let ht = current.get_or_insert_with(|| conjugate_local(h, &frame));
                segments.push((ht.clone(), *tau));
            }
        }
    }
    PiecewiseHamiltonian::new(segments)
}

/// `U^dagger h U` for `U` the tensor product of `frame`.
fn conjugate_local(h: &Operator, frame: &[Mat2]) -> Operator {
    let id = PauliAxis::I.matrix();
    let dim = h.dim();
    let mut a = h.clone();
    let left = |op: &mut Operator| {
        for (q, u) in frame.iter().enumerate() {
            if *u != id {
                apply_mat2_rows(op.as_mut_slice(), dim, q, &mat2_adjoint(u));
            }
        }
    };
    left(&mut a);
    let mut b = a.adjoint();
    left(&mut b);
    b.adjoint().with_kind(h.kind())
}

/// Applies pulses exactly and free intervals through the dipolar
/// propagator of a fixed spin system. Propagators are cached per duration.
#[derive(Debug)]
pub struct Evolution {
    n_q: usize,
    spectral: Spectral,
}

impl Evolution {
    pub fn new(system: &SpinSystem) -> Self {
        let h = dipole_hamiltonian(system);
        Self {
            n_q: system.n_qubits(),
            spectral: Spectral::new(&h).expect("dipolar Hamiltonian is Hermitian"),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_q
    }

    pub fn dim(&self) -> usize {
        1 << self.n_q
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// `rows <- U_schedule * rows` for a row-major `dim x cols` buffer.
    pub(crate) fn apply_rows(&self, data: &mut [C64], cols: usize, schedule: &Schedule) {
        for item in schedule.items() {
            match item {
                ScheduleItem::Pulse(p) => apply_pulse_rows(data, cols, self.n_q, p),
                ScheduleItem::Free(tau) => {
                    self.spectral.block_propagator(*tau).apply_rows(data, cols)
                }
            }
        }
    }

    pub fn execute(&self, mut state: StateVector, schedule: &Schedule) -> Result<StateVector> {
        if state.n_qubits() != self.n_q {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.dim(),
            });
        }
        schedule.validate(self.n_q)?;
        self.apply_rows(state.amplitudes_mut(), 1, schedule);
        for _ in 0..schedule.items().len() {
            state.touch();
        }
        Ok(state)
    }

    /// Full unitary of a schedule.
    pub fn compile(&self, schedule: &Schedule) -> Result<Operator> {
        schedule.validate(self.n_q)?;
        let mut u = Operator::identity(self.dim());
        let dim = self.dim();
        self.apply_rows(u.as_mut_slice(), dim, schedule);
        Ok(u.with_kind(OperatorKind::Unitary))
    }
}

pub(crate) fn apply_pulse_rows(data: &mut [C64], cols: usize, n_q: usize, p: &Pulse) {
    match p {
        Pulse::PauliFrame { assignments } => {
            let mut frame = vec![PauliAxis::I; n_q];
            for &(q, a) in assignments {
                frame[q] = a;
            }
            apply_pauli_rows(data, cols, pauli_masks(&frame));
        }
        Pulse::SelectivePi { qubit, axis } => {
            let mut frame = vec![PauliAxis::I; n_q];
            frame[*qubit] = *axis;
            apply_pauli_rows(data, cols, pauli_masks(&frame));
        }
        _ => {
            for (q, u) in p.factors(n_q) {
                apply_mat2_rows(data, cols, q, &u);
            }
        }
    }
}

/// Runs `schedule` on `state` under the dipolar Hamiltonian of `system`.
pub fn execute_schedule(
    state: StateVector,
    schedule: &Schedule,
    system: &SpinSystem,
) -> Result<StateVector> {
    Evolution::new(system).execute(state, schedule)
}

/// Unitary of `schedule` under the dipolar Hamiltonian of `system`.
pub fn compile_schedule(schedule: &Schedule, system: &SpinSystem) -> Result<Operator> {
    Evolution::new(system).compile(schedule)
}

#[cfg(test)]
mod tests;
