//! Logical circuits on a qubit lattice: logical-to-physical mapping, swap
//! routing and execution with noisy or ideal `U_{pi/8}` blocks.
//!
//! Execution rules:
//! - single-qubit gates are instantaneous and perfect;
//! - two-qubit gates act on horizontal or vertical neighbours only and are
//!   built from `U_{pi/8}` blocks per [`decompose_gate`];
//! - distant operands are first brought together by swaps, each costing two
//!   noisy blocks;
//! - the recoupling block and the first layer of a controlled phase are
//!   oriented by the smaller physical label.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aht::CalibrationOrder;
use crate::error::{Error, Result};
use crate::gates::{decompose_gate, ideal_uphi_mat4, GateKind, Layer, UphiEngine, BLOCK_PHI};
use crate::model::{LatticeKind, SpinSystem};
use crate::qstate::{rotation, Mat2, Mat4, StateBatch, StateVector};
use crate::sequences::SchemeVariant;

/// Logical-to-physical qubit assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitMap {
    logical_to_physical: Vec<usize>,
}

impl QubitMap {
    pub fn identity(n_q: usize) -> Self {
        Self {
            logical_to_physical: (0..n_q).collect(),
        }
    }

    pub fn from_vec(logical_to_physical: Vec<usize>) -> Result<Self> {
        check_permutation(&logical_to_physical)?;
        Ok(Self {
            logical_to_physical,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.logical_to_physical.len()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.logical_to_physical[logical]
    }

    pub fn logical_at(&self, physical: usize) -> usize {
        self.logical_to_physical
            .iter()
            .position(|&p| p == physical)
            .expect("map is a bijection")
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.logical_to_physical
    }

    /// Records a physical swap of the contents of `p` and `q`.
    pub fn swap_physical(&mut self, p: usize, q: usize) {
        for x in &mut self.logical_to_physical {
            if *x == p {
                *x = q;
            } else if *x == q {
                *x = p;
            }
        }
    }

    /// Renames logical qubits: logical `i` becomes what logical `perm[i]`
    /// was. Nothing moves physically.
    pub fn relabel(&mut self, perm: &[usize]) -> Result<()> {
        if perm.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                actual: perm.len(),
            });
        }
        check_permutation(perm)?;
        self.logical_to_physical = perm.iter().map(|&j| self.logical_to_physical[j]).collect();
        Ok(())
    }
}

fn check_permutation(p: &[usize]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() {
            return Err(Error::QubitOutOfRange {
                index: x,
                n_q: p.len(),
            });
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::DuplicateTarget(x));
        }
    }
    Ok(())
}

/// One step of a logical circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum GateEvent {
    SingleQubit {
        qubit: usize,
        u: Mat2,
    },
    /// `a` is the first operand (the control of a CNot).
    TwoQubit {
        kind: GateKind,
        a: usize,
        b: usize,
    },
    /// See [`QubitMap::relabel`].
    Relabel {
        perm: Vec<usize>,
    },
}

impl GateEvent {
    /// Whether the event is a gate (relabelings are bookkeeping).
    pub fn is_gate(&self) -> bool {
        !matches!(self, GateEvent::Relabel { .. })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub events: usize,
    pub swaps: usize,
    pub uphi_blocks: usize,
}

/// Rectangular lattice with label `cols * row + col` and row 0 at the
/// bottom. Only horizontal and vertical neighbours take two-qubit gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
}

impl Grid {
    pub fn for_lattice(kind: LatticeKind) -> Self {
        match kind {
            LatticeKind::Chain4 => Grid { rows: 1, cols: 4 },
            LatticeKind::Grid3x3 => Grid { rows: 3, cols: 3 },
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    fn pos(&self, p: usize) -> (usize, usize) {
        (p / self.cols, p % self.cols)
    }

    fn label(&self, row: usize, col: usize) -> usize {
        self.cols * row + col
    }

    pub fn adjacent(&self, p: usize, q: usize) -> bool {
        let ((r1, c1), (r2, c2)) = (self.pos(p), self.pos(q));
        r1.abs_diff(r2) + c1.abs_diff(c2) == 1
    }
}

/// Swaps that make logical `a` and `b` neighbours, each as `(from, to)`
/// for the qubit being moved, and the map afterwards.
///
/// In a shared column the lower qubit moves up. Otherwise the lower qubit
/// moves vertically to the other's row, then the left one moves right.
pub fn route_pair(
    map: &QubitMap,
    a: usize,
    b: usize,
    grid: Grid,
) -> Result<(Vec<(usize, usize)>, QubitMap)> {
    let n = map.n_qubits();
    if n != grid.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: grid.n_qubits(),
            actual: n,
        });
    }
    for q in [a, b] {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_q: n });
        }
    }
    if a == b {
        return Err(Error::SamePair(a));
    }
    let mut map = map.clone();
    let mut swaps = Vec::new();
    let mut step = |map: &mut QubitMap, from: usize, to: usize| {
        swaps.push((from, to));
        map.swap_physical(from, to);
    };
    let (pa, pb) = (map.physical(a), map.physical(b));
    let (lower, upper) = if grid.pos(pa).0 <= grid.pos(pb).0 {
        (pa, pb)
    } else {
        (pb, pa)
    };
    let (ur, uc) = grid.pos(upper);
    let (mut r, c) = grid.pos(lower);
    if c == uc {
        while r + 1 < ur {
            step(&mut map, grid.label(r, c), grid.label(r + 1, c));
            r += 1;
        }
        return Ok((swaps, map));
    }
    while r < ur {
        step(&mut map, grid.label(r, c), grid.label(r + 1, c));
        r += 1;
    }
    let (mut left, right) = if c < uc { (c, uc) } else { (uc, c) };
    while left + 1 < right {
        step(&mut map, grid.label(r, left), grid.label(r, left + 1));
        left += 1;
    }
    Ok((swaps, map))
}

/// Noise parameters of the `U_{pi/8}` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessorSpec {
    pub n_swhh: usize,
    pub variant: SchemeVariant,
    pub calibration: CalibrationOrder,
}

/// How a circuit's blocks are realized.
enum Blocks<'a, R> {
    Noisy(&'a UphiEngine, &'a mut [R]),
    Ideal(Mat4),
}

/// A lattice of spins running logical circuits. Block unitaries are
/// compiled once per coupled pair and reused across circuits.
#[derive(Debug)]
pub struct Processor {
    grid: Grid,
    engine: UphiEngine,
}

impl Processor {
    pub fn new(kind: LatticeKind, system: &SpinSystem, spec: ProcessorSpec) -> Result<Self> {
        let grid = Grid::for_lattice(kind);
        if system.n_qubits() != grid.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_qubits(),
                actual: system.n_qubits(),
            });
        }
        if spec.n_swhh == 0 {
            return Err(Error::InvalidParameter("n_swhh must be at least 1".into()));
        }
        Ok(Self {
            grid,
            engine: UphiEngine::new(
                system,
                BLOCK_PHI,
                spec.n_swhh,
                spec.variant,
                spec.calibration,
            ),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n_qubits(&self) -> usize {
        self.grid.n_qubits()
    }

    pub fn engine(&self) -> &UphiEngine {
        &self.engine
    }

    /// Runs `circuit` on every row of `batch` with noisy blocks; rows are
    /// split into `rngs.len()` groups as in [`UphiEngine::apply`].
    pub fn execute<R: Rng>(
        &self,
        circuit: &[GateEvent],
        map: &mut QubitMap,
        batch: &mut StateBatch,
        rngs: &mut [R],
    ) -> Result<ExecutionTrace> {
        run(
            self.grid,
            circuit,
            map,
            batch,
            Blocks::Noisy(&self.engine, rngs),
        )
    }

    /// As [`Processor::execute`] with exact blocks.
    pub fn execute_ideal(
        &self,
        circuit: &[GateEvent],
        map: &mut QubitMap,
        batch: &mut StateBatch,
    ) -> Result<ExecutionTrace> {
        ideal_run(self.grid, circuit, map, batch)
    }
}

fn ideal_run(
    grid: Grid,
    circuit: &[GateEvent],
    map: &mut QubitMap,
    batch: &mut StateBatch,
) -> Result<ExecutionTrace> {
    run::<rand_chacha::ChaCha8Rng>(
        grid,
        circuit,
        map,
        batch,
        Blocks::Ideal(ideal_uphi_mat4(BLOCK_PHI)),
    )
}

fn run<R: Rng>(
    grid: Grid,
    circuit: &[GateEvent],
    map: &mut QubitMap,
    batch: &mut StateBatch,
    mut blocks: Blocks<'_, R>,
) -> Result<ExecutionTrace> {
    let n = grid.n_qubits();
    if map.n_qubits() != n || batch.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: batch.n_qubits(),
        });
    }
    let mut trace = ExecutionTrace::default();
    let mut block = |batch: &mut StateBatch, p: usize, q: usize, trace: &mut ExecutionTrace| {
        if !grid.adjacent(p, q) {
            return Err(Error::UncoupledPair(p, q));
        }
        trace.uphi_blocks += 1;
        match &mut blocks {
            Blocks::Noisy(engine, rngs) => engine.apply(batch, p, q, rngs),
            Blocks::Ideal(m) => {
                batch.apply_mat4(p, q, m);
                Ok(())
            }
        }
    };
    for event in circuit {
        match event {
            GateEvent::SingleQubit { qubit, u } => {
                check_logical(*qubit, n)?;
                batch.apply_mat2(map.physical(*qubit), u);
            }
            GateEvent::Relabel { perm } => map.relabel(perm)?,
            GateEvent::TwoQubit { kind, a, b } => {
                check_logical(*a, n)?;
                check_logical(*b, n)?;
                let layers = gate_layers(*kind)?;
                let (swaps, routed) = route_pair(map, *a, *b, grid)?;
                for (p, q) in swaps {
                    block(batch, p, q, &mut trace)?;
                    block(batch, p, q, &mut trace)?;
                    trace.swaps += 1;
                }
                *map = routed;
                let (pa, pb) = (map.physical(*a), map.physical(*b));
                let local = match kind {
                    GateKind::Cnot => [pa, pb],
                    _ => [pa.min(pb), pa.max(pb)],
                };
                for layer in layers {
                    match layer {
                        Layer::SingleQubit { qubit, axis, angle } => {
                            batch.apply_mat2(local[qubit], &rotation(axis, angle));
                        }
                        Layer::UphiBlock => block(batch, local[0], local[1], &mut trace)?,
                    }
                }
            }
        }
        trace.events += 1;
    }
    Ok(trace)
}

fn check_logical(q: usize, n_q: usize) -> Result<()> {
    if q >= n_q {
        return Err(Error::QubitOutOfRange { index: q, n_q });
    }
    Ok(())
}

/// Layers of a circuit gate; `U_phi` must be a whole number of blocks.
fn gate_layers(kind: GateKind) -> Result<Vec<Layer>> {
    match kind {
        GateKind::Uphi(phi) => {
            let m = (phi / BLOCK_PHI).round();
            if m < 1.0 || (phi - m * BLOCK_PHI).abs() > 1e-12 {
                return Err(Error::UnsupportedGate(format!(
                    "{kind} is not a multiple of pi/8"
                )));
            }
            Ok(vec![Layer::UphiBlock; m as usize])
        }
        other => Ok(decompose_gate(other)?.layers),
    }
}

/// Runs `circuit` once from `state` with noisy blocks drawn from `rng`.
/// Starts from the identity map; returns the physical state.
pub fn execute_circuit<R: Rng>(
    circuit: &[GateEvent],
    kind: LatticeKind,
    system: &SpinSystem,
    spec: ProcessorSpec,
    state: &StateVector,
    rng: R,
) -> Result<(StateVector, QubitMap, ExecutionTrace)> {
    let proc = Processor::new(kind, system, spec)?;
    let mut map = QubitMap::identity(proc.n_qubits());
    let mut batch = StateBatch::from_states(std::slice::from_ref(state))?;
    let trace = proc.execute(circuit, &mut map, &mut batch, &mut [rng])?;
    Ok((batch.state(0), map, trace))
}

/// Exact counterpart of [`execute_circuit`] starting from `map`.
pub fn ideal_execute(
    circuit: &[GateEvent],
    grid: Grid,
    map: &QubitMap,
    state: &StateVector,
) -> Result<(StateVector, QubitMap, ExecutionTrace)> {
    let mut map = map.clone();
    let mut batch = StateBatch::from_states(std::slice::from_ref(state))?;
    let trace = ideal_run(grid, circuit, &mut map, &mut batch)?;
    Ok((batch.state(0), map, trace))
}

/// Direct evaluation of a circuit on logical qubits with exact gates and
/// no routing. Relabel events permute the amplitudes so the result is in
/// the final logical order.
pub fn logical_evaluate(circuit: &[GateEvent], state: &StateVector) -> Result<StateVector> {
    let n = state.n_qubits();
    let mut s = state.clone();
    // Physical layout of the logical qubits, as if swaps were free.
    let mut map = QubitMap::identity(n);
    for event in circuit {
        match event {
            GateEvent::SingleQubit { qubit, u } => {
                check_logical(*qubit, n)?;
                s.apply_mat2(map.physical(*qubit), u);
            }
            GateEvent::Relabel { perm } => map.relabel(perm)?,
            GateEvent::TwoQubit { kind, a, b } => {
                check_logical(*a, n)?;
                check_logical(*b, n)?;
                if a == b {
                    return Err(Error::SamePair(*a));
                }
                let u = crate::gates::ideal_gate(*kind);
                s = crate::qstate::apply_unitary(
                    s,
                    &crate::qstate::embed_local(&u, &[map.physical(*a), map.physical(*b)], n)?,
                )?;
            }
        }
    }
    Ok(to_logical_order(&s, &map))
}

/// Reorders a physical state so that qubit `i` is logical `i`.
pub fn to_logical_order(state: &StateVector, map: &QubitMap) -> StateVector {
    state.permute_qubits(map.as_slice())
}
