use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;

use crate::aht::CalibrationOrder;
use crate::error::{Error, Result};
use crate::model::SpinSystem;
use crate::qstate::{Operator, StateBatch};
use crate::sequences::{
    apply_pulse_rows, draw_block_frame, super_whh_schedule, BlockFrame, Evolution, Pulse,
    SchemeVariant,
};

use super::{calibrated_tau, UPhiSpec};

#[derive(Debug)]
struct PairCache {
    block: Operator,
    /// `block^n_swhh`, used when no frames are drawn.
    power: Operator,
}

/// Noisy `U_phi` gates applied to state batches through precompiled block
/// unitaries. The undressed recoupling block of each pair is compiled once;
/// frames are single-qubit layers applied around it per run.
#[derive(Debug)]
pub struct UphiEngine {
    system: SpinSystem,
    evolution: Evolution,
    phi: f64,
    n_swhh: usize,
    variant: SchemeVariant,
    calibration: CalibrationOrder,
    cache: Mutex<HashMap<(usize, usize), Arc<PairCache>>>,
}

impl UphiEngine {
    pub fn new(
        system: &SpinSystem,
        phi: f64,
        n_swhh: usize,
        variant: SchemeVariant,
        calibration: CalibrationOrder,
    ) -> Self {
        Self {
            system: system.clone(),
            evolution: Evolution::new(system),
            phi,
            n_swhh,
            variant,
            calibration,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.system.n_qubits()
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn variant(&self) -> SchemeVariant {
        self.variant
    }

    pub fn spec(&self, k: usize, l: usize) -> UPhiSpec {
        UPhiSpec {
            k,
            l,
            phi: self.phi,
            n_swhh: self.n_swhh,
            variant: self.variant,
            calibration: self.calibration,
        }
    }

    fn pair(&self, k: usize, l: usize) -> Result<Arc<PairCache>> {
        let key = (k.min(l), k.max(l));
        if let Some(c) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(c));
        }
        let tau = calibrated_tau(&self.system, &self.spec(k, l))?;
        let block = self.evolution.compile(&super_whh_schedule(k, l, tau)?)?;
        let mut power = block.clone();
        for _ in 1..self.n_swhh {
            power = block.matmul(&power);
        }
        let entry = Arc::new(PairCache { block, power });
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&entry));
        Ok(entry)
    }

    /// Applies one noisy `U_phi` on `(k, l)` to every row of `batch`.
    ///
    /// Rows are split into `rngs.len()` equal consecutive groups; group `g`
    /// shares the frames drawn from `rngs[g]`, in the same order as the
    /// schedule path.
    pub fn apply<R: Rng>(
        &self,
        batch: &mut StateBatch,
        k: usize,
        l: usize,
        rngs: &mut [R],
    ) -> Result<()> {
        let n_q = self.n_qubits();
        if batch.n_qubits() != n_q {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_q,
                actual: batch.dim(),
            });
        }
        for q in [k, l] {
            if q >= n_q {
                return Err(Error::QubitOutOfRange { index: q, n_q });
            }
        }
        if rngs.is_empty() || batch.rows() % rngs.len() != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} rows do not split into {} groups",
                batch.rows(),
                rngs.len()
            )));
        }
        let cache = self.pair(k, l)?;
        if self.variant == SchemeVariant::Original {
            batch.apply_operator(&cache.power);
            return Ok(());
        }
        let per = batch.rows() / rngs.len();
        for _ in 0..self.n_swhh {
            let frames: Vec<BlockFrame> = rngs
                .iter_mut()
                .map(|rng| draw_block_frame(n_q, k, l, self.variant, rng))
                .collect();
            for (g, f) in frames.iter().enumerate() {
                for p in dressing(f, k, l, false) {
                    apply_pulse_rows(batch.rows_mut(g * per, per), 1, n_q, &p);
                }
            }
            batch.apply_operator(&cache.block);
            for (g, f) in frames.iter().enumerate() {
                for p in dressing(f, k, l, true) {
                    apply_pulse_rows(batch.rows_mut(g * per, per), 1, n_q, &p);
                }
            }
        }
        Ok(())
    }
}

/// Pulses before (`after == false`) or after the block, in time order.
fn dressing(frame: &BlockFrame, k: usize, l: usize, after: bool) -> Vec<Pulse> {
    let pauli = (!frame.pauli.is_identity()).then(|| frame.pauli.to_pulse());
    let rot = frame.alpha.into_iter().flat_map(|axis| {
        [k, l].map(|qubit| Pulse::SelectiveHalfPi {
            qubit,
            axis,
            negative: after,
        })
    });
    if after {
        rot.chain(pauli).collect()
    } else {
        pauli.into_iter().chain(rot).collect()
    }
}
