//! Monte-Carlo experiments, decay fits, Husimi grids and result files.

mod fit;
mod husimi;
mod output;
mod verify;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use fit::{fit_decay, DecayPoint, FitModel, FitResult, FIT_FLOOR};
pub use husimi::{average_grids, husimi_grid, HusimiGrid};
pub use output::{
    emit_results, read_decay_points, read_results_json, write_csv, write_husimi_csv, OutputFormat,
    GATE_CSV_HEADER, SAWTOOTH_CSV_HEADER,
};
pub use verify::{
    check_decoupling, check_three_spin_h2, h2_pair_coefficients, reference_h2, DecouplingCheck,
    PairCheck,
};

use crate::aht::CalibrationOrder;
use crate::error::{Error, Result};
use crate::gates::{avg_gate_fidelity_fast, calibrated_tau, ideal_uphi, FidelityStat, UphiEngine};
use crate::model::{build_couplings, LatticeKind, LatticeSpec, SpinSystem};
use crate::processor::{ExecutionTrace, Grid, Processor, ProcessorSpec, QubitMap};
use crate::qstate::{StateBatch, C64, MAX_DENSE_QUBITS};
use crate::rng::run_rngs;
use crate::sawtooth::{initial_state, sawtooth_circuit, SawtoothParams};
use crate::sequences::SchemeVariant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    GateFidelity,
    Sawtooth,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::GateFidelity => "gate_fidelity",
            ExperimentKind::Sawtooth => "sawtooth",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gate_fidelity" => Ok(ExperimentKind::GateFidelity),
            "sawtooth" => Ok(ExperimentKind::Sawtooth),
            other => Err(Error::InvalidParameter(format!(
                "unknown experiment {other:?}"
            ))),
        }
    }
}

fn default_pair() -> (usize, usize) {
    (1, 2)
}

fn default_phi() -> f64 {
    PI / 4.0
}

fn default_k() -> f64 {
    -0.5
}

fn default_coupling() -> f64 {
    1.0
}

fn default_calibration() -> CalibrationOrder {
    CalibrationOrder::Zeroth
}

/// One experiment over a set of block counts. Gate experiments use `pair`
/// and `phi`; sawtooth experiments use `iterations` and `k_classical`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub lattice: LatticeKind,
    pub scheme: SchemeVariant,
    #[serde(default = "default_calibration")]
    pub calibration: CalibrationOrder,
    pub n_swhh: Vec<usize>,
    #[serde(default)]
    pub iterations: usize,
    pub runs: usize,
    pub master_seed: u64,
    #[serde(default = "default_pair")]
    pub pair: (usize, usize),
    #[serde(default = "default_phi")]
    pub phi: f64,
    #[serde(default = "default_k", rename = "K")]
    pub k_classical: f64,
    #[serde(default = "default_coupling")]
    pub base_coupling: f64,
}

impl ExperimentConfig {
    /// Gate experiment with the defaults of the four-spin chain study.
    pub fn gate(scheme: SchemeVariant, n_swhh: Vec<usize>, runs: usize, master_seed: u64) -> Self {
        Self {
            experiment: ExperimentKind::GateFidelity,
            lattice: LatticeKind::Chain4,
            scheme,
            calibration: CalibrationOrder::Zeroth,
            n_swhh,
            iterations: 0,
            runs,
            master_seed,
            pair: default_pair(),
            phi: default_phi(),
            k_classical: default_k(),
            base_coupling: default_coupling(),
        }
    }

    /// Sawtooth experiment on the nine-qubit grid.
    pub fn sawtooth(
        scheme: SchemeVariant,
        n_swhh: Vec<usize>,
        iterations: usize,
        runs: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            experiment: ExperimentKind::Sawtooth,
            lattice: LatticeKind::Grid3x3,
            iterations,
            ..Self::gate(scheme, n_swhh, runs, master_seed)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|source| Error::Json {
            path: "<config>".into(),
            source,
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if self.n_swhh.is_empty() || self.n_swhh.contains(&0) {
            return Err(Error::InvalidParameter(
                "n_swhh needs at least one value, all at least 1".into(),
            ));
        }
        let n_q = self.lattice.n_qubits();
        if n_q > MAX_DENSE_QUBITS {
            return Err(Error::ResourceLimit {
                n_q,
                limit: MAX_DENSE_QUBITS,
            });
        }
        if !(self.base_coupling > 0.0) {
            return Err(Error::InvalidParameter(
                "base coupling must be positive".into(),
            ));
        }
        if self.experiment == ExperimentKind::GateFidelity {
            let (k, l) = self.pair;
            if k >= n_q || l >= n_q {
                return Err(Error::QubitOutOfRange {
                    index: k.max(l),
                    n_q,
                });
            }
            if k == l {
                return Err(Error::SamePair(k));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> SpinSystem {
        build_couplings(LatticeSpec::new(self.lattice, self.base_coupling))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTau {
    pub k: usize,
    pub l: usize,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub lattice: LatticeKind,
    pub calibration: CalibrationOrder,
    /// Pulse spacing of every pair the experiment can recouple.
    pub taus: Vec<PairTau>,
    /// Counters of one circuit run (sawtooth only).
    pub trace: Option<ExecutionTrace>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub scheme: SchemeVariant,
    pub n_swhh: usize,
    pub phi: f64,
    pub stat: FidelityStat,
    pub seed: u64,
    pub metadata: RunMetadata,
}

impl GateResult {
    pub fn neg_log_fidelity(&self) -> f64 {
        -self.stat.mean.ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub t: usize,
    pub mean_fidelity: f64,
    pub stderr: f64,
}

/// Fidelity `f(t)` of the noisy against the ideal evolution, for
/// `t = 0..=iterations`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SawtoothResult {
    pub scheme: SchemeVariant,
    pub n_swhh: usize,
    pub runs: usize,
    pub seed: u64,
    pub series: Vec<FidelityPoint>,
    pub metadata: RunMetadata,
}

impl SawtoothResult {
    pub fn decay_points(&self) -> Vec<DecayPoint> {
        self.series
            .iter()
            .map(|p| DecayPoint {
                n_swhh: self.n_swhh,
                t: p.t as f64,
                fidelity: p.mean_fidelity,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum RunResult {
    GateFidelity(GateResult),
    Sawtooth(SawtoothResult),
}

/// A configuration and everything it produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub config: ExperimentConfig,
    pub results: Vec<RunResult>,
}

/// Runs every block count of `config`, in the listed order. Run `r` draws
/// from stream `r` of the master seed, so results depend only on the
/// configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultSet> {
    config.validate()?;
    let mut results = Vec::with_capacity(config.n_swhh.len());
    for &n in &config.n_swhh {
        results.push(match config.experiment {
            ExperimentKind::GateFidelity => RunResult::GateFidelity(run_gate(config, n)?),
            ExperimentKind::Sawtooth => RunResult::Sawtooth(run_sawtooth(config, n, |_, _| {})?),
        });
    }
    Ok(ResultSet {
        config: config.clone(),
        results,
    })
}

fn run_gate(config: &ExperimentConfig, n_swhh: usize) -> Result<GateResult> {
    let start = Instant::now();
    let system = config.system();
    let (k, l) = config.pair;
    let engine = UphiEngine::new(
        &system,
        config.phi,
        n_swhh,
        config.scheme,
        config.calibration,
    );
    let tau = calibrated_tau(&system, &engine.spec(k, l))?;
    let stat = avg_gate_fidelity_fast(
        &engine,
        k,
        l,
        &ideal_uphi(config.phi),
        config.runs,
        config.master_seed,
    )?;
    Ok(GateResult {
        scheme: config.scheme,
        n_swhh,
        phi: config.phi,
        stat,
        seed: config.master_seed,
        metadata: RunMetadata {
            lattice: config.lattice,
            calibration: config.calibration,
            taus: vec![PairTau { k, l, tau }],
            trace: None,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

/// Spacing of every pair of lattice neighbours.
fn neighbour_taus(system: &SpinSystem, grid: Grid, engine: &UphiEngine) -> Result<Vec<PairTau>> {
    let n = grid.n_qubits();
    let mut taus = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            if grid.adjacent(k, l) {
                let tau = calibrated_tau(system, &engine.spec(k, l))?;
                taus.push(PairTau { k, l, tau });
            }
        }
    }
    Ok(taus)
}

/// Simulates the sawtooth map for one block count. `observe(t, noisy)` is
/// called after every iteration with the noisy states, one row per run.
///
/// The original scheme draws no random frames, so every run is identical
/// and a single state is evolved for all of them.
pub fn run_sawtooth(
    config: &ExperimentConfig,
    n_swhh: usize,
    mut observe: impl FnMut(usize, &StateBatch),
) -> Result<SawtoothResult> {
    config.validate()?;
    let start = Instant::now();
    let system = config.system();
    let n_q = system.n_qubits();
    let params = SawtoothParams::new(n_q, config.k_classical)?;
    let processor = Processor::new(
        config.lattice,
        &system,
        ProcessorSpec {
            n_swhh,
            variant: config.scheme,
            calibration: config.calibration,
        },
    )?;
    let taus = neighbour_taus(&system, processor.grid(), processor.engine())?;
    let circuit = sawtooth_circuit(&params);
    let psi = initial_state(&params);
    let simulated = if config.scheme == SchemeVariant::Original {
        1
    } else {
        config.runs
    };
    let mut noisy = StateBatch::replicate(&psi, simulated);
    let mut ideal = StateBatch::replicate(&psi, 1);
    let mut noisy_map = QubitMap::identity(n_q);
    let mut ideal_map = QubitMap::identity(n_q);
    let mut rngs = run_rngs(config.master_seed, simulated);
    let mut series = Vec::with_capacity(config.iterations + 1);
    series.push(FidelityPoint {
        t: 0,
        mean_fidelity: 1.0,
        stderr: 0.0,
    });
    let mut trace = None;
    for t in 1..=config.iterations {
        let tr = processor.execute(&circuit, &mut noisy_map, &mut noisy, &mut rngs)?;
        processor.execute_ideal(&circuit, &mut ideal_map, &mut ideal)?;
        if trace.is_none() {
            trace = Some(tr);
        }
        let reference = ideal.row(0);
        let f: Vec<f64> = (0..noisy.rows())
            .map(|r| {
                let overlap: C64 = noisy
                    .row(r)
                    .iter()
                    .zip(reference)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                overlap.norm_sqr().min(1.0)
            })
            .collect();
        let (mean_fidelity, stderr) = mean_stderr(&f);
        series.push(FidelityPoint {
            t,
            mean_fidelity,
            stderr,
        });
        observe(t, &noisy);
    }
    Ok(SawtoothResult {
        scheme: config.scheme,
        n_swhh,
        runs: config.runs,
        seed: config.master_seed,
        series,
        metadata: RunMetadata {
            lattice: config.lattice,
            calibration: config.calibration,
            taus,
            trace,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Husimi density of the noisy sawtooth states, averaged over runs and
/// over the last `window` iterations.
pub fn sawtooth_husimi(
    config: &ExperimentConfig,
    n_swhh: usize,
    window: usize,
    resolution: usize,
) -> Result<(SawtoothResult, HusimiGrid)> {
    if window == 0 || window > config.iterations {
        return Err(Error::InvalidParameter(format!(
            "Husimi window {window} must lie in 1..={}",
            config.iterations
        )));
    }
    let first = config.iterations - window + 1;
    let mut grids = Vec::new();
    let mut failure = None;
    let result = run_sawtooth(config, n_swhh, |t, batch| {
        if t < first || failure.is_some() {
            return;
        }
        for r in 0..batch.rows() {
            match husimi_grid(&batch.state(r), resolution, resolution) {
                Ok(g) => grids.push(g),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((result, average_grids(&grids)?))
}

/// Parses a list of block counts: `5`, `4,6,8` or the inclusive range
/// `4..20` (also `4..=20`).
pub fn parse_n_swhh(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("cannot parse n_swhh list {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let values = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}
