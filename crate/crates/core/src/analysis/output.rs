use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DecayPoint, ExperimentKind, HusimiGrid, ResultSet, RunResult};
use crate::error::{Error, Result};

pub const GATE_CSV_HEADER: [&str; 8] = [
    "scheme",
    "n_swhh",
    "phi",
    "mean_fidelity",
    "stderr",
    "neg_log_fidelity",
    "runs",
    "seed",
];

pub const SAWTOOTH_CSV_HEADER: [&str; 8] = [
    "experiment",
    "scheme",
    "n_swhh",
    "t",
    "mean_fidelity",
    "stderr",
    "runs",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Serialize)]
struct GateRow<'a> {
    scheme: &'a str,
    n_swhh: usize,
    phi: f64,
    mean_fidelity: f64,
    stderr: f64,
    neg_log_fidelity: f64,
    runs: usize,
    seed: u64,
}

#[derive(Serialize)]
struct SawtoothRow<'a> {
    experiment: &'a str,
    scheme: &'a str,
    n_swhh: usize,
    t: usize,
    mean_fidelity: f64,
    stderr: f64,
    runs: usize,
    seed: u64,
}

/// CSV rows of `set`; only the header if there are no results.
pub fn write_csv<W: Write>(set: &ResultSet, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    match set.config.experiment {
        ExperimentKind::GateFidelity => w.write_record(GATE_CSV_HEADER)?,
        ExperimentKind::Sawtooth => w.write_record(SAWTOOTH_CSV_HEADER)?,
    }
    for r in &set.results {
        match r {
            RunResult::GateFidelity(g) => w.serialize(GateRow {
                scheme: g.scheme.label(),
                n_swhh: g.n_swhh,
                phi: g.phi,
                mean_fidelity: g.stat.mean,
                stderr: g.stat.stderr,
                neg_log_fidelity: g.neg_log_fidelity(),
                runs: g.stat.runs,
                seed: g.seed,
            })?,
            RunResult::Sawtooth(s) => {
                for p in &s.series {
                    w.serialize(SawtoothRow {
                        experiment: ExperimentKind::Sawtooth.label(),
                        scheme: s.scheme.label(),
                        n_swhh: s.n_swhh,
                        t: p.t,
                        mean_fidelity: p.mean_fidelity,
                        stderr: p.stderr,
                        runs: s.runs,
                        seed: s.seed,
                    })?
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes `set` to `path`. JSON carries the configuration and per-result
/// metadata; CSV holds only the fidelity columns.
pub fn emit_results(set: &ResultSet, format: OutputFormat, path: &Path) -> Result<()> {
    let file = create(path)?;
    match format {
        OutputFormat::Csv => write_csv(set, file).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        }),
        OutputFormat::Json => {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, set).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
            writeln!(file)
                .and_then(|_| file.flush())
                .map_err(|source| Error::Io {
                    path: path.to_path_buf(),
                    source,
                })
        }
    }
}

pub fn read_results_json(path: &Path) -> Result<ResultSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `theta, P, density` rows.
pub fn write_husimi_csv<W: Write>(
    grid: &HusimiGrid,
    out: W,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "P", "density"])?;
    for ip in 0..grid.n_p {
        for it in 0..grid.n_theta {
            w.serialize((grid.theta(it), grid.big_p(ip), grid.value(it, ip)))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct FitRow {
    scheme: String,
    n_swhh: usize,
    t: Option<usize>,
    mean_fidelity: f64,
}

/// Decay points from a gate or sawtooth CSV, or a JSON result file, tagged
/// with their scheme label. Gate rows have `t = 0`.
pub fn read_decay_points(path: &Path) -> Result<Vec<(String, DecayPoint)>> {
    if path.extension().is_some_and(|e| e == "json") {
        let set = read_results_json(path)?;
        let mut out = Vec::new();
        for r in &set.results {
            match r {
                RunResult::GateFidelity(g) => out.push((
                    g.scheme.label().to_string(),
                    DecayPoint {
                        n_swhh: g.n_swhh,
                        t: 0.0,
                        fidelity: g.stat.mean,
                    },
                )),
                RunResult::Sawtooth(s) => out.extend(
                    s.decay_points()
                        .into_iter()
                        .map(|p| (s.scheme.label().to_string(), p)),
                ),
            }
        }
        return Ok(out);
    }
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader
        .deserialize::<FitRow>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            Ok((
                row.scheme,
                DecayPoint {
                    n_swhh: row.n_swhh,
                    t: row.t.unwrap_or(0) as f64,
                    fidelity: row.mean_fidelity,
                },
            ))
        })
        .collect()
}
