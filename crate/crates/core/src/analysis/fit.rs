use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fidelities below this are dropped before taking logarithms.
pub const FIT_FLOOR: f64 = 1e-12;

/// Decay law `f = exp(-c x)` for a predictor `x` built from the number of
/// recoupling blocks `n` and the iteration `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `x = 1 / n^4`.
    InvN4,
    /// `x = 1 / n^5`.
    InvN5,
    /// `x = t^2 / n^4`.
    T2N4,
    /// `x = t / n^5`.
    TN5,
}

impl FitModel {
    pub const ALL: [FitModel; 4] = [
        FitModel::InvN4,
        FitModel::InvN5,
        FitModel::T2N4,
        FitModel::TN5,
    ];

    pub fn predictor(self, n_swhh: usize, t: f64) -> f64 {
        let n = n_swhh as f64;
        match self {
            FitModel::InvN4 => n.powi(-4),
            FitModel::InvN5 => n.powi(-5),
            FitModel::T2N4 => t * t / n.powi(4),
            FitModel::TN5 => t / n.powi(5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FitModel::InvN4 => "inv_n4",
            FitModel::InvN5 => "inv_n5",
            FitModel::T2N4 => "t2_n4",
            FitModel::TN5 => "t_n5",
        }
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FitModel::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown fit model {s:?}; expected inv_n4, inv_n5, t2_n4 or t_n5"
                ))
            })
    }
}

/// One measured fidelity; `t` is ignored by the `1/n^k` models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub n_swhh: usize,
    pub t: f64,
    pub fidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub constant: f64,
    /// Root-mean-square residual of `-ln f`.
    pub residual: f64,
    pub points: usize,
}

/// Least squares through the origin of `-ln f` against the model
/// predictor.
pub fn fit_decay(points: &[DecayPoint], model: FitModel) -> Result<FitResult> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.fidelity >= FIT_FLOOR)
        .map(|p| (model.predictor(p.n_swhh, p.t), -p.fidelity.min(1.0).ln()))
        .collect();
    if data.len() < 3 {
        return Err(Error::InsufficientFitData(data.len()));
    }
    let sxx: f64 = data.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "fit predictor vanishes on every point".into(),
        ));
    }
    let sxy: f64 = data.iter().map(|(x, y)| x * y).sum();
    let c = sxy / sxx;
    let ss: f64 = data.iter().map(|(x, y)| (y - c * x).powi(2)).sum();
    Ok(FitResult {
        model,
        constant: c,
        residual: (ss / data.len() as f64).sqrt(),
        points: data.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(f: impl Fn(usize, f64) -> f64, ns: &[usize], ts: &[f64]) -> Vec<DecayPoint> {
        let mut v = Vec::new();
        for &n in ns {
            for &t in ts {
                v.push(DecayPoint {
                    n_swhh: n,
                    t,
                    fidelity: f(n, t),
                });
            }
        }
        v
    }

    #[test]
    fn exact_quartic_data() {
        let ns: Vec<usize> = (4..=20).collect();
        let p = pts(|n, _| (-2.0 / (n as f64).powi(4)).exp(), &ns, &[0.0]);
        let r = fit_decay(&p, FitModel::InvN4).unwrap();
        assert!((r.constant - 2.0).abs() < 1e-12, "{}", r.constant);
        assert!(r.residual < 1e-15);
        assert_eq!(r.points, 17);
    }

    #[test]
    fn exact_linear_in_time() {
        let ts: Vec<f64> = (1..=30).map(f64::from).collect();
        let p = pts(|_, t| (-0.5 * t).exp(), &[10], &ts);
        let r = fit_decay(&p, FitModel::TN5).unwrap();
        assert!((r.constant - 0.5 * 1e5).abs() < 1e-7 * 0.5e5);
    }

    #[test]
    fn right_model_has_smaller_residual() {
        let ts: Vec<f64> = (0..=25).map(f64::from).collect();
        let p = pts(|n, t| (-0.9 * t * t / (n as f64).powi(4)).exp(), &[6], &ts);
        let right = fit_decay(&p, FitModel::T2N4).unwrap();
        let wrong = fit_decay(&p, FitModel::TN5).unwrap();
        assert!((right.constant - 0.9).abs() < 1e-10);
        assert!(right.residual < wrong.residual);
    }

    #[test]
    fn floor_and_errors() {
        let mut p = pts(|_, t| (-t).exp(), &[1], &[1.0, 2.0, 3.0]);
        p.push(DecayPoint {
            n_swhh: 1,
            t: 4.0,
            fidelity: 0.0,
        });
        let r = fit_decay(&p, FitModel::TN5).unwrap();
        assert_eq!(r.points, 3);
        assert!((r.constant - 1.0).abs() < 1e-12);
        p.truncate(2);
        assert!(matches!(
            fit_decay(&p, FitModel::TN5),
            Err(Error::InsufficientFitData(2))
        ));
        let zeros = pts(|_, _| 0.0, &[1], &[1.0, 2.0, 3.0]);
        assert!(fit_decay(&zeros, FitModel::TN5).is_err());
        let t0 = pts(|_, _| 1.0, &[3], &[0.0, 0.0, 0.0]);
        assert!(fit_decay(&t0, FitModel::T2N4).is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for m in FitModel::ALL {
            assert_eq!(m.label().parse::<FitModel>().unwrap(), m);
        }
        assert!("cubic".parse::<FitModel>().is_err());
    }
}
