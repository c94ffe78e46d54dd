use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{StateVector, C64};

/// Phase-space density on the `2 pi x 2 pi` cell.
///
/// Axes are `theta in [0, 2 pi)` and the scaled momentum `P = 2 pi p / N`
/// in `[-pi, pi)`. `values[ip * n_theta + it]` is the density at
/// `(theta(it), big_p(ip))`; the sum times the cell area is about one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid {
    pub n_theta: usize,
    pub n_p: usize,
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn theta(&self, it: usize) -> f64 {
        2.0 * PI * it as f64 / self.n_theta as f64
    }

    pub fn big_p(&self, ip: usize) -> f64 {
        -PI + 2.0 * PI * ip as f64 / self.n_p as f64
    }

    pub fn value(&self, it: usize, ip: usize) -> f64 {
        self.values[ip * self.n_theta + it]
    }

    pub fn cell_area(&self) -> f64 {
        4.0 * PI * PI / (self.n_theta * self.n_p) as f64
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    /// Mean of the density along each momentum row.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        self.values
            .chunks_exact(self.n_theta)
            .map(|row| row.iter().sum::<f64>() / self.n_theta as f64)
            .collect()
    }
}

/// Husimi density `|<theta, p | psi>|^2` of a momentum-basis state, with
/// coherent states that are Gaussian in momentum, periodized over the
/// window, and of equal widths `sqrt(pi / N)` in `theta` and `P`.
pub fn husimi_grid(state: &StateVector, n_theta: usize, n_p: usize) -> Result<HusimiGrid> {
    if n_theta == 0 || n_p == 0 {
        return Err(Error::InvalidParameter(
            "Husimi resolution must be positive".into(),
        ));
    }
    let n = state.dim();
    let nf = n as f64;
    let half = (n / 2) as f64;
    // Momentum width: dP = T dp with T = 2 pi / N and dP = sqrt(pi / N).
    let dp = (PI / nf).sqrt() * nf / (2.0 * PI);
    let psi = state.amplitudes();
    let mut values = vec![0.0; n_theta * n_p];
    let mut envelope = vec![0.0; n];
    for ip in 0..n_p {
        let p0 = (-PI + 2.0 * PI * ip as f64 / n_p as f64) * nf / (2.0 * PI);
        for (m, e) in envelope.iter_mut().enumerate() {
            let p = m as f64 - half;
            *e = (-1..=1)
                .map(|s| {
                    let d = p + s as f64 * nf - p0;
                    (-d * d / (4.0 * dp * dp)).exp()
                })
                .sum();
        }
        let norm = envelope.iter().map(|e| e * e).sum::<f64>().sqrt();
        for it in 0..n_theta {
            let theta0 = 2.0 * PI * it as f64 / n_theta as f64;
            let overlap: C64 = (0..n)
                .filter(|&m| envelope[m] > 1e-300)
                .map(|m| psi[m] * C64::from_polar(envelope[m] / norm, theta0 * (m as f64 - half)))
                .sum();
            values[ip * n_theta + it] = overlap.norm_sqr() * nf / (4.0 * PI * PI);
        }
    }
    Ok(HusimiGrid {
        n_theta,
        n_p,
        values,
    })
}

/// Pointwise mean of grids of equal shape.
pub fn average_grids(grids: &[HusimiGrid]) -> Result<HusimiGrid> {
    let first = grids
        .first()
        .ok_or_else(|| Error::InvalidParameter("no Husimi grids to average".into()))?;
    let mut values = vec![0.0; first.values.len()];
    for g in grids {
        if (g.n_theta, g.n_p) != (first.n_theta, first.n_p) {
            return Err(Error::DimensionMismatch {
                expected: first.values.len(),
                actual: g.values.len(),
            });
        }
        for (v, x) in values.iter_mut().zip(&g.values) {
            *v += x;
        }
    }
    values.iter_mut().for_each(|v| *v /= grids.len() as f64);
    Ok(HusimiGrid {
        n_theta: first.n_theta,
        n_p: first.n_p,
        values,
    })
}
