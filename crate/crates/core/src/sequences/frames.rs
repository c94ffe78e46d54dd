use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Pulse;
use crate::error::{Error, Result};
use crate::qstate::PauliAxis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeVariant {
    Original,
    Randomized,
    #[serde(alias = "symmetrized")]
    RandomizedSymmetrized,
}

impl SchemeVariant {
    pub const ALL: [SchemeVariant; 3] = [
        SchemeVariant::Original,
        SchemeVariant::Randomized,
        SchemeVariant::RandomizedSymmetrized,
    ];

    /// Short name used on the command line and in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            SchemeVariant::Original => "original",
            SchemeVariant::Randomized => "randomized",
            SchemeVariant::RandomizedSymmetrized => "symmetrized",
        }
    }
}

impl fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(SchemeVariant::Original),
            "randomized" => Ok(SchemeVariant::Randomized),
            "symmetrized" | "randomized_symmetrized" => Ok(SchemeVariant::RandomizedSymmetrized),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// One Pauli per qubit, wrapped around a block on both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliFrame {
    pub r: Vec<PauliAxis>,
}

impl PauliFrame {
    pub fn identity(n_q: usize) -> Self {
        Self {
            r: vec![PauliAxis::I; n_q],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.r.iter().all(|&p| p == PauliAxis::I)
    }

    pub fn to_pulse(&self) -> Pulse {
        Pulse::PauliFrame {
            assignments: self
                .r
                .iter()
                .copied()
                .enumerate()
                .filter(|(_, p)| *p != PauliAxis::I)
                .collect(),
        }
    }
}

/// Random dressing of a single recoupling block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFrame {
    pub pauli: PauliFrame,
    /// Shared axis of the `pi/2` rotations on the recoupled pair.
    pub alpha: Option<PauliAxis>,
}

/// Draws the dressing of one block. Spectators get independent uniform
/// Paulis in ascending qubit order; the pair keeps the identity. The
/// symmetrized variant then draws `alpha` uniformly from `{x, y, z}`.
/// Every code path that randomizes blocks goes through here, so equal
/// seeds give equal frames regardless of the execution engine.
pub fn draw_block_frame<R: Rng + ?Sized>(
    n_q: usize,
    k: usize,
    l: usize,
    variant: SchemeVariant,
    rng: &mut R,
) -> BlockFrame {
    let mut frame = PauliFrame::identity(n_q);
    if variant == SchemeVariant::Original {
        return BlockFrame {
            pauli: frame,
            alpha: None,
        };
    }
    for (q, r) in frame.r.iter_mut().enumerate() {
        if q != k && q != l {
            *r = PauliAxis::ALL[rng.random_range(0..4)];
        }
    }
    let alpha = (variant == SchemeVariant::RandomizedSymmetrized)
        .then(|| PauliAxis::NONTRIVIAL[rng.random_range(0..3)]);
    BlockFrame {
        pauli: frame,
        alpha,
    }
}
