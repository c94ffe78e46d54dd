use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{rotation, Mat2, PauliAxis};

/// Instantaneous, ideal control pulse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pulse {
    /// `exp(-i sigma_axis pi/4)` on every qubit; `negative` flips the sense
    /// of rotation.
    BroadbandHalfPi { axis: PauliAxis, negative: bool },
    /// The Pauli operator itself on one qubit.
    SelectivePi { qubit: usize, axis: PauliAxis },
    /// `exp(-/+ i sigma_axis pi/4)` on one qubit.
    SelectiveHalfPi {
        qubit: usize,
        axis: PauliAxis,
        negative: bool,
    },
    /// Simultaneous Pauli operators, identity on unlisted qubits.
    PauliFrame {
        assignments: Vec<(usize, PauliAxis)>,
    },
}

impl Pulse {
    pub fn broadband(axis: PauliAxis, negative: bool) -> Self {
        Pulse::BroadbandHalfPi { axis, negative }
    }

    /// Single-qubit factors of the pulse unitary.
    pub fn factors(&self, n_q: usize) -> Vec<(usize, Mat2)> {
        match self {
            Pulse::BroadbandHalfPi { axis, negative } => {
                let u = half_pi(*axis, *negative);
                (0..n_q).map(|q| (q, u)).collect()
            }
            Pulse::SelectivePi { qubit, axis } => vec![(*qubit, axis.matrix())],
            Pulse::SelectiveHalfPi {
                qubit,
                axis,
                negative,
            } => vec![(*qubit, half_pi(*axis, *negative))],
            Pulse::PauliFrame { assignments } => assignments
                .iter()
                .filter(|(_, p)| *p != PauliAxis::I)
                .map(|&(q, p)| (q, p.matrix()))
                .collect(),
        }
    }

    fn max_qubit(&self) -> Option<usize> {
        match self {
            Pulse::BroadbandHalfPi { .. } => None,
            Pulse::SelectivePi { qubit, .. } | Pulse::SelectiveHalfPi { qubit, .. } => Some(*qubit),
            Pulse::PauliFrame { assignments } => assignments.iter().map(|a| a.0).max(),
        }
    }
}

fn half_pi(axis: PauliAxis, negative: bool) -> Mat2 {
    let phi = std::f64::consts::FRAC_PI_2;
    rotation(axis, if negative { -phi } else { phi })
}

fn sign(negative: bool) -> char {
    if negative {
        '-'
    } else {
        '+'
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pulse::BroadbandHalfPi { axis, negative } => {
                write!(f, "broadband {}{}", sign(*negative), axis)
            }
            Pulse::SelectivePi { qubit, axis } => write!(f, "pi {qubit} {axis}"),
            Pulse::SelectiveHalfPi {
                qubit,
                axis,
                negative,
            } => write!(f, "half_pi {qubit} {}{}", sign(*negative), axis),
            Pulse::PauliFrame { assignments } => {
                f.write_str("frame")?;
                for (q, p) in assignments {
                    write!(f, " {q}:{p}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleItem {
    Pulse(Pulse),
    Free(f64),
}

/// Time-ordered pulses and free-evolution intervals.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    items: Vec<ScheduleItem>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_items(items: Vec<ScheduleItem>) -> Self {
        Self { items }
    }

    pub fn items(&self) -> &[ScheduleItem] {
        &self.items
    }

    pub fn push_pulse(&mut self, p: Pulse) {
        self.items.push(ScheduleItem::Pulse(p));
    }

    pub fn push_free(&mut self, tau: f64) {
        self.items.push(ScheduleItem::Free(tau));
    }

    pub fn extend(&mut self, other: &Schedule) {
        self.items.extend_from_slice(&other.items);
    }

    pub fn total_duration(&self) -> f64 {
        self.items
            .iter()
            .map(|i| match i {
                ScheduleItem::Free(t) => *t,
                ScheduleItem::Pulse(_) => 0.0,
            })
            .sum()
    }

    pub fn free_intervals(&self) -> usize {
        self.items
            .iter()
            .filter(|i| matches!(i, ScheduleItem::Free(_)))
            .count()
    }

    pub fn pulse_count(&self) -> usize {
        self.items.len() - self.free_intervals()
    }

    /// Checks that every pulse fits an `n_q`-qubit register.
    pub fn validate(&self, n_q: usize) -> Result<()> {
        for item in &self.items {
            if let ScheduleItem::Pulse(p) = item {
                if let Some(q) = p.max_qubit() {
                    if q >= n_q {
                        return Err(Error::QubitOutOfRange { index: q, n_q });
                    }
                }
            }
        }
        Ok(())
    }

    /// One line per item: `free <tau>` or `pulse <description>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            match item {
                ScheduleItem::Free(t) => out.push_str(&format!("free {t}\n")),
                ScheduleItem::Pulse(p) => out.push_str(&format!("pulse {p}\n")),
            }
        }
        out
    }

    /// Inverse of [`Schedule::to_text`]. Blank lines and `#` comments are
    /// skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::ScheduleParse {
                line: i + 1,
                message,
            };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("free") => {
                    let t: f64 = words
                        .next()
                        .ok_or_else(|| err("missing duration".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad duration: {e}")))?;
                    items.push(ScheduleItem::Free(t));
                }
                Some("pulse") => {
                    let rest: Vec<&str> = words.collect();
                    items.push(ScheduleItem::Pulse(parse_pulse(&rest).map_err(err)?));
                }
                Some(other) => return Err(err(format!("unknown item {other:?}"))),
                None => unreachable!(),
            }
        }
        Ok(Self { items })
    }
}

fn parse_signed_axis(s: &str) -> std::result::Result<(PauliAxis, bool), String> {
    let (negative, rest) = match s.as_bytes().first() {
        Some(b'+') => (false, &s[1..]),
        Some(b'-') => (true, &s[1..]),
        _ => return Err(format!("expected signed axis, got {s:?}")),
    };
    let axis = rest.parse::<PauliAxis>().map_err(|e| e.to_string())?;
    Ok((axis, negative))
}

fn parse_qubit(s: Option<&&str>) -> std::result::Result<usize, String> {
    s.ok_or("missing qubit")?
        .parse()
        .map_err(|e| format!("bad qubit: {e}"))
}

fn parse_pulse(words: &[&str]) -> std::result::Result<Pulse, String> {
    match words.first().copied() {
        Some("broadband") => {
            let (axis, negative) = parse_signed_axis(words.get(1).ok_or("missing axis")?)?;
            Ok(Pulse::BroadbandHalfPi { axis, negative })
        }
        Some("pi") => {
            let qubit = parse_qubit(words.get(1))?;
            let axis = words
                .get(2)
                .ok_or("missing axis")?
                .parse()
                .map_err(|e: Error| e.to_string())?;
            Ok(Pulse::SelectivePi { qubit, axis })
        }
        Some("half_pi") => {
            let qubit = parse_qubit(words.get(1))?;
            let (axis, negative) = parse_signed_axis(words.get(2).ok_or("missing axis")?)?;
            Ok(Pulse::SelectiveHalfPi {
                qubit,
                axis,
                negative,
            })
        }
        Some("frame") => {
            let mut assignments = Vec::new();
            for w in &words[1..] {
                let (q, p) = w.split_once(':').ok_or(format!("bad assignment {w:?}"))?;
                let q = q.parse().map_err(|e| format!("bad qubit: {e}"))?;
                let p = p.parse().map_err(|e: Error| e.to_string())?;
                assignments.push((q, p));
            }
            Ok(Pulse::PauliFrame { assignments })
        }
        other => Err(format!("unknown pulse {other:?}")),
    }
}
