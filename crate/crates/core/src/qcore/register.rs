use std::fmt;

use serde::{Deserialize, Serialize};

use super::MAX_QUBITS;
use crate::error::{Error, Result};

/// Identifier of one qubit in a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Qubit {
    Memory,
    Communication,
    Photon,
    Aux(u8),
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qubit::Memory => write!(f, "m"),
            Qubit::Communication => write!(f, "c"),
            Qubit::Photon => write!(f, "p"),
            Qubit::Aux(k) => write!(f, "a{k}"),
        }
    }
}

/// Ordered qubit labels. Register order is tensor order: the first label is
/// the most significant bit of a computational-basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitRegister {
    labels: Vec<Qubit>,
}

impl QubitRegister {
    pub fn new(labels: Vec<Qubit>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySelection);
        }
        if labels.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        Ok(Self { labels })
    }

    /// The node register `[memory, communication, photon]`.
    pub fn node() -> Self {
        Self {
            labels: vec![Qubit::Memory, Qubit::Communication, Qubit::Photon],
        }
    }

    pub fn labels(&self) -> &[Qubit] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn position(&self, q: Qubit) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == q)
            .ok_or_else(|| Error::UnknownLabel(q.to_string()))
    }

    pub fn positions(&self, qs: &[Qubit]) -> Result<Vec<usize>> {
        let pos = qs.iter().map(|&q| self.position(q)).collect::<Result<Vec<_>>>()?;
        for (i, p) in pos.iter().enumerate() {
            if pos[..i].contains(p) {
                return Err(Error::DuplicateLabel(qs[i].to_string()));
            }
        }
        Ok(pos)
    }

    /// Concatenate two registers with disjoint labels.
    pub fn join(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Self::new(labels)
    }

    /// Bit of qubit at `position` in a computational index.
    #[inline]
    pub fn bit(&self, index: usize, position: usize) -> usize {
        (index >> (self.labels.len() - 1 - position)) & 1
    }
}
