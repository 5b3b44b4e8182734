use std::fmt;
use std::str::FromStr;

use super::matrix::{c, ComplexMatrix, I, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            Pauli::Y => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            Pauli::Z => ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, c(-1.0, 0.0)]]),
        }
    }

    /// Whether the two single-qubit Paulis anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `cos(a)·X + sin(a)·Y`, an equatorial Pauli observable.
pub fn equatorial(angle: f64) -> ComplexMatrix {
    &Pauli::X.matrix().scale_re(angle.cos()) + &Pauli::Y.matrix().scale_re(angle.sin())
}

/// A tensor product of single-qubit Paulis, one factor per register qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<Pauli>,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.factors
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, p| acc.kron(&p.matrix()))
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::param("pauli", format!("unknown factor `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.factors {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}
