use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Completeness tolerance for Kraus sets and projector sets.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// A completely positive trace-preserving map given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates shape and `Σ K†K = I`.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptySelection)?;
        let d = first.nrows();
        if !d.is_power_of_two() {
            return Err(Error::Dimension(format!("Kraus dimension {d} is not a power of two")));
        }
        for k in &operators {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::Dimension("Kraus operators must be square and equal-sized".into()));
            }
        }
        let sum = operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.adjoint().matmul(k));
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(Self { operators })
    }

    pub fn identity(nqubits: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(1 << nqubits)],
        }
    }

    /// Single-operator channel for a unitary.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn nqubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Apply to a bare operator: `Σ K ρ K†`.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.nrows();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.sandwich(rho))
    }

    /// `self` followed by `next`. Kraus sets multiply out pairwise.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::Dimension("composing channels of different size".into()));
        }
        let mut ops = Vec::with_capacity(self.operators.len() * next.operators.len());
        for b in &next.operators {
            for a in &self.operators {
                ops.push(b.matmul(a));
            }
        }
        Self::new(ops)
    }

    /// Deviation from completeness, for diagnostics and property tests.
    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.adjoint().matmul(k));
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Pauli;

    #[test]
    fn rejects_incomplete_set() {
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(matches!(KrausChannel::new(vec![half]), Err(Error::IncompleteKraus(_))));
    }

    #[test]
    fn rejects_mixed_shapes() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(4);
        assert!(KrausChannel::new(vec![a, b]).is_err());
    }

    #[test]
    fn composition_stays_complete() {
        let flip = KrausChannel::new(vec![
            ComplexMatrix::identity(2).scale_re(0.9f64.sqrt()),
            Pauli::X.matrix().scale_re(0.1f64.sqrt()),
        ])
        .unwrap();
        let twice = flip.then(&flip).unwrap();
        assert_eq!(twice.operators().len(), 4);
        assert!(twice.completeness_error() < 1e-12);
    }
}
