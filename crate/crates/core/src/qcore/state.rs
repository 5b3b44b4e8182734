use num_complex::Complex64 as C64;
use rand::Rng;

use super::channel::{KrausChannel, COMPLETENESS_TOL};
use super::matrix::{c, ComplexMatrix, ONE, ZERO};
use super::pauli::PauliString;
use super::register::{Qubit, QubitRegister};
use crate::error::{Error, Result};

/// Tolerance for the trace, Hermiticity and positivity invariants.
pub const STATE_TOL: f64 = 1e-9;

/// A density operator over a labeled register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    register: QubitRegister,
    rho: ComplexMatrix,
}

/// Full-register matrix of `op` acting on the qubits at `positions`.
///
/// The first entry of `positions` is the most significant bit of `op`'s index.
pub fn embed(n: usize, op: &ComplexMatrix, positions: &[usize]) -> ComplexMatrix {
    let k = positions.len();
    assert_eq!(op.nrows(), 1 << k);
    let dim = 1usize << n;
    let mask: usize = positions.iter().map(|&p| 1usize << (n - 1 - p)).sum();
    let sub = |idx: usize| {
        positions
            .iter()
            .fold(0usize, |acc, &p| (acc << 1) | ((idx >> (n - 1 - p)) & 1))
    };
    let mut full = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let a = sub(i);
        for j in 0..dim {
            if (i & !mask) != (j & !mask) {
                continue;
            }
            full[(i, j)] = op[(a, sub(j))];
        }
    }
    full
}

impl DensityState {
    /// Validates the density-matrix invariants.
    pub fn new(register: QubitRegister, rho: ComplexMatrix) -> Result<Self> {
        if rho.nrows() != register.dim() || !rho.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix {}x{} for {} qubits",
                rho.nrows(),
                rho.ncols(),
                register.len()
            )));
        }
        let state = Self { register, rho };
        state.check()?;
        Ok(state)
    }

    pub fn from_pure(register: QubitRegister, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(Error::Dimension("state vector length".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        Ok(Self {
            register,
            rho: ComplexMatrix::projector(&psi),
        })
    }

    /// Computational basis state; `index` uses register order as bit order.
    pub fn basis(register: QubitRegister, index: usize) -> Result<Self> {
        let mut psi = vec![ZERO; register.dim()];
        *psi.get_mut(index)
            .ok_or_else(|| Error::Dimension("basis index out of range".into()))? = ONE;
        Self::from_pure(register, &psi)
    }

    pub fn maximally_mixed(register: QubitRegister) -> Self {
        let d = register.dim();
        let rho = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
        Self { register, rho }
    }

    pub fn register(&self) -> &QubitRegister {
        &self.register
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn nqubits(&self) -> usize {
        self.register.len()
    }

    /// Checks trace, Hermiticity and eigenvalue floor.
    pub fn check(&self) -> Result<()> {
        let tr = self.rho.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let herm = self.rho.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("non-Hermitian by {herm:.3e}")));
        }
        let min = self.min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.hermitian_eigen().0[0]
    }

    fn positions(&self, targets: &[Qubit]) -> Result<Vec<usize>> {
        if targets.is_empty() {
            return Err(Error::EmptySelection);
        }
        self.register.positions(targets)
    }

    pub fn apply_unitary(&self, u: &ComplexMatrix, targets: &[Qubit]) -> Result<Self> {
        let pos = self.positions(targets)?;
        if u.nrows() != 1 << pos.len() || !u.is_square() {
            return Err(Error::Dimension("unitary size does not match targets".into()));
        }
        let err = u.unitarity_error();
        if err > STATE_TOL {
            return Err(Error::NonUnitary(err));
        }
        let full = embed(self.nqubits(), u, &pos);
        Ok(Self {
            register: self.register.clone(),
            rho: full.sandwich(&self.rho),
        })
    }

    pub fn apply_channel(&self, ch: &KrausChannel, targets: &[Qubit]) -> Result<Self> {
        let pos = self.positions(targets)?;
        if ch.dim() != 1 << pos.len() {
            return Err(Error::Dimension(format!(
                "{}-qubit channel on {} targets",
                ch.nqubits(),
                pos.len()
            )));
        }
        let err = ch.completeness_error();
        if err > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(err));
        }
        let n = self.nqubits();
        let d = self.register.dim();
        let rho = ch.operators().iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
            &acc + &embed(n, k, &pos).sandwich(&self.rho)
        });
        Ok(Self {
            register: self.register.clone(),
            rho,
        })
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[Qubit]) -> Result<Self> {
        let keep_pos = self.positions(keep)?;
        let n = self.nqubits();
        let traced: Vec<usize> = (0..n).filter(|p| !keep_pos.contains(p)).collect();
        let k = keep_pos.len();
        let dk = 1usize << k;
        let dt = 1usize << traced.len();
        // Full index from (kept sub-index, traced sub-index).
        let compose = |a: usize, t: usize| {
            let mut idx = 0usize;
            for (bit, &p) in keep_pos.iter().enumerate() {
                idx |= ((a >> (k - 1 - bit)) & 1) << (n - 1 - p);
            }
            for (bit, &p) in traced.iter().enumerate() {
                idx |= ((t >> (traced.len() - 1 - bit)) & 1) << (n - 1 - p);
            }
            idx
        };
        let mut out = ComplexMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut s = ZERO;
                for t in 0..dt {
                    s += self.rho[(compose(a, t), compose(b, t))];
                }
                out[(a, b)] = s;
            }
        }
        Ok(Self {
            register: QubitRegister::new(keep.to_vec())?,
            rho: out,
        })
    }

    /// `self ⊗ other` over the concatenated register.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            register: self.register.join(&other.register)?,
            rho: self.rho.kron(&other.rho),
        })
    }

    /// Real part of `Tr(ρ·O)` for a Pauli string over the whole register.
    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        if obs.len() != self.nqubits() {
            return Err(Error::Dimension(format!(
                "{}-factor Pauli string on {} qubits",
                obs.len(),
                self.nqubits()
            )));
        }
        Ok(self.expectation_matrix(&obs.matrix()))
    }

    /// `Tr(ρ·O)` for a full-register Hermitian operator.
    pub fn expectation_matrix(&self, op: &ComplexMatrix) -> f64 {
        let v = self.rho.matmul(op).trace();
        debug_assert!(v.im.abs() <= 1e-9 * (1.0 + v.re.abs()), "non-real expectation {v}");
        v.re
    }

    /// `Tr(ρ·O)` for an operator on a subset of qubits.
    pub fn expectation_on(&self, op: &ComplexMatrix, targets: &[Qubit]) -> Result<f64> {
        let pos = self.positions(targets)?;
        if op.nrows() != 1 << pos.len() {
            return Err(Error::Dimension("operator size does not match targets".into()));
        }
        Ok(self.expectation_matrix(&embed(self.nqubits(), op, &pos)))
    }

    /// Computational-basis probabilities, clipped at zero and renormalized.
    pub fn probabilities(&self) -> Vec<f64> {
        let d = self.register.dim();
        let mut p: Vec<f64> = (0..d).map(|i| self.rho[(i, i)].re.max(0.0)).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        p
    }

    pub fn fidelity_with_pure(&self, psi: &[C64]) -> f64 {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let v = self.rho.apply_vec(psi);
        psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().re / norm
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.rho - &other.rho;
        0.5 * diff.hermitian_eigen().0.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Projective measurement on `targets` with a complete orthogonal set of
    /// projectors. Returns the outcome and the collapsed, renormalized state.
    pub fn sample_measurement<R: Rng + ?Sized>(
        &self,
        projectors: &[ComplexMatrix],
        targets: &[Qubit],
        rng: &mut R,
    ) -> Result<(usize, Self)> {
        let pos = self.positions(targets)?;
        let d = 1usize << pos.len();
        check_projectors(projectors, d)?;
        let n = self.nqubits();
        let full: Vec<ComplexMatrix> = projectors.iter().map(|p| embed(n, p, &pos)).collect();
        let probs: Vec<f64> = full
            .iter()
            .map(|p| self.expectation_matrix(p).max(0.0))
            .collect();
        let total: f64 = probs.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut outcome = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 && u < p {
                outcome = i;
                break;
            }
            u -= p;
        }
        // Guard against the fall-through landing on a zero-probability branch.
        while probs[outcome] <= 0.0 {
            outcome -= 1;
        }
        let collapsed = full[outcome].matmul(&self.rho).matmul(&full[outcome]);
        let rho = collapsed.scale_re(1.0 / probs[outcome]);
        Ok((
            outcome,
            Self {
                register: self.register.clone(),
                rho,
            },
        ))
    }

    /// Nearest valid state by clipping negative eigenvalues and renormalizing.
    /// Only tomography calls this; simulation never repairs silently.
    pub fn project_psd(register: QubitRegister, rho: &ComplexMatrix) -> Result<Self> {
        let (vals, vecs) = rho.hermitian_eigen();
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let s: f64 = clipped.iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidState("no positive spectrum to keep".into()));
        }
        let d: Vec<C64> = clipped.iter().map(|&v| c(v / s, 0.0)).collect();
        let m = vecs.matmul(&ComplexMatrix::diag(&d)).matmul(&vecs.adjoint());
        Self::new(register, m)
    }
}

/// Checks that `projectors` are Hermitian idempotents summing to identity.
pub fn check_projectors(projectors: &[ComplexMatrix], d: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::IncompleteProjectors(f64::INFINITY));
    }
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in projectors {
        if p.nrows() != d || !p.is_square() {
            return Err(Error::Dimension("projector size does not match targets".into()));
        }
        let idem = p.matmul(p).max_abs_diff(p).max(p.hermiticity_error());
        if idem > COMPLETENESS_TOL {
            return Err(Error::IncompleteProjectors(idem));
        }
        sum = &sum + p;
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
    if dev > COMPLETENESS_TOL {
        return Err(Error::IncompleteProjectors(dev));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Pauli, FRAC_1_SQRT_2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one(q: Qubit) -> QubitRegister {
        QubitRegister::new(vec![q]).unwrap()
    }

    fn bell_cp() -> DensityState {
        let reg = QubitRegister::new(vec![Qubit::Communication, Qubit::Photon]).unwrap();
        let s = c(FRAC_1_SQRT_2, 0.0);
        DensityState::from_pure(reg, &[s, ZERO, ZERO, s]).unwrap()
    }

    #[test]
    fn x_flips_zero() {
        let s = DensityState::basis(one(Qubit::Memory), 0).unwrap();
        let out = s.apply_unitary(&Pauli::X.matrix(), &[Qubit::Memory]).unwrap();
        assert!(out.rho().max_abs_diff(&ComplexMatrix::diag(&[ZERO, ONE])) < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_and_unknown_label() {
        let s = DensityState::basis(one(Qubit::Memory), 0).unwrap();
        let bad = ComplexMatrix::identity(2).scale_re(2.0);
        assert!(matches!(s.apply_unitary(&bad, &[Qubit::Memory]), Err(Error::NonUnitary(_))));
        assert!(matches!(
            s.apply_unitary(&Pauli::X.matrix(), &[Qubit::Photon]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn identity_channel_is_noop() {
        let s = bell_cp();
        let out = s.apply_channel(&KrausChannel::identity(2), &[Qubit::Communication, Qubit::Photon]).unwrap();
        assert!(out.rho().max_abs_diff(s.rho()) < 1e-15);
    }

    #[test]
    fn full_dephasing_of_plus_is_mixed() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let plus = DensityState::from_pure(one(Qubit::Memory), &[h, h]).unwrap();
        let ch = KrausChannel::new(vec![
            ComplexMatrix::identity(2).scale_re(0.5f64.sqrt()),
            Pauli::Z.matrix().scale_re(0.5f64.sqrt()),
        ])
        .unwrap();
        let out = plus.apply_channel(&ch, &[Qubit::Memory]).unwrap();
        assert!(out.rho().max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn channel_size_mismatch_rejected() {
        let s = bell_cp();
        assert!(s.apply_channel(&KrausChannel::identity(2), &[Qubit::Photon]).is_err());
    }

    #[test]
    fn marginal_of_ion_photon_pair_is_mixed() {
        let r = bell_cp().partial_trace(&[Qubit::Communication]).unwrap();
        assert!(r.rho().max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
        assert!(matches!(bell_cp().partial_trace(&[]), Err(Error::EmptySelection)));
    }

    #[test]
    fn stabilizers_of_ion_photon_pair() {
        let s = bell_cp();
        assert!((s.expectation(&"ZZ".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.expectation(&"XX".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.expectation(&"YY".parse().unwrap()).unwrap() + 1.0).abs() < 1e-12);
        assert!(s.expectation(&"Z".parse().unwrap()).is_err());
    }

    #[test]
    fn deterministic_measurement() {
        let s = DensityState::basis(one(Qubit::Memory), 0).unwrap();
        let z = [ComplexMatrix::diag(&[ONE, ZERO]), ComplexMatrix::diag(&[ZERO, ONE])];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (k, post) = s.sample_measurement(&z, &[Qubit::Memory], &mut rng).unwrap();
            assert_eq!(k, 0);
            assert!(post.rho().max_abs_diff(s.rho()) < 1e-15);
        }
    }

    #[test]
    fn incomplete_projectors_rejected() {
        let s = DensityState::basis(one(Qubit::Memory), 0).unwrap();
        let z0 = [ComplexMatrix::diag(&[ONE, ZERO])];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            s.sample_measurement(&z0, &[Qubit::Memory], &mut rng),
            Err(Error::IncompleteProjectors(_))
        ));
    }

    #[test]
    fn invalid_matrices_rejected() {
        let reg = one(Qubit::Memory);
        let neg = ComplexMatrix::diag(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(DensityState::new(reg.clone(), neg.clone()).is_err());
        let repaired = DensityState::project_psd(reg, &neg).unwrap();
        assert!(repaired.rho().max_abs_diff(&ComplexMatrix::diag(&[ONE, ZERO])) < 1e-12);
    }
}
