//! Effective noise channels built from the calibrated parameters.

use super::params::{DeviceParams, MemoryModel, SourceMode};
use crate::error::{Error, Result};
use crate::qcore::{c, ComplexMatrix, DensityState, KrausChannel, Pauli, Qubit, QubitRegister, FRAC_1_SQRT_2, ZERO};

/// Phase-flip channel with flip probability `(1 − e^{−t/T2})/2`.
pub fn dephasing_channel(t: f64, t2: f64) -> Result<KrausChannel> {
    if !(t >= 0.0) {
        return Err(Error::param("t", format!("{t} must be non-negative")));
    }
    if !(t2 > 0.0) {
        return Err(Error::param("t2", format!("{t2} must be positive")));
    }
    let p = dephasing_probability(t, t2);
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_re((1.0 - p).sqrt()),
        Pauli::Z.matrix().scale_re(p.sqrt()),
    ])
}

pub fn dephasing_probability(t: f64, t2: f64) -> f64 {
    0.5 * (1.0 - (-t / t2).exp())
}

/// `ρ → (1−λ)ρ + λ·I/2ⁿ` on one or two qubits.
pub fn depolarizing_channel(lambda: f64, nqubits: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::param("lambda", format!("{lambda} is not in [0, 1]")));
    }
    if !(1..=2).contains(&nqubits) {
        return Err(Error::param("nqubits", format!("{nqubits} not in {{1, 2}}")));
    }
    let paulis: Vec<ComplexMatrix> = if nqubits == 1 {
        Pauli::ALL.iter().map(|p| p.matrix()).collect()
    } else {
        Pauli::ALL
            .iter()
            .flat_map(|a| Pauli::ALL.iter().map(move |b| a.matrix().kron(&b.matrix())))
            .collect()
    };
    let d2 = (1usize << (2 * nqubits)) as f64;
    let mut ops = Vec::with_capacity(paulis.len());
    for (k, p) in paulis.into_iter().enumerate() {
        let w = if k == 0 { 1.0 - lambda + lambda / d2 } else { lambda / d2 };
        if w > 0.0 {
            ops.push(p.scale_re(w.sqrt()));
        }
    }
    KrausChannel::new(ops)
}

/// One S→F→S round trip: single-qubit depolarization with λ = 2ε, which
/// lowers the six-state average fidelity by exactly ε.
pub fn conversion_channel(eps: f64) -> Result<KrausChannel> {
    check_conversion_eps(eps)?;
    depolarizing_channel(2.0 * eps, 1)
}

/// One half trip (S→F or F→S). Two half trips compose to `conversion_channel(eps)`.
pub fn half_conversion_channel(eps: f64) -> Result<KrausChannel> {
    check_conversion_eps(eps)?;
    depolarizing_channel(half_trip_lambda(eps), 1)
}

/// λ_half with (1 − λ_half)² = 1 − 2ε.
pub fn half_trip_lambda(eps: f64) -> f64 {
    1.0 - (1.0 - 2.0 * eps).sqrt()
}

fn check_conversion_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::param("eps", format!("{eps} outside [0, 0.5]")));
    }
    Ok(())
}

/// Symmetric split of the SPAM error into (prep flip, readout flip).
pub fn spam_flip_channels(eps_spam: f64) -> (f64, f64) {
    (eps_spam / 2.0, eps_spam / 2.0)
}

/// Bit flip with probability `p`.
pub fn bit_flip_channel(p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} is not a probability")));
    }
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_re((1.0 - p).sqrt()),
        Pauli::X.matrix().scale_re(p.sqrt()),
    ])
}

/// Storage noise over `t` seconds under the selected memory model.
pub fn memory_channel(t: f64, t2: f64, model: MemoryModel) -> Result<KrausChannel> {
    match model {
        MemoryModel::Dephasing => dephasing_channel(t, t2),
        MemoryModel::Isotropic => {
            if !(t >= 0.0) {
                return Err(Error::param("t", format!("{t} must be non-negative")));
            }
            if !(t2 > 0.0) {
                return Err(Error::param("t2", format!("{t2} must be positive")));
            }
            depolarizing_channel(1.0 - (-t / t2).exp(), 1)
        }
    }
}

/// Ion-photon pair over `[communication, photon]`.
///
/// `Werner` mixes `|Φ⟩_cp` with white noise to reach `f_cp_target`;
/// `BellDiagonal` is `¼(II + c_xx XX + c_yy YY + c_zz ZZ)`.
pub fn photon_source_state(mode: SourceMode, params: &DeviceParams) -> Result<DensityState> {
    let reg = QubitRegister::new(vec![Qubit::Communication, Qubit::Photon])?;
    let s = c(FRAC_1_SQRT_2, 0.0);
    let phi = ComplexMatrix::projector(&[s, ZERO, ZERO, s]);
    let id4 = ComplexMatrix::identity(4);
    match mode {
        SourceMode::Werner => {
            let p = (4.0 * params.f_cp_target - 1.0) / 3.0;
            if !(-1.0 / 3.0..=1.0).contains(&p) {
                return Err(Error::param("f_cp_target", "Werner weight out of range"));
            }
            let rho = &phi.scale_re(p) + &id4.scale_re((1.0 - p) / 4.0);
            DensityState::new(reg, rho)
        }
        SourceMode::BellDiagonal => {
            let k = params.correlators_cp;
            let weights = bell_diagonal_weights(k.xx, k.yy, k.zz);
            if weights.iter().any(|&w| w < -1e-12) {
                return Err(Error::param(
                    "correlators_cp",
                    format!("({}, {}, {}) outside the physical tetrahedron", k.xx, k.yy, k.zz),
                ));
            }
            let xx = Pauli::X.matrix().kron(&Pauli::X.matrix());
            let yy = Pauli::Y.matrix().kron(&Pauli::Y.matrix());
            let zz = Pauli::Z.matrix().kron(&Pauli::Z.matrix());
            let rho = &(&(&id4 + &xx.scale_re(k.xx)) + &yy.scale_re(k.yy)) + &zz.scale_re(k.zz);
            DensityState::new(reg, rho.scale_re(0.25))
        }
    }
}

/// Weights on `(Φ+, Φ−, Ψ+, Ψ−)` of the Bell-diagonal state with the given correlators.
pub fn bell_diagonal_weights(xx: f64, yy: f64, zz: f64) -> [f64; 4] {
    [
        0.25 * (1.0 + xx - yy + zz),
        0.25 * (1.0 - xx + yy + zz),
        0.25 * (1.0 + xx + yy - zz),
        0.25 * (1.0 - xx - yy - zz),
    ]
}

/// Flip probabilities for one run, split over the ions involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamBudget {
    /// Total preparation-flip probability for one run.
    pub prep: f64,
    /// Total readout-flip probability for one run.
    pub readout: f64,
}

impl SpamBudget {
    pub fn from_params(p: &DeviceParams) -> Self {
        let (prep, readout) = spam_flip_channels(p.eps_spam);
        Self {
            prep: p.spam_prep_budget.unwrap_or(prep),
            readout: p.spam_readout_budget.unwrap_or(readout),
        }
    }

    pub fn none() -> Self {
        Self { prep: 0.0, readout: 0.0 }
    }

    pub fn prep_per_ion(&self, prepared: usize) -> f64 {
        if prepared == 0 {
            0.0
        } else {
            self.prep / prepared as f64
        }
    }

    pub fn readout_per_ion(&self, measured: usize) -> f64 {
        if measured == 0 {
            0.0
        } else {
            self.readout / measured as f64
        }
    }
}

/// Every effective noise process attached to circuit execution.
#[derive(Debug, Clone)]
pub struct NoiseBundle {
    pub t2: f64,
    pub memory_model: MemoryModel,
    pub eps_conversion: f64,
    pub spam: SpamBudget,
    pub gate_lambda: f64,
    pub photon_source: DensityState,
    pub kappa: f64,
}

impl NoiseBundle {
    /// Builds the bundle; `gate_lambda` must come from calibration or config.
    pub fn new(params: &DeviceParams, gate_lambda: f64) -> Result<Self> {
        params.validate()?;
        if !(0.0..=1.0).contains(&gate_lambda) {
            return Err(Error::param("gate_lambda", format!("{gate_lambda} is not in [0, 1]")));
        }
        check_conversion_eps(params.eps_conv_roundtrip)?;
        Ok(Self {
            t2: params.t2_star,
            memory_model: params.memory_model,
            eps_conversion: params.eps_conv_roundtrip,
            spam: SpamBudget::from_params(params),
            gate_lambda,
            photon_source: photon_source_state(params.source_mode, params)?,
            kappa: params.gate_heating_coupling_kappa,
        })
    }

    /// No noise anywhere and an ideal `|Φ⟩_cp` source.
    pub fn noiseless() -> Self {
        let reg = QubitRegister::new(vec![Qubit::Communication, Qubit::Photon]).expect("static register");
        let s = c(FRAC_1_SQRT_2, 0.0);
        Self {
            t2: f64::INFINITY,
            memory_model: MemoryModel::Isotropic,
            eps_conversion: 0.0,
            spam: SpamBudget::none(),
            gate_lambda: 0.0,
            photon_source: DensityState::from_pure(reg, &[s, ZERO, ZERO, s]).expect("static state"),
            kappa: 0.0,
        }
    }

    pub fn memory_dephasing(&self, t: f64) -> Result<KrausChannel> {
        if self.t2.is_infinite() {
            return Ok(KrausChannel::identity(1));
        }
        memory_channel(t, self.t2, self.memory_model)
    }

    pub fn conversion_half(&self) -> Result<KrausChannel> {
        half_conversion_channel(self.eps_conversion)
    }

    /// Gate depolarization at mean phonon number `nbar`: `λ + κ·n̄`, clipped to 1.
    pub fn gate_lambda_at(&self, nbar: f64) -> f64 {
        (self.gate_lambda + self.kappa * nbar).clamp(0.0, 1.0)
    }

    pub fn gate_channel(&self, nbar: f64) -> Result<KrausChannel> {
        depolarizing_channel(self.gate_lambda_at(nbar), 2)
    }

    pub fn with_spam(mut self, spam: SpamBudget) -> Self {
        self.spam = spam;
        self
    }

    pub fn with_gate_lambda(mut self, lambda: f64) -> Self {
        self.gate_lambda = lambda;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{equatorial, PauliString};

    fn one() -> QubitRegister {
        QubitRegister::new(vec![Qubit::Memory]).unwrap()
    }

    fn plus() -> DensityState {
        let h = c(FRAC_1_SQRT_2, 0.0);
        DensityState::from_pure(one(), &[h, h]).unwrap()
    }

    /// Six-state average fidelity of a single-qubit channel, by direct simulation.
    fn mub_average(ch: &KrausChannel) -> f64 {
        let mut total = 0.0;
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            for sign in [1.0, -1.0] {
                let rho = (&ComplexMatrix::identity(2) + &axis.matrix().scale_re(sign)).scale_re(0.5);
                let s = DensityState::new(one(), rho.clone()).unwrap();
                let out = s.apply_channel(ch, &[Qubit::Memory]).unwrap();
                total += out.rho().matmul(&rho).trace().re;
            }
        }
        total / 6.0
    }

    #[test]
    fn zero_time_dephasing_is_identity() {
        let ch = dephasing_channel(0.0, 0.985).unwrap();
        let out = plus().apply_channel(&ch, &[Qubit::Memory]).unwrap();
        assert!(out.rho().max_abs_diff(plus().rho()) < 1e-15);
        assert!(dephasing_channel(-1e-3, 0.985).is_err());
    }

    #[test]
    fn memory_error_at_fifty_ms() {
        let p = dephasing_probability(0.05, 0.985);
        assert!((p - 0.0247).abs() < 5e-5, "p = {p}");
    }

    #[test]
    fn coherence_decays_by_e_at_t2() {
        let ch = dephasing_channel(0.985, 0.985).unwrap();
        let out = plus().apply_channel(&ch, &[Qubit::Memory]).unwrap();
        let x = out.expectation(&"X".parse::<PauliString>().unwrap()).unwrap();
        assert!((x - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_limits() {
        let id = depolarizing_channel(0.0, 1).unwrap();
        assert_eq!(id.operators().len(), 1);
        let full = depolarizing_channel(1.0, 2).unwrap();
        let reg = QubitRegister::new(vec![Qubit::Memory, Qubit::Communication]).unwrap();
        let s = DensityState::basis(reg, 2).unwrap();
        let out = s.apply_channel(&full, &[Qubit::Memory, Qubit::Communication]).unwrap();
        assert!(out.rho().max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25)) < 1e-15);
        assert!(depolarizing_channel(1.2, 1).is_err());
        assert!(depolarizing_channel(0.1, 3).is_err());
    }

    #[test]
    fn depolarized_bell_fidelity() {
        let reg = QubitRegister::new(vec![Qubit::Memory, Qubit::Communication]).unwrap();
        let s = c(FRAC_1_SQRT_2, 0.0);
        let bell = [s, ZERO, ZERO, s];
        let st = DensityState::from_pure(reg, &bell).unwrap();
        for (lambda, expected) in [(0.04, 0.97), (0.2, 0.85)] {
            let out = st
                .apply_channel(&depolarizing_channel(lambda, 2).unwrap(), &[Qubit::Memory, Qubit::Communication])
                .unwrap();
            let f = out.fidelity_with_pure(&bell);
            assert!((f - expected).abs() < 1e-12);
            assert!((f - ((1.0 - lambda) + lambda / 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn conversion_round_trip_average_fidelity() {
        assert_eq!(conversion_channel(0.0).unwrap().operators().len(), 1);
        let f = mub_average(&conversion_channel(0.0126).unwrap());
        assert!((f - 0.9874).abs() < 1e-12);
        assert!(conversion_channel(0.6).is_err());
    }

    #[test]
    fn repeated_round_trips_follow_composition() {
        let eps = 0.0126;
        let one_trip = conversion_channel(eps).unwrap();
        let mut ch = KrausChannel::identity(1);
        for _ in 0..5 {
            ch = ch.then(&one_trip).unwrap();
        }
        let f = mub_average(&ch);
        let exact = 0.5 * (1.0 + (1.0 - 2.0 * eps).powi(5));
        assert!((f - exact).abs() < 1e-12);
        // First order in Nε holds to the size of the neglected second-order term.
        assert!((f - (1.0 - 5.0 * eps)).abs() < 4e-3);
    }

    #[test]
    fn half_trips_compose_to_round_trip() {
        let half = half_conversion_channel(0.0126).unwrap();
        let twice = half.then(&half).unwrap();
        assert!((mub_average(&twice) - mub_average(&conversion_channel(0.0126).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn spam_split() {
        assert_eq!(spam_flip_channels(0.024), (0.012, 0.012));
        assert_eq!(spam_flip_channels(0.0), (0.0, 0.0));
    }

    #[test]
    fn werner_source() {
        let mut p = DeviceParams {
            f_cp_target: 1.0,
            ..Default::default()
        };
        let pure = photon_source_state(SourceMode::Werner, &p).unwrap();
        let s = c(FRAC_1_SQRT_2, 0.0);
        assert!((pure.fidelity_with_pure(&[s, ZERO, ZERO, s]) - 1.0).abs() < 1e-12);
        p.f_cp_target = 0.933;
        let w = photon_source_state(SourceMode::Werner, &p).unwrap();
        let weight: f64 = (4.0 * 0.933 - 1.0) / 3.0;
        assert!((weight - 0.9107).abs() < 1e-4);
        for (obs, sign) in [("XX", 1.0), ("YY", -1.0), ("ZZ", 1.0)] {
            let v = w.expectation(&obs.parse().unwrap()).unwrap();
            assert!((v - sign * weight).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_diagonal_source_reproduces_correlators() {
        let p = DeviceParams::default();
        let st = photon_source_state(SourceMode::BellDiagonal, &p).unwrap();
        for (obs, v) in [("XX", 0.91), ("YY", -0.90), ("ZZ", 0.92)] {
            assert!((st.expectation(&obs.parse().unwrap()).unwrap() - v).abs() < 1e-12);
        }
        let s = c(FRAC_1_SQRT_2, 0.0);
        assert!((st.fidelity_with_pure(&[s, ZERO, ZERO, s]) - 0.9325).abs() < 1e-12);
    }

    #[test]
    fn unphysical_correlators_rejected() {
        let mut p = DeviceParams::default();
        p.correlators_cp.xx = 1.0;
        p.correlators_cp.yy = 1.0;
        p.correlators_cp.zz = 1.0;
        assert!(photon_source_state(SourceMode::BellDiagonal, &p).is_err());
    }

    #[test]
    fn isotropic_memory_matches_ramsey_contrast() {
        let ch = memory_channel(0.3, 0.985, MemoryModel::Isotropic).unwrap();
        let out = plus().apply_channel(&ch, &[Qubit::Memory]).unwrap();
        let x = out.expectation_on(&equatorial(0.0), &[Qubit::Memory]).unwrap();
        assert!((x - (-0.3f64 / 0.985).exp()).abs() < 1e-12);
        let loss = 1.0 - mub_average(&memory_channel(0.05, 0.985, MemoryModel::Isotropic).unwrap());
        assert!((loss - dephasing_probability(0.05, 0.985)).abs() < 1e-12);
    }
}
