//! The compiled experiments: Bell-state preparation, teleportation and GHZ.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use super::gates::{Addressing, Circuit, ConvertDirection, GateOp, Ion, PrepLabel};
use super::optics::PhotonBasis;

fn convert(ion: Ion, direction: ConvertDirection) -> GateOp {
    GateOp::Convert { ion, direction }
}

fn y(theta: f64, target: Addressing) -> GateOp {
    GateOp::YThetaGlobal { theta, target }
}

fn z(theta: f64, target: Addressing) -> GateOp {
    GateOp::ZTheta { theta, target }
}

fn photon(basis: PhotonBasis) -> GateOp {
    GateOp::PhotonMeasure {
        hwp: basis.hwp,
        qwp: basis.qwp,
    }
}

/// `|00⟩ → (|00⟩ + |11⟩)/√2` with global π/2 wrappers around `U_ent`.
/// No readout is appended.
pub fn sdf_bell_prep_circuit() -> Circuit {
    Circuit::new(vec![
        GateOp::PrepState { ion: Ion::Memory, state: PrepLabel::Zero },
        GateOp::PrepState { ion: Ion::Communication, state: PrepLabel::Zero },
        y(FRAC_PI_2, Addressing::All),
        GateOp::UEnt,
        y(-FRAC_PI_2, Addressing::All),
        z(-FRAC_PI_4, Addressing::All),
    ])
}

/// Bell preparation followed by Z readout of both ions.
pub fn bell_population_circuit() -> Circuit {
    let mut c = sdf_bell_prep_circuit();
    c.push(GateOp::IonMeasureZ);
    c
}

/// Bell preparation, an analysis π/2 pulse of phase `phase` on both ions, Z readout.
pub fn bell_parity_circuit(phase: f64) -> Circuit {
    let mut c = sdf_bell_prep_circuit();
    c.push(GateOp::Microwave {
        theta: FRAC_PI_2,
        phase,
        target: Addressing::All,
    });
    c.push(GateOp::IonMeasureZ);
    c
}

/// Microwave phase that makes a π/2 pulse followed by Z readout measure the
/// equatorial axis at angle `axis`.
pub fn analysis_phase(axis: f64) -> f64 {
    axis - FRAC_PI_2
}

/// Bell measurement on the ions, entered with the memory F-type and the
/// communication ion S-type. Equal to `(H⊗I)·CNOT_{m→c}` up to a diagonal
/// phase before the Z readout. The communication-only pulses come first,
/// while the memory is still dark.
pub fn bell_measurement_block() -> Vec<GateOp> {
    vec![
        z(PI, Addressing::Communication),
        y(FRAC_PI_2, Addressing::Communication),
        convert(Ion::Memory, ConvertDirection::FToS),
        GateOp::UEnt,
        GateOp::MicrowavePi,
        z(FRAC_PI_2, Addressing::All),
        y(-FRAC_PI_2, Addressing::All),
        GateOp::IonMeasureZ,
    ]
}

/// Full teleportation run: prepare the memory in `input`, store it F-type
/// for `storage_t` while the photon is generated, measure the photon in
/// `basis`, then Bell-measure the ions.
pub fn compile_teleportation(input: PrepLabel, basis: PhotonBasis, storage_t: f64) -> Circuit {
    let mut ops = vec![
        GateOp::PrepState { ion: Ion::Memory, state: input },
        convert(Ion::Memory, ConvertDirection::SToF),
        GateOp::Store { seconds: storage_t },
        GateOp::EntangleIonPhoton,
        photon(basis),
    ];
    ops.extend(bell_measurement_block());
    Circuit::new(ops)
}

/// What the GHZ run reads out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhzSetting {
    /// All three qubits in Z (photon in H/V).
    Populations,
    /// All three qubits in `M_k`, `k ∈ {1, 2, 3}`.
    Mk(u32),
}

impl GhzSetting {
    pub fn name(&self) -> String {
        match self {
            GhzSetting::Populations => "Z".into(),
            GhzSetting::Mk(k) => format!("M{k}"),
        }
    }
}

/// `(|00H⟩ + |11V⟩)/√2` on `[memory, communication, photon]`.
///
/// The memory's first `Y_{π/2}` runs before photon generation, the global
/// `Y_{−π/2}` after `U_ent` with both ions S-type, then the memory goes back
/// to F-type so the last `Y_{π/2}` (and a `Z_π` sign fix) hit the
/// communication ion only.
pub fn compile_ghz(setting: GhzSetting, storage_t: f64) -> Circuit {
    let basis = match setting {
        GhzSetting::Populations => PhotonBasis::Z,
        GhzSetting::Mk(k) => PhotonBasis::m(k),
    };
    let mut ops = vec![
        GateOp::PrepState { ion: Ion::Memory, state: PrepLabel::Zero },
        y(FRAC_PI_2, Addressing::Memory),
        convert(Ion::Memory, ConvertDirection::SToF),
        GateOp::Store { seconds: storage_t },
        GateOp::EntangleIonPhoton,
        photon(basis),
        convert(Ion::Memory, ConvertDirection::FToS),
        GateOp::UEnt,
        GateOp::MicrowavePi,
        z(FRAC_PI_2, Addressing::All),
        y(-FRAC_PI_2, Addressing::All),
        convert(Ion::Memory, ConvertDirection::SToF),
        y(FRAC_PI_2, Addressing::Communication),
        z(PI, Addressing::Communication),
        convert(Ion::Memory, ConvertDirection::FToS),
    ];
    if let GhzSetting::Mk(k) = setting {
        ops.push(GateOp::Microwave {
            theta: FRAC_PI_2,
            phase: analysis_phase(k as f64 * FRAC_PI_3),
            target: Addressing::All,
        });
    }
    ops.push(GateOp::IonMeasureZ);
    Circuit::new(ops)
}

/// Single-ion storage benchmark: prepare `input`, hold it F-type for
/// `rounds` conversion round trips with `storage_t` of storage in the first,
/// then read it out in its own basis.
pub fn storage_circuit(input: PrepLabel, storage_t: f64, rounds: usize) -> Circuit {
    let mut ops = vec![GateOp::PrepState { ion: Ion::Memory, state: input }];
    for r in 0..rounds {
        ops.push(convert(Ion::Memory, ConvertDirection::SToF));
        if r == 0 && storage_t > 0.0 {
            ops.push(GateOp::Store { seconds: storage_t });
        }
        ops.push(convert(Ion::Memory, ConvertDirection::FToS));
    }
    ops.extend(readout_in_basis(input));
    Circuit::new(ops)
}

/// Ops that read the memory along the Bloch axis of `state`, so that outcome
/// `0` means "found in `state`".
pub fn readout_in_basis(state: PrepLabel) -> Vec<GateOp> {
    let undo = match state {
        PrepLabel::Zero => None,
        PrepLabel::One => Some(y(PI, Addressing::All)),
        PrepLabel::Plus => Some(y(-FRAC_PI_2, Addressing::All)),
        PrepLabel::Minus => Some(y(FRAC_PI_2, Addressing::All)),
        PrepLabel::PlusI => Some(GateOp::Microwave {
            theta: FRAC_PI_2,
            phase: 0.0,
            target: Addressing::All,
        }),
        PrepLabel::MinusI => Some(GateOp::Microwave {
            theta: -FRAC_PI_2,
            phase: 0.0,
            target: Addressing::All,
        }),
    };
    let mut ops: Vec<GateOp> = undo.into_iter().collect();
    ops.push(GateOp::IonMeasureZ);
    ops
}

/// Ramsey run: `|+⟩`, stored F-type for `t`, read out along X.
pub fn ramsey_circuit(t: f64) -> Circuit {
    storage_circuit(PrepLabel::Plus, t, 1)
}

/// Ion-photon correlation run: fresh pair, communication ion read along
/// `ion_axis` (an equatorial angle, or `None` for Z), photon in `basis`.
pub fn ion_photon_circuit(ion_axis: Option<f64>, basis: PhotonBasis) -> Circuit {
    let mut ops = vec![GateOp::EntangleIonPhoton, photon(basis)];
    if let Some(axis) = ion_axis {
        ops.push(GateOp::Microwave {
            theta: FRAC_PI_2,
            phase: analysis_phase(axis),
            target: Addressing::Communication,
        });
    }
    ops.push(GateOp::IonMeasureZ);
    Circuit::new(ops)
}
