use std::f64::consts::{FRAC_PI_2, PI};

use ionnode::circuits::{
    bell_parity_circuit, compile_ghz, compile_teleportation, evaluate, final_state, outcome_sign, run_circuit,
    sdf_bell_prep_circuit, u_ent_matrix, Addressing, Circuit, ConvertDirection, GateOp, GhzSetting, Ion,
    PhotonBasis, PrepLabel,
};
use ionnode::devmodel::NoiseBundle;
use ionnode::estim::{mle_process_tomography, reinterpret_teleport_outcome};
use ionnode::protocol::trial_rng;
use ionnode::qcore::{
    c, embed, phased_rotation, rotation, ComplexMatrix, DensityState, Pauli, Qubit, FRAC_1_SQRT_2, ONE, ZERO,
};

const MUB: [(PrepLabel, Pauli, f64); 6] = [
    (PrepLabel::Zero, Pauli::Z, 1.0),
    (PrepLabel::One, Pauli::Z, -1.0),
    (PrepLabel::Plus, Pauli::X, 1.0),
    (PrepLabel::Minus, Pauli::X, -1.0),
    (PrepLabel::PlusI, Pauli::Y, 1.0),
    (PrepLabel::MinusI, Pauli::Y, -1.0),
];

fn ideal() -> NoiseBundle {
    NoiseBundle::noiseless()
}

fn source() -> DensityState {
    ideal().photon_source
}

fn bits(label: &str) -> (&str, char) {
    (&label[..2], label.chars().nth(2).unwrap())
}

#[test]
fn bell_prep_yields_phi_plus() {
    let st = final_state(&sdf_bell_prep_circuit(), &ideal(), &source(), 0.0).unwrap();
    let ions = st.partial_trace(&[Qubit::Memory, Qubit::Communication]).unwrap();
    let s = c(FRAC_1_SQRT_2, 0.0);
    assert!((ions.fidelity_with_pure(&[s, ZERO, ZERO, s]) - 1.0).abs() < 1e-9);
}

#[test]
fn bell_parity_oscillates_at_twice_the_phase() {
    for i in 0..12 {
        let phi = PI * i as f64 / 12.0;
        let d = evaluate(&bell_parity_circuit(phi), &ideal(), &source(), 0.0).unwrap();
        let parity = d.expectation(|l| l.chars().map(outcome_sign).product());
        assert!((parity.abs() - (2.0 * phi).cos().abs()).abs() < 1e-9, "{phi}: {parity}");
    }
}

/// Gate sequence of the ion Bell measurement written out as matrices, with
/// both ions S-type after the memory conversion.
fn bell_block_unitary() -> ComplexMatrix {
    let on_c = |u: &ComplexMatrix| embed(2, u, &[1]);
    let both = |u: &ComplexMatrix| u.kron(u);
    let seq = [
        on_c(&rotation(Pauli::Z, PI)),
        on_c(&rotation(Pauli::Y, FRAC_PI_2)),
        u_ent_matrix(),
        both(&phased_rotation(PI, 0.0)),
        both(&rotation(Pauli::Z, FRAC_PI_2)),
        both(&rotation(Pauli::Y, -FRAC_PI_2)),
    ];
    seq.iter().fold(ComplexMatrix::identity(4), |acc, u| u.matmul(&acc))
}

#[test]
fn bell_block_is_cnot_then_hadamard_up_to_diagonal() {
    let h = ComplexMatrix::from_real_rows(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]);
    let cnot = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ]);
    let target = h.kron(&ComplexMatrix::identity(2)).matmul(&cnot);
    let d = bell_block_unitary().matmul(&target.adjoint());
    for i in 0..4 {
        assert!((d[(i, i)].norm() - 1.0).abs() < 1e-9);
        for j in 0..4 {
            if i != j {
                assert!(d[(i, j)].norm() < 1e-9, "({i},{j})");
            }
        }
    }
}

#[test]
fn teleported_outcomes_match_every_mub_input() {
    for (input, basis, sign) in MUB {
        let circ = compile_teleportation(input, PhotonBasis::pauli(basis), 0.0);
        let d = evaluate(&circ, &ideal(), &source(), 0.0).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-9);
        let mut corrected = 0.0;
        for (label, p) in d.iter() {
            let (bell, photon) = bits(label);
            corrected += p * reinterpret_teleport_outcome(bell, basis, outcome_sign(photon)).unwrap();
        }
        assert!((corrected - sign).abs() < 1e-9, "{input:?}: {corrected}");
        for bell in ["00", "01", "10", "11"] {
            let pb: f64 = d.iter().filter(|(l, _)| l.starts_with(bell)).map(|(_, p)| p).sum();
            assert!((pb - 0.25).abs() < 1e-9, "{input:?} {bell}: {pb}");
        }
    }
}

/// Photon state after projecting the ions onto `bell` and undoing its Pauli.
fn corrected_photon(st: &DensityState, bell: &str) -> ComplexMatrix {
    let m = (bell.as_bytes()[0] - b'0') as usize;
    let cbit = (bell.as_bytes()[1] - b'0') as usize;
    let ket = |b: usize| if b == 0 { [ONE, ZERO] } else { [ZERO, ONE] };
    let proj = ComplexMatrix::projector(&ket(m)).kron(&ComplexMatrix::projector(&ket(cbit)));
    let pm = embed(3, &proj, &[0, 1]);
    let branch = pm.matmul(st.rho()).matmul(&pm);
    let norm = branch.trace().re;
    let reduced = DensityState::new(st.register().clone(), branch.scale_re(1.0 / norm))
        .unwrap()
        .partial_trace(&[Qubit::Photon])
        .unwrap();
    let fix = match bell {
        "00" => Pauli::I,
        "01" => Pauli::X,
        "10" => Pauli::Z,
        _ => Pauli::Y,
    }
    .matrix();
    fix.sandwich(reduced.rho())
}

#[test]
fn teleportation_is_the_identity_process() {
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (input, _, _) in MUB {
        let circ = compile_teleportation(input, PhotonBasis::Z, 0.0);
        let st = final_state(&circ, &ideal(), &source(), 0.0).unwrap();
        let target = ComplexMatrix::projector(&input.ket());
        for bell in ["00", "01", "10", "11"] {
            let out = corrected_photon(&st, bell);
            assert!(out.max_abs_diff(&target) < 1e-9, "{input:?} {bell}");
        }
        inputs.push(target);
        outputs.push(corrected_photon(&st, "00"));
    }
    let fit = mle_process_tomography(&inputs, &outputs).unwrap();
    assert!((fit.process_fidelity() - 1.0).abs() < 1e-9);
}

#[test]
fn ghz_state_and_witness_terms() {
    let st = final_state(&compile_ghz(GhzSetting::Populations, 0.0), &ideal(), &source(), 0.0).unwrap();
    let s = c(FRAC_1_SQRT_2, 0.0);
    let mut ghz = [ZERO; 8];
    ghz[0] = s;
    ghz[7] = s;
    assert!((st.fidelity_with_pure(&ghz) - 1.0).abs() < 1e-9);

    let d = evaluate(&compile_ghz(GhzSetting::Populations, 0.0), &ideal(), &source(), 0.0).unwrap();
    assert!((d.probability("00H") - 0.5).abs() < 1e-9);
    assert!((d.probability("11V") - 0.5).abs() < 1e-9);
    for k in 1..=3u32 {
        let d = evaluate(&compile_ghz(GhzSetting::Mk(k), 0.0), &ideal(), &source(), 0.0).unwrap();
        let corr = d.expectation(|l| l.chars().map(outcome_sign).product());
        let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((corr - expected).abs() < 1e-9, "M{k}: {corr}");
    }
}

#[test]
fn deferred_photon_measurement_gives_the_same_statistics() {
    let noise = ideal().with_gate_lambda(0.05);
    let mut circuits = vec![compile_ghz(GhzSetting::Populations, 0.0), compile_ghz(GhzSetting::Mk(2), 0.0)];
    for (input, basis, _) in MUB {
        circuits.push(compile_teleportation(input, PhotonBasis::pauli(basis), 0.0));
    }
    for circ in circuits {
        let a = evaluate(&circ, &noise, &source(), 0.1).unwrap();
        let b = evaluate(&circ.with_deferred_photon(), &noise, &source(), 0.1).unwrap();
        for (label, p) in a.iter() {
            assert!((p - b.probability(label)).abs() < 1e-12, "{label}");
        }
        assert!((a.total() - b.total()).abs() < 1e-12);
    }
}

#[test]
fn f_type_memory_ignores_global_pulses() {
    let body = |pulses: bool| {
        let mut ops = vec![
            GateOp::PrepState { ion: Ion::Memory, state: PrepLabel::Plus },
            GateOp::Convert { ion: Ion::Memory, direction: ConvertDirection::SToF },
            GateOp::EntangleIonPhoton,
            GateOp::PhotonMeasure { hwp: 0.0, qwp: 0.0 },
        ];
        if pulses {
            ops.push(GateOp::YThetaGlobal { theta: 0.7, target: Addressing::All });
            ops.push(GateOp::ZTheta { theta: 1.1, target: Addressing::All });
            ops.push(GateOp::MicrowavePi);
            ops.push(GateOp::Microwave { theta: 0.4, phase: 0.3, target: Addressing::All });
        }
        ops.push(GateOp::Convert { ion: Ion::Memory, direction: ConvertDirection::FToS });
        Circuit::new(ops)
    };
    let memory = |pulses| {
        final_state(&body(pulses), &ideal(), &source(), 0.0)
            .unwrap()
            .partial_trace(&[Qubit::Memory])
            .unwrap()
    };
    assert!(memory(false).rho().max_abs_diff(memory(true).rho()) < 1e-12);
}

#[test]
fn sampling_is_reproducible_under_a_seed() {
    let circ = compile_ghz(GhzSetting::Mk(1), 0.0);
    let a = run_circuit(&circ, &ideal(), &source(), &mut trial_rng(11, 3), 500).unwrap();
    let b = run_circuit(&circ, &ideal(), &source(), &mut trial_rng(11, 3), 500).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total(), 500);
}
