//! Exact execution of a circuit on the `[memory, communication, photon]` node.
//!
//! Measurement outcomes never feed forward, so a circuit is evaluated once
//! by carrying one unnormalized density matrix per outcome branch. Shots are
//! then drawn from the exact outcome distribution.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::gates::{validate_circuit, Circuit, ConvertDirection, GateOp, Ion, QubitType};
use super::optics::detector_projectors;
use crate::devmodel::{bit_flip_channel, depolarizing_channel, NoiseBundle};
use crate::error::{Error, Result};
use crate::estim::CountsTable;
use crate::qcore::{
    embed, eigenprojectors, phased_rotation, rotation, ComplexMatrix, DensityState, KrausChannel, Pauli, Qubit,
    QubitRegister, ONE, ZERO,
};

const M: usize = 0;
const C: usize = 1;
const P: usize = 2;
const NQ: usize = 3;

fn ion_pos(ion: Ion) -> usize {
    match ion {
        Ion::Memory => M,
        Ion::Communication => C,
    }
}

#[derive(Clone)]
struct Branch {
    label: [Option<char>; NQ],
    rho: ComplexMatrix,
}

fn apply_ops(rho: &ComplexMatrix, ops: &[ComplexMatrix], positions: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for k in ops {
        let e = embed(NQ, k, positions);
        out = &out + &e.sandwich(rho);
    }
    out
}

fn reset_channel() -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::projector(&[ONE, ZERO]),
        ComplexMatrix::outer(&[ONE, ZERO], &[ZERO, ONE]),
    ]
}

/// Kraus form of `ρ ↦ Tr(ρ)·σ` on two qubits.
fn replacement_channel(sigma: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let (vals, vecs) = sigma.hermitian_eigen();
    let mut ops = Vec::new();
    for (a, &lam) in vals.iter().enumerate() {
        if lam <= 1e-15 {
            continue;
        }
        let v = vecs.column(a);
        for b in 0..4 {
            let mut e = [ZERO; 4];
            e[b] = ONE;
            ops.push(ComplexMatrix::outer(&v, &e).scale_re(lam.sqrt()));
        }
    }
    ops
}

/// Exact probabilities of every outcome string.
///
/// Labels list the measured qubits in `m, c, p` order: ion bits `0`/`1`
/// and photon detectors `H`/`V`, e.g. `"00H"`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn probability(&self, label: &str) -> f64 {
        self.probs.get(label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Expectation of a ±1-valued function of the outcome label.
    pub fn expectation(&self, value: impl Fn(&str) -> f64) -> f64 {
        self.iter().map(|(k, p)| p * value(k)).sum()
    }

    /// Draws `shots` outcomes into a table.
    pub fn sample<R: Rng + ?Sized>(&self, setting: &str, shots: u64, rng: &mut R) -> Result<CountsTable> {
        let labels: Vec<&String> = self.probs.keys().collect();
        let weights: Vec<f64> = self.probs.values().map(|p| p.max(0.0)).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::Estimator(format!("outcome weights: {e}")))?;
        let mut table = CountsTable::new(setting);
        let mut tally = vec![0u64; labels.len()];
        for _ in 0..shots {
            tally[dist.sample(rng)] += 1;
        }
        for (l, n) in labels.into_iter().zip(tally) {
            table.add(l, n);
        }
        Ok(table)
    }

    /// Draws a single outcome label.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        let mut u: f64 = rng.random::<f64>() * self.total();
        let mut last = "";
        for (k, p) in self.iter() {
            if p <= 0.0 {
                continue;
            }
            last = k;
            if u < p {
                return k;
            }
            u -= p;
        }
        last
    }
}

struct Machine<'a> {
    noise: &'a NoiseBundle,
    nbar: f64,
    types: [QubitType; 2],
    live: [bool; NQ],
    prep_flip: f64,
    readout_flip: f64,
    source_ops: Vec<ComplexMatrix>,
    branches: Vec<Branch>,
    skip_measurements: bool,
}

impl<'a> Machine<'a> {
    fn new(circuit: &Circuit, noise: &'a NoiseBundle, source: &DensityState, nbar: f64, skip: bool) -> Result<Self> {
        if source.nqubits() != 2 {
            return Err(Error::Dimension(format!("photon source has {} qubits, expected 2", source.nqubits())));
        }
        let measured = circuit.measured_ions()?.len();
        let mut rho = ComplexMatrix::zeros(1 << NQ, 1 << NQ);
        rho[(0, 0)] = ONE;
        Ok(Self {
            noise,
            nbar,
            types: [circuit.initial_types.memory, circuit.initial_types.communication],
            live: [false; NQ],
            prep_flip: noise.spam.prep_per_ion(circuit.prepared_ions()),
            readout_flip: noise.spam.readout_per_ion(measured),
            source_ops: replacement_channel(source.rho()),
            branches: vec![Branch { label: [None; NQ], rho }],
            skip_measurements: skip,
        })
    }

    fn map(&mut self, ops: &[ComplexMatrix], positions: &[usize]) {
        for b in &mut self.branches {
            b.rho = apply_ops(&b.rho, ops, positions);
        }
    }

    fn unitary(&mut self, u: &ComplexMatrix, positions: &[usize]) {
        let full = embed(NQ, u, positions);
        for b in &mut self.branches {
            b.rho = full.sandwich(&b.rho);
        }
    }

    fn channel(&mut self, ch: &KrausChannel, positions: &[usize]) {
        let ops = ch.operators().to_vec();
        self.map(&ops, positions);
    }

    fn global(&mut self, u: &ComplexMatrix) {
        for ion in [M, C] {
            if self.live[ion] && self.types[ion] == QubitType::S {
                self.unitary(u, &[ion]);
            }
        }
    }

    fn measure(&mut self, pos: usize, projectors: &[ComplexMatrix; 2], symbols: [char; 2]) {
        if self.skip_measurements {
            return;
        }
        let mut next = Vec::with_capacity(self.branches.len() * 2);
        for b in &self.branches {
            for (proj, sym) in projectors.iter().zip(symbols) {
                let e = embed(NQ, proj, &[pos]);
                let rho = e.matmul(&b.rho).matmul(&e);
                if rho.trace().re <= 1e-300 {
                    continue;
                }
                let mut label = b.label;
                label[pos] = Some(sym);
                next.push(Branch { label, rho });
            }
        }
        self.branches = next;
    }

    fn step(&mut self, op: &GateOp) -> Result<()> {
        match op {
            GateOp::PrepState { ion, state } => {
                let p = ion_pos(*ion);
                self.map(&reset_channel(), &[p]);
                if self.prep_flip > 0.0 {
                    self.channel(&bit_flip_channel(self.prep_flip)?, &[p]);
                }
                self.unitary(&state.rotation(), &[p]);
                self.live[p] = true;
                self.types[p] = QubitType::S;
            }
            GateOp::UEnt => {
                self.unitary(&super::gates::u_ent_matrix(), &[M, C]);
                let lambda = self.noise.gate_lambda_at(self.nbar);
                if lambda > 0.0 {
                    self.channel(&depolarizing_channel(lambda, 2)?, &[M, C]);
                }
            }
            GateOp::ZTheta { theta, .. } => self.global(&rotation(Pauli::Z, *theta)),
            GateOp::YThetaGlobal { theta, .. } => self.global(&rotation(Pauli::Y, *theta)),
            GateOp::Microwave { theta, phase, .. } => self.global(&phased_rotation(*theta, *phase)),
            GateOp::MicrowavePi => self.global(&phased_rotation(std::f64::consts::PI, 0.0)),
            GateOp::Convert { ion, direction } => {
                let p = ion_pos(*ion);
                if self.noise.eps_conversion > 0.0 {
                    self.channel(&self.noise.conversion_half()?, &[p]);
                }
                self.types[p] = match direction {
                    ConvertDirection::SToF => QubitType::F,
                    ConvertDirection::FToS => QubitType::S,
                };
            }
            GateOp::Store { seconds } => {
                if self.live[M] {
                    let ch = self.noise.memory_dephasing(*seconds)?;
                    self.channel(&ch, &[M]);
                }
            }
            GateOp::EntangleIonPhoton => {
                let ops = self.source_ops.clone();
                self.map(&ops, &[C, P]);
                self.live[C] = true;
                self.live[P] = true;
                self.types[C] = QubitType::S;
            }
            GateOp::PhotonMeasure { hwp, qwp } => {
                let proj = detector_projectors(*hwp, *qwp);
                self.measure(P, &proj, ['H', 'V']);
            }
            GateOp::IonMeasureZ => {
                let z = eigenprojectors(&Pauli::Z.matrix());
                for ion in [M, C] {
                    if !self.live[ion] {
                        continue;
                    }
                    if self.readout_flip > 0.0 && !self.skip_measurements {
                        self.channel(&bit_flip_channel(self.readout_flip)?, &[ion]);
                    }
                    self.measure(ion, &z, ['0', '1']);
                    self.live[ion] = false;
                }
            }
        }
        Ok(())
    }
}

/// Gate-error phonon number is `nbar`; pass the post-cooling value when no
/// attempts precede the gate.
pub fn evaluate(circuit: &Circuit, noise: &NoiseBundle, source: &DensityState, nbar: f64) -> Result<OutcomeDistribution> {
    validate_circuit(circuit)?;
    let mut m = Machine::new(circuit, noise, source, nbar, false)?;
    for op in &circuit.ops {
        m.step(op)?;
    }
    let mut probs = BTreeMap::new();
    for b in m.branches {
        let label: String = b.label.iter().flatten().collect();
        *probs.entry(label).or_insert(0.0) += b.rho.trace().re;
    }
    Ok(OutcomeDistribution { probs })
}

/// State of `[memory, communication, photon]` after every non-measurement op.
pub fn final_state(circuit: &Circuit, noise: &NoiseBundle, source: &DensityState, nbar: f64) -> Result<DensityState> {
    let mut m = Machine::new(circuit, noise, source, nbar, true)?;
    for op in &circuit.ops {
        m.step(op)?;
    }
    let rho = m.branches.remove(0).rho;
    DensityState::new(QubitRegister::node(), rho)
}

/// Runs `shots` repetitions and tallies outcomes; the table's setting is the
/// circuit's last op line.
pub fn run_circuit<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: &NoiseBundle,
    source: &DensityState,
    rng: &mut R,
    shots: u64,
) -> Result<CountsTable> {
    let dist = evaluate(circuit, noise, source, 0.0)?;
    let setting = circuit.ops.last().map(|op| op.to_string()).unwrap_or_default();
    dist.sample(&setting, shots, rng)
}

/// `+1` for ion bit `0` or detector H, `−1` otherwise.
pub fn outcome_sign(symbol: char) -> f64 {
    match symbol {
        '0' | 'H' => 1.0,
        _ => -1.0,
    }
}

/// Register used by [`final_state`].
pub fn node_labels() -> [Qubit; 3] {
    [Qubit::Memory, Qubit::Communication, Qubit::Photon]
}
