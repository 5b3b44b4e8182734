//! Native gate set, qubit-type tracking and the circuit text format.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qcore::{c, rotation, ComplexMatrix, Pauli};

/// `(Y⊗Y)·exp(−iπ/4 Z⊗Z)` on `[memory, communication]`.
pub fn u_ent_matrix() -> ComplexMatrix {
    let (s, co) = std::f64::consts::FRAC_PI_4.sin_cos();
    let minus = c(co, -s);
    let plus = c(co, s);
    let phase = ComplexMatrix::diag(&[minus, plus, plus, minus]);
    Pauli::Y.matrix().kron(&Pauli::Y.matrix()).matmul(&phase)
}

/// Encoding of an ion qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitType {
    /// Ground-state manifold; addressed by microwaves and light shifts.
    S,
    /// Metastable manifold; dark to every global operation.
    F,
}

/// Which ion an op is intended for. Global pulses act on every live S-type
/// ion regardless; the intent is what validation checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Addressing {
    All,
    Memory,
    Communication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ion {
    Memory,
    Communication,
}

impl Ion {
    pub fn qubit(self) -> crate::qcore::Qubit {
        match self {
            Ion::Memory => crate::qcore::Qubit::Memory,
            Ion::Communication => crate::qcore::Qubit::Communication,
        }
    }

    fn other(self) -> Ion {
        match self {
            Ion::Memory => Ion::Communication,
            Ion::Communication => Ion::Memory,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvertDirection {
    SToF,
    FToS,
}

/// Single-qubit states an ion can be initialized in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepLabel {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl PrepLabel {
    pub const MUB: [PrepLabel; 6] = [
        PrepLabel::Zero,
        PrepLabel::One,
        PrepLabel::Plus,
        PrepLabel::Minus,
        PrepLabel::PlusI,
        PrepLabel::MinusI,
    ];

    /// Rotation taking `|0⟩` to this state.
    pub fn rotation(self) -> ComplexMatrix {
        use std::f64::consts::{FRAC_PI_2, PI};
        match self {
            PrepLabel::Zero => ComplexMatrix::identity(2),
            PrepLabel::One => rotation(Pauli::Y, PI),
            PrepLabel::Plus => rotation(Pauli::Y, FRAC_PI_2),
            PrepLabel::Minus => rotation(Pauli::Y, -FRAC_PI_2),
            PrepLabel::PlusI => rotation(Pauli::X, -FRAC_PI_2),
            PrepLabel::MinusI => rotation(Pauli::X, FRAC_PI_2),
        }
    }

    /// The Pauli axis and sign of the state's Bloch vector.
    pub fn axis(self) -> (Pauli, f64) {
        match self {
            PrepLabel::Zero => (Pauli::Z, 1.0),
            PrepLabel::One => (Pauli::Z, -1.0),
            PrepLabel::Plus => (Pauli::X, 1.0),
            PrepLabel::Minus => (Pauli::X, -1.0),
            PrepLabel::PlusI => (Pauli::Y, 1.0),
            PrepLabel::MinusI => (Pauli::Y, -1.0),
        }
    }

    pub fn ket(self) -> [crate::qcore::C64; 2] {
        let r = self.rotation();
        [r[(0, 0)], r[(1, 0)]]
    }

    pub fn token(self) -> &'static str {
        match self {
            PrepLabel::Zero => "0",
            PrepLabel::One => "1",
            PrepLabel::Plus => "+",
            PrepLabel::Minus => "-",
            PrepLabel::PlusI => "+i",
            PrepLabel::MinusI => "-i",
        }
    }
}

impl FromStr for PrepLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PrepLabel::MUB
            .into_iter()
            .find(|p| p.token() == s)
            .ok_or_else(|| format!("unknown state `{s}`"))
    }
}

/// One native operation of the node.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    /// Reset an ion to `|0⟩` in S-type, then rotate into `state`.
    PrepState { ion: Ion, state: PrepLabel },
    UEnt,
    /// Light-shift `Z_θ` on every live S-type ion.
    ZTheta { theta: f64, target: Addressing },
    /// Global microwave `Y_θ` on every live S-type ion.
    YThetaGlobal { theta: f64, target: Addressing },
    /// Global microwave pulse of area `theta` and phase `phase`.
    Microwave { theta: f64, phase: f64, target: Addressing },
    /// Global microwave π pulse about X.
    MicrowavePi,
    Convert { ion: Ion, direction: ConvertDirection },
    /// Memory idles for `seconds`.
    Store { seconds: f64 },
    /// Heralded ion-photon pair on `[communication, photon]`.
    EntangleIonPhoton,
    PhotonMeasure { hwp: f64, qwp: f64 },
    /// Z readout of every live ion.
    IonMeasureZ,
}

/// Per-ion encoding flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitTypeState {
    pub memory: QubitType,
    pub communication: QubitType,
}

impl Default for QubitTypeState {
    fn default() -> Self {
        Self {
            memory: QubitType::S,
            communication: QubitType::S,
        }
    }
}

impl QubitTypeState {
    pub fn get(&self, ion: Ion) -> QubitType {
        match ion {
            Ion::Memory => self.memory,
            Ion::Communication => self.communication,
        }
    }

    fn set(&mut self, ion: Ion, t: QubitType) {
        match ion {
            Ion::Memory => self.memory = t,
            Ion::Communication => self.communication = t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub ops: Vec<GateOp>,
    pub initial_types: QubitTypeState,
}

impl Circuit {
    pub fn new(ops: Vec<GateOp>) -> Self {
        Self {
            ops,
            initial_types: QubitTypeState::default(),
        }
    }

    pub fn push(&mut self, op: GateOp) -> &mut Self {
        self.ops.push(op);
        self
    }

    /// The same circuit with every `PhotonMeasure` moved to the end.
    pub fn with_deferred_photon(&self) -> Circuit {
        let (photon, rest): (Vec<GateOp>, Vec<GateOp>) = self
            .ops
            .iter()
            .cloned()
            .partition(|op| matches!(op, GateOp::PhotonMeasure { .. }));
        let mut ops = rest;
        ops.extend(photon);
        Circuit {
            ops,
            initial_types: self.initial_types,
        }
    }

    /// Number of `PrepState` ops, which share the preparation error budget.
    pub fn prepared_ions(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, GateOp::PrepState { .. })).count()
    }

    /// Ions read out by the final `IonMeasureZ`, in `[memory, communication]` order.
    pub fn measured_ions(&self) -> Result<Vec<Ion>> {
        Ok(trace_types(self)?.measured)
    }
}

/// Lifecycle of a qubit while a circuit runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Life {
    Idle,
    Live,
    Measured,
}

struct Tracker {
    types: QubitTypeState,
    memory: Life,
    communication: Life,
    photon: Life,
    measured: Vec<Ion>,
}

impl Tracker {
    fn life(&self, ion: Ion) -> Life {
        match ion {
            Ion::Memory => self.memory,
            Ion::Communication => self.communication,
        }
    }

    fn set_life(&mut self, ion: Ion, l: Life) {
        match ion {
            Ion::Memory => self.memory = l,
            Ion::Communication => self.communication = l,
        }
    }

    fn live_s(&self, ion: Ion) -> bool {
        self.life(ion) == Life::Live && self.types.get(ion) == QubitType::S
    }

    fn check_global(&self, index: usize, target: Addressing, what: &str) -> Result<()> {
        let single = match target {
            Addressing::All => {
                if !self.live_s(Ion::Memory) && !self.live_s(Ion::Communication) {
                    return Err(violation(index, format!("{what} has no live S-type ion to act on")));
                }
                return Ok(());
            }
            Addressing::Memory => Ion::Memory,
            Addressing::Communication => Ion::Communication,
        };
        if !self.live_s(single) {
            return Err(violation(index, format!("{what} targets the {single:?} ion, which is not a live S-type qubit")));
        }
        if self.live_s(single.other()) {
            return Err(violation(
                index,
                format!("{what} is meant for the {single:?} ion alone but both ions are S-type"),
            ));
        }
        Ok(())
    }
}

fn violation(index: usize, reason: String) -> Error {
    Error::Circuit { index, reason }
}

fn trace_types(circuit: &Circuit) -> Result<Tracker> {
    let mut t = Tracker {
        types: circuit.initial_types,
        memory: Life::Idle,
        communication: Life::Idle,
        photon: Life::Idle,
        measured: Vec::new(),
    };
    for (i, op) in circuit.ops.iter().enumerate() {
        match op {
            GateOp::PrepState { ion, state } => {
                let nontrivial = !matches!(state, PrepLabel::Zero);
                t.types.set(*ion, QubitType::S);
                t.set_life(*ion, Life::Live);
                if nontrivial && t.live_s(ion.other()) {
                    return Err(violation(
                        i,
                        format!("preparing `{}` on the {ion:?} ion would also rotate the other S-type ion", state.token()),
                    ));
                }
            }
            GateOp::UEnt => {
                if !(t.live_s(Ion::Memory) && t.live_s(Ion::Communication)) {
                    return Err(violation(i, "U_ent needs both ions live and S-type".into()));
                }
            }
            GateOp::ZTheta { theta, target } => {
                check_finite(i, *theta)?;
                t.check_global(i, *target, "Z_θ")?;
            }
            GateOp::YThetaGlobal { theta, target } => {
                check_finite(i, *theta)?;
                t.check_global(i, *target, "Y_θ")?;
            }
            GateOp::Microwave { theta, phase, target } => {
                check_finite(i, *theta)?;
                check_finite(i, *phase)?;
                t.check_global(i, *target, "microwave pulse")?;
            }
            GateOp::MicrowavePi => t.check_global(i, Addressing::All, "microwave π")?,
            GateOp::Convert { ion, direction } => {
                if t.life(*ion) != Life::Live {
                    return Err(violation(i, format!("conversion on the {ion:?} ion, which holds no qubit")));
                }
                let (from, to) = match direction {
                    ConvertDirection::SToF => (QubitType::S, QubitType::F),
                    ConvertDirection::FToS => (QubitType::F, QubitType::S),
                };
                if t.types.get(*ion) != from {
                    return Err(violation(i, format!("the {ion:?} ion is already {to:?}-type")));
                }
                t.types.set(*ion, to);
            }
            GateOp::Store { seconds } => {
                if !(seconds.is_finite() && *seconds >= 0.0) {
                    return Err(violation(i, format!("storage time {seconds} is not a non-negative duration")));
                }
                if t.memory == Life::Live && t.types.memory != QubitType::F {
                    return Err(violation(i, "storing the memory ion while it is S-type".into()));
                }
            }
            GateOp::EntangleIonPhoton => {
                if t.photon != Life::Idle {
                    return Err(violation(i, "photon already generated".into()));
                }
                if t.memory == Life::Live && t.types.memory != QubitType::F {
                    return Err(violation(
                        i,
                        "entanglement attempts while the memory ion is S-type would scatter onto it".into(),
                    ));
                }
                t.communication = Life::Live;
                t.types.communication = QubitType::S;
                t.photon = Life::Live;
            }
            GateOp::PhotonMeasure { hwp, qwp } => {
                check_finite(i, *hwp)?;
                check_finite(i, *qwp)?;
                if t.photon != Life::Live {
                    return Err(violation(i, "no live photon to measure".into()));
                }
                t.photon = Life::Measured;
            }
            GateOp::IonMeasureZ => {
                let mut any = false;
                for ion in [Ion::Memory, Ion::Communication] {
                    if t.life(ion) == Life::Live {
                        if t.types.get(ion) != QubitType::S {
                            return Err(violation(i, format!("reading out the {ion:?} ion while it is F-type")));
                        }
                        t.set_life(ion, Life::Measured);
                        t.measured.push(ion);
                        any = true;
                    }
                }
                if !any {
                    return Err(violation(i, "no live ion to read out".into()));
                }
            }
        }
    }
    Ok(t)
}

fn check_finite(index: usize, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(violation(index, format!("angle {v} is not finite")));
    }
    Ok(())
}

/// Checks addressing and qubit-type rules; the error names the offending op index.
pub fn validate_circuit(circuit: &Circuit) -> Result<()> {
    let t = trace_types(circuit)?;
    if t.photon == Life::Live {
        return Err(violation(circuit.ops.len(), "photon generated but never measured".into()));
    }
    Ok(())
}

fn fmt_target(t: Addressing) -> &'static str {
    match t {
        Addressing::All => "all",
        Addressing::Memory => "m",
        Addressing::Communication => "c",
    }
}

fn fmt_ion(i: Ion) -> &'static str {
    match i {
        Ion::Memory => "m",
        Ion::Communication => "c",
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::PrepState { ion, state } => write!(f, "prep {} {}", fmt_ion(*ion), state.token()),
            GateOp::UEnt => write!(f, "uent"),
            GateOp::ZTheta { theta, target } => write!(f, "z {theta} {}", fmt_target(*target)),
            GateOp::YThetaGlobal { theta, target } => write!(f, "y {theta} {}", fmt_target(*target)),
            GateOp::Microwave { theta, phase, target } => {
                write!(f, "mw {theta} {phase} {}", fmt_target(*target))
            }
            GateOp::MicrowavePi => write!(f, "mwpi"),
            GateOp::Convert { ion, direction } => {
                let d = match direction {
                    ConvertDirection::SToF => "s2f",
                    ConvertDirection::FToS => "f2s",
                };
                write!(f, "convert {} {d}", fmt_ion(*ion))
            }
            GateOp::Store { seconds } => write!(f, "store {seconds}"),
            GateOp::EntangleIonPhoton => write!(f, "entangle"),
            GateOp::PhotonMeasure { hwp, qwp } => write!(f, "photon {hwp} {qwp}"),
            GateOp::IonMeasureZ => write!(f, "measure"),
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Parses `pi`, `-pi/4`, `3pi/4`, `0.5*pi` or a plain number.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("bad angle `{s}`");
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some(idx) = body.find("pi") {
        let coef = body[..idx].trim_end_matches('*');
        let coef: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| bad())? };
        let rest = &body[idx + 2..];
        let div: f64 = if rest.is_empty() {
            1.0
        } else {
            rest.strip_prefix('/').ok_or_else(bad)?.parse().map_err(|_| bad())?
        };
        coef * std::f64::consts::PI / div
    } else {
        body.parse::<f64>().map_err(|_| bad())?
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(if neg { -value } else { value })
}

fn parse_target(s: &str) -> std::result::Result<Addressing, String> {
    match s {
        "all" => Ok(Addressing::All),
        "m" => Ok(Addressing::Memory),
        "c" => Ok(Addressing::Communication),
        _ => Err(format!("unknown target `{s}`")),
    }
}

fn parse_ion(s: &str) -> std::result::Result<Ion, String> {
    match s {
        "m" => Ok(Ion::Memory),
        "c" => Ok(Ion::Communication),
        _ => Err(format!("unknown ion `{s}`")),
    }
}

fn parse_op(words: &[&str]) -> std::result::Result<GateOp, String> {
    let arity = |n: usize| {
        if words.len() == n + 1 {
            Ok(())
        } else {
            Err(format!("`{}` takes {n} argument(s), got {}", words[0], words.len() - 1))
        }
    };
    let op = match words[0] {
        "prep" => {
            arity(2)?;
            GateOp::PrepState {
                ion: parse_ion(words[1])?,
                state: words[2].parse()?,
            }
        }
        "uent" => {
            arity(0)?;
            GateOp::UEnt
        }
        "z" => {
            arity(2)?;
            GateOp::ZTheta {
                theta: parse_angle(words[1])?,
                target: parse_target(words[2])?,
            }
        }
        "y" => {
            arity(2)?;
            GateOp::YThetaGlobal {
                theta: parse_angle(words[1])?,
                target: parse_target(words[2])?,
            }
        }
        "mw" => {
            arity(3)?;
            GateOp::Microwave {
                theta: parse_angle(words[1])?,
                phase: parse_angle(words[2])?,
                target: parse_target(words[3])?,
            }
        }
        "mwpi" => {
            arity(0)?;
            GateOp::MicrowavePi
        }
        "convert" => {
            arity(2)?;
            let direction = match words[2] {
                "s2f" => ConvertDirection::SToF,
                "f2s" => ConvertDirection::FToS,
                d => return Err(format!("unknown direction `{d}`")),
            };
            GateOp::Convert {
                ion: parse_ion(words[1])?,
                direction,
            }
        }
        "store" => {
            arity(1)?;
            GateOp::Store {
                seconds: words[1].parse().map_err(|_| format!("bad duration `{}`", words[1]))?,
            }
        }
        "entangle" => {
            arity(0)?;
            GateOp::EntangleIonPhoton
        }
        "photon" => {
            arity(2)?;
            let deg = |s: &str| s.parse::<f64>().map_err(|_| format!("bad waveplate angle `{s}`"));
            GateOp::PhotonMeasure {
                hwp: deg(words[1])?,
                qwp: deg(words[2])?,
            }
        }
        "measure" => {
            arity(0)?;
            GateOp::IonMeasureZ
        }
        k => return Err(format!("unknown op `{k}`")),
    };
    Ok(op)
}

impl FromStr for Circuit {
    type Err = Error;

    /// One op per line; `#` starts a comment. Angles are radians, waveplates degrees.
    fn from_str(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let op = parse_op(&words).map_err(|reason| Error::CircuitParse { line: n + 1, reason })?;
            ops.push(op);
        }
        Ok(Circuit::new(ops))
    }
}
