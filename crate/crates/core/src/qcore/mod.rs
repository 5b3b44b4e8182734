//! Dense density-matrix machinery: registers, unitaries, Kraus channels,
//! partial traces, Pauli expectations and projective sampling.
//!
//! Register order is tensor order. The leftmost label is the most
//! significant bit of a computational-basis index, so `|01⟩` on
//! `[memory, communication]` means memory in `|0⟩` and communication in `|1⟩`.

mod channel;
mod matrix;
mod pauli;
mod register;
mod state;

pub use channel::{KrausChannel, COMPLETENESS_TOL};
pub use matrix::{c, ComplexMatrix, MatrixParts, I, ONE, ZERO};
pub use pauli::{equatorial, Pauli, PauliString};
pub use register::{Qubit, QubitRegister};
pub use state::{check_projectors, embed, DensityState, STATE_TOL};

pub use num_complex::Complex64 as C64;
pub use std::f64::consts::FRAC_1_SQRT_2;

/// Dense simulation is capped at six qubits.
pub const MAX_QUBITS: usize = 6;

/// `exp(-iθP/2)` for a single-qubit Pauli `P`.
pub fn rotation(axis: Pauli, theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    &ComplexMatrix::identity(2).scale_re(co) - &axis.matrix().scale(c(0.0, s))
}

/// `exp(-iθ/2 (cos φ X + sin φ Y))`, a resonant microwave pulse of area θ
/// and phase φ.
pub fn phased_rotation(theta: f64, phase: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    &ComplexMatrix::identity(2).scale_re(co) - &equatorial(phase).scale(c(0.0, s))
}

/// Projectors onto the ±1 eigenspaces of a single-qubit observable with
/// eigenvalues ±1, ordered `[+1, -1]`.
pub fn eigenprojectors(obs: &ComplexMatrix) -> [ComplexMatrix; 2] {
    let id = ComplexMatrix::identity(2);
    [
        (&id + obs).scale_re(0.5),
        (&id - obs).scale_re(0.5),
    ]
}
