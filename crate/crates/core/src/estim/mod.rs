//! Estimators, fits and tomography that turn counts into fidelities.

mod counts;
mod fidelity;
mod fit;
mod tomography;

pub use counts::{read_counts_csv, write_counts_csv, CountsTable};
pub use fidelity::{
    bell_fidelity_correlators, bell_fidelity_pop_parity, correlator_from_counts, ghz_fidelity,
    ghz_fidelity_from_values, mub_average_fidelity, reinterpret_teleport_outcome, teleport_correction,
};
pub use fit::{fit_conversion, fit_heating, fit_parity, fit_ramsey, fit_ramsey_with, FitResult, ParityScan};
pub use tomography::{
    apply_chi, chi_of_kraus, mle_process_tomography, mle_state_from_counts, mle_state_tomography, PauliCounts,
    TomographyResult, STATE_MAX_ITER,
};
