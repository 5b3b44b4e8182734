//! Native gate set of the node, the compiled experiments, polarization optics
//! of the photon path, and exact circuit execution.

mod compile;
mod exec;
mod gates;
mod optics;

pub use compile::{
    analysis_phase, bell_measurement_block, bell_parity_circuit, bell_population_circuit, compile_ghz,
    compile_teleportation, ion_photon_circuit, ramsey_circuit, readout_in_basis, sdf_bell_prep_circuit,
    storage_circuit, GhzSetting,
};
pub use exec::{evaluate, final_state, node_labels, outcome_sign, run_circuit, OutcomeDistribution};
pub use gates::{
    parse_angle, u_ent_matrix, validate_circuit, Addressing, Circuit, ConvertDirection, GateOp, Ion, PrepLabel,
    QubitType, QubitTypeState,
};
pub use optics::{
    analyzer, basis_mismatch, compensation, detector_projectors, jones_hwp, jones_qwp, m_observable, photon_measurement_operators,
    retarder, JonesMatrix, PhotonBasis,
};
