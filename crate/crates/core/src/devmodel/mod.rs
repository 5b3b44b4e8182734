//! Calibrated device parameters and the effective noise channels built from them.

mod calibrate;
mod noise;
mod params;

pub use calibrate::{calibrate_gate_lambda, parity_of, parity_scan_phases, simulated_bell_fidelity, BellFigures};
pub use noise::{
    bell_diagonal_weights, bit_flip_channel, conversion_channel, dephasing_channel, dephasing_probability,
    depolarizing_channel, half_conversion_channel, half_trip_lambda, memory_channel, photon_source_state,
    spam_flip_channels, NoiseBundle, SpamBudget,
};
pub use params::{Correlators, DeviceParams, MemoryModel, SourceMode};
