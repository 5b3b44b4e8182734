//! Simulator of a dual-type trapped-ion quantum network node.
//!
//! Layers, bottom up:
//!
//! - [`qcore`]: dense density matrices, Kraus channels, Pauli expectations, sampling.
//! - [`devmodel`]: calibrated device parameters and the effective noise channels.
//! - [`protocol`]: Monte Carlo of the heralded entanglement loop and thermometry.
//! - [`circuits`]: native gate set, compiled experiments, waveplate optics, execution.
//! - [`estim`]: fidelity estimators, fits and maximum-likelihood tomography.
//! - [`cli`]: config loading, experiment orchestration and report files.

pub mod circuits;
pub mod cli;
pub mod devmodel;
pub mod error;
pub mod estim;
pub mod protocol;
pub mod qcore;

pub use error::{Error, Result};
