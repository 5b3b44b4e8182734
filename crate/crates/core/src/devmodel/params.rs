use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the ion-photon source state is parameterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    /// Isotropic mixture reaching `f_cp_target`.
    Werner,
    /// Bell-diagonal state carrying the three measured correlators.
    #[default]
    BellDiagonal,
}

/// Noise model for the stored memory qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MemoryModel {
    /// Depolarizing with λ = 1 − e^{−t/T2}.
    #[default]
    Isotropic,
    /// Phase flip with p = (1 − e^{−t/T2})/2.
    Dephasing,
}

/// Measured two-qubit correlators of the ion-photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correlators {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
}

/// Calibrated device parameters. All times in seconds, rates in s⁻¹,
/// heating in phonons (per attempt) or phonons/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceParams {
    pub t_doppler: f64,
    pub t_eit: f64,
    pub t_pump: f64,
    pub t_mw_init: f64,
    /// Duration of the 370 nm excitation pulse; picoseconds, so negligible.
    pub t_excite: f64,
    pub t_window: f64,
    pub attempts_per_batch: u32,
    pub ent_rate_r: f64,
    #[serde(alias = "storage_T")]
    pub storage_t: f64,
    #[serde(alias = "T2_star")]
    pub t2_star: f64,
    pub eps_spam: f64,
    /// Overrides for the two halves of the SPAM budget; `None` means ε₀/2.
    pub spam_prep_budget: Option<f64>,
    pub spam_readout_budget: Option<f64>,
    pub eps_conv_roundtrip: f64,
    #[serde(alias = "F_cp_target")]
    pub f_cp_target: f64,
    pub correlators_cp: Correlators,
    #[serde(alias = "F_bell_target")]
    pub f_bell_target: f64,
    pub heat_per_attempt: f64,
    pub heat_background: f64,
    pub heat_rate_active: f64,
    pub nbar_after_eit: f64,
    pub detect_err_ion: f64,
    pub gate_heating_coupling_kappa: f64,
    /// Blue-sideband excitation probability of the thermometry π pulse.
    pub blue_pi_efficiency: f64,
    pub source_mode: SourceMode,
    pub memory_model: MemoryModel,
    /// Fixes the two-qubit gate depolarization instead of calibrating it.
    pub gate_lambda: Option<f64>,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            t_doppler: 40e-6,
            t_eit: 200e-6,
            t_pump: 5e-6,
            t_mw_init: 10e-6,
            t_excite: 2e-12,
            t_window: 60e-9,
            attempts_per_batch: 10,
            ent_rate_r: 7.0,
            storage_t: 0.05,
            t2_star: 0.985,
            eps_spam: 0.024,
            spam_prep_budget: None,
            spam_readout_budget: None,
            eps_conv_roundtrip: 0.0126,
            f_cp_target: 0.933,
            correlators_cp: Correlators {
                xx: 0.91,
                yy: -0.90,
                zz: 0.92,
            },
            f_bell_target: 0.963,
            heat_per_attempt: 0.012,
            heat_background: 20.0,
            heat_rate_active: 760.0,
            nbar_after_eit: 0.2,
            detect_err_ion: 0.01,
            gate_heating_coupling_kappa: 0.0,
            blue_pi_efficiency: 0.5,
            source_mode: SourceMode::BellDiagonal,
            memory_model: MemoryModel::Isotropic,
            gate_lambda: None,
        }
    }
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::param(name, format!("{v} is not a probability")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::param(name, format!("{v} must be positive")));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::param(name, format!("{v} must be non-negative")));
    }
    Ok(())
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_doppler", self.t_doppler),
            ("t_eit", self.t_eit),
            ("t_pump", self.t_pump),
            ("t_mw_init", self.t_mw_init),
            ("t_window", self.t_window),
            ("storage_t", self.storage_t),
            ("t2_star", self.t2_star),
        ] {
            check_positive(name, v)?;
        }
        for (name, v) in [
            ("t_excite", self.t_excite),
            ("ent_rate_r", self.ent_rate_r),
            ("heat_per_attempt", self.heat_per_attempt),
            ("heat_background", self.heat_background),
            ("heat_rate_active", self.heat_rate_active),
            ("nbar_after_eit", self.nbar_after_eit),
            ("gate_heating_coupling_kappa", self.gate_heating_coupling_kappa),
        ] {
            check_nonneg(name, v)?;
        }
        if self.attempts_per_batch == 0 {
            return Err(Error::param("attempts_per_batch", "must be at least 1"));
        }
        for (name, v) in [
            ("eps_spam", self.eps_spam),
            ("eps_conv_roundtrip", self.eps_conv_roundtrip),
            ("f_cp_target", self.f_cp_target),
            ("f_bell_target", self.f_bell_target),
            ("detect_err_ion", self.detect_err_ion),
            ("blue_pi_efficiency", self.blue_pi_efficiency),
        ] {
            check_prob(name, v)?;
        }
        if let Some(v) = self.spam_prep_budget {
            check_prob("spam_prep_budget", v)?;
        }
        if let Some(v) = self.spam_readout_budget {
            check_prob("spam_readout_budget", v)?;
        }
        if let Some(v) = self.gate_lambda {
            check_prob("gate_lambda", v)?;
        }
        let Correlators { xx, yy, zz } = self.correlators_cp;
        for (name, v) in [("correlators_cp.xx", xx), ("correlators_cp.yy", yy), ("correlators_cp.zz", zz)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("{v} outside [-1, 1]")));
            }
        }
        Ok(())
    }
}
