//! Ion-photon entanglement: source models and the sampled correlators.

use ionnode::cli::{cmd_ion_photon, RunConfig};
use ionnode::devmodel::{photon_source_state, DeviceParams, SourceMode};
use ionnode::estim::bell_fidelity_correlators;
use ionnode::qcore::{c, FRAC_1_SQRT_2, ZERO};

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    let k = p.correlators_cp;
    println!("correlators ZZ {} XX {} YY {}", k.zz, k.xx, k.yy);
    println!("fidelity from correlators: {:.4}", bell_fidelity_correlators(k.zz, k.xx, k.yy));

    let s = c(FRAC_1_SQRT_2, 0.0);
    let phi_plus = [s, ZERO, ZERO, s];
    for mode in [SourceMode::BellDiagonal, SourceMode::Werner] {
        let rho = photon_source_state(mode, &p)?;
        println!("{mode:?} source: overlap with |Φ+⟩ {:.4}", rho.fidelity_with_pure(&phi_plus));
    }

    let report = cmd_ion_photon(&RunConfig::default())?;
    for c in &report.checks {
        println!("{c}");
    }
    Ok(())
}
