//! Two-ion Bell state: gate-error calibration and an exact parity scan.

use ionnode::circuits::{bell_parity_circuit, evaluate};
use ionnode::devmodel::{calibrate_gate_lambda, parity_of, parity_scan_phases, simulated_bell_fidelity, DeviceParams, NoiseBundle, SpamBudget};

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    let lambda = calibrate_gate_lambda(p.f_bell_target, SpamBudget::from_params(&p))?;
    println!("gate depolarizing strength λ = {lambda:.5}");

    let noise = NoiseBundle::new(&p, lambda)?;
    let figs = simulated_bell_fidelity(&noise, 0.0)?;
    println!(
        "population {:.4}  contrast {:.4}  fidelity {:.4}",
        figs.population, figs.contrast, figs.fidelity
    );

    println!("\nphase    parity");
    for phi in parity_scan_phases(12) {
        let d = evaluate(&bell_parity_circuit(phi), &noise, &noise.photon_source, 0.0)?;
        println!("{phi:6.3}  {:+.4}", parity_of(|l| d.probability(l)));
    }
    Ok(())
}
