//! Ion-ion-photon GHZ state: exact witness terms, then the sampled run.

use ionnode::circuits::{compile_ghz, evaluate, outcome_sign, GhzSetting};
use ionnode::cli::{cmd_ghz, RunConfig};
use ionnode::devmodel::{calibrate_gate_lambda, DeviceParams, NoiseBundle, SpamBudget};
use ionnode::estim::ghz_fidelity_from_values;

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    let lambda = calibrate_gate_lambda(p.f_bell_target, SpamBudget::from_params(&p))?;
    for (name, noise) in [("noiseless", NoiseBundle::noiseless()), ("calibrated", NoiseBundle::new(&p, lambda)?)] {
        let pops = evaluate(&compile_ghz(GhzSetting::Populations, p.storage_t), &noise, &noise.photon_source, 0.0)?;
        let mut mk = [0.0; 3];
        for k in 1..=3u32 {
            let d = evaluate(&compile_ghz(GhzSetting::Mk(k), p.storage_t), &noise, &noise.photon_source, 0.0)?;
            mk[k as usize - 1] = d.expectation(|l| l.chars().map(outcome_sign).product());
        }
        let f = ghz_fidelity_from_values(pops.probability("00H"), pops.probability("11V"), mk)?;
        println!(
            "{name:>10}: P00H {:.4} P11V {:.4} M1 {:+.4} M2 {:+.4} M3 {:+.4} F {:.4}",
            pops.probability("00H"),
            pops.probability("11V"),
            mk[0],
            mk[1],
            mk[2],
            f
        );
    }

    let report = cmd_ghz(&RunConfig::default())?;
    println!("sampled F = {:.4}", report.value("fidelity").unwrap());
    for c in &report.checks {
        println!("{c}");
    }
    Ok(())
}
