//! Ramsey decay of the stored memory qubit and the T2* fit.

use ionnode::circuits::{evaluate, ramsey_circuit};
use ionnode::devmodel::{DeviceParams, NoiseBundle};
use ionnode::estim::fit_ramsey;
use ionnode::protocol::trial_rng;

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    let noise = NoiseBundle::new(&p, 0.0)?;
    let mut rng = trial_rng(3, 0);
    let times: Vec<f64> = (1..=15).map(|i| 0.1 * i as f64).collect();
    let mut contrasts = Vec::new();
    for &t in &times {
        let d = evaluate(&ramsey_circuit(t), &noise, &noise.photon_source, 0.0)?;
        let table = d.sample(&format!("t={t:.1}"), 1000, &mut rng)?;
        let contrast = 2.0 * table.frequency("0")? - 1.0;
        println!("t = {t:.1} s  exact {:.4}  sampled {contrast:.4}", 2.0 * d.probability("0") - 1.0);
        contrasts.push(contrast);
    }
    let fit = fit_ramsey(&times, &contrasts)?;
    println!("T2* = {:.3} ± {:.3} s", fit.get("T2"), fit.err("T2"));
    Ok(())
}
