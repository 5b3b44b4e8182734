//! Sideband thermometry after N entanglement attempts and the heating fit.

use ionnode::devmodel::DeviceParams;
use ionnode::estim::fit_heating;
use ionnode::protocol::{estimate_nbar, simulate_heating_experiment, trial_rng};

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    let n_values: Vec<u32> = (0..=10).collect();
    let records = simulate_heating_experiment(&p, &n_values, 100_000, &mut trial_rng(7, 0))?;
    let mut points = Vec::new();
    println!(" N   red/blue      n̄");
    for (n, rec) in &records {
        let (nbar, se) = estimate_nbar(rec)?;
        println!("{n:>2}  {:>6}/{:<6}  {nbar:.4} ± {se:.4}", rec.red_excitations, rec.blue_excitations);
        points.push((*n as f64, nbar, se));
    }
    let fit = fit_heating(&points)?;
    println!("slope {:.5} ± {:.5} phonon/attempt", fit.get("slope"), fit.err("slope"));
    Ok(())
}
