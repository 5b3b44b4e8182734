//! Heralded entanglement attempts: one event trace, success fraction and
//! herald-time distribution.

use ionnode::devmodel::DeviceParams;
use ionnode::protocol::{derive_p_att, ks_test, run_trials, truncated_exponential_cdf};

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    println!("per-attempt success probability {:.3e}", derive_p_att(&p)?);
    let trials = run_trials(&p, 1, 20_000, 1)?;

    let first = &trials[0];
    println!("trial 0: success {} after {} attempts", first.success, first.attempts_used);
    for e in first.trace.events.iter().take(8) {
        println!("  {:>10.3e} s  {}  {}", e.time, e.kind, e.payload);
    }

    let times: Vec<f64> = trials.iter().filter_map(|t| t.t_herald).collect();
    let frac = times.len() as f64 / trials.len() as f64;
    println!("success fraction {frac:.4} (1 - e^(-rT) = {:.4})", 1.0 - (-p.ent_rate_r * p.storage_t).exp());
    let (d, pval) = ks_test(&times, truncated_exponential_cdf(p.ent_rate_r, p.storage_t));
    println!("KS against truncated exponential: D = {d:.4}, p = {pval:.3}");
    Ok(())
}
