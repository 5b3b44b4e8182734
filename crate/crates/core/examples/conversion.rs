//! Fidelity against the number of S-F-S conversion round trips.

use ionnode::cli::{cmd_conversion, RunConfig};
use ionnode::devmodel::DeviceParams;

fn main() -> ionnode::Result<()> {
    let p = DeviceParams::default();
    let report = cmd_conversion(&RunConfig::default())?;
    println!(" N  sampled  first-order");
    for n in 1..=8 {
        let sampled = report.value(&format!("average_fidelity_n{n}")).unwrap();
        let linear = 1.0 - p.eps_spam - n as f64 * p.eps_conv_roundtrip;
        println!("{n:>2}  {sampled:.4}   {linear:.4}");
    }
    for c in &report.checks {
        println!("{c}");
    }
    Ok(())
}
