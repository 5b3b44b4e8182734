//! Memory-to-photon teleportation with state and process tomography.
//!
//! Usage: `cargo run --release --example teleportation -- [trials]`

use ionnode::cli::{cmd_teleport, RunConfig};

fn main() -> ionnode::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    let config = RunConfig {
        trials: Some(trials),
        ..RunConfig::default()
    };
    let report = cmd_teleport(&config)?;
    for input in ["0", "1", "+", "-", "+i", "-i"] {
        println!("input {input:>2}: F = {:.4}", report.value(&format!("fidelity_{input}")).unwrap());
    }
    for key in ["average_fidelity", "process_fidelity", "average_from_process", "concatenated_budget"] {
        println!("{key}: {:.4}", report.value(key).unwrap());
    }
    for c in &report.checks {
        println!("{c}");
    }
    Ok(())
}
