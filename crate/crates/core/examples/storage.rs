//! Memory storage of the six MUB states over a 50 ms window.

use ionnode::circuits::{evaluate, storage_circuit, PrepLabel};
use ionnode::cli::storage_fidelity_model;
use ionnode::devmodel::{DeviceParams, MemoryModel, NoiseBundle};

const MUB: [PrepLabel; 6] = [
    PrepLabel::Zero,
    PrepLabel::One,
    PrepLabel::Plus,
    PrepLabel::Minus,
    PrepLabel::PlusI,
    PrepLabel::MinusI,
];

fn main() -> ionnode::Result<()> {
    for model in [MemoryModel::Isotropic, MemoryModel::Dephasing] {
        let mut p = DeviceParams::default();
        p.memory_model = model;
        let noise = NoiseBundle::new(&p, 0.0)?;
        let mut total = 0.0;
        print!("{model:?}:");
        for input in MUB {
            let d = evaluate(&storage_circuit(input, p.storage_t, 1), &noise, &noise.photon_source, 0.0)?;
            let f = d.probability("0");
            total += f;
            print!(" {}={f:.4}", input.token());
        }
        println!("\n  average {:.4}  (budget {:.4})", total / 6.0, storage_fidelity_model(&p));
    }
    Ok(())
}
