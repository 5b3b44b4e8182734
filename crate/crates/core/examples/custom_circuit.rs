//! Writing a circuit in the text format, then evaluating and sampling it.

use ionnode::circuits::{evaluate, run_circuit, Circuit};
use ionnode::devmodel::{DeviceParams, NoiseBundle};
use ionnode::protocol::trial_rng;

const PROGRAM: &str = "
# memory in |+>, parked F-type while the communication ion emits a photon
prep m +
convert m s2f
entangle
photon 0 45          # X basis
store 0.02
convert m f2s
y -1.5707963267948966 all
measure
";

fn main() -> ionnode::Result<()> {
    let circuit: Circuit = PROGRAM.parse()?;
    print!("{circuit}");
    let noise = NoiseBundle::new(&DeviceParams::default(), 0.0103)?;
    let d = evaluate(&circuit, &noise, &noise.photon_source, 0.0)?;
    for (label, p) in d.iter() {
        println!("P({label}) = {p:.4}");
    }
    let counts = run_circuit(&circuit, &noise, &noise.photon_source, &mut trial_rng(5, 0), 2000)?;
    println!("{counts:?}");
    Ok(())
}
