//! Maximum-likelihood state and process tomography on synthetic data.

use ionnode::estim::{apply_chi, chi_of_kraus, mle_process_tomography, mle_state_from_counts, PauliCounts};
use ionnode::devmodel::depolarizing_channel;
use ionnode::protocol::trial_rng;
use ionnode::qcore::{c, ComplexMatrix, Pauli};
use rand_distr::{Binomial, Distribution};

fn main() -> ionnode::Result<()> {
    // A slightly mixed state near |+i⟩, measured 5000 times per Pauli basis.
    let bloch = [0.05, 0.9, -0.1];
    let mut rng = trial_rng(11, 0);
    let data: Vec<PauliCounts> = [Pauli::X, Pauli::Y, Pauli::Z]
        .into_iter()
        .zip(bloch)
        .map(|(basis, r)| {
            let plus = Binomial::new(5000, (1.0 + r) / 2.0).unwrap().sample(&mut rng);
            PauliCounts { basis, plus, minus: 5000 - plus }
        })
        .collect();
    let fit = mle_state_from_counts(&data)?;
    println!("state fit: {} iterations, converged {}", fit.iterations, fit.converged);
    println!("{}", fit.to_json()?);

    // Process tomography of a known channel from its action on the six MUB states.
    let channel = depolarizing_channel(0.2, 1)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(s, 0.0), c(s, 0.0)],
        [c(s, 0.0), c(-s, 0.0)],
        [c(s, 0.0), c(0.0, s)],
        [c(s, 0.0), c(0.0, -s)],
    ];
    let inputs: Vec<ComplexMatrix> = kets.iter().map(|k| ComplexMatrix::projector(k)).collect();
    let outputs: Vec<ComplexMatrix> = inputs.iter().map(|r| channel.apply_matrix(r)).collect();
    let process = mle_process_tomography(&inputs, &outputs)?;
    let exact = chi_of_kraus(channel.operators());
    println!("process fidelity {:.6} (exact {:.6})", process.process_fidelity(), exact[(0, 0)].re);
    let worst = inputs
        .iter()
        .zip(&outputs)
        .map(|(i, o)| apply_chi(&process.rho_or_chi, i).max_abs_diff(o))
        .fold(0.0, f64::max);
    println!("largest reconstruction error {worst:.2e}");
    Ok(())
}
