use super::counts::CountsTable;
use crate::error::{Error, Result};
use crate::qcore::Pauli;

fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&v) {
        return Err(Error::Estimator(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// `(1 + ⟨ZZ⟩ + ⟨XX⟩ − ⟨YY⟩)/4`, the overlap with `(|00⟩ + |11⟩)/√2`.
pub fn bell_fidelity_correlators(czz: f64, cxx: f64, cyy: f64) -> f64 {
    (1.0 + czz + cxx - cyy) / 4.0
}

/// `(P00 + P11)/2 + |C|/2`.
pub fn bell_fidelity_pop_parity(p00_plus_p11: f64, contrast: f64) -> Result<f64> {
    check_range("population", p00_plus_p11, 0.0, 1.0)?;
    check_range("contrast", contrast, -1.0, 1.0)?;
    Ok(p00_plus_p11 / 2.0 + contrast.abs() / 2.0)
}

/// `(P_00H + P_11V)/2 + (1/6) Σ_k (−1)^k ⟨M_k^{⊗3}⟩`.
pub fn ghz_fidelity_from_values(p00h: f64, p11v: f64, mk: [f64; 3]) -> Result<f64> {
    for (k, v) in mk.iter().enumerate() {
        check_range(&format!("M{}", k + 1), *v, -1.0, 1.0)?;
    }
    check_range("P_00H", p00h, 0.0, 1.0)?;
    check_range("P_11V", p11v, 0.0, 1.0)?;
    let witness: f64 = mk
        .iter()
        .enumerate()
        .map(|(i, v)| if (i + 1) % 2 == 0 { *v } else { -*v })
        .sum();
    Ok((p00h + p11v) / 2.0 + witness / 6.0)
}

/// GHZ fidelity from a Z-basis population table (outcomes such as `"00H"`)
/// and the three `⟨M_k^{⊗3}⟩`.
pub fn ghz_fidelity(populations: &CountsTable, mk: [f64; 3]) -> Result<f64> {
    ghz_fidelity_from_values(populations.frequency("00H")?, populations.frequency("11V")?, mk)
}

/// Pauli correction implied by the ion outcome `(m, c)`.
pub fn teleport_correction(bell_outcome: &str) -> Result<Pauli> {
    match bell_outcome {
        "00" => Ok(Pauli::I),
        "01" => Ok(Pauli::X),
        "10" => Ok(Pauli::Z),
        "11" => Ok(Pauli::Y),
        other => Err(Error::Estimator(format!("Bell outcome `{other}` is not two bits"))),
    }
}

/// Photon outcome as it would read after the conditional Pauli correction:
/// flipped when the correction anticommutes with the measured basis.
pub fn reinterpret_teleport_outcome(bell_outcome: &str, photon_basis: Pauli, photon_outcome: f64) -> Result<f64> {
    if photon_basis == Pauli::I {
        return Err(Error::Estimator("photon basis must be X, Y or Z".into()));
    }
    if photon_outcome != 1.0 && photon_outcome != -1.0 {
        return Err(Error::Estimator(format!("photon outcome {photon_outcome} is not ±1")));
    }
    let p = teleport_correction(bell_outcome)?;
    Ok(if p.anticommutes(photon_basis) { -photon_outcome } else { photon_outcome })
}

pub fn mub_average_fidelity(per_state: &[f64]) -> Result<f64> {
    if per_state.len() != 6 {
        return Err(Error::Estimator(format!("expected six MUB fidelities, got {}", per_state.len())));
    }
    for v in per_state {
        check_range("fidelity", *v, 0.0, 1.0)?;
    }
    Ok(per_state.iter().sum::<f64>() / 6.0)
}

/// Mean of the product of ±1 outcome values and its binomial standard error.
///
/// Each outcome character maps to `+1` (`0`, `H`) or `−1`, times the
/// matching entry of `signs`, which re-labels ports whose `+1` eigenvector
/// sits on the other output.
pub fn correlator_from_counts(counts: &CountsTable, signs: &[f64]) -> Result<(f64, f64)> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::Estimator(format!("setting `{}` has no counts", counts.setting)));
    }
    let mut sum = 0.0;
    for (label, &k) in &counts.outcomes {
        if label.chars().count() != signs.len() {
            return Err(Error::Estimator(format!(
                "outcome `{label}` has {} symbols, expected {}",
                label.chars().count(),
                signs.len()
            )));
        }
        let mut v = 1.0;
        for (ch, s) in label.chars().zip(signs) {
            v *= s * match ch {
                '0' | 'H' | '+' => 1.0,
                '1' | 'V' | '-' => -1.0,
                other => return Err(Error::Estimator(format!("unknown outcome symbol `{other}`"))),
            };
        }
        sum += v * k as f64;
    }
    let mean = sum / n as f64;
    let stderr = ((1.0 - mean * mean).max(0.0) / n as f64).sqrt();
    Ok((mean, stderr))
}
