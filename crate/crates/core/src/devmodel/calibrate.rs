use std::f64::consts::PI;

use super::noise::{NoiseBundle, SpamBudget};
use crate::circuits::{bell_parity_circuit, bell_population_circuit, evaluate};
use crate::error::{Error, Result};
use crate::estim::{bell_fidelity_pop_parity, fit_parity, ParityScan};

/// Exact population, parity contrast and combined fidelity of the Bell pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellFigures {
    pub population: f64,
    pub contrast: f64,
    pub fidelity: f64,
}

/// Analysis-pulse phases of the parity scan; the fitted variable is twice the
/// pulse phase, so these cover one full fringe period.
pub fn parity_scan_phases(points: usize) -> Vec<f64> {
    (0..points).map(|i| PI * i as f64 / points as f64).collect()
}

/// Parity `P00 + P11 − P01 − P10` from an outcome distribution or table.
pub fn parity_of(p: impl Fn(&str) -> f64) -> f64 {
    p("00") + p("11") - p("01") - p("10")
}

/// Population-plus-parity fidelity of the Bell pipeline under `noise`, from
/// exact outcome probabilities (no sampling).
pub fn simulated_bell_fidelity(noise: &NoiseBundle, nbar: f64) -> Result<BellFigures> {
    let pop = evaluate(&bell_population_circuit(), noise, &noise.photon_source, nbar)?;
    let population = pop.probability("00") + pop.probability("11");
    let phases = parity_scan_phases(12);
    let mut parities = Vec::with_capacity(phases.len());
    for &phi in &phases {
        let d = evaluate(&bell_parity_circuit(phi), noise, &noise.photon_source, nbar)?;
        parities.push(parity_of(|k| d.probability(k)));
    }
    let scan = ParityScan {
        phases: phases.iter().map(|p| 2.0 * p).collect(),
        parities,
        shots: vec![],
    };
    let contrast = fit_parity(&scan)?.get("C");
    Ok(BellFigures {
        population,
        contrast,
        fidelity: bell_fidelity_pop_parity(population.clamp(0.0, 1.0), contrast.clamp(-1.0, 1.0))?,
    })
}

/// Gate depolarization `λ` that makes the Bell pipeline reach `target`,
/// by bisection on exact expectations.
pub fn calibrate_gate_lambda(target: f64, spam: SpamBudget) -> Result<f64> {
    if !(target > 0.25 && target <= 1.0) {
        return Err(Error::param("target_bell_fidelity", format!("{target} not in (0.25, 1]")));
    }
    let base = NoiseBundle::noiseless().with_spam(spam);
    let f = |lambda: f64| -> Result<f64> {
        Ok(simulated_bell_fidelity(&base.clone().with_gate_lambda(lambda), 0.0)?.fidelity)
    };
    let f0 = f(0.0)?;
    if f0 < target - 1e-12 {
        return Err(Error::Unreachable(format!(
            "Bell fidelity is {f0:.5} at zero gate error, below the target {target}"
        )));
    }
    if f0 <= target + 1e-12 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devmodel::DeviceParams;

    #[test]
    fn perfect_target_needs_no_gate_error() {
        assert_eq!(calibrate_gate_lambda(1.0, SpamBudget::none()).unwrap(), 0.0);
    }

    #[test]
    fn default_target_is_met() {
        let spam = SpamBudget::from_params(&DeviceParams::default());
        let lambda = calibrate_gate_lambda(0.963, spam).unwrap();
        assert!(lambda > 0.0 && lambda < 0.1, "{lambda}");
        let noise = NoiseBundle::noiseless().with_spam(spam).with_gate_lambda(lambda);
        let f = simulated_bell_fidelity(&noise, 0.0).unwrap().fidelity;
        assert!((f - 0.963).abs() < 1e-4, "{f}");
    }

    #[test]
    fn larger_target_gives_smaller_lambda() {
        let spam = SpamBudget::from_params(&DeviceParams::default());
        let mut last = f64::INFINITY;
        for target in [0.90, 0.93, 0.95, 0.963, 0.97] {
            let l = calibrate_gate_lambda(target, spam).unwrap();
            assert!(l < last, "{target}: {l} !< {last}");
            last = l;
        }
    }

    #[test]
    fn unreachable_target_reported() {
        let spam = SpamBudget { prep: 0.1, readout: 0.1 };
        assert!(matches!(calibrate_gate_lambda(0.99, spam), Err(Error::Unreachable(_))));
        assert!(calibrate_gate_lambda(0.2, SpamBudget::none()).is_err());
    }
}
