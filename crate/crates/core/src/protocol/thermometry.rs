use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::devmodel::DeviceParams;
use crate::error::{Error, Result};

/// Red- and blue-sideband excitation counts from one thermometry setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThermometryRecord {
    pub shots: u64,
    pub red_excitations: u64,
    pub blue_excitations: u64,
}

/// Sideband excitations of a thermal state with mean `nbar`:
/// `P_blue = η`, `P_red = η·n̄/(n̄+1)`.
pub fn simulate_thermometry<R: Rng + ?Sized>(nbar: f64, shots: u64, efficiency: f64, rng: &mut R) -> Result<ThermometryRecord> {
    if shots == 0 {
        return Err(Error::param("shots", "must be positive"));
    }
    if !(nbar >= 0.0) {
        return Err(Error::param("nbar", format!("{nbar} must be non-negative")));
    }
    let p_red = efficiency * nbar / (nbar + 1.0);
    let draw = |p: f64, rng: &mut R| -> Result<u64> {
        let b = Binomial::new(shots, p).map_err(|e| Error::param("efficiency", e.to_string()))?;
        Ok(b.sample(rng))
    };
    let red_excitations = draw(p_red, rng)?;
    let blue_excitations = draw(efficiency, rng)?;
    Ok(ThermometryRecord {
        shots,
        red_excitations,
        blue_excitations,
    })
}

/// Thermometry after `N` back-to-back attempts following cooling, for each `N`.
/// Heating is `heat_per_attempt` per attempt; the background rate covers idle
/// time only and the sweep has none.
pub fn simulate_heating_experiment<R: Rng + ?Sized>(
    p: &DeviceParams,
    n_values: &[u32],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<(u32, ThermometryRecord)>> {
    n_values
        .iter()
        .map(|&n| {
            let nbar = p.nbar_after_eit + p.heat_per_attempt * n as f64;
            Ok((n, simulate_thermometry(nbar, shots, p.blue_pi_efficiency, rng)?))
        })
        .collect()
}

/// `n̄ = R/(1−R)` with `R = red/blue`, and its standard error from binomial
/// propagation.
pub fn estimate_nbar(rec: &ThermometryRecord) -> Result<(f64, f64)> {
    if rec.blue_excitations == 0 {
        return Err(Error::Estimator("no blue-sideband excitations".into()));
    }
    let (red, blue, n) = (rec.red_excitations as f64, rec.blue_excitations as f64, rec.shots as f64);
    let ratio = red / blue;
    if ratio >= 1.0 {
        return Err(Error::Estimator(format!("sideband ratio {ratio:.3} ≥ 1 is outside the thermal model")));
    }
    let var_red = red * (1.0 - red / n);
    let var_blue = blue * (1.0 - blue / n);
    let var_ratio = var_red / (blue * blue) + red * red * var_blue / blue.powi(4);
    let d = 1.0 / (1.0 - ratio).powi(2);
    Ok((ratio / (1.0 - ratio), d * var_ratio.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::trial_rng;

    #[test]
    fn ground_state_has_no_red() {
        let p = DeviceParams {
            nbar_after_eit: 0.0,
            ..Default::default()
        };
        let recs = simulate_heating_experiment(&p, &[0], 10_000, &mut trial_rng(3, 0)).unwrap();
        assert_eq!(recs[0].1.red_excitations, 0);
        assert_eq!(estimate_nbar(&recs[0].1).unwrap().0, 0.0);
    }

    #[test]
    fn ratio_inversion() {
        let rec = ThermometryRecord {
            shots: 1000,
            red_excitations: 100,
            blue_excitations: 300,
        };
        assert!((estimate_nbar(&rec).unwrap().0 - 0.5).abs() < 1e-12);
        let bad = ThermometryRecord {
            shots: 10,
            red_excitations: 5,
            blue_excitations: 5,
        };
        assert!(estimate_nbar(&bad).is_err());
    }

    #[test]
    fn thermal_ratio_at_one_phonon() {
        let nbar: f64 = 1.0;
        assert!((nbar / (nbar + 1.0) - 0.5).abs() < 1e-15);
        let rec = simulate_thermometry(1.0, 400_000, 0.5, &mut trial_rng(4, 0)).unwrap();
        let r = rec.red_excitations as f64 / rec.blue_excitations as f64;
        assert!((r - 0.5).abs() < 0.01, "{r}");
    }

    #[test]
    fn round_trip_estimate() {
        let rec = simulate_thermometry(0.12, 100_000, 0.5, &mut trial_rng(5, 0)).unwrap();
        let (nbar, err) = estimate_nbar(&rec).unwrap();
        assert!((nbar - 0.12).abs() < 0.01, "{nbar} ± {err}");
    }
}
