use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Named parameter estimates with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub stderr: BTreeMap<String, f64>,
    /// Weighted residual sum of squares.
    pub residual: f64,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn get(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn err(&self, name: &str) -> f64 {
        self.stderr.get(name).copied().unwrap_or(f64::NAN)
    }

    fn set(&mut self, name: &str, value: f64, stderr: f64) {
        self.params.insert(name.to_owned(), value);
        self.stderr.insert(name.to_owned(), stderr.abs());
    }
}

/// Parity against analysis phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityScan {
    pub phases: Vec<f64>,
    pub parities: Vec<f64>,
    pub shots: Vec<u64>,
}

struct Linear {
    coef: DVector<f64>,
    cov: DMatrix<f64>,
    rss: f64,
}

/// Weighted least squares `y ≈ A·β`. With `variances`, the covariance is
/// propagated from them; otherwise it is scaled by the residual variance.
fn weighted_ls(a: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>, variances: Option<&DVector<f64>>) -> Result<Linear> {
    let (n, p) = a.shape();
    let mut aw = a.clone();
    for i in 0..n {
        for j in 0..p {
            aw[(i, j)] *= w[i];
        }
    }
    let normal = a.transpose() * &aw;
    let scale = normal.amax().max(f64::MIN_POSITIVE);
    let inv = (&normal / scale)
        .try_inverse()
        .map(|m| m / scale)
        .ok_or_else(|| Error::Estimator("degenerate design matrix".into()))?;
    // Reject near-singular designs, not just exactly singular ones.
    let cond = normal.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::Estimator("degenerate design matrix".into()));
    }
    let coef = &inv * (aw.transpose() * y);
    let resid = y - a * &coef;
    let rss: f64 = resid.iter().zip(w.iter()).map(|(r, wi)| wi * r * r).sum();
    let cov = match variances {
        Some(v) => {
            let mut meat = DMatrix::zeros(p, p);
            for i in 0..n {
                let row = aw.row(i);
                meat += row.transpose() * row * v[i];
            }
            &inv * meat * &inv
        }
        None => {
            let dof = n.saturating_sub(p);
            let s2 = if dof > 0 { rss / dof as f64 } else { 0.0 };
            &inv * s2
        }
    };
    Ok(Linear { coef, cov, rss })
}

/// Fits `C·sin(φ + φ₀)` by linear regression on `(sin φ, cos φ)`.
/// Returns `C ≥ 0` and `phi0`; standard errors from binomial parity noise.
pub fn fit_parity(scan: &ParityScan) -> Result<FitResult> {
    let n = scan.phases.len();
    if scan.parities.len() != n || (scan.shots.len() != n && !scan.shots.is_empty()) {
        return Err(Error::Estimator("parity scan arrays differ in length".into()));
    }
    if n < 4 {
        return Err(Error::Estimator(format!("parity fit needs at least 4 phases, got {n}")));
    }
    let lo = scan.phases.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scan.phases.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < std::f64::consts::PI - 1e-12 {
        return Err(Error::Estimator("parity phases span less than half a period".into()));
    }
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { scan.phases[i].sin() } else { scan.phases[i].cos() });
    let y = DVector::from_iterator(n, scan.parities.iter().cloned());
    let w = DVector::from_element(n, 1.0);
    let variances = if scan.shots.is_empty() {
        None
    } else {
        Some(DVector::from_iterator(
            n,
            scan.parities
                .iter()
                .zip(&scan.shots)
                .map(|(p, &s)| if s > 0 { (1.0 - p * p).max(0.0) / s as f64 } else { 0.0 }),
        ))
    };
    let fit = weighted_ls(&a, &y, &w, variances.as_ref())?;
    let (s, co) = (fit.coef[0], fit.coef[1]);
    let contrast = s.hypot(co);
    let phi0 = co.atan2(s);
    let (c_err, phi_err) = if contrast > 0.0 {
        let g_c = [s / contrast, co / contrast];
        let g_p = [-co / (contrast * contrast), s / (contrast * contrast)];
        let q = |g: [f64; 2]| {
            (g[0] * g[0] * fit.cov[(0, 0)] + 2.0 * g[0] * g[1] * fit.cov[(0, 1)] + g[1] * g[1] * fit.cov[(1, 1)])
                .max(0.0)
                .sqrt()
        };
        (q(g_c), q(g_p))
    } else {
        (fit.cov[(0, 0)].max(0.0).sqrt(), f64::INFINITY)
    };
    let mut r = FitResult {
        residual: fit.rss,
        ..Default::default()
    };
    r.set("C", contrast, c_err);
    r.set("phi0", phi0, phi_err);
    Ok(r)
}

/// Fits `A·e^{−t/T2}` by log-linear least squares with `A` free. Points
/// with non-positive contrast are dropped and reported as a warning.
pub fn fit_ramsey(times: &[f64], contrasts: &[f64]) -> Result<FitResult> {
    fit_ramsey_with(times, contrasts, None)
}

/// As [`fit_ramsey`], optionally with the amplitude held fixed.
pub fn fit_ramsey_with(times: &[f64], contrasts: &[f64], amplitude: Option<f64>) -> Result<FitResult> {
    if times.len() != contrasts.len() {
        return Err(Error::Estimator("times and contrasts differ in length".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Estimator("Ramsey times must be positive".into()));
    }
    let mut warnings = Vec::new();
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(contrasts)
        .filter(|(_, c)| **c > 0.0)
        .map(|(t, c)| (*t, *c))
        .collect();
    if pts.len() < times.len() {
        warnings.push(format!("{} non-positive contrast point(s) excluded", times.len() - pts.len()));
    }
    if pts.len() < 3 {
        return Err(Error::Estimator(format!("Ramsey fit needs at least 3 usable points, got {}", pts.len())));
    }
    let n = pts.len();
    // var(ln c) ≈ var(c)/c², so weight by c².
    let w = DVector::from_iterator(n, pts.iter().map(|(_, c)| c * c));
    let mut r = FitResult::default();
    match amplitude {
        None => {
            let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { pts[i].0 });
            let y = DVector::from_iterator(n, pts.iter().map(|(_, c)| c.ln()));
            let fit = weighted_ls(&a, &y, &w, None)?;
            let slope = fit.coef[1];
            if slope >= 0.0 {
                return Err(Error::Estimator("contrast does not decay".into()));
            }
            r.set("T2", -1.0 / slope, fit.cov[(1, 1)].max(0.0).sqrt() / (slope * slope));
            r.set("A", fit.coef[0].exp(), fit.coef[0].exp() * fit.cov[(0, 0)].max(0.0).sqrt());
            r.residual = fit.rss;
        }
        Some(a0) => {
            if !(a0 > 0.0) {
                return Err(Error::Estimator("fixed amplitude must be positive".into()));
            }
            let a = DMatrix::from_fn(n, 1, |i, _| pts[i].0);
            let y = DVector::from_iterator(n, pts.iter().map(|(_, c)| c.ln() - a0.ln()));
            let fit = weighted_ls(&a, &y, &w, None)?;
            let slope = fit.coef[0];
            if slope >= 0.0 {
                return Err(Error::Estimator("contrast does not decay".into()));
            }
            r.set("T2", -1.0 / slope, fit.cov[(0, 0)].max(0.0).sqrt() / (slope * slope));
            r.set("A", a0, 0.0);
            r.residual = fit.rss;
        }
    }
    r.warnings = warnings;
    Ok(r)
}

/// Fits `F̄(N) = 1 − ε₀ − N·ε` by linear least squares.
pub fn fit_conversion(n_values: &[f64], avg_fidelities: &[f64]) -> Result<FitResult> {
    if n_values.len() != avg_fidelities.len() {
        return Err(Error::Estimator("N values and fidelities differ in length".into()));
    }
    let mut distinct = n_values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Estimator("conversion fit needs at least 2 distinct N".into()));
    }
    let n = n_values.len();
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { n_values[i] });
    let y = DVector::from_iterator(n, avg_fidelities.iter().cloned());
    let fit = weighted_ls(&a, &y, &DVector::from_element(n, 1.0), None)?;
    let mut r = FitResult {
        residual: fit.rss,
        ..Default::default()
    };
    r.set("eps0", 1.0 - fit.coef[0], fit.cov[(0, 0)].max(0.0).sqrt());
    r.set("eps", -fit.coef[1], fit.cov[(1, 1)].max(0.0).sqrt());
    if fit.coef[1] > 0.0 {
        r.warnings.push("fitted conversion error is negative".into());
    }
    Ok(r)
}

/// Weighted straight-line fit of `(N, n̄, stderr)` records. Falls back to
/// equal weights when any standard error is zero.
pub fn fit_heating(records: &[(f64, f64, f64)]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = records.iter().map(|r| r.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Estimator("heating fit needs at least 2 distinct N".into()));
    }
    let n = records.len();
    let weighted = records.iter().all(|r| r.2 > 0.0 && r.2.is_finite());
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { records[i].0 });
    let y = DVector::from_iterator(n, records.iter().map(|r| r.1));
    let (w, var) = if weighted {
        (
            DVector::from_iterator(n, records.iter().map(|r| 1.0 / (r.2 * r.2))),
            Some(DVector::from_iterator(n, records.iter().map(|r| r.2 * r.2))),
        )
    } else {
        (DVector::from_element(n, 1.0), None)
    };
    let fit = weighted_ls(&a, &y, &w, var.as_ref())?;
    let mut r = FitResult {
        residual: fit.rss,
        ..Default::default()
    };
    r.set("intercept", fit.coef[0], fit.cov[(0, 0)].max(0.0).sqrt());
    r.set("slope", fit.coef[1], fit.cov[(1, 1)].max(0.0).sqrt());
    if !weighted {
        r.warnings.push("zero standard error present; unweighted fit".into());
    }
    Ok(r)
}
