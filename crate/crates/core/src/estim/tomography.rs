//! Maximum-likelihood single-qubit state tomography and constrained
//! least-squares process tomography in the Pauli basis.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::counts::CountsTable;
use crate::error::{Error, Result};
use crate::qcore::{c, eigenprojectors, ComplexMatrix, MatrixParts, Pauli, C64, ZERO};

pub const STATE_MAX_ITER: usize = 10_000;
pub const STATE_TOL: f64 = 1e-10;
pub const TP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    /// Density matrix (state) or χ in the `{I, X, Y, Z}` basis (process).
    pub rho_or_chi: ComplexMatrix,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Serialize)]
struct TomographyJson {
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
    loglik: f64,
    iterations: usize,
    converged: bool,
}

impl TomographyResult {
    pub fn to_json(&self) -> Result<String> {
        let MatrixParts { real, imag } = MatrixParts::from(&self.rho_or_chi);
        Ok(serde_json::to_string_pretty(&TomographyJson {
            real,
            imag,
            loglik: self.loglik,
            iterations: self.iterations,
            converged: self.converged,
        })?)
    }

    /// `χ_II`, the process fidelity with the identity.
    pub fn process_fidelity(&self) -> f64 {
        self.rho_or_chi[(0, 0)].re
    }
}

/// Counts of the `+1` and `−1` outcomes of one Pauli measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCounts {
    pub basis: Pauli,
    pub plus: u64,
    pub minus: u64,
}

impl PauliCounts {
    /// From a table whose setting is `X`, `Y` or `Z` and whose outcomes are `+`/`-`.
    pub fn from_table(t: &CountsTable) -> Result<Self> {
        let basis = match t.setting.as_str() {
            "X" => Pauli::X,
            "Y" => Pauli::Y,
            "Z" => Pauli::Z,
            s => return Err(Error::Estimator(format!("tomography setting `{s}` is not X, Y or Z"))),
        };
        Ok(Self {
            basis,
            plus: t.count("+"),
            minus: t.count("-"),
        })
    }
}

fn loglik(rho: &ComplexMatrix, data: &[(ComplexMatrix, f64)]) -> f64 {
    data.iter()
        .filter(|(_, n)| *n > 0.0)
        .map(|(p, n)| n * p.matmul(rho).trace().re.max(1e-300).ln())
        .sum()
}

/// Single-qubit MLE by the diluted `RρR` fixed point. The step is halved
/// whenever it would lower the likelihood, so the likelihood never decreases.
pub fn mle_state_tomography(tables: &[CountsTable]) -> Result<TomographyResult> {
    let data: Vec<PauliCounts> = tables.iter().map(PauliCounts::from_table).collect::<Result<_>>()?;
    mle_state_from_counts(&data)
}

pub fn mle_state_from_counts(data: &[PauliCounts]) -> Result<TomographyResult> {
    for b in [Pauli::X, Pauli::Y, Pauli::Z] {
        if !data.iter().any(|d| d.basis == b && d.plus + d.minus > 0) {
            return Err(Error::Estimator(format!("no counts in the {b:?} basis")));
        }
    }
    let mut proj: Vec<(ComplexMatrix, f64)> = Vec::new();
    for d in data {
        let [pp, pm] = eigenprojectors(&d.basis.matrix());
        proj.push((pp, d.plus as f64));
        proj.push((pm, d.minus as f64));
    }
    let total: f64 = proj.iter().map(|(_, n)| n).sum();
    let id = ComplexMatrix::identity(2);
    let mut rho = id.scale_re(0.5);
    let mut ll = loglik(&rho, &proj);
    let mut step = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < STATE_MAX_ITER {
        iterations += 1;
        let mut r = ComplexMatrix::zeros(2, 2);
        for (p, n) in &proj {
            if *n > 0.0 {
                let prob = p.matmul(&rho).trace().re.max(1e-300);
                r = &r + &p.scale_re(n / (total * prob));
            }
        }
        // (I + s·R)ρ(I + s·R) reduces to RρR as s → ∞ and is a small step for s → 0.
        let (next, next_ll) = loop {
            let g = &id + &r.scale_re(step);
            let m = g.sandwich(&rho);
            let tr = m.trace().re;
            let cand = m.scale_re(1.0 / tr);
            let cand_ll = loglik(&cand, &proj);
            if cand_ll >= ll || step < 1e-12 {
                break (cand, cand_ll);
            }
            step *= 0.5;
        };
        let change = next.max_abs_diff(&rho);
        if next_ll >= ll {
            rho = next;
            ll = next_ll;
        }
        step = (step * 2.0).min(1e6);
        if change <= STATE_TOL {
            converged = true;
            break;
        }
    }
    Ok(TomographyResult {
        rho_or_chi: rho,
        loglik: ll,
        iterations,
        converged,
    })
}

/// Orthonormal Hermitian basis of 4×4 matrices under the Hilbert–Schmidt product.
fn hermitian_basis() -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(16);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..4 {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(j, j)] = c(1.0, 0.0);
        out.push(m);
    }
    for j in 0..4 {
        for l in (j + 1)..4 {
            let mut re = ComplexMatrix::zeros(4, 4);
            re[(j, l)] = c(s, 0.0);
            re[(l, j)] = c(s, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(4, 4);
            im[(j, l)] = c(0.0, -s);
            im[(l, j)] = c(0.0, s);
            out.push(im);
        }
    }
    out
}

fn coords(m: &ComplexMatrix, basis: &[ComplexMatrix]) -> DVector<f64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|b| b.matmul(m).trace().re))
}

fn from_coords(x: &DVector<f64>, basis: &[ComplexMatrix]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (xi, b) in x.iter().zip(basis) {
        m = &m + &b.scale_re(*xi);
    }
    m
}

/// `E_χ(ρ) = Σ_mn χ_mn P_m ρ P_n`.
pub fn apply_chi(chi: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let p: Vec<ComplexMatrix> = Pauli::ALL.iter().map(|q| q.matrix()).collect();
    let mut out = ComplexMatrix::zeros(2, 2);
    for m in 0..4 {
        for n in 0..4 {
            let w = chi[(m, n)];
            if w == ZERO {
                continue;
            }
            out = &out + &p[m].matmul(rho).matmul(&p[n]).scale(w);
        }
    }
    out
}

/// `Σ_mn χ_mn P_n P_m`, which equals `I` for a trace-preserving process.
fn tp_operator(chi: &ComplexMatrix) -> ComplexMatrix {
    let p: Vec<ComplexMatrix> = Pauli::ALL.iter().map(|q| q.matrix()).collect();
    let mut out = ComplexMatrix::zeros(2, 2);
    for m in 0..4 {
        for n in 0..4 {
            out = &out + &p[n].matmul(&p[m]).scale(chi[(m, n)]);
        }
    }
    out
}

fn real_vec(m: &ComplexMatrix) -> Vec<f64> {
    m.entries().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn project_psd4(x: &DVector<f64>, basis: &[ComplexMatrix]) -> DVector<f64> {
    let m = from_coords(x, basis);
    let (vals, vecs) = m.hermitian_eigen();
    let d: Vec<C64> = vals.iter().map(|v| c(v.max(0.0), 0.0)).collect();
    let p = vecs.matmul(&ComplexMatrix::diag(&d)).matmul(&vecs.adjoint());
    coords(&p, basis)
}

struct Affine {
    c: DMatrix<f64>,
    d: DVector<f64>,
    gram_inv: DMatrix<f64>,
}

impl Affine {
    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let r = &self.c * x - &self.d;
        x - self.c.transpose() * (&self.gram_inv * r)
    }

    fn residual(&self, x: &DVector<f64>) -> f64 {
        (&self.c * x - &self.d).amax()
    }
}

/// Dykstra alternating projection onto PSD ∩ trace-preserving.
fn project_cptp(x0: &DVector<f64>, basis: &[ComplexMatrix], tp: &Affine) -> (DVector<f64>, bool) {
    let mut x = x0.clone();
    let mut p = DVector::zeros(x.len());
    let mut q = DVector::zeros(x.len());
    for _ in 0..5000 {
        let y = project_psd4(&(&x + &p), basis);
        p = &x + &p - &y;
        let next = tp.project(&(&y + &q));
        q = &y + &q - &next;
        let change = (&next - &x).amax();
        x = next;
        if change < 1e-13 {
            break;
        }
    }
    let out = project_psd4(&x, basis);
    let ok = tp.residual(&out) <= TP_TOL;
    (out, ok)
}

/// χ-matrix process estimate from input states and reconstructed outputs:
/// least squares over predicted outputs with complete positivity and trace
/// preservation enforced by projection (accelerated projected gradient).
pub fn mle_process_tomography(inputs: &[ComplexMatrix], outputs: &[ComplexMatrix]) -> Result<TomographyResult> {
    if inputs.len() != outputs.len() || inputs.is_empty() {
        return Err(Error::Estimator("process tomography needs matching, non-empty input and output lists".into()));
    }
    for m in inputs.iter().chain(outputs) {
        if m.nrows() != 2 || m.ncols() != 2 {
            return Err(Error::Dimension("process tomography works on single-qubit states".into()));
        }
    }
    let basis = hermitian_basis();
    // Linear map from χ coordinates to stacked real output entries.
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| inputs.iter().flat_map(|rho| real_vec(&apply_chi(b, rho))).collect())
        .collect();
    let rows = cols[0].len();
    let a = DMatrix::from_fn(rows, 16, |i, j| cols[j][i]);
    let b = DVector::from_iterator(rows, outputs.iter().flat_map(real_vec));
    // TP: the four real components of Σ χ_mn P_n P_m − I vanish.
    let tp_cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|bm| {
            let t = tp_operator(bm);
            Pauli::ALL.iter().map(|q| 0.5 * q.matrix().matmul(&t).trace().re).collect()
        })
        .collect();
    let cmat = DMatrix::from_fn(4, 16, |i, j| tp_cols[j][i]);
    let d = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let gram_inv = (&cmat * cmat.transpose())
        .try_inverse()
        .ok_or_else(|| Error::Estimator("trace-preservation constraints are degenerate".into()))?;
    let tp = Affine { c: cmat, d, gram_inv };

    let ata = a.transpose() * &a;
    let atb = a.transpose() * &b;
    let lipschitz = ata.clone().symmetric_eigen().eigenvalues.amax().max(1e-12);
    let objective = |x: &DVector<f64>| (&a * x - &b).norm_squared();

    // Start from the TP-constrained least-squares solution (KKT system).
    let mut kkt = DMatrix::zeros(20, 20);
    kkt.view_mut((0, 0), (16, 16)).copy_from(&(&ata * 2.0));
    kkt.view_mut((0, 16), (16, 4)).copy_from(&tp.c.transpose());
    kkt.view_mut((16, 0), (4, 16)).copy_from(&tp.c);
    let mut rhs = DVector::zeros(20);
    rhs.rows_mut(0, 16).copy_from(&(&atb * 2.0));
    rhs.rows_mut(16, 4).copy_from(&tp.d);
    let start = kkt
        .clone()
        .pseudo_inverse(1e-12)
        .map(|inv| (inv * rhs).rows(0, 16).into_owned())
        .unwrap_or_else(|_| coords(&ComplexMatrix::diag(&[c(1.0, 0.0), ZERO, ZERO, ZERO]), &basis));

    let (mut x, mut feasible) = project_cptp(&start, &basis, &tp);
    let mut iterations = 0;
    let mut converged = false;
    let start_is_psd = from_coords(&start, &basis).hermitian_eigen().0[0] >= -1e-12;
    if start_is_psd {
        x = start;
        feasible = tp.residual(&x) <= TP_TOL;
        converged = true;
    } else {
        let mut y = x.clone();
        let mut t = 1.0f64;
        let mut f = objective(&x);
        while iterations < 5000 {
            iterations += 1;
            let grad = (&ata * &y - &atb) * 2.0;
            let (next, ok) = project_cptp(&(&y - grad / (2.0 * lipschitz)), &basis, &tp);
            feasible = ok;
            let f_next = objective(&next);
            // Restart momentum if the objective went up.
            if f_next > f {
                t = 1.0;
                y = x.clone();
                continue;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &next + (&next - &x) * ((t - 1.0) / t_next);
            let change = (&next - &x).amax();
            x = next;
            f = f_next;
            t = t_next;
            if change < 1e-11 {
                converged = true;
                break;
            }
        }
    }
    let chi = from_coords(&x, &basis);
    Ok(TomographyResult {
        loglik: -objective(&x),
        rho_or_chi: chi,
        iterations,
        converged: converged && feasible,
    })
}

/// `χ` of a known single-qubit Kraus channel, for checks.
pub fn chi_of_kraus(ops: &[ComplexMatrix]) -> ComplexMatrix {
    let p: Vec<ComplexMatrix> = Pauli::ALL.iter().map(|q| q.matrix()).collect();
    let mut chi = ComplexMatrix::zeros(4, 4);
    for k in ops {
        // K = Σ_m a_m P_m with a_m = Tr(P_m K)/2.
        let a: Vec<C64> = p.iter().map(|pm| pm.matmul(k).trace() * 0.5).collect();
        for m in 0..4 {
            for n in 0..4 {
                chi[(m, n)] += a[m] * a[n].conj();
            }
        }
    }
    chi
}
