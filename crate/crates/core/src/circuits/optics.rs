//! Polarization optics of the photon detection path.
//!
//! Jones convention: a retarder with fast axis at θ from horizontal and
//! retardance Γ is `R(−θ)·diag(1, e^{iΓ})·R(θ)` with
//! `R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]`, over the `{H, V}` basis.
//!
//! The photon first crosses the drift-compensation pair (QWP at 0°, then HWP
//! at 45°), then the basis-setting QWP and HWP, then the PBS. The
//! compensation pair is fixed, so a setting `(hwp, qwp)` realizes
//! `U = HWP(hwp)·QWP(qwp)·HWP(45°)·QWP(0°)`. With this convention the four
//! GHZ settings select the Z and `M_k` bases, with port H on the −1
//! eigenvector in every case. Detectors are therefore named by the
//! polarization they register in the Z setting: detector `H` sits behind
//! port V, and reads the +1 eigenvalue of every basis used here.

use crate::qcore::{c, equatorial, ComplexMatrix, Pauli, ONE, ZERO};

/// A 2×2 unitary over the `{H, V}` polarization basis.
pub type JonesMatrix = ComplexMatrix;

fn frame(theta: f64) -> ComplexMatrix {
    let (s, co) = theta.sin_cos();
    ComplexMatrix::from_real_rows(&[&[co, s], &[-s, co]])
}

/// Rotated linear retarder, angle in degrees.
pub fn retarder(theta_deg: f64, retardance: f64) -> JonesMatrix {
    let t = theta_deg.to_radians();
    let d = ComplexMatrix::diag(&[ONE, c(retardance.cos(), retardance.sin())]);
    frame(-t).matmul(&d).matmul(&frame(t))
}

pub fn jones_hwp(theta_deg: f64) -> JonesMatrix {
    retarder(theta_deg, std::f64::consts::PI)
}

pub fn jones_qwp(theta_deg: f64) -> JonesMatrix {
    retarder(theta_deg, std::f64::consts::FRAC_PI_2)
}

/// The fixed drift-compensation pair, in propagation order QWP(0°) then HWP(45°).
pub fn compensation() -> JonesMatrix {
    jones_hwp(45.0).matmul(&jones_qwp(0.0))
}

/// Total Jones matrix from the fiber output to the PBS for a basis setting.
pub fn analyzer(hwp_deg: f64, qwp_deg: f64) -> JonesMatrix {
    jones_hwp(hwp_deg).matmul(&jones_qwp(qwp_deg)).matmul(&compensation())
}

/// `[Π_H, Π_V]`: the photon states routed to the H and V ports of the PBS.
pub fn photon_measurement_operators(hwp_deg: f64, qwp_deg: f64) -> [ComplexMatrix; 2] {
    let u = analyzer(hwp_deg, qwp_deg);
    let h = ComplexMatrix::projector(&[ONE, ZERO]);
    let v = ComplexMatrix::projector(&[ZERO, ONE]);
    [u.adjoint().matmul(&h).matmul(&u), u.adjoint().matmul(&v).matmul(&u)]
}

/// `[D_H, D_V]`: the photon states counted by the detectors named H and V.
pub fn detector_projectors(hwp_deg: f64, qwp_deg: f64) -> [ComplexMatrix; 2] {
    let [port_h, port_v] = photon_measurement_operators(hwp_deg, qwp_deg);
    [port_v, port_h]
}

/// A named photon basis: waveplate setting plus the observable it reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBasis {
    pub name: &'static str,
    pub hwp: f64,
    pub qwp: f64,
}

impl PhotonBasis {
    pub const Z: PhotonBasis = PhotonBasis { name: "Z", hwp: 0.0, qwp: 0.0 };
    pub const X: PhotonBasis = PhotonBasis { name: "X", hwp: 0.0, qwp: 45.0 };
    pub const Y: PhotonBasis = PhotonBasis { name: "Y", hwp: 22.5, qwp: 45.0 };

    /// Setting for `M_k = cos(kπ/3)X + sin(kπ/3)Y`; `k = 0` is the Z setting.
    pub fn m(k: u32) -> PhotonBasis {
        match k {
            0 => Self::Z,
            1 => PhotonBasis { name: "M1", hwp: 15.0, qwp: 45.0 },
            2 => PhotonBasis { name: "M2", hwp: 30.0, qwp: 45.0 },
            _ => PhotonBasis { name: "M3", hwp: 45.0, qwp: 45.0 },
        }
    }

    pub fn pauli(p: Pauli) -> PhotonBasis {
        match p {
            Pauli::X => Self::X,
            Pauli::Y => Self::Y,
            _ => Self::Z,
        }
    }

    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        photon_measurement_operators(self.hwp, self.qwp)
    }

    pub fn detectors(&self) -> [ComplexMatrix; 2] {
        detector_projectors(self.hwp, self.qwp)
    }

    /// Eigenvalue of `observable` carried by port H: `Tr(Π_H·O)` rounded to ±1.
    pub fn h_port_sign(&self, observable: &ComplexMatrix) -> f64 {
        let v = self.projectors()[0].matmul(observable).trace().re;
        if v >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// `M_k` as a matrix.
pub fn m_observable(k: u32) -> ComplexMatrix {
    if k == 0 {
        Pauli::Z.matrix()
    } else {
        equatorial(k as f64 * std::f64::consts::FRAC_PI_3)
    }
}

/// Largest deviation of a setting from measuring `observable` exactly,
/// allowing the two ports to be swapped.
pub fn basis_mismatch(hwp_deg: f64, qwp_deg: f64, observable: &ComplexMatrix) -> f64 {
    let [ph, pv] = photon_measurement_operators(hwp_deg, qwp_deg);
    let direct = (&ph - &pv).max_abs_diff(observable);
    let swapped = (&pv - &ph).max_abs_diff(observable);
    direct.min(swapped)
}
