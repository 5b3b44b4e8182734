//! Photon analyzer: waveplate settings and the observables they measure.

use ionnode::circuits::{basis_mismatch, m_observable, PhotonBasis};
use ionnode::qcore::Pauli;

fn main() {
    for k in 0..4 {
        let b = PhotonBasis::m(k);
        let o = m_observable(k);
        println!(
            "{:>2}: HWP {:>4.1}°  QWP {:>4.1}°  mismatch {:.1e}  port H eigenvalue {:+}",
            b.name,
            b.hwp,
            b.qwp,
            basis_mismatch(b.hwp, b.qwp, &o),
            b.h_port_sign(&o)
        );
    }
    for (p, b) in [(Pauli::X, PhotonBasis::X), (Pauli::Y, PhotonBasis::Y)] {
        println!("{:>2}: HWP {:>4.1}°  QWP {:>4.1}°  mismatch {:.1e}", b.name, b.hwp, b.qwp, basis_mismatch(b.hwp, b.qwp, &p.matrix()));
    }
}
