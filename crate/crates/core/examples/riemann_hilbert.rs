//! Round trip between commuting monodromy pairs and normal forms.
//!
//! cargo run --example riemann_hilbert

use bqtau::bqtau::{fiber_omega, functor_f, RepZ2};
use bqtau::numkit::{identity, CMat, Tolerances, Transversal, C64};

fn main() -> bqtau::Result<()> {
    let tol = Tolerances::default();
    let tau = C64::new(1.0, -1.0);
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let c = C64::new;
    // M2 is a polynomial in M1, so the pair commutes
    let m1 = CMat::from_row_slice(2, 2, &[c(0.5, 1.2), c(0.3, 0.0), c(0.0, 0.0), c(-1.1, 0.4)]);
    let m2 = &m1 * &m1 + identity(2) * c(2.0, 0.0);
    let rep = RepZ2::new(m1.clone(), m2.clone(), &tol)?;

    for offset in [0.0, -1.0, 2.0] {
        let strip = Transversal::new(tau, offset)?;
        let nf = functor_f(&rep, &strip, theta, &tol)?;
        let back = fiber_omega(&nf, &tol)?;
        let err = (&back.m1 - &m1).norm() + (&back.m2 - &m2).norm();
        println!("strip offset {offset:>4}: A0 = {:.4}  round-trip error {err:.2e}", nf.a0);
    }
    Ok(())
}
