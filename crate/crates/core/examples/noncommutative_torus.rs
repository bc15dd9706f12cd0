//! The noncommutative torus: the relation `U2 U1 = e(theta) U1 U2`, the
//! SL2(Z) action, and the image of a normal form under `psi_*`.
//!
//! cargo run --example noncommutative_torus

use bqtau::atheta::{check_intertwine, psi_star, sigma_apply, sigma_inverse_word, AElem, Gen, Omega};
use bqtau::bqtau::NormalForm;
use bqtau::numkit::{Tolerances, Transversal, C64, TWO_PI_I};

fn main() -> bqtau::Result<()> {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let tau = C64::new(1.0, -1.0);
    let (u1, u2) = (AElem::u1(theta), AElem::u2(theta));
    let lhs = u2.mul(&u1)?;
    let rhs = u1.mul(&u2)?.scale((TWO_PI_I * theta).exp());
    println!("|U2 U1 - e(theta) U1 U2| = {:.1e}", lhs.sub(&rhs)?.norm());

    let word = [Gen::G1, Gen::G2Inv];
    let x = u1.add(&u2.scale(C64::new(0.0, 2.0)))?;
    let y = sigma_apply(&word, &x)?;
    println!("sigma(U1 + 2i U2) has {} terms", y.support_len());
    let back = sigma_apply(&sigma_inverse_word(&word), &y)?;
    println!("inverse word restores it: {:.1e}", back.sub(&x)?.norm());
    println!("intertwining residual: {:.1e}", check_intertwine(&word, &Omega::tau(tau), 3, theta)?);

    let tol = Tolerances::default();
    let nf = NormalForm::simple(C64::new(2.0, 0.0), tau * 0.3, Transversal::new(tau, 0.0)?, theta, &tol)?;
    let fr = psi_star(&nf)?;
    println!("psi_* of a simple object: dim {}, diagonal {:?}", fr.dim(), fr.diagonal());
    Ok(())
}
