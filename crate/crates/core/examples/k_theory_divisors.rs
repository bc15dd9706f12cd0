//! K0 classes, the map to divisors on the elliptic curve, and Abel equivalence.
//!
//! cargo run --example k_theory_divisors

use bqtau::atheta::{divisor_equivalent, kmap, DivisorXtau};
use bqtau::bqtau::{decompose, direct_sum, h0_dim, k0_class, NormalForm};
use bqtau::numkit::{Tolerances, Transversal, C64};

fn main() -> bqtau::Result<()> {
    let tol = Tolerances::default();
    let tau = C64::new(1.0, -1.0);
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let strip = Transversal::new(tau, -1.0)?;
    let simple = |b: f64, s: f64| NormalForm::simple(C64::new(b, 0.0), tau * s, strip, theta, &tol);
    let x = direct_sum(&direct_sum(&simple(2.0, -1.0)?, &simple(2.0, -0.4)?, &tol)?, &simple(0.5, -0.7)?, &tol)?;

    println!("simple factors (z', b): {:?}", decompose(&x, &tol)?);
    let class = k0_class(&x, &tol)?;
    println!("k0 rank {}, h0 = {}", class.rank(), h0_dim(&x, &tol)?);
    let d = kmap(&class)?;
    println!("divisor {:?}, degree {}", d.points(), d.degree());

    let eps = tol.eps_key;
    let (p, w) = (C64::new(0.2, 0.0) + tau * 0.3, C64::new(0.7, 0.0) + tau * 0.45);
    let zero = DivisorXtau::new(tau, eps)?;
    let abel = DivisorXtau::from_points(tau, eps, [(p, 1), (w, 1), (C64::new(0.0, 0.0), -1), (p + w, -1)])?;
    let single = DivisorXtau::from_points(tau, eps, [(p, 1), (C64::new(0.0, 0.0), -1)])?;
    println!("[p]+[w]-[0]-[p+w] ~ 0: {}", divisor_equivalent(&abel, &zero)?);
    println!("[p]-[0] ~ 0: {}", divisor_equivalent(&single, &zero)?);
    Ok(())
}
