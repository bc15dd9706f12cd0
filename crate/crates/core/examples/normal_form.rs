//! Normalizes a resonant object: `A = diag(0, tau) + E12 z`, `B = diag(1, q)`.
//! The shear moves `tau` into the strip and the result is a Jordan block.
//!
//! cargo run --example normal_form

use bqtau::bqtau::{normalize, BqObject};
use bqtau::laurent::{LaurentParams, PolyMat};
use bqtau::numkit::{eigenvalues, CMat, Tolerances, Transversal, C64};

fn main() -> bqtau::Result<()> {
    let tau = C64::new(1.0, -1.0);
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let params = LaurentParams::from_theta(tau, theta)?;
    let (zero, one) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let m = |e: [C64; 4]| CMat::from_row_slice(2, 2, &e);

    let a = PolyMat::from_terms(2, [(0, m([zero, zero, zero, tau])), (1, m([zero, one, zero, zero]))], params)?;
    let b = PolyMat::constant(m([one, zero, zero, params.q]), params)?;
    let obj = BqObject::new(a, b, theta)?;

    let strip = Transversal::new(tau, 0.0)?;
    let nf = normalize(&obj, &strip, 16, &Tolerances::default())?;
    println!("A0 = {:.6}", nf.a0);
    println!("B0 = {:.6}", nf.b0);
    println!("eigenvalues of A0: {:?}", eigenvalues(&nf.a0)?);
    let d = &nf.diagnostics;
    println!(
        "shear passes {}, gauge residuals A {:.1e} B {:.1e}, [A0,B0] {:.1e}",
        d.shear_passes, d.a_residual, d.b_residual, d.commutator
    );
    Ok(())
}
