//! Tensor products, duals and Hom spaces of simple objects.
//!
//! cargo run --example tensor_rigidity

use bqtau::bqtau::{direct_sum, dual, fiber_omega, hom_basis, k0_class, tensor, triangle_identities, NormalForm};
use bqtau::numkit::{kron, Tolerances, Transversal, C64};

fn main() -> bqtau::Result<()> {
    let tol = Tolerances::default();
    let tau = C64::new(1.0, -1.0);
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let strip = Transversal::new(tau, 0.0)?;
    let x1 = NormalForm::simple(C64::new(2.0, 0.0), tau * 0.3, strip, theta, &tol)?;
    let x2 = NormalForm::simple(C64::new(0.0, 1.5), tau * 0.6, strip, theta, &tol)?;
    let x = direct_sum(&x1, &x2, &tol)?;

    let xx = tensor(&x, &x, &tol)?;
    let (ox, oxx) = (fiber_omega(&x, &tol)?, fiber_omega(&xx, &tol)?);
    println!("dim x (x) x = {}", xx.dim());
    println!("|M1(x(x)x) - M1(x) (x) M1(x)| = {:.2e}", (&oxx.m1 - kron(&ox.m1, &ox.m1)).norm());
    println!("k0(x (x) x) = {:?}", k0_class(&xx, &tol)?.terms());

    let tri = triangle_identities(&x, &tol)?;
    println!("triangle identities: left {:.1e}, right {:.1e}", tri.left, tri.right);
    println!("dim Hom(x, x) = {}", hom_basis(&x, &x, &tol)?.len());
    println!("dim Hom(x1, x2) = {}", hom_basis(&x1, &x2, &tol)?.len());
    println!("dim Hom(1, x (x) x*) = {}", hom_basis(&NormalForm::unit(strip, theta, &tol)?, &tensor(&x, &dual(&x, &tol)?, &tol)?, &tol)?.len());
    Ok(())
}
