//! Central charges, phases of standard bundles, and Nori finiteness of monodromy.
//!
//! cargo run --example stability_nori

use bqtau::atheta::{is_nori_finite, phase, stability_z, std_bundle_data};
use bqtau::numkit::{CMat, Tolerances, C64, TWO_PI_I};

fn main() -> bqtau::Result<()> {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    for (m, n) in [(0, 1), (1, 0), (1, 1), (-1, 2), (2, -1)] {
        let d = std_bundle_data(m, n, theta)?;
        println!(
            "E({m},{n}): deg {}, rk {:.4}, slope {:.4}, Z = {:.4}, phase {:.4}",
            d.deg,
            d.rk,
            d.slope,
            stability_z(m, n, theta)?,
            phase(m, n, theta)?
        );
    }

    let tol = Tolerances::default();
    let c = C64::new;
    let cases = [
        ("diag(i, -1)", CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])),
        ("e(theta)", CMat::from_element(1, 1, (TWO_PI_I * theta).exp())),
        ("Jordan block", CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])),
    ];
    for (name, m) in cases {
        let r = is_nori_finite(&[m], 64, &tol)?;
        println!("{name}: finite {}, order {:?}, reason {:?}", r.finite, r.order, r.reason);
    }
    Ok(())
}
