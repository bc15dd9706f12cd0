//! The width `wd(tau) = |tau|^2 / |Re tau|` and the search for `g` in SL2(Z) with `wd(g tau) < 1`.
//!
//! cargo run --example modular_width

use bqtau::numkit::{find_small_width, moebius, wd, C64};

fn main() -> bqtau::Result<()> {
    for tau in [C64::new(1.0, -1.0), C64::new(0.25, 2.0), C64::new(-1.0, -1.0), C64::new(0.01, 0.5)] {
        let s = find_small_width(tau)?;
        println!(
            "tau = {tau}: wd = {:.4}, N = {}, g = [[{}, {}], [{}, {}]], g tau = {:.4}, wd(g tau) = {:.4}",
            wd(tau)?,
            s.n,
            s.g.a,
            s.g.b,
            s.g.c,
            s.g.d,
            moebius(&s.g, tau)?,
            s.wd
        );
    }
    Ok(())
}
