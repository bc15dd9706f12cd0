use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Morphism, NormalForm};
use crate::error::Result;
use crate::numkit::{
    identity, kron, nullspace, nullspace_abs, range_basis, smallest_singular_value, CMat, Tolerances, C64,
};

const ISO_TRIALS: usize = 32;

/// Rank threshold for the linear systems defining morphisms; absolute in the
/// size of the operands so that spectra agreeing to rounding count as equal.
fn threshold(x: &NormalForm, y: &NormalForm, tol: &Tolerances) -> f64 {
    tol.eps_res * (1.0 + x.a0.norm() + y.a0.norm() + x.b0.norm() + y.b0.norm())
}

/// Vectorized (column-major) system for `phi_k`:
/// `(A0y + k tau) phi - phi A0x = 0`, `q^k B0y phi - phi B0x = 0`.
fn hom_system(x: &NormalForm, y: &NormalForm, k: i64) -> CMat {
    let (nx, ny) = (x.dim(), y.dim());
    let ix = identity(nx);
    let iy = identity(ny);
    let shift = x.tau() * k as f64;
    let qk = x.q().powi(k as i32);
    let top = kron(&ix, &(&y.a0 + &iy * shift)) - kron(&x.a0.transpose(), &iy);
    let bottom = kron(&ix, &(&y.b0 * qk)) - kron(&x.b0.transpose(), &iy);
    let mut l = CMat::zeros(2 * nx * ny, nx * ny);
    l.rows_mut(0, nx * ny).copy_from(&top);
    l.rows_mut(nx * ny, nx * ny).copy_from(&bottom);
    l
}

/// A basis of `Hom(x, y)` as constant intertwiners.
pub fn hom_basis(x: &NormalForm, y: &NormalForm, tol: &Tolerances) -> Result<Vec<Morphism>> {
    x.check_compatible(y)?;
    let ns = nullspace_abs(&hom_system(x, y, 0), threshold(x, y, tol));
    ns.column_iter()
        .map(|c| {
            let phi = CMat::from_column_slice(y.dim(), x.dim(), c.as_slice());
            Morphism::new(x.clone(), y.clone(), phi, tol)
        })
        .collect()
}

/// Dimensions of the solution spaces of the `z^k` coefficient equations for
/// `0 < |k| <= range`; for normal forms over one transversal these vanish.
pub fn scan_nonconstant_homs(x: &NormalForm, y: &NormalForm, range: i64, tol: &Tolerances) -> Result<Vec<(i64, usize)>> {
    x.check_compatible(y)?;
    let thr = threshold(x, y, tol);
    Ok((-range..=range)
        .filter(|&k| k != 0)
        .map(|k| (k, nullspace_abs(&hom_system(x, y, k), thr).ncols()))
        .filter(|&(_, d)| d > 0)
        .collect())
}

/// Searches for an invertible morphism `x -> y` among seeded random
/// combinations of a basis of `Hom(x, y)`.
pub fn find_isomorphism(x: &NormalForm, y: &NormalForm, seed: u64, tol: &Tolerances) -> Result<Option<Morphism>> {
    if x.dim() != y.dim() {
        return Ok(None);
    }
    let forward = hom_basis(x, y, tol)?;
    let backward = hom_basis(y, x, tol)?;
    if forward.len() != backward.len() || (forward.is_empty() && x.dim() > 0) {
        return Ok(None);
    }
    if x.dim() == 0 {
        return Ok(Some(Morphism::new(x.clone(), y.clone(), CMat::zeros(0, 0), tol)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ISO_TRIALS {
        let mut phi = CMat::zeros(y.dim(), x.dim());
        for m in &forward {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            phi += &m.phi * c;
        }
        if smallest_singular_value(&phi) > tol.eps_res * phi.norm() {
            return Ok(Some(Morphism::new(x.clone(), y.clone(), phi, tol)?));
        }
    }
    Ok(None)
}

fn restrict(nf: &NormalForm, basis: &CMat, tol: &Tolerances) -> Result<NormalForm> {
    let a0 = basis.adjoint() * &nf.a0 * basis;
    let b0 = basis.adjoint() * &nf.b0 * basis;
    NormalForm::from_matrices(a0, b0, nf.transversal, nf.theta, tol)
}

/// The kernel together with its inclusion into the source.
pub fn kernel(m: &Morphism, tol: &Tolerances) -> Result<Morphism> {
    let basis = nullspace(&m.phi, tol.eps_res);
    let obj = restrict(&m.source, &basis, tol)?;
    Morphism::new(obj, m.source.clone(), basis, tol)
}

/// The cokernel together with the projection from the target. The cokernel
/// is realized on the orthogonal complement of the image.
pub fn cokernel(m: &Morphism, tol: &Tolerances) -> Result<Morphism> {
    let basis = nullspace(&m.phi.adjoint(), tol.eps_res);
    let obj = restrict(&m.target, &basis, tol)?;
    Morphism::new(m.target.clone(), obj, basis.adjoint(), tol)
}

/// The image together with its inclusion into the target.
pub fn image(m: &Morphism, tol: &Tolerances) -> Result<Morphism> {
    let basis = range_basis(&m.phi, tol.eps_res);
    let obj = restrict(&m.target, &basis, tol)?;
    Morphism::new(obj, m.target.clone(), basis, tol)
}
