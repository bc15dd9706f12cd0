//! Bartels-Stewart solver for `A X - X B = C` over the complex numbers.

use super::schur::{cluster_radius, schur, solve_triangular_sylvester};
use super::{check_square, CMat, Tolerances, C64};
use crate::error::{Error, Result};

/// Solves `a x - x b = c`.
///
/// The spectra of `a` and `b` must be disjoint; eigenvalue pairs closer than
/// the clustering radius are rejected with [`Error::SpectrumCollision`].
pub fn solve_sylvester(a: &CMat, b: &CMat, c: &CMat, tol: &Tolerances) -> Result<CMat> {
    let n = check_square(a)?;
    let m = check_square(b)?;
    if c.shape() != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, expected {}x{}",
            c.nrows(),
            c.ncols(),
            n,
            m
        )));
    }
    if n == 0 || m == 0 {
        return Ok(CMat::zeros(n, m));
    }
    let (qa, ta) = schur(a)?;
    let (qb, tb) = schur(b)?;

    let radius = cluster_radius(tol, a.norm() + b.norm());
    let mut worst: Option<(C64, C64, f64)> = None;
    for i in 0..n {
        for j in 0..m {
            let gap = (ta[(i, i)] - tb[(j, j)]).norm();
            if worst.map_or(true, |w| gap < w.2) {
                worst = Some((ta[(i, i)], tb[(j, j)], gap));
            }
        }
    }
    if let Some((left, right, gap)) = worst {
        if gap <= radius {
            return Err(Error::SpectrumCollision { left, right, gap });
        }
    }

    let f = qa.adjoint() * c * &qb;
    let y = solve_triangular_sylvester(&ta, &tb, &f)?;
    Ok(qa * y * qb.adjoint())
}
