//! Matrix functions by cluster-wise Taylor expansion on a reordered Schur
//! form, glued by the block Parlett recurrence.
//!
//! Clustering happens before any branch choice, so every eigenvalue of one
//! cluster (in particular every Jordan block) is sent through the same
//! branch of the logarithm.

use super::schur::{clustered_schur, solve_triangular_sylvester, ClusteredSchur};
use super::{
    check_finite, check_square, smallest_singular_value, spectral_norm, CMat, Tolerances,
    Transversal, C64, TWO_PI_I,
};
use crate::error::{Error, Result};

const MAX_TAYLOR_TERMS: usize = 400;

/// Result of a transversal-normalized matrix function.
#[derive(Debug, Clone)]
pub struct TransversalBranch {
    pub matrix: CMat,
    /// `(cluster center, integer shift)` per eigenvalue cluster of the input.
    pub shifts: Vec<(C64, i64)>,
    /// Output eigenvalues lying within `eps_spec` of a strip edge.
    pub near_boundary: Vec<C64>,
    pub warnings: Vec<String>,
}

/// `sum_k coeff(k) (block - center)^k`, truncated once terms stop contributing.
fn taylor_block(block: &CMat, center: C64, coeff: &dyn Fn(usize) -> C64) -> CMat {
    let k = block.nrows();
    let nil = block - CMat::identity(k, k) * center;
    let mut power = CMat::identity(k, k);
    let mut out = CMat::identity(k, k) * coeff(0);
    for j in 1..MAX_TAYLOR_TERMS {
        power = &power * &nil;
        let pn = power.norm();
        if pn == 0.0 {
            break;
        }
        let c = coeff(j);
        let term = &power * c;
        out += &term;
        if j >= k && term.norm() <= 1e-18 * out.norm().max(1e-300) {
            break;
        }
    }
    out
}

/// Applies a cluster-wise analytic function to the clustered Schur form.
fn schur_parlett(
    cs: &ClusteredSchur,
    on_block: &dyn Fn(usize, &CMat) -> CMat,
) -> Result<CMat> {
    let n = cs.t.nrows();
    let nb = cs.blocks.len();
    let t = &cs.t;
    let blk = |i: usize, j: usize| {
        let (ri, rj) = (&cs.blocks[i], &cs.blocks[j]);
        t.view((ri.start, rj.start), (ri.len(), rj.len())).into_owned()
    };
    let mut f: Vec<Vec<Option<CMat>>> = vec![vec![None; nb]; nb];
    for j in 0..nb {
        f[j][j] = Some(on_block(j, &blk(j, j)));
        for i in (0..j).rev() {
            let fii = f[i][i].as_ref().unwrap();
            let fjj = f[j][j].as_ref().unwrap();
            let tij = blk(i, j);
            let mut rhs = fii * &tij - &tij * fjj;
            for k in (i + 1)..j {
                let fik = f[i][k].as_ref().unwrap();
                let fkj = f[k][j].as_ref().unwrap();
                rhs += fik * blk(k, j) - blk(i, k) * fkj;
            }
            f[i][j] = Some(solve_triangular_sylvester(&blk(i, i), &blk(j, j), &rhs)?);
        }
    }
    let mut ft = CMat::zeros(n, n);
    for i in 0..nb {
        for j in i..nb {
            let (ri, rj) = (&cs.blocks[i], &cs.blocks[j]);
            ft.view_mut((ri.start, rj.start), (ri.len(), rj.len()))
                .copy_from(f[i][j].as_ref().unwrap());
        }
    }
    Ok(&cs.q * ft * cs.q.adjoint())
}

/// Matrix exponential (scaling and squaring with Pade approximants).
pub fn mat_exp(m: &CMat) -> Result<CMat> {
    check_square(m)?;
    check_finite(m)?;
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let e = m.exp();
    check_finite(&e)?;
    Ok(e)
}

fn boundary_report(t: &Transversal, tol: &Tolerances, out: &CMat) -> Result<Vec<C64>> {
    Ok(super::eigenvalues(out)?
        .into_iter()
        .filter(|&z| t.boundary_distance(z) <= tol.edge_radius(out.norm()))
        .collect())
}

/// Warns when the members of one cluster would reduce to different
/// strip representatives.
fn straddle_warnings(
    cs: &ClusteredSchur,
    t: &Transversal,
    map: &dyn Fn(C64) -> C64,
    chosen: &[i64],
    radius: f64,
) -> Vec<String> {
    let mut out = Vec::new();
    for (j, r) in cs.blocks.iter().enumerate() {
        for i in r.clone() {
            let z = cs.t[(i, i)];
            let (_, k) = t.reduce_snapped(map(z), radius);
            if k != chosen[j] {
                let spread = r
                    .clone()
                    .map(|p| (cs.t[(p, p)] - cs.centers[j]).norm())
                    .fold(0.0, f64::max);
                out.push(format!(
                    "cluster at {} straddles the strip edge (member {} reduces with shift {} instead of {}; cluster spread {:e})",
                    cs.centers[j], z, k, chosen[j], spread
                ));
                break;
            }
        }
    }
    out
}

/// The unique `A` with `exp(2 pi i A / tau) = m` whose eigenvalues lie in `t`.
pub fn log_transversal(m: &CMat, t: &Transversal, tol: &Tolerances) -> Result<TransversalBranch> {
    let n = check_square(m)?;
    check_finite(m)?;
    if n == 0 {
        return Ok(TransversalBranch {
            matrix: m.clone(),
            shifts: Vec::new(),
            near_boundary: Vec::new(),
            warnings: Vec::new(),
        });
    }
    let smin = smallest_singular_value(m);
    if smin <= tol.eps_res * spectral_norm(m) {
        return Err(Error::Singular(format!(
            "monodromy matrix has smallest singular value {smin:e}"
        )));
    }
    let cs = clustered_schur(m, tol)?;
    let scale = t.tau / TWO_PI_I;
    let to_strip = |z: C64| scale * z.ln();
    let radius = tol.edge_radius(t.tau.norm());
    let branches: Vec<(C64, i64)> = cs
        .centers
        .iter()
        .map(|&c| t.reduce_snapped(to_strip(c), radius))
        .collect();
    let shifts: Vec<i64> = branches.iter().map(|b| b.1).collect();

    let matrix = schur_parlett(&cs, &|j, block| {
        let center = cs.centers[j];
        let base = branches[j].0;
        taylor_block(block, center, &|k| {
            if k == 0 {
                base
            } else {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                scale * sign / (k as f64 * center.powi(k as i32))
            }
        })
    })?;
    let warnings = straddle_warnings(&cs, t, &to_strip, &shifts, radius);
    let near_boundary = boundary_report(t, tol, &matrix)?;
    Ok(TransversalBranch {
        matrix,
        shifts: cs.centers.iter().copied().zip(shifts).collect(),
        near_boundary,
        warnings,
    })
}

/// `a - sum_j tau k_j P_j` where `P_j` are the spectral projectors of `a` and
/// `k_j` moves cluster `j` into the strip; preserves `exp(2 pi i a / tau)`.
pub fn reduce_to_transversal(a: &CMat, t: &Transversal, tol: &Tolerances) -> Result<TransversalBranch> {
    let n = check_square(a)?;
    check_finite(a)?;
    if n == 0 {
        return Ok(TransversalBranch {
            matrix: a.clone(),
            shifts: Vec::new(),
            near_boundary: Vec::new(),
            warnings: Vec::new(),
        });
    }
    let cs = clustered_schur(a, tol)?;
    let radius = tol.edge_radius(a.norm());
    let shifts: Vec<i64> = cs.centers.iter().map(|&c| t.reduce_snapped(c, radius).1).collect();
    let matrix = if shifts.iter().all(|&k| k == 0) {
        a.clone()
    } else {
        schur_parlett(&cs, &|j, block| {
            let k = block.nrows();
            block - CMat::identity(k, k) * (t.tau * shifts[j] as f64)
        })?
    };
    let warnings = straddle_warnings(&cs, t, &|z| z, &shifts, radius);
    let near_boundary = boundary_report(t, tol, &matrix)?;
    Ok(TransversalBranch {
        matrix,
        shifts: cs.centers.iter().copied().zip(shifts).collect(),
        near_boundary,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau() -> C64 {
        C64::new(1.0, -1.0)
    }

    fn strip() -> Transversal {
        Transversal::new(tau(), 0.0).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_examples() {
        let z = mat_exp(&CMat::zeros(2, 2)).unwrap();
        assert!((z - CMat::identity(2, 2)).norm() < 1e-15);
        let d = CMat::from_row_slice(2, 2, &[c(2f64.ln(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = mat_exp(&d).unwrap();
        assert!((e[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - c(1.0, 0.0)).norm() < 1e-14);
        let n = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = mat_exp(&n).unwrap();
        assert!((e - CMat::identity(2, 2) - n).norm() < 1e-15);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = log_transversal(&CMat::identity(3, 3), &strip(), &Tolerances::default()).unwrap();
        assert!(l.matrix.norm() < 1e-15);
    }

    #[test]
    fn scalar_log_lands_in_strip() {
        let m = CMat::from_element(1, 1, (TWO_PI_I * 0.3).exp());
        let l = log_transversal(&m, &strip(), &Tolerances::default()).unwrap();
        assert!((l.matrix[(0, 0)] - tau() * 0.3).norm() < 1e-14);
    }

    #[test]
    fn unipotent_log() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let l = log_transversal(&m, &strip(), &Tolerances::default()).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), tau() / TWO_PI_I, c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((&l.matrix - expected).norm() < 1e-14);
        let back = mat_exp(&(l.matrix * (TWO_PI_I / tau()))).unwrap();
        assert!((back - m).norm() < 1e-13);
    }

    #[test]
    fn singular_log_is_rejected() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            log_transversal(&m, &strip(), &Tolerances::default()),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn reduce_examples() {
        let tol = Tolerances::default();
        let a = CMat::from_element(1, 1, tau() * 1.3);
        let r = reduce_to_transversal(&a, &strip(), &tol).unwrap();
        assert!((r.matrix[(0, 0)] - tau() * 0.3).norm() < 1e-14);
        assert_eq!(r.shifts[0].1, 1);

        let inside = CMat::from_row_slice(2, 2, &[tau() * 0.2, c(1.0, 0.0), c(0.0, 0.0), tau() * 0.7]);
        let r = reduce_to_transversal(&inside, &strip(), &tol).unwrap();
        assert_eq!(r.matrix, inside);
        assert!(r.shifts.iter().all(|s| s.1 == 0));
    }

    #[test]
    fn reduce_mixed_clusters_preserves_exponential() {
        let tol = Tolerances::default();
        let a = CMat::from_row_slice(3, 3, &[
            tau() * 1.3, c(1.0, 0.5), c(-0.3, 0.0),
            c(0.0, 0.0), tau() * 0.4, c(2.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), tau() * -0.9,
        ]);
        let r = reduce_to_transversal(&a, &strip(), &tol).unwrap();
        let e0 = mat_exp(&(&a * (TWO_PI_I / tau()))).unwrap();
        let e1 = mat_exp(&(&r.matrix * (TWO_PI_I / tau()))).unwrap();
        assert!((e0 - e1).norm() < 1e-10);
        for z in crate::numkit::eigenvalues(&r.matrix).unwrap() {
            assert!(strip().contains(z) || strip().boundary_distance(z) < 1e-12);
        }
        assert!((commutator(&a, &r.matrix)).norm() < 1e-10);
    }

    use crate::numkit::commutator;
}
