//! Dense complex linear algebra used throughout the crate: clustered Schur
//! forms, Sylvester solves, matrix functions with a prescribed logarithm
//! branch, and the modular utilities for the lattice parameter `tau`.

mod funm;
mod modular;
mod schur;
mod spectral;
mod sylvester;

pub use funm::{log_transversal, mat_exp, reduce_to_transversal, TransversalBranch};
pub use modular::{find_small_width, moebius, wd, SmallWidth, SL2Z};
pub use spectral::{spectral, Cluster, SpectralData};
pub use sylvester::solve_sylvester;

pub(crate) use schur::schur;


use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix.
pub type CMat = DMatrix<C64>;

pub const TWO_PI_I: C64 = C64::new(0.0, 2.0 * std::f64::consts::PI);

/// Numerical thresholds shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Radius used to merge nearby eigenvalues into one cluster.
    pub eps_spec: f64,
    /// Residual acceptance and rank-decision threshold.
    pub eps_res: f64,
    /// Radius for identifying K-theory keys and divisor points.
    pub eps_key: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_spec: 1e-8,
            eps_res: 1e-9,
            eps_key: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn new(eps_spec: f64, eps_res: f64, eps_key: f64) -> Result<Self> {
        let tol = Self {
            eps_spec,
            eps_res,
            eps_key,
        };
        tol.validate()?;
        Ok(tol)
    }

    /// Distance from a strip edge within which eigenvalues are snapped to the
    /// left edge and flagged. Wider than the clustering radius because
    /// defective eigenvalues split by roughly the square root of the
    /// perturbation.
    pub fn edge_radius(&self, norm: f64) -> f64 {
        1e2 * self.eps_spec * norm.max(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.eps_spec, self.eps_res, self.eps_key]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !all_positive {
            return Err(Error::InvalidTolerances(
                "all tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.eps_spec >= 1e-2 {
            return Err(Error::InvalidTolerances(format!(
                "eps_spec = {} must be below 1e-2",
                self.eps_spec
            )));
        }
        Ok(())
    }
}

/// A strip `{z : a <= Re(z / tau) < a + 1}` meeting every coset of `tau Z`
/// exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transversal {
    pub tau: C64,
    pub offset: f64,
}

impl Transversal {
    pub fn new(tau: C64, offset: f64) -> Result<Self> {
        if !(tau.re.is_finite() && tau.im.is_finite()) || tau.norm() == 0.0 {
            return Err(Error::InvalidInput("tau must be finite and nonzero".into()));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidInput("transversal offset must be finite".into()));
        }
        Ok(Self { tau, offset })
    }

    /// Coordinate of `z` across the strip, `Re(z / tau)`.
    pub fn coordinate(&self, z: C64) -> f64 {
        (z / self.tau).re
    }

    /// Returns `(representative, shift)` with `representative = lambda - shift * tau`
    /// inside the strip.
    pub fn reduce(&self, lambda: C64) -> (C64, i64) {
        let shift = (self.coordinate(lambda) - self.offset).floor();
        let mut rep = lambda - self.tau * shift;
        let mut shift = shift as i64;
        // floor of a value like a+1-1e-17 can leave the representative on the closed edge
        let s = self.coordinate(rep) - self.offset;
        if s >= 1.0 {
            rep -= self.tau;
            shift += 1;
        } else if s < 0.0 {
            rep += self.tau;
            shift -= 1;
        }
        (rep, shift)
    }

    pub fn contains(&self, z: C64) -> bool {
        let s = self.coordinate(z) - self.offset;
        (0.0..1.0).contains(&s)
    }

    /// Euclidean distance from `z` to the nearer of the two strip edges.
    pub fn boundary_distance(&self, z: C64) -> f64 {
        let s = self.coordinate(z) - self.offset;
        s.min(1.0 - s).abs() * self.tau.norm()
    }

    /// Like [`reduce`](Self::reduce), but a representative within `radius`
    /// of the right edge is moved to the left edge, so that values equal up
    /// to rounding reduce to the same place.
    pub fn reduce_snapped(&self, z: C64, radius: f64) -> (C64, i64) {
        let (rep, k) = self.reduce(z);
        let s = self.coordinate(rep) - self.offset;
        if (1.0 - s) * self.tau.norm() <= radius {
            (rep - self.tau, k + 1)
        } else {
            (rep, k)
        }
    }

    /// Strip representative of `z` with the right-edge snapping of
    /// [`reduce_snapped`](Self::reduce_snapped).
    pub fn canonical_key(&self, z: C64, radius: f64) -> C64 {
        self.reduce_snapped(z, radius).0
    }

    /// Distance between the classes of `z` and `w` in `C / tau Z`.
    pub fn quotient_distance(&self, z: C64, w: C64) -> f64 {
        let d = z - w;
        (d - self.tau * (d / self.tau).re.round()).norm()
    }
}

/// Returns `(representative, shift)` for `lambda` modulo `tau Z` in `t`.
pub fn reduce_mod_transversal(lambda: C64, t: &Transversal) -> (C64, i64) {
    t.reduce(lambda)
}

pub(crate) fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    sorted_svd(m).1.first().copied().unwrap_or(0.0)
}

/// Full SVD with singular values sorted in decreasing order.
///
/// Returns `(U, sigma, V)` where `V` is square (`ncols x ncols`), so the
/// trailing columns of `V` span the null space even for wide inputs.
pub(crate) fn sorted_svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (rows, cols) = m.shape();
    // pad wide matrices so nalgebra returns a complete right basis
    let padded = if rows < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = CMat::from_fn(cols, order.len(), |r, c| vt[(order[c], r)].conj());
    let u = CMat::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let u = u.rows(0, rows).into_owned();
    (u, sigma, v)
}

/// Orthonormal basis of the null space of `m`, with rank decided by the
/// threshold `eps_res * ||m||_2`.
pub fn nullspace(m: &CMat, eps_res: f64) -> CMat {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return identity(cols);
    }
    let (_, sigma, v) = sorted_svd(m);
    let norm = sigma.first().copied().unwrap_or(0.0);
    let threshold = eps_res * norm;
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    v.columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis of the null space of `m`, counting singular values at
/// or below the absolute `threshold` as zero.
pub(crate) fn nullspace_abs(m: &CMat, threshold: f64) -> CMat {
    let cols = m.ncols();
    if m.nrows() == 0 || cols == 0 {
        return identity(cols);
    }
    let (_, sigma, v) = sorted_svd(m);
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    v.columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis of the column space of `m`.
pub(crate) fn range_basis(m: &CMat, eps_res: f64) -> CMat {
    let complement = nullspace(&m.adjoint(), eps_res);
    orthonormal_complement(&complement)
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// (orthonormal) columns of `v`.
pub(crate) fn orthonormal_complement(v: &CMat) -> CMat {
    let n = v.nrows();
    if v.ncols() == 0 {
        return identity(n);
    }
    let (_, sigma, w) = sorted_svd(&v.adjoint());
    let rank = sigma.iter().filter(|&&s| s > 0.5).count();
    w.columns(rank, n - rank).into_owned()
}

/// Right singular vector of the smallest singular value, with that value.
pub(crate) fn smallest_singular_pair(m: &CMat) -> (nalgebra::DVector<C64>, f64) {
    let (_, sigma, v) = sorted_svd(m);
    let k = v.ncols() - 1;
    let s = if m.nrows() < m.ncols() {
        0.0
    } else {
        sigma[k]
    };
    (v.column(k).into_owned(), s)
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    let (_, sigma, _) = sorted_svd(m);
    sigma.last().copied().unwrap_or(0.0)
}

pub(crate) fn inverse(m: &CMat, what: &str) -> Result<CMat> {
    check_square(m)?;
    m.clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::Singular(what.to_string()))
}

/// Block diagonal matrix with the given square blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((at, at), (k, k)).copy_from(b);
        at += k;
    }
    out
}

/// Eigenvalues of a square matrix from its Schur form, unordered.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = schur::schur(m)?;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}
