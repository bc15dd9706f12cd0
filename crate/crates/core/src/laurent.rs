//! Matrix-valued Laurent polynomials in `z`, the derivation `delta = tau z d/dz`,
//! the dilation `z -> q z`, and gauge transformations.
//!
//! A gauge `P` acts on a connection matrix by `A -> P^-1 A P + P^-1 delta(P)` and
//! on an equivariance matrix by `B(z) -> P(z)^-1 B(z) P(q z)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numkit::{self, CMat, SpectralData, Tolerances, C64};

/// The parameters `(tau, q)` shared by all polynomials of one computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentParams {
    pub tau: C64,
    pub q: C64,
}

impl LaurentParams {
    pub fn new(tau: C64, q: C64) -> Result<Self> {
        if tau.norm() == 0.0 || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidInput("tau must be finite and nonzero".into()));
        }
        if (q.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("|q| = {} is not 1", q.norm())));
        }
        Ok(Self { tau, q })
    }

    /// Parameters with `q = exp(2 pi i theta)`.
    pub fn from_theta(tau: C64, theta: f64) -> Result<Self> {
        Self::new(tau, (numkit::TWO_PI_I * theta).exp())
    }

    fn matches(&self, other: &Self) -> bool {
        (self.tau - other.tau).norm() <= 1e-12 * self.tau.norm().max(1.0)
            && (self.q - other.q).norm() <= 1e-12
    }
}

/// `n x n` matrix Laurent polynomial stored sparsely by power.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMat {
    dim: usize,
    terms: BTreeMap<i32, CMat>,
    params: LaurentParams,
}

/// A truncated series result together with the size of the first dropped order.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub value: PolyMat,
    pub tail_norm: f64,
}

fn is_zero(m: &CMat) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

impl PolyMat {
    pub fn zero(dim: usize, params: LaurentParams) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
            params,
        }
    }

    pub fn constant(m: CMat, params: LaurentParams) -> Result<Self> {
        Self::monomial(0, m, params)
    }

    pub fn identity(dim: usize, params: LaurentParams) -> Self {
        let mut p = Self::zero(dim, params);
        p.set(0, CMat::identity(dim, dim));
        p
    }

    pub fn monomial(power: i32, m: CMat, params: LaurentParams) -> Result<Self> {
        let dim = numkit::check_square(&m)?;
        numkit::check_finite(&m)?;
        let mut p = Self::zero(dim, params);
        p.set(power, m);
        Ok(p)
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (i32, CMat)>,
        params: LaurentParams,
    ) -> Result<Self> {
        let mut p = Self::zero(dim, params);
        for (k, m) in terms {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient of z^{k} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            numkit::check_finite(&m)?;
            let sum = p.coef(k) + m;
            p.set(k, sum);
        }
        Ok(p)
    }

    fn set(&mut self, power: i32, m: CMat) {
        if is_zero(&m) {
            self.terms.remove(&power);
        } else {
            self.terms.insert(power, m);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> LaurentParams {
        self.params
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CMat)> {
        self.terms.iter().map(|(k, m)| (*k, m))
    }

    /// Coefficient of `z^power` (zero if absent).
    pub fn coef(&self, power: i32) -> CMat {
        self.terms
            .get(&power)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.dim, self.dim))
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    /// Frobenius norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|m| m.norm_squared()).fold(0.0, |s, x| s + x).sqrt()
    }

    /// Frobenius norm of all coefficients except the constant one.
    pub fn nonconstant_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(_, m)| m.norm_squared())
            .fold(0.0, |s, x| s + x)
            .sqrt()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{} Laurent matrices",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        if !self.params.matches(&other.params) {
            return Err(Error::ParameterMismatch(
                "Laurent matrices carry different (tau, q)".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, m) in &other.terms {
            let s = out.coef(*k) + m;
            out.set(*k, s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut acc: BTreeMap<i32, CMat> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let e = acc
                    .entry(i + j)
                    .or_insert_with(|| CMat::zeros(self.dim, self.dim));
                *e += a * b;
            }
        }
        let mut out = Self::zero(self.dim, self.params);
        for (k, m) in acc {
            out.set(k, m);
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.dim, self.params);
        for (k, m) in &self.terms {
            out.set(*k, m * c);
        }
        out
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul_const(&self, m: &CMat) -> Self {
        let mut out = Self::zero(self.dim, self.params);
        for (k, c) in &self.terms {
            out.set(*k, m * c);
        }
        out
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul_const(&self, m: &CMat) -> Self {
        let mut out = Self::zero(self.dim, self.params);
        for (k, c) in &self.terms {
            out.set(*k, c * m);
        }
        out
    }

    /// `delta = tau z d/dz`: the coefficient of `z^k` is multiplied by `tau k`.
    pub fn delta(&self) -> Self {
        let mut out = Self::zero(self.dim, self.params);
        for (k, m) in &self.terms {
            out.set(*k, m * (self.params.tau * *k as f64));
        }
        out
    }

    /// `F(z) -> F(q z)`: the coefficient of `z^k` is multiplied by `q^k`.
    pub fn q_dilate(&self) -> Self {
        let mut out = Self::zero(self.dim, self.params);
        for (k, m) in &self.terms {
            out.set(*k, m * self.params.q.powi(*k));
        }
        out
    }

    /// Drops every power above `max_power`.
    pub fn truncate(&self, max_power: i32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|k, _| *k <= max_power);
        out
    }

    /// Series inverse `G` with `F G = I` through order `k`; `F` must start at
    /// `z^0` with an invertible constant term.
    pub fn truncated_inverse(&self, k: usize) -> Result<Truncated> {
        if let Some(lo) = self.min_power() {
            if lo < 0 {
                return Err(Error::InvalidInput(format!(
                    "series inverse needs no negative powers, found z^{lo}"
                )));
            }
        }
        let f0_inv = numkit::inverse(&self.coef(0), "constant term of the series is singular")?;
        let mut g: Vec<CMat> = vec![f0_inv.clone()];
        for order in 1..=(k + 1) {
            let mut acc = CMat::zeros(self.dim, self.dim);
            for i in 1..=order {
                if let Some(fi) = self.terms.get(&(i as i32)) {
                    acc += fi * &g[order - i];
                }
            }
            g.push(-(&f0_inv * acc));
        }
        let tail_norm = g[k + 1].norm();
        g.truncate(k + 1);
        let value = Self::from_terms(
            self.dim,
            g.into_iter().enumerate().map(|(i, m)| (i as i32, m)),
            self.params,
        )?;
        Ok(Truncated { value, tail_norm })
    }

    /// Sets to exactly zero every coefficient entry of norm at most `threshold`.
    pub fn prune(&self, threshold: f64) -> Self {
        let mut out = Self::zero(self.dim, self.params);
        for (k, m) in &self.terms {
            let cleaned = m.map(|z| if z.norm() <= threshold { C64::new(0.0, 0.0) } else { z });
            out.set(*k, cleaned);
        }
        out
    }
}

/// If every column of `p` is supported on a single power, returns the
/// factorization `p = c diag(z^e)`.
fn as_monomial_gauge(p: &PolyMat) -> Option<ShearStep> {
    let n = p.dim();
    let mut c = CMat::zeros(n, n);
    let mut exponents = vec![0i32; n];
    for j in 0..n {
        let mut found: Option<i32> = None;
        for (k, m) in p.terms() {
            if m.column(j).iter().any(|z| z.norm() != 0.0) {
                if found.is_some() {
                    return None;
                }
                found = Some(k);
            }
        }
        let k = found?;
        exponents[j] = k;
        c.set_column(j, &p.coef(k).column(j));
    }
    Some(ShearStep {
        similarity: c,
        exponents,
    })
}

/// Gauge transform of a connection matrix, `P^-1 A P + P^-1 delta(P)`.
///
/// Exact when `P` is a constant matrix times a diagonal of monomials;
/// otherwise `P` must be a power series with invertible constant term and the
/// result is truncated at `z^k`.
pub fn gauge_transform(a: &PolyMat, p: &PolyMat, k: usize) -> Result<Truncated> {
    a.check_compatible(p)?;
    if let Some(step) = as_monomial_gauge(p) {
        return Ok(Truncated {
            value: step.apply_connection(a)?,
            tail_norm: 0.0,
        });
    }
    let pinv = p.truncated_inverse(k + 1)?;
    let full = pinv.value.mul(a)?.mul(p)?.add(&pinv.value.mul(&p.delta())?)?;
    let tail_norm = full.coef(k as i32 + 1).norm();
    Ok(Truncated {
        value: full.truncate(k as i32),
        tail_norm,
    })
}

/// Gauge transform of an equivariance matrix, `P(z)^-1 B(z) P(q z)`, with the
/// same exactness rules as [`gauge_transform`]. Powers above `k + min_power(B)`
/// are dropped, since those are the first ones touched by the truncation.
pub fn gauge_equivariance(b: &PolyMat, p: &PolyMat, k: usize) -> Result<Truncated> {
    b.check_compatible(p)?;
    if let Some(step) = as_monomial_gauge(p) {
        return Ok(Truncated {
            value: step.apply_equivariance(b)?,
            tail_norm: 0.0,
        });
    }
    let lo = b.min_power().unwrap_or(0);
    let pinv = p.truncated_inverse(k + 1)?;
    let full = pinv.value.mul(b)?.mul(&p.q_dilate())?;
    let cut = k as i32 + lo;
    Ok(Truncated {
        tail_norm: full.coef(cut + 1).norm(),
        value: full.truncate(cut),
    })
}

/// A shearing gauge `P = similarity * diag(z^exponents)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearStep {
    pub similarity: CMat,
    pub exponents: Vec<i32>,
}

impl ShearStep {
    fn similarity_inv(&self) -> Result<CMat> {
        numkit::inverse(&self.similarity, "shear similarity")
    }

    /// Moves entry `(i, j)` of each coefficient of `m` by `z^(e_j - e_i)`,
    /// scaling it by `weight(j)`.
    fn conjugate_diag(m: &PolyMat, e: &[i32], weight: impl Fn(usize) -> C64) -> PolyMat {
        let n = m.dim();
        let mut acc: BTreeMap<i32, CMat> = BTreeMap::new();
        for (k, c) in m.terms() {
            for i in 0..n {
                for j in 0..n {
                    let v = c[(i, j)];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    let p = k + e[j] - e[i];
                    acc.entry(p).or_insert_with(|| CMat::zeros(n, n))[(i, j)] += v * weight(j);
                }
            }
        }
        let mut out = PolyMat::zero(n, m.params());
        for (k, c) in acc {
            out.set(k, c);
        }
        out
    }

    pub fn apply_connection(&self, a: &PolyMat) -> Result<PolyMat> {
        let sinv = self.similarity_inv()?;
        let conj = a.left_mul_const(&sinv).right_mul_const(&self.similarity);
        let moved = Self::conjugate_diag(&conj, &self.exponents, |_| C64::new(1.0, 0.0));
        let shift = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            a.dim(),
            self.exponents.iter().map(|&e| a.params().tau * e as f64),
        ));
        moved.add(&PolyMat::constant(shift, a.params())?)
    }

    pub fn apply_equivariance(&self, b: &PolyMat) -> Result<PolyMat> {
        let sinv = self.similarity_inv()?;
        let conj = b.left_mul_const(&sinv).right_mul_const(&self.similarity);
        let q = b.params().q;
        Ok(Self::conjugate_diag(&conj, &self.exponents, |j| {
            q.powi(self.exponents[j])
        }))
    }

    /// Inverse gauge applied to a connection matrix.
    pub fn undo_connection(&self, a: &PolyMat) -> Result<PolyMat> {
        let neg: Vec<i32> = self.exponents.iter().map(|e| -e).collect();
        let shift = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            a.dim(),
            self.exponents.iter().map(|&e| a.params().tau * e as f64),
        ));
        let moved = Self::conjugate_diag(a, &neg, |_| C64::new(1.0, 0.0))
            .sub(&PolyMat::constant(shift, a.params())?)?;
        let sinv = self.similarity_inv()?;
        Ok(moved.left_mul_const(&self.similarity).right_mul_const(&sinv))
    }

    /// Inverse gauge applied to an equivariance matrix.
    pub fn undo_equivariance(&self, b: &PolyMat) -> Result<PolyMat> {
        let neg: Vec<i32> = self.exponents.iter().map(|e| -e).collect();
        let q = b.params().q;
        let moved = Self::conjugate_diag(b, &neg, |j| q.powi(-self.exponents[j]));
        let sinv = self.similarity_inv()?;
        Ok(moved.left_mul_const(&self.similarity).right_mul_const(&sinv))
    }
}

/// Composite gauge produced by normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeRecord {
    pub shears: Vec<ShearStep>,
    /// Power-series gauge `P = I + P_1 z + ...`.
    pub series: PolyMat,
    pub truncation: usize,
}

impl GaugeRecord {
    pub fn identity(dim: usize, params: LaurentParams) -> Self {
        Self {
            shears: Vec::new(),
            series: PolyMat::identity(dim, params),
            truncation: 1,
        }
    }
}

/// Applies the spectral similarity of the constant term of `a` followed by
/// `diag(z^k_j)` on the generalized eigenspace of cluster `j`, shifting that
/// cluster's constant-term eigenvalues by `k_j tau`.
///
/// Coupling entries that the monomial gauge would push to negative powers
/// must vanish; entries below `eps_res * (1 + ||A||)` are treated as rounding
/// noise and zeroed, anything larger is reported as a regularity violation.
pub fn shear(
    a: &PolyMat,
    spectral: &SpectralData,
    cluster_shifts: &[i32],
    tol: &Tolerances,
) -> Result<(PolyMat, ShearStep)> {
    if cluster_shifts.len() != spectral.clusters.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} shifts for {} clusters",
            cluster_shifts.len(),
            spectral.clusters.len()
        )));
    }
    if spectral.dim() != a.dim() {
        return Err(Error::DimensionMismatch("spectral data and matrix differ in size".into()));
    }
    let exponents: Vec<i32> = spectral
        .clusters
        .iter()
        .zip(cluster_shifts)
        .flat_map(|(c, &k)| std::iter::repeat(k).take(c.multiplicity))
        .collect();
    let step = ShearStep {
        similarity: spectral.similarity.clone(),
        exponents,
    };
    let conj = a
        .left_mul_const(&spectral.similarity_inv)
        .right_mul_const(&spectral.similarity);
    let noise = tol.eps_res * (1.0 + a.norm());
    let n = a.dim();
    let mut cleaned = PolyMat::zero(n, a.params());
    for (k, c) in conj.terms() {
        let mut c = c.clone();
        for i in 0..n {
            for j in 0..n {
                if k + step.exponents[j] - step.exponents[i] < 0 && c[(i, j)].norm() <= noise {
                    c[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        cleaned.set(k, c);
    }
    let moved = ShearStep::conjugate_diag(&cleaned, &step.exponents, |_| C64::new(1.0, 0.0));
    let shift = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        step.exponents.iter().map(|&e| a.params().tau * e as f64),
    ));
    let out = moved.add(&PolyMat::constant(shift, a.params())?)?;
    check_regular(&out)?;
    Ok((out, step))
}

/// Errors if `a` has a nonzero coefficient at a negative power.
pub fn check_regular(a: &PolyMat) -> Result<()> {
    for (k, m) in a.terms() {
        if k < 0 {
            return Err(Error::RegularityViolation {
                power: k,
                norm: m.norm(),
            });
        }
    }
    Ok(())
}
