//! The polynomial noncommutative torus `A_theta` generated by `U1, U2` with
//! `U2 U1 = e^{2 pi i theta} U1 U2`, its derivations and SL(2, Z)
//! automorphisms, the functor into free holomorphic bundles, and the
//! K-theoretic data on the elliptic curve `C / (Z + tau Z)`.

mod divisor;
mod kdata;
mod nori;
mod psi;
mod sigma;

pub use divisor::{divisor_equivalent, kmap, DivisorXtau};
pub use kdata::{phase, ps_k_swap, stability_z, std_bundle_data, PsSwap, StdBundleData};
pub use nori::{is_nori_finite, NoriReport};
pub use psi::{
    build_extension, psi_embed, psi_intertwining_residual, psi_star, Extension, FrVectObj,
};
pub use sigma::{check_intertwine, omega_action, sigma_apply, sigma_inverse_word, Gen};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numkit::{C64, TWO_PI_I};

/// A finitely supported element `sum c_{n1,n2} U1^n1 U2^n2`, normal ordered
/// with `U1` powers to the left.
#[derive(Debug, Clone, PartialEq)]
pub struct AElem {
    theta: f64,
    coeffs: BTreeMap<(i64, i64), C64>,
}

impl AElem {
    pub fn zero(theta: f64) -> Self {
        Self {
            theta,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(theta: f64) -> Self {
        Self::monomial(theta, 0, 0, C64::new(1.0, 0.0))
    }

    pub fn scalar(theta: f64, c: C64) -> Self {
        Self::monomial(theta, 0, 0, c)
    }

    pub fn monomial(theta: f64, n1: i64, n2: i64, c: C64) -> Self {
        Self::from_coeffs(theta, [((n1, n2), c)])
    }

    pub fn u1(theta: f64) -> Self {
        Self::monomial(theta, 1, 0, C64::new(1.0, 0.0))
    }

    pub fn u2(theta: f64) -> Self {
        Self::monomial(theta, 0, 1, C64::new(1.0, 0.0))
    }

    /// Sums repeated keys and drops zero coefficients.
    pub fn from_coeffs(theta: f64, coeffs: impl IntoIterator<Item = ((i64, i64), C64)>) -> Self {
        let mut out = Self::zero(theta);
        for (k, c) in coeffs {
            out.accumulate(k, c);
        }
        out
    }

    fn accumulate(&mut self, key: (i64, i64), c: C64) {
        let v = *self.coeffs.get(&key).unwrap_or(&C64::new(0.0, 0.0)) + c;
        if v == C64::new(0.0, 0.0) {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, v);
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ((i64, i64), C64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coef(&self, n1: i64, n2: i64) -> C64 {
        self.coeffs.get(&(n1, n2)).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether the element lies in `C 1`.
    pub fn is_scalar(&self) -> bool {
        self.coeffs.keys().all(|&k| k == (0, 0))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).fold(0.0, |s, x| s + x).sqrt()
    }

    fn check_theta(&self, other: &Self) -> Result<()> {
        if self.theta != other.theta {
            return Err(Error::ParameterMismatch(format!(
                "theta {} vs {}",
                self.theta, other.theta
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        let mut out = self.clone();
        for (k, c) in other.coeffs() {
            out.accumulate(k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_coeffs(self.theta, self.coeffs().map(|(k, c)| (k, c * s)))
    }

    /// Product with `(U1^a U2^b)(U1^c U2^d) = e^{2 pi i theta b c} U1^{a+c} U2^{b+d}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        let mut out = Self::zero(self.theta);
        for (&(a, b), x) in &self.coeffs {
            for (&(c, d), y) in &other.coeffs {
                out.accumulate((a + c, b + d), x * y * swap_phase(self.theta, b, c));
            }
        }
        Ok(out)
    }

    fn map_monomials(&self, weight: impl Fn(i64, i64) -> C64) -> Self {
        Self::from_coeffs(self.theta, self.coeffs().map(|((n1, n2), c)| ((n1, n2), c * weight(n1, n2))))
    }

    /// `delta_j(U_i) = 2 pi i delta_ij U_i`.
    pub fn delta_j(&self, j: u8) -> Result<Self> {
        match j {
            1 => Ok(self.map_monomials(|n1, _| TWO_PI_I * n1 as f64)),
            2 => Ok(self.map_monomials(|_, n2| TWO_PI_I * n2 as f64)),
            _ => Err(Error::InvalidInput(format!("derivation index {j} must be 1 or 2"))),
        }
    }

    /// `delta_w = w1 delta_1 + w2 delta_2`.
    pub fn delta_omega(&self, w: &Omega) -> Self {
        self.map_monomials(|n1, n2| TWO_PI_I * (w.w1 * n1 as f64 + w.w2 * n2 as f64))
    }
}

/// Phase from moving `U2^b` past `U1^c`: `U2^b U1^c = e^{2 pi i theta b c} U1^c U2^b`.
fn swap_phase(theta: f64, b: i64, c: i64) -> C64 {
    // reduce theta * b * c mod 1 before exponentiating to keep the argument small
    let t = (theta * b as f64 * c as f64).rem_euclid(1.0);
    (TWO_PI_I * t).exp()
}

pub fn a_mul(x: &AElem, y: &AElem) -> Result<AElem> {
    x.mul(y)
}

/// Direction `(w1, w2)` of the derivation `delta_w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega {
    pub w1: C64,
    pub w2: C64,
}

impl Omega {
    pub fn new(w1: C64, w2: C64) -> Result<Self> {
        if w1 == C64::new(0.0, 0.0) && w2 == C64::new(0.0, 0.0) {
            return Err(Error::InvalidInput("omega must be nonzero".into()));
        }
        Ok(Self { w1, w2 })
    }

    /// `delta_tau = tau delta_1 + delta_2`.
    pub fn tau(tau: C64) -> Self {
        Self {
            w1: tau,
            w2: C64::new(1.0, 0.0),
        }
    }
}
