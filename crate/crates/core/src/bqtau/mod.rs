//! Objects and morphisms of the category of `theta Z`-equivariant regular
//! singular connections `delta + A(z)` on free modules over the punctured
//! plane, with `theta Z` acting by `sigma(m)(z) = B(z) m(q z)`.

mod hom;
mod k0;
mod normalize;
mod rh;
mod tensor;

pub use hom::{cokernel, find_isomorphism, hom_basis, image, kernel, scan_nonconstant_homs};
pub use k0::{decompose, h0_dim, k0_class, K0ClassB, K0Key};
pub use normalize::{normalize, scramble};
pub use rh::{fiber_omega, functor_f};
pub use tensor::{coevaluation, dual, evaluation, tensor, triangle_identities, TriangleReport};

use crate::error::{Error, Result};
use crate::laurent::{check_regular, GaugeRecord, LaurentParams, PolyMat};
use crate::numkit::{
    self, commutator, eigenvalues, identity, smallest_singular_value, CMat, Tolerances,
    Transversal, C64,
};

/// An object `(M, sigma, nabla)` given by its connection matrix `a` and
/// equivariance matrix `b` in a basis of the free module `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BqObject {
    pub a: PolyMat,
    pub b: PolyMat,
    pub theta: f64,
    pub transversal: Option<Transversal>,
}

/// Residuals measured by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectDiagnostics {
    pub b_sigma_min: f64,
    pub equivariance_residual: f64,
    pub equivariance_bound: f64,
}

impl BqObject {
    pub fn new(a: PolyMat, b: PolyMat, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidInput(format!("theta = {theta} must lie in (0, 1)")));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "A is {0}x{0} but B is {1}x{1}",
                a.dim(),
                b.dim()
            )));
        }
        let expected = LaurentParams::from_theta(a.params().tau, theta)?;
        if (a.params().q - expected.q).norm() > 1e-12 || a.params() != b.params() {
            return Err(Error::ParameterMismatch(
                "A and B must share tau and q = exp(2 pi i theta)".into(),
            ));
        }
        Ok(Self {
            a,
            b,
            theta,
            transversal: None,
        })
    }

    pub fn with_transversal(mut self, t: Transversal) -> Self {
        self.transversal = Some(t);
        self
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn tau(&self) -> C64 {
        self.a.params().tau
    }

    pub fn params(&self) -> LaurentParams {
        self.a.params()
    }
}

/// Checks regularity of `A`, invertibility of the constant term of `B`, and
/// the equivariance identity `delta(B) + A(z) B(z) - B(z) A(q z) = 0`.
pub fn validate(obj: &BqObject, tol: &Tolerances) -> Result<ObjectDiagnostics> {
    check_regular(&obj.a)?;
    let b0 = obj.b.coef(0);
    let b_sigma_min = smallest_singular_value(&b0);
    if b_sigma_min <= tol.eps_res * b0.norm().max(1.0) {
        return Err(Error::SingularB {
            sigma_min: b_sigma_min,
        });
    }
    let residual = obj
        .b
        .delta()
        .add(&obj.a.mul(&obj.b)?)?
        .sub(&obj.b.mul(&obj.a.q_dilate())?)?
        .norm();
    let bound = tol.eps_res * (1.0 + obj.a.norm()) * (1.0 + obj.b.norm());
    if residual > bound {
        return Err(Error::EquivarianceViolation { residual, bound });
    }
    Ok(ObjectDiagnostics {
        b_sigma_min,
        equivariance_residual: residual,
        equivariance_bound: bound,
    })
}

/// Residual norms attached to a normal form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalDiagnostics {
    pub commutator: f64,
    /// `||P A0 - A P + delta P||` over the exactly computed orders.
    pub a_residual: f64,
    /// Norm of the non-constant part of the transformed `B`.
    pub b_residual: f64,
    /// Norm of the first gauge coefficient beyond the truncation order.
    pub truncation_tail: f64,
    pub shear_passes: usize,
    /// Eigenvalues of `A0` within the edge radius of a strip edge.
    pub near_boundary: Vec<C64>,
    pub warnings: Vec<String>,
}

/// An object with constant commuting `(A0, B0)` and `spec(A0)` inside a
/// fixed transversal.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub a0: CMat,
    pub b0: CMat,
    pub transversal: Transversal,
    pub theta: f64,
    pub gauge: GaugeRecord,
    pub diagnostics: NormalDiagnostics,
}

impl NormalForm {
    /// Builds a normal form from constant matrices, checking every invariant.
    pub fn from_matrices(
        a0: CMat,
        b0: CMat,
        transversal: Transversal,
        theta: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = numkit::check_square(&a0)?;
        if b0.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "A0 is {n}x{n} but B0 is {}x{}",
                b0.nrows(),
                b0.ncols()
            )));
        }
        numkit::check_finite(&a0)?;
        numkit::check_finite(&b0)?;
        let params = LaurentParams::from_theta(transversal.tau, theta)?;
        let mut nf = Self {
            a0,
            b0,
            transversal,
            theta,
            gauge: GaugeRecord::identity(n, params),
            diagnostics: NormalDiagnostics::default(),
        };
        nf.check(tol)?;
        Ok(nf)
    }

    /// Re-checks the invariants and refreshes `commutator` and `near_boundary`.
    pub(crate) fn check(&mut self, tol: &Tolerances) -> Result<()> {
        let n = self.dim();
        if n > 0 {
            let smin = smallest_singular_value(&self.b0);
            if smin <= tol.eps_res * self.b0.norm().max(1.0) {
                return Err(Error::SingularB { sigma_min: smin });
            }
        }
        let comm = commutator(&self.a0, &self.b0).norm();
        let bound = tol.eps_res * (self.a0.norm() + 1.0) * (self.b0.norm() + 1.0);
        if comm > bound {
            return Err(Error::Invariant(format!(
                "[A0, B0] has norm {comm:e} above {bound:e}"
            )));
        }
        let slack = tol.edge_radius(self.a0.norm());
        let mut near = Vec::new();
        for z in eigenvalues(&self.a0)? {
            let t = &self.transversal;
            if t.boundary_distance(z) <= slack {
                near.push(z);
            } else if !t.contains(z) {
                return Err(Error::Invariant(format!(
                    "eigenvalue {z} of A0 lies outside the strip {} <= Re(z/tau) < {}",
                    t.offset,
                    t.offset + 1.0
                )));
            }
        }
        self.diagnostics.commutator = comm;
        self.diagnostics.near_boundary = near;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.a0.nrows()
    }

    pub fn tau(&self) -> C64 {
        self.transversal.tau
    }

    pub fn q(&self) -> C64 {
        (numkit::TWO_PI_I * self.theta).exp()
    }

    pub fn params(&self) -> LaurentParams {
        LaurentParams::new(self.tau(), self.q()).expect("validated parameters")
    }

    /// The tensor unit, i.e. the image of the trivial one-dimensional
    /// representation.
    pub fn unit(transversal: Transversal, theta: f64, tol: &Tolerances) -> Result<Self> {
        let (rep, _) = transversal.reduce(C64::new(0.0, 0.0));
        Self::from_matrices(
            CMat::from_element(1, 1, rep),
            identity(1),
            transversal,
            theta,
            tol,
        )
    }

    /// The object `(O, b, delta + z')` with `z'` reduced into the strip.
    pub fn simple(b: C64, zprime: C64, transversal: Transversal, theta: f64, tol: &Tolerances) -> Result<Self> {
        let (rep, _) = transversal.reduce(zprime);
        Self::from_matrices(
            CMat::from_element(1, 1, rep),
            CMat::from_element(1, 1, b),
            transversal,
            theta,
            tol,
        )
    }

    /// As an object with constant connection and equivariance matrices.
    pub fn to_object(&self) -> Result<BqObject> {
        let p = self.params();
        Ok(BqObject::new(
            PolyMat::constant(self.a0.clone(), p)?,
            PolyMat::constant(self.b0.clone(), p)?,
            self.theta,
        )?
        .with_transversal(self.transversal))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        let (s, o) = (&self.transversal, &other.transversal);
        if (s.tau - o.tau).norm() > 1e-12 * s.tau.norm().max(1.0)
            || (self.theta - other.theta).abs() > 1e-15
        {
            return Err(Error::ParameterMismatch(
                "objects carry different (tau, theta)".into(),
            ));
        }
        if (s.offset - o.offset).abs() > 1e-15 {
            return Err(Error::TransversalMismatch);
        }
        Ok(())
    }
}

/// Direct sum of two normal forms over the same transversal.
pub fn direct_sum(x: &NormalForm, y: &NormalForm, tol: &Tolerances) -> Result<NormalForm> {
    x.check_compatible(y)?;
    NormalForm::from_matrices(
        numkit::block_diag(&[x.a0.clone(), y.a0.clone()]),
        numkit::block_diag(&[x.b0.clone(), y.b0.clone()]),
        x.transversal,
        x.theta,
        tol,
    )
}

/// A representation of `Z^2` by two commuting invertible matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RepZ2 {
    pub m1: CMat,
    pub m2: CMat,
}

impl RepZ2 {
    pub fn new(m1: CMat, m2: CMat, tol: &Tolerances) -> Result<Self> {
        let n = numkit::check_square(&m1)?;
        if m2.shape() != (n, n) {
            return Err(Error::DimensionMismatch("M1 and M2 differ in size".into()));
        }
        numkit::check_finite(&m1)?;
        numkit::check_finite(&m2)?;
        for (name, m) in [("M1", &m1), ("M2", &m2)] {
            if n > 0 && smallest_singular_value(m) <= tol.eps_res * numkit::spectral_norm(m) {
                return Err(Error::Singular(format!("{name} is not invertible")));
            }
        }
        let comm = commutator(&m1, &m2).norm();
        let bound = tol.eps_res * m1.norm() * m2.norm();
        if comm > bound {
            return Err(Error::Invariant(format!(
                "M1 and M2 do not commute: residual {comm:e} above {bound:e}"
            )));
        }
        Ok(Self { m1, m2 })
    }

    pub fn dim(&self) -> usize {
        self.m1.nrows()
    }
}

/// A morphism between normal forms: a constant matrix intertwining both
/// `A0` and `B0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    pub source: NormalForm,
    pub target: NormalForm,
    pub phi: CMat,
}

impl Morphism {
    pub fn new(source: NormalForm, target: NormalForm, phi: CMat, tol: &Tolerances) -> Result<Self> {
        source.check_compatible(&target)?;
        if phi.shape() != (target.dim(), source.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "phi is {}x{}, expected {}x{}",
                phi.nrows(),
                phi.ncols(),
                target.dim(),
                source.dim()
            )));
        }
        let m = Self { source, target, phi };
        let r = m.intertwining_residual();
        let bound = tol.eps_res * m.scale();
        if r > bound {
            return Err(Error::Invariant(format!(
                "phi does not intertwine the normal forms: residual {r:e} above {bound:e}"
            )));
        }
        Ok(m)
    }

    fn scale(&self) -> f64 {
        (1.0 + self.phi.norm())
            * (1.0 + self.source.a0.norm() + self.target.a0.norm() + self.source.b0.norm() + self.target.b0.norm())
    }

    /// `||phi A0_src - A0_tgt phi|| + ||phi B0_src - B0_tgt phi||`.
    pub fn intertwining_residual(&self) -> f64 {
        (&self.phi * &self.source.a0 - &self.target.a0 * &self.phi).norm()
            + (&self.phi * &self.source.b0 - &self.target.b0 * &self.phi).norm()
    }

    pub fn compose(&self, after: &Morphism, tol: &Tolerances) -> Result<Morphism> {
        Morphism::new(
            self.source.clone(),
            after.target.clone(),
            &after.phi * &self.phi,
            tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tau() -> C64 {
        C64::new(1.0, -1.0)
    }

    pub(crate) const THETA: f64 = 0.618_033_988_749_894_9;

    fn params() -> LaurentParams {
        LaurentParams::from_theta(tau(), THETA).unwrap()
    }

    fn s(z: C64) -> CMat {
        CMat::from_element(1, 1, z)
    }

    #[test]
    fn scalar_object_is_valid() {
        let obj = BqObject::new(
            PolyMat::constant(s(C64::new(0.3, 0.2)), params()).unwrap(),
            PolyMat::constant(s(C64::new(2.0, 0.0)), params()).unwrap(),
            THETA,
        )
        .unwrap();
        let d = validate(&obj, &Tolerances::default()).unwrap();
        assert_eq!(d.equivariance_residual, 0.0);
    }

    #[test]
    fn pole_is_a_regularity_violation() {
        let a = PolyMat::monomial(-1, s(C64::new(1.0, 0.0)), params()).unwrap();
        let obj = BqObject::new(a, PolyMat::identity(1, params()), THETA).unwrap();
        assert!(matches!(
            validate(&obj, &Tolerances::default()),
            Err(Error::RegularityViolation { power: -1, .. })
        ));
    }

    #[test]
    fn noncommuting_constants_violate_equivariance() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let a = CMat::from_row_slice(2, 2, &[one, one, zero, zero]);
        let b = CMat::from_row_slice(2, 2, &[one, zero, zero, one * 2.0]);
        let obj = BqObject::new(
            PolyMat::constant(a, params()).unwrap(),
            PolyMat::constant(b, params()).unwrap(),
            THETA,
        )
        .unwrap();
        assert!(matches!(
            validate(&obj, &Tolerances::default()),
            Err(Error::EquivarianceViolation { .. })
        ));
    }

    #[test]
    fn singular_b_is_rejected() {
        let obj = BqObject::new(
            PolyMat::zero(1, params()),
            PolyMat::monomial(1, s(C64::new(1.0, 0.0)), params()).unwrap(),
            THETA,
        )
        .unwrap();
        assert!(matches!(validate(&obj, &Tolerances::default()), Err(Error::SingularB { .. })));
    }

    #[test]
    fn normal_form_invariants() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        assert!(NormalForm::from_matrices(s(tau() * 1.5), identity(1), t, THETA, &tol).is_err());
        assert!(NormalForm::from_matrices(s(tau() * 0.5), s(C64::new(0.0, 0.0)), t, THETA, &tol).is_err());
        let edge = NormalForm::from_matrices(s(tau() * (1.0 - 1e-12)), identity(1), t, THETA, &tol).unwrap();
        assert_eq!(edge.diagnostics.near_boundary.len(), 1);
        let u = NormalForm::unit(t, THETA, &tol).unwrap();
        assert_eq!(u.a0[(0, 0)], C64::new(0.0, 0.0));
        let shifted = Transversal::new(tau(), 0.5).unwrap();
        let u = NormalForm::unit(shifted, THETA, &tol).unwrap();
        assert!((u.a0[(0, 0)] - tau()).norm() < 1e-15);
    }

    #[test]
    fn rep_invariants() {
        let tol = Tolerances::default();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let j = CMat::from_row_slice(2, 2, &[one, one, zero, one]);
        let d = CMat::from_row_slice(2, 2, &[one, zero, zero, one * 2.0]);
        assert!(RepZ2::new(j.clone(), j.clone(), &tol).is_ok());
        assert!(RepZ2::new(j, d, &tol).is_err());
        assert!(RepZ2::new(CMat::zeros(1, 1), identity(1), &tol).is_err());
    }
}
