use super::{validate, BqObject, NormalDiagnostics, NormalForm};
use crate::error::{Error, Result};
use crate::laurent::{check_regular, gauge_equivariance, gauge_transform, shear, GaugeRecord, PolyMat, ShearStep};
use crate::numkit::{identity, solve_sylvester, spectral, CMat, Tolerances, Transversal};

const MAX_SHEAR_PASSES: usize = 4096;

/// Brings a regular object to a normal form `(A0, B0)` whose `A0` has its
/// spectrum in `t`.
///
/// Clusters of the constant term are first sheared one step at a time until
/// every eigenvalue lies in the strip; the remaining power-series gauge
/// `P = I + P_1 z + ...` is solved order by order from
/// `(A0 + k tau) P_k - P_k A0 = -(A_k + sum_{0<i<k} A_{k-i} P_i)` up to
/// order `truncation`. The same gauge is then applied to `B`, which must come
/// out constant.
pub fn normalize(obj: &BqObject, t: &Transversal, truncation: usize, tol: &Tolerances) -> Result<NormalForm> {
    tol.validate()?;
    if (t.tau - obj.tau()).norm() > 1e-12 * t.tau.norm().max(1.0) {
        return Err(Error::ParameterMismatch("transversal built for a different tau".into()));
    }
    validate(obj, tol)?;
    let n = obj.dim();
    let params = obj.params();
    let tau = params.tau;

    let mut a = obj.a.clone();
    let mut b = obj.b.clone();
    let mut shears = Vec::new();
    let mut remaining = usize::MAX;
    loop {
        let spec = spectral(&a.coef(0), tol)?;
        let slack = tol.edge_radius(a.coef(0).norm());
        let ks: Vec<i64> = spec
            .clusters
            .iter()
            .map(|c| t.reduce_snapped(c.eigenvalue, slack).1)
            .collect();
        let total: usize = ks.iter().map(|k| k.unsigned_abs() as usize).sum();
        if total == 0 {
            break;
        }
        if total >= remaining || shears.len() >= MAX_SHEAR_PASSES {
            return Err(Error::NoConvergence {
                iterations: shears.len(),
            });
        }
        remaining = total;
        let raise = ks.iter().any(|&k| k > 0);
        let steps: Vec<i32> = ks
            .iter()
            .map(|&k| match (raise, k) {
                (true, k) if k > 0 => -1,
                (false, k) if k < 0 => 1,
                _ => 0,
            })
            .collect();
        let (next, step) = shear(&a, &spec, &steps, tol)?;
        b = step.apply_equivariance(&b)?;
        a = next;
        shears.push(step);
    }

    let a0 = a.coef(0);
    let mut coeffs: Vec<CMat> = vec![identity(n)];
    for k in 1..=truncation + 1 {
        let mut rhs = a.coef(k as i32);
        for (i, p) in coeffs.iter().enumerate().skip(1) {
            rhs += a.coef((k - i) as i32) * p;
        }
        let shifted = &a0 + identity(n) * (tau * k as f64);
        coeffs.push(solve_sylvester(&shifted, &a0, &(-rhs), tol)?);
    }
    let truncation_tail = coeffs[truncation + 1].norm();
    coeffs.truncate(truncation + 1);
    let p = PolyMat::from_terms(n, coeffs.into_iter().enumerate().map(|(k, c)| (k as i32, c)), params)?;

    let lhs = a.mul(&p)?.add(&p.delta())?;
    let rhs = p.right_mul_const(&a0);
    let a_residual = lhs.sub(&rhs)?.truncate(truncation as i32).norm();

    let lo = b.min_power().unwrap_or(0);
    if truncation as i32 + lo < 0 {
        return Err(Error::InvalidInput(format!(
            "truncation {truncation} is too small for B with a z^{lo} term after shearing"
        )));
    }
    let bt = gauge_equivariance(&b, &p, truncation)?;
    let b_residual = bt.value.nonconstant_norm();
    let pn = p.norm();
    let bound = tol.eps_res * (1.0 + b.norm()) * (1.0 + pn) * (1.0 + pn);
    if b_residual > bound {
        return Err(Error::NonConstantB {
            residual: b_residual,
            bound,
            truncation,
        });
    }
    let mut nf = NormalForm {
        a0,
        b0: bt.value.coef(0),
        transversal: *t,
        theta: obj.theta,
        gauge: GaugeRecord {
            shears,
            series: p,
            truncation,
        },
        diagnostics: NormalDiagnostics {
            a_residual,
            b_residual,
            truncation_tail,
            ..Default::default()
        },
    };
    nf.diagnostics.shear_passes = nf.gauge.shears.len();
    nf.check(tol)?;
    if !nf.diagnostics.near_boundary.is_empty() {
        nf.diagnostics
            .warnings
            .push("eigenvalues of A0 lie at a strip edge".into());
    }
    Ok(nf)
}

/// Moves a normal form away from normal position: applies each shear step
/// and then the gauge `p` (invertible constant term), keeping powers up to
/// `z^k`. The result normalizes back to an object isomorphic to `nf`.
/// Entries pushed to negative powers must be rounding noise (at most
/// `eps_res (1 + ||A||)`); they are dropped.
pub fn scramble(nf: &NormalForm, shears: &[ShearStep], p: &PolyMat, k: usize, tol: &Tolerances) -> Result<BqObject> {
    let obj = nf.to_object()?;
    let (mut a, mut b) = (obj.a, obj.b);
    for step in shears {
        a = step.apply_connection(&a)?;
        b = step.apply_equivariance(&b)?;
        let noise = tol.eps_res * (1.0 + a.norm());
        let low: Vec<i32> = a.terms().map(|(j, _)| j).filter(|&j| j < 0).collect();
        for j in low {
            if a.coef(j).norm() > noise {
                break;
            }
            a = a.sub(&PolyMat::monomial(j, a.coef(j), a.params())?)?;
        }
    }
    let a = gauge_transform(&a, p, k)?.value;
    let b = gauge_equivariance(&b, p, k)?.value;
    check_regular(&a)?;
    BqObject::new(a, b, nf.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentParams;
    use crate::numkit::{eigenvalues, C64};

    const THETA: f64 = 0.618_033_988_749_894_9;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tau() -> C64 {
        c(1.0, -1.0)
    }

    fn params() -> LaurentParams {
        LaurentParams::from_theta(tau(), THETA).unwrap()
    }

    fn m2(v: [C64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &v)
    }

    #[test]
    fn constant_object_in_strip_is_fixed() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        let a = m2([c(0.2, 0.1), c(0.0, 0.0), c(0.0, 0.0), c(0.3, -0.4)]);
        let b = m2([c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let obj = BqObject::new(
            PolyMat::constant(a.clone(), params()).unwrap(),
            PolyMat::constant(b.clone(), params()).unwrap(),
            THETA,
        )
        .unwrap();
        let nf = normalize(&obj, &t, 8, &tol).unwrap();
        assert!((&nf.a0 - a).norm() < 1e-14);
        assert!((&nf.b0 - b).norm() < 1e-14);
        assert_eq!(nf.diagnostics.shear_passes, 0);
    }

    #[test]
    fn scalar_shift_is_removed() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        let z = c(0.25, 0.1) + tau() * 3.0;
        let obj = BqObject::new(
            PolyMat::constant(CMat::from_element(1, 1, z), params()).unwrap(),
            PolyMat::constant(CMat::from_element(1, 1, c(2.0, 0.0)), params()).unwrap(),
            THETA,
        )
        .unwrap();
        let nf = normalize(&obj, &t, 4, &tol).unwrap();
        assert!((nf.a0[(0, 0)] - c(0.25, 0.1)).norm() < 1e-13);
        // z^-3 gauge multiplies B by q^-3
        let q = params().q;
        assert!((nf.b0[(0, 0)] - q.powi(-3) * 2.0).norm() < 1e-13);
        assert_eq!(nf.diagnostics.shear_passes, 3);
    }

    #[test]
    fn resonant_pair_becomes_jordan_block() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        let q = params().q;
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let a = PolyMat::from_terms(
            2,
            [(0, m2([zero, zero, zero, tau()])), (1, m2([zero, one, zero, zero]))],
            params(),
        )
        .unwrap();
        let b = PolyMat::constant(m2([one, zero, zero, q]), params()).unwrap();
        let obj = BqObject::new(a, b, THETA).unwrap();
        let nf = normalize(&obj, &t, 16, &tol).unwrap();
        for z in eigenvalues(&nf.a0).unwrap() {
            assert!(z.norm() < 1e-12);
        }
        assert!(nf.a0.norm() > 0.5);
        assert!((&nf.a0 * &nf.a0).norm() < 1e-12);
        assert!((&nf.b0 - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn series_gauge_is_solved() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        let zero = c(0.0, 0.0);
        let a0 = m2([c(0.1, 0.0), zero, zero, c(0.4, -0.2)]);
        let b0 = m2([c(2.0, 0.0), zero, zero, c(0.5, 0.5)]);
        // G = I + N z with N^2 = 0 has polynomial inverse I - N z
        let n = m2([zero, c(1.0, 0.5), zero, zero]);
        let g = PolyMat::from_terms(2, [(0, identity(2)), (1, n.clone())], params()).unwrap();
        let ginv = PolyMat::from_terms(2, [(0, identity(2)), (1, -n)], params()).unwrap();
        let a = PolyMat::constant(a0.clone(), params()).unwrap();
        let b = PolyMat::constant(b0.clone(), params()).unwrap();
        let a_s = ginv.mul(&a).unwrap().mul(&g).unwrap().add(&ginv.mul(&g.delta()).unwrap()).unwrap();
        let b_s = ginv.mul(&b).unwrap().mul(&g.q_dilate()).unwrap();
        assert!(!a_s.is_constant());
        let obj = BqObject::new(a_s, b_s, THETA).unwrap();
        let nf = normalize(&obj, &t, 12, &tol).unwrap();
        assert!((&nf.a0 - a0).norm() < 1e-13);
        assert!((&nf.b0 - b0).norm() < 1e-13);
        assert!(nf.diagnostics.a_residual < 1e-13);
        assert!(nf.diagnostics.b_residual < 1e-13);
        assert!((nf.gauge.series.coef(1) - ginv.coef(1)).norm() < 1e-13);
    }

    #[test]
    fn nonequivariant_b_is_rejected() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        let a = PolyMat::monomial(1, CMat::from_element(1, 1, c(1.0, 0.0)), params()).unwrap();
        let obj = BqObject::new(a, PolyMat::identity(1, params()), THETA).unwrap();
        assert!(matches!(normalize(&obj, &t, 16, &tol), Err(Error::EquivarianceViolation { .. })));
    }
}
