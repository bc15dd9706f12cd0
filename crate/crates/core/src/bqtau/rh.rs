use super::{NormalForm, RepZ2};
use crate::error::Result;
use crate::numkit::{log_transversal, mat_exp, Tolerances, Transversal, TWO_PI_I};

/// `(M1, M2) -> (A0, B0) = (tau/(2 pi i) log_T M1, M2)`, the logarithm taken
/// on the branch whose eigenvalues lie in `t`.
pub fn functor_f(rep: &RepZ2, t: &Transversal, theta: f64, tol: &Tolerances) -> Result<NormalForm> {
    tol.validate()?;
    let branch = log_transversal(&rep.m1, t, tol)?;
    let mut nf = NormalForm::from_matrices(branch.matrix, rep.m2.clone(), *t, theta, tol)?;
    nf.diagnostics.warnings.extend(branch.warnings);
    Ok(nf)
}

/// `(A0, B0) -> (exp(2 pi i A0 / tau), B0)`.
pub fn fiber_omega(nf: &NormalForm, tol: &Tolerances) -> Result<RepZ2> {
    let m1 = mat_exp(&(&nf.a0 * (TWO_PI_I / nf.tau())))?;
    RepZ2::new(m1, nf.b0.clone(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{identity, CMat, C64};

    const THETA: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn jordan_round_trip() {
        let tol = Tolerances::default();
        let tau = C64::new(1.0, -1.0);
        let t = Transversal::new(tau, 0.0).unwrap();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let m1 = CMat::from_row_slice(2, 2, &[one, one, zero, one]);
        let rep = RepZ2::new(m1.clone(), identity(2), &tol).unwrap();
        let nf = functor_f(&rep, &t, THETA, &tol).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[zero, tau / TWO_PI_I, zero, zero]);
        assert!((&nf.a0 - expected).norm() < 1e-14);
        let back = fiber_omega(&nf, &tol).unwrap();
        assert!((back.m1 - m1).norm() < 1e-14);
    }

    #[test]
    fn branch_follows_the_strip() {
        let tol = Tolerances::default();
        let tau = C64::new(1.0, -1.0);
        let m1 = CMat::from_element(1, 1, C64::new(-1.0, 0.0));
        let rep = RepZ2::new(m1, identity(1), &tol).unwrap();
        for offset in [0.0, 0.3, -2.0] {
            let t = Transversal::new(tau, offset).unwrap();
            let nf = functor_f(&rep, &t, THETA, &tol).unwrap();
            assert!(t.contains(nf.a0[(0, 0)]));
            let back = fiber_omega(&nf, &tol).unwrap();
            assert!((back.m1[(0, 0)] + 1.0).norm() < 1e-13);
        }
    }
}
