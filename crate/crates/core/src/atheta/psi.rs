use super::{AElem, Omega};
use crate::bqtau::NormalForm;
use crate::error::{Error, Result};
use crate::numkit::{schur, CMat, C64, TWO_PI_I};

/// `psi(sum f_n z^n) = sum f_n U1^n`.
pub fn psi_embed(f: impl IntoIterator<Item = (i64, C64)>, theta: f64) -> AElem {
    AElem::from_coeffs(theta, f.into_iter().map(|(n, c)| ((n, 0), c)))
}

/// Largest coefficient of `psi(2 pi i delta f) - tau delta_1 psi(f)` where
/// `delta z^n = n tau z^n`.
pub fn psi_intertwining_residual(f: &[(i64, C64)], tau: C64, theta: f64) -> Result<f64> {
    let df = f.iter().map(|&(n, c)| (n, TWO_PI_I * tau * n as f64 * c));
    let lhs = psi_embed(df, theta);
    let rhs = psi_embed(f.iter().copied(), theta).delta_j(1)?.scale(tau);
    Ok(lhs.sub(&rhs)?.coeffs().map(|(_, c)| c.norm()).fold(0.0, f64::max))
}

/// A free module `A_theta^n` with connection `delta_tau + A`, `A` upper
/// triangular with scalar diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FrVectObj {
    pub theta: f64,
    pub tau: C64,
    conn: Vec<Vec<AElem>>,
}

impl FrVectObj {
    pub fn new(theta: f64, tau: C64, conn: Vec<Vec<AElem>>) -> Result<Self> {
        let n = conn.len();
        for (i, row) in conn.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, e) in row.iter().enumerate() {
                if e.theta() != theta {
                    return Err(Error::ParameterMismatch(format!("entry ({i}, {j}) has a different theta")));
                }
                if j < i && !e.is_zero() {
                    return Err(Error::Invariant(format!("entry ({i}, {j}) below the diagonal is nonzero")));
                }
                if j == i && !e.is_scalar() {
                    return Err(Error::Invariant(format!("diagonal entry {i} is not a scalar")));
                }
            }
        }
        Ok(Self { theta, tau, conn })
    }

    pub fn dim(&self) -> usize {
        self.conn.len()
    }

    pub fn conn(&self) -> &[Vec<AElem>] {
        &self.conn
    }

    pub fn entry(&self, i: usize, j: usize) -> &AElem {
        &self.conn[i][j]
    }

    /// The scalar diagonal of the connection matrix.
    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.conn[i][i].coef(0, 0)).collect()
    }

    pub fn derivation(&self) -> Omega {
        Omega::tau(self.tau)
    }
}

/// `psi_*`: the connection `2 pi i A0` over `A_theta` after a unitary
/// change of basis making `A0` upper triangular. `B0` is forgotten.
pub fn psi_star(nf: &NormalForm) -> Result<FrVectObj> {
    let a = &nf.a0;
    let n = a.nrows();
    let upper = (0..n).all(|j| (j + 1..n).all(|i| a[(i, j)] == C64::new(0.0, 0.0)));
    let t = if upper || n == 0 { a.clone() } else { schur(a)?.1 };
    Ok(FrVectObj::new(nf.theta, nf.tau(), scalar_rows(&t, nf.theta))?)
}

fn scalar_rows(t: &CMat, theta: f64) -> Vec<Vec<AElem>> {
    let n = t.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j < i {
                        AElem::zero(theta)
                    } else {
                        AElem::scalar(theta, TWO_PI_I * t[(i, j)])
                    }
                })
                .collect()
        })
        .collect()
}

/// An extension together with the residuals of the horizontality of its
/// structure maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub object: FrVectObj,
    /// `|| A iota - iota zprime ||` for the inclusion of the rank-one piece.
    pub iota_residual: f64,
    /// `|| pi A - A_sub pi ||` for the projection onto the quotient.
    pub pi_residual: f64,
}

fn mat_residual(x: &[Vec<AElem>], y: &[Vec<AElem>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (rx, ry) in x.iter().zip(y) {
        for (a, b) in rx.iter().zip(ry) {
            worst = worst.max(a.sub(b)?.norm());
        }
    }
    Ok(worst)
}

fn mat_mul(x: &[Vec<AElem>], y: &[Vec<AElem>], theta: f64) -> Result<Vec<Vec<AElem>>> {
    let inner = y.len();
    let cols = y.first().map_or(0, |r| r.len());
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).try_fold(AElem::zero(theta), |acc, k| acc.add(&row[k].mul(&y[k][j])?))
                })
                .collect()
        })
        .collect()
}

/// The extension `0 -> (A_theta, delta_tau + zprime) -> (A_theta^{n+1}, delta_tau + A)
/// -> sub -> 0` with first row `(zprime, row)`.
pub fn build_extension(zprime: C64, row: &[AElem], sub: &FrVectObj) -> Result<Extension> {
    let n = sub.dim();
    if row.len() != n {
        return Err(Error::DimensionMismatch(format!("row has {} entries, sub-object has dimension {n}", row.len())));
    }
    let theta = sub.theta;
    let mut conn = Vec::with_capacity(n + 1);
    let mut first = vec![AElem::scalar(theta, zprime)];
    first.extend(row.iter().cloned());
    conn.push(first);
    for r in sub.conn() {
        let mut line = vec![AElem::zero(theta)];
        line.extend(r.iter().cloned());
        conn.push(line);
    }
    let object = FrVectObj::new(theta, sub.tau, conn)?;

    let unit = |i: usize, j: usize| {
        if i == j {
            AElem::one(theta)
        } else {
            AElem::zero(theta)
        }
    };
    let iota: Vec<Vec<AElem>> = (0..=n).map(|i| vec![unit(i, 0)]).collect();
    let pi: Vec<Vec<AElem>> = (0..n).map(|i| (0..=n).map(|j| unit(i + 1, j)).collect()).collect();
    let z = vec![vec![AElem::scalar(theta, zprime)]];
    let iota_residual = mat_residual(&mat_mul(object.conn(), &iota, theta)?, &mat_mul(&iota, &z, theta)?)?;
    let pi_residual = mat_residual(&mat_mul(&pi, object.conn(), theta)?, &mat_mul(sub.conn(), &pi, theta)?)?;
    Ok(Extension {
        object,
        iota_residual,
        pi_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{identity, Tolerances, Transversal};

    const THETA: f64 = 0.618_033_988_749_894_9;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tau() -> C64 {
        c(1.0, -1.0)
    }

    #[test]
    fn psi_examples() {
        let one = c(1.0, 0.0);
        assert_eq!(psi_embed([(1, one)], THETA), AElem::u1(THETA));
        assert_eq!(psi_embed([(0, one)], THETA), AElem::one(THETA));
        let f = [(-2, one), (1, c(3.0, 0.0))];
        let p = psi_embed(f, THETA);
        assert_eq!(p.coef(-2, 0), one);
        assert_eq!(p.coef(1, 0), c(3.0, 0.0));
        assert!(psi_intertwining_residual(&f, tau(), THETA).unwrap() < 1e-13);
        // psi is an algebra map: the image is commutative
        let g = psi_embed([(3, one), (-1, c(0.0, 2.0))], THETA);
        assert!(p.mul(&g).unwrap().sub(&g.mul(&p).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn psi_star_examples() {
        let tol = Tolerances::default();
        let t = Transversal::new(tau(), 0.0).unwrap();
        let z = tau() * 0.3;
        let x = NormalForm::simple(c(2.0, 0.0), z, t, THETA, &tol).unwrap();
        let e = psi_star(&x).unwrap();
        assert!((e.diagonal()[0] - TWO_PI_I * z).norm() < 1e-15);
        let unit = psi_star(&NormalForm::unit(t, THETA, &tol).unwrap()).unwrap();
        assert!(unit.entry(0, 0).is_zero());

        let zero = c(0.0, 0.0);
        let a0 = CMat::from_row_slice(2, 2, &[zero, c(1.0, 0.0), zero, zero]);
        let n = NormalForm::from_matrices(a0, identity(2), t, THETA, &tol).unwrap();
        let e = psi_star(&n).unwrap();
        assert!(e.diagonal().iter().all(|d| d.norm() == 0.0));
        assert!((e.entry(0, 1).coef(0, 0) - TWO_PI_I).norm() < 1e-15);

        // a lower triangular input is triangularized first
        let a0 = CMat::from_row_slice(2, 2, &[tau() * 0.2, zero, c(1.0, 0.0), tau() * 0.6]);
        let x = NormalForm::from_matrices(a0, identity(2), t, THETA, &tol).unwrap();
        let e = psi_star(&x).unwrap();
        let mut d: Vec<f64> = e.diagonal().iter().map(|z| (z / (TWO_PI_I * tau())).re).collect();
        d.sort_by(f64::total_cmp);
        assert!((d[0] - 0.2).abs() < 1e-12 && (d[1] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn extensions() {
        let zero = AElem::zero(THETA);
        let unit = FrVectObj::new(THETA, tau(), vec![vec![zero.clone()]]).unwrap();
        let ext = build_extension(c(0.0, 0.0), &[zero.clone()], &unit).unwrap();
        assert_eq!(ext.object.dim(), 2);
        assert!(ext.object.diagonal().iter().all(|d| d.norm() == 0.0));
        assert_eq!((ext.iota_residual, ext.pi_residual), (0.0, 0.0));

        // Lemma-13 shape [[z', b], [0, z'']] with a noncommutative off-diagonal entry
        let (z1, z2) = (c(0.4, 0.1), c(-0.2, 0.3));
        let sub = FrVectObj::new(THETA, tau(), vec![vec![AElem::scalar(THETA, z2)]]).unwrap();
        let b = AElem::from_coeffs(THETA, [((1, 1), c(1.0, 0.0)), ((0, -2), c(0.0, 1.0))]);
        let ext = build_extension(z1, &[b], &sub).unwrap();
        assert_eq!((ext.iota_residual, ext.pi_residual), (0.0, 0.0));
        assert!(build_extension(z1, &[], &sub).is_err());
    }

    #[test]
    fn frvect_invariants() {
        let lower = vec![
            vec![AElem::zero(THETA), AElem::zero(THETA)],
            vec![AElem::one(THETA), AElem::zero(THETA)],
        ];
        assert!(FrVectObj::new(THETA, tau(), lower).is_err());
        let diag = vec![vec![AElem::u1(THETA)]];
        assert!(FrVectObj::new(THETA, tau(), diag).is_err());
    }
}
