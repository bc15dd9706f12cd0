use crate::bqtau::K0ClassB;
use crate::error::{Error, Result};
use crate::numkit::C64;

/// A divisor on `X_tau = C / (Z + tau Z)`: points reduced into the
/// fundamental parallelogram `{s + t tau : 0 <= s, t < 1}` with nonzero
/// integer multiplicities. Points within `eps_key` of each other in the
/// quotient are identified.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorXtau {
    pub tau: C64,
    pub eps_key: f64,
    points: Vec<(C64, i64)>,
}

impl DivisorXtau {
    pub fn new(tau: C64, eps_key: f64) -> Result<Self> {
        if tau.im == 0.0 || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::RealTau);
        }
        Ok(Self {
            tau,
            eps_key,
            points: Vec::new(),
        })
    }

    pub fn from_points(tau: C64, eps_key: f64, points: impl IntoIterator<Item = (C64, i64)>) -> Result<Self> {
        let mut d = Self::new(tau, eps_key)?;
        for (p, m) in points {
            d.insert(p, m);
        }
        Ok(d)
    }

    /// Lattice coordinates `(s, t)` with `z = s + t tau`.
    fn coords(&self, z: C64) -> (f64, f64) {
        let t = z.im / self.tau.im;
        (z.re - t * self.tau.re, t)
    }

    /// Representative in the fundamental parallelogram; coordinates within
    /// `eps_key` of 1 wrap to 0.
    pub fn reduce(&self, z: C64) -> C64 {
        let wrap = |x: f64, scale: f64| {
            let f = x - x.floor();
            if (1.0 - f) * scale <= self.eps_key {
                0.0
            } else {
                f
            }
        };
        let (s, t) = self.coords(z);
        wrap(s, 1.0) + self.tau * wrap(t, self.tau.norm())
    }

    /// Distance from `z` to the lattice `Z + tau Z`.
    pub fn lattice_distance(&self, z: C64) -> f64 {
        let (s, t) = self.coords(z);
        let (s0, t0) = (s.floor(), t.floor());
        let mut best = f64::INFINITY;
        for ds in 0..=1 {
            for dt in 0..=1 {
                let l = C64::new(s0 + ds as f64, 0.0) + self.tau * (t0 + dt as f64);
                best = best.min((z - l).norm());
            }
        }
        best
    }

    pub fn insert(&mut self, p: C64, mult: i64) {
        let p = self.reduce(p);
        let pos = self
            .points
            .iter()
            .position(|(q, _)| self.lattice_distance(*q - p) <= self.eps_key);
        match pos {
            Some(i) => {
                self.points[i].1 += mult;
                if self.points[i].1 == 0 {
                    self.points.remove(i);
                }
            }
            None if mult != 0 => {
                self.points.push((p, mult));
                self.points
                    .sort_by(|(x, _), (y, _)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            }
            None => {}
        }
    }

    pub fn points(&self) -> &[(C64, i64)] {
        &self.points
    }

    pub fn degree(&self) -> i64 {
        self.points.iter().map(|(_, m)| m).sum()
    }

    /// `sum mult * point`, a point of `C` defined modulo the lattice.
    pub fn sum(&self) -> C64 {
        self.points.iter().map(|(p, m)| p * *m as f64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `sum n_i (b_i, z'_i) -> sum n_i [-z'_i]`; the `b` coordinates are forgotten.
pub fn kmap(c: &K0ClassB) -> Result<DivisorXtau> {
    DivisorXtau::from_points(
        c.transversal.tau,
        c.eps_key,
        c.terms().iter().map(|(k, m)| (-k.zprime, *m)),
    )
}

/// Linear equivalence on the elliptic curve: equal degrees and
/// `sum(D1) - sum(D2)` in the lattice within `eps_key`.
pub fn divisor_equivalent(d1: &DivisorXtau, d2: &DivisorXtau) -> Result<bool> {
    if (d1.tau - d2.tau).norm() > 1e-12 * d1.tau.norm().max(1.0) {
        return Err(Error::ParameterMismatch("divisors on different curves".into()));
    }
    if d1.degree() != d2.degree() {
        return Ok(false);
    }
    let eps = d1.eps_key.max(d2.eps_key);
    Ok(d1.lattice_distance(d1.sum() - d2.sum()) <= eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Transversal;

    const EPS: f64 = 1e-7;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tau() -> C64 {
        c(1.0, -1.0)
    }

    #[test]
    fn reduction_into_parallelogram() {
        let d = DivisorXtau::new(tau(), EPS).unwrap();
        let z = c(0.3, 0.0) + tau() * 0.4;
        assert!((d.reduce(z + tau() * 3.0 - 2.0) - z).norm() < 1e-14);
        assert!(d.reduce(c(1.0 - 1e-12, 0.0)).norm() < 1e-11);
        assert!(DivisorXtau::new(c(1.0, 0.0), EPS).is_err());
    }

    #[test]
    fn kmap_examples() {
        let t = Transversal::new(tau(), 0.0).unwrap();
        let z = tau() * 0.25 + 0.1;
        let k = K0ClassB::from_pairs(t, EPS, [((c(2.0, 0.0), z), 1)]);
        let d = kmap(&k).unwrap();
        assert_eq!(d.points().len(), 1);
        assert!(d.lattice_distance(d.points()[0].0 + z) < 1e-12);
        assert!(kmap(&K0ClassB::new(t, EPS)).unwrap().is_empty());
        let k = K0ClassB::from_pairs(t, EPS, [((c(2.0, 0.0), z), 1), ((c(3.0, 0.0), z), -1)]);
        assert!(kmap(&k).unwrap().is_empty());
    }

    #[test]
    fn equivalence() {
        let a = c(0.2, 0.0) + tau() * 0.3;
        let b = c(0.7, 0.0) + tau() * 0.9;
        let lhs = DivisorXtau::from_points(tau(), EPS, [(a, 1), (b, 1)]).unwrap();
        let rhs = DivisorXtau::from_points(tau(), EPS, [(c(0.0, 0.0), 1), (a + b, 1)]).unwrap();
        assert!(divisor_equivalent(&lhs, &lhs).unwrap());
        assert!(divisor_equivalent(&lhs, &rhs).unwrap());
        let one = DivisorXtau::from_points(tau(), EPS, [(a, 1)]).unwrap();
        let shifted = DivisorXtau::from_points(tau(), EPS, [(a + 0.5, 1)]).unwrap();
        assert!(!divisor_equivalent(&one, &shifted).unwrap());
        let other = DivisorXtau::new(c(0.5, 1.0), EPS).unwrap();
        assert!(divisor_equivalent(&one, &other).is_err());
    }
}
