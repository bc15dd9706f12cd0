use std::cmp::Ordering;

use super::NormalForm;
use crate::error::{Error, Result};
use crate::numkit::{
    eigenvalues, identity, nullspace_abs, orthonormal_complement, smallest_singular_pair, spectral, CMat,
    Tolerances, Transversal, C64,
};

fn lex(a: C64, b: C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Composition series of a normal form by repeatedly splitting off a common
/// eigenvector of `(A0, B0)`. Returns the joint eigenvalues `(lambda, b)`,
/// taking the lexicographically smallest pair at each step.
pub fn decompose(nf: &NormalForm, tol: &Tolerances) -> Result<Vec<(C64, C64)>> {
    let mut a = nf.a0.clone();
    let mut b = nf.b0.clone();
    let scale = 1.0 + nf.a0.norm() + nf.b0.norm();
    let mut factors = Vec::with_capacity(nf.dim());
    while a.nrows() > 0 {
        let n = a.nrows();
        let spec = spectral(&a, tol)?;
        let lambda = spec
            .clusters
            .iter()
            .map(|c| c.eigenvalue)
            .min_by(|x, y| lex(*x, *y))
            .expect("nonempty spectrum");
        let shifted = &a - identity(n) * lambda;
        let mut eig = nullspace_abs(&shifted, tol.eps_spec * scale);
        if eig.ncols() == 0 {
            let (v, _) = smallest_singular_pair(&shifted);
            eig = CMat::from_column_slice(n, 1, v.as_slice());
        }
        let restricted = eig.adjoint() * &b * &eig;
        let bval = eigenvalues(&restricted)?
            .into_iter()
            .min_by(|x, y| lex(*x, *y))
            .expect("nonempty restriction");
        let (w, _) = smallest_singular_pair(&(restricted - identity(eig.ncols()) * bval));
        let v = &eig * CMat::from_column_slice(eig.ncols(), 1, w.as_slice());
        let v = v.unscale(v.norm());
        let vh = v.adjoint();
        let z = (&vh * &a * &v)[(0, 0)];
        let bz = (&vh * &b * &v)[(0, 0)];
        let residual = (&a * &v - &v * z).norm() + (&b * &v - &v * bz).norm();
        if residual > 1e2 * tol.eps_spec * scale {
            return Err(Error::CommonEigenvector { residual });
        }
        factors.push((z, bz));
        let u = orthonormal_complement(&v);
        a = u.adjoint() * &a * &u;
        b = u.adjoint() * &b * &u;
    }
    Ok(factors)
}

/// Class of the simple object `(O, b, delta + z')` in K0, `z'` taken modulo
/// `tau Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K0Key {
    pub b: C64,
    pub zprime: C64,
}

/// A finite integer combination of simple classes, stored with canonical
/// representatives in a fixed transversal. Keys within `eps_key` are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct K0ClassB {
    pub transversal: Transversal,
    pub eps_key: f64,
    terms: Vec<(K0Key, i64)>,
}

impl K0ClassB {
    pub fn new(transversal: Transversal, eps_key: f64) -> Self {
        Self {
            transversal,
            eps_key,
            terms: Vec::new(),
        }
    }

    pub fn from_pairs(
        transversal: Transversal,
        eps_key: f64,
        pairs: impl IntoIterator<Item = ((C64, C64), i64)>,
    ) -> Self {
        let mut out = Self::new(transversal, eps_key);
        for ((b, z), m) in pairs {
            out.insert(K0Key { b, zprime: z }, m);
        }
        out
    }

    fn matches(&self, x: &K0Key, y: &K0Key) -> bool {
        (x.b - y.b).norm() <= self.eps_key * x.b.norm().max(1.0)
            && self.transversal.quotient_distance(x.zprime, y.zprime) <= self.eps_key
    }

    pub fn insert(&mut self, key: K0Key, mult: i64) {
        let key = K0Key {
            b: key.b,
            zprime: self.transversal.canonical_key(key.zprime, self.eps_key),
        };
        if let Some(pos) = self.terms.iter().position(|(k, _)| self.matches(k, &key)) {
            self.terms[pos].1 += mult;
            if self.terms[pos].1 == 0 {
                self.terms.remove(pos);
            }
        } else if mult != 0 {
            self.terms.push((key, mult));
            self.terms.sort_by(|(x, _), (y, _)| lex(x.zprime, y.zprime).then(lex(x.b, y.b)));
        }
    }

    pub fn terms(&self) -> &[(K0Key, i64)] {
        &self.terms
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        let (s, o) = (&self.transversal, &other.transversal);
        if (s.tau - o.tau).norm() > 1e-12 * s.tau.norm().max(1.0) {
            return Err(Error::ParameterMismatch("classes for different tau".into()));
        }
        if (s.offset - o.offset).abs() > 1e-15 {
            return Err(Error::TransversalMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, m) in &other.terms {
            out.insert(*k, *m);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.1 = -t.1;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn approx_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Sum of multiplicities, i.e. the rank of the underlying module.
    pub fn rank(&self) -> i64 {
        self.terms.iter().map(|(_, m)| m).sum()
    }
}

pub fn k0_class(nf: &NormalForm, tol: &Tolerances) -> Result<K0ClassB> {
    let factors = decompose(nf, tol)?;
    Ok(K0ClassB::from_pairs(
        nf.transversal,
        tol.eps_key,
        factors.into_iter().map(|(z, b)| ((b, z), 1)),
    ))
}

/// Dimension of the space of global flat sections `sum_k f_k z^k`,
/// `sum_k dim ker(A0 + k tau)`; only eigenvalues of `A0` in `-tau Z`
/// contribute. The equivariance `B0` plays no role.
pub fn h0_dim(nf: &NormalForm, tol: &Tolerances) -> Result<usize> {
    let n = nf.dim();
    if n == 0 {
        return Ok(0);
    }
    let tau = nf.tau();
    let radius = tol.edge_radius(nf.a0.norm());
    let thr = tol.eps_res * (1.0 + nf.a0.norm());
    let mut total = 0;
    for c in spectral(&nf.a0, tol)?.clusters {
        let k = (-c.eigenvalue / tau).re.round();
        if (c.eigenvalue + tau * k).norm() > radius {
            continue;
        }
        total += nullspace_abs(&(&nf.a0 + identity(n) * (tau * k)), thr).ncols();
    }
    Ok(total)
}
