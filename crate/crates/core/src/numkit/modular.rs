use super::C64;
use crate::error::{Error, Result};

/// An element `[[a, b], [c, d]]` of SL(2, Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SL2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Z {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidInput(format!(
                "[[{a}, {b}], [{c}, {d}]] has determinant {}",
                a * d - b * c
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub const IDENTITY: SL2Z = SL2Z { a: 1, b: 0, c: 0, d: 1 };
    /// `[[1, 1], [0, 1]]`
    pub const G1: SL2Z = SL2Z { a: 1, b: 1, c: 0, d: 1 };
    /// `[[0, -1], [1, 0]]`
    pub const G2: SL2Z = SL2Z { a: 0, b: -1, c: 1, d: 0 };

    pub fn translation(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn compose(&self, rhs: &SL2Z) -> SL2Z {
        SL2Z {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> SL2Z {
        SL2Z {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Linear action on a column vector `(w1, w2)`.
    pub fn act_on_pair(&self, w: (C64, C64)) -> (C64, C64) {
        (
            w.0 * self.a as f64 + w.1 * self.b as f64,
            w.0 * self.c as f64 + w.1 * self.d as f64,
        )
    }
}

/// Real width `|tau|^2 / |Re tau|` of a transversal to `tau Z`; infinite for
/// purely imaginary `tau`.
pub fn wd(tau: C64) -> Result<f64> {
    if tau.norm() == 0.0 {
        return Err(Error::InvalidInput("tau must be nonzero".into()));
    }
    if tau.re == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(tau.norm_sqr() / tau.re.abs())
}

/// Fractional linear action `(a tau + b) / (c tau + d)`.
pub fn moebius(g: &SL2Z, tau: C64) -> Result<C64> {
    let den = tau * g.c as f64 + g.d as f64;
    if den.norm() == 0.0 {
        return Err(Error::Pole);
    }
    Ok((tau * g.a as f64 + g.b as f64) / den)
}

/// Output of [`find_small_width`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallWidth {
    pub g: SL2Z,
    /// Translation amount used before inverting.
    pub n: i64,
    pub gtau: C64,
    pub wd: f64,
}

/// Translates `tau` by the smallest positive integer `N` with `Re tau + N > 1`
/// and inverts, giving `g tau = -1 / (tau + N)` of width `1 / (Re tau + N) < 1`.
///
/// Any non-real `tau` is accepted; the sign of `Im tau` is not restricted.
pub fn find_small_width(tau: C64) -> Result<SmallWidth> {
    if tau.im == 0.0 || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::RealTau);
    }
    let mut n = (1.0 - tau.re).floor() as i64 + 1;
    if n < 1 {
        n = 1;
    }
    while tau.re + (n as f64) <= 1.0 {
        n += 1;
    }
    let g = SL2Z::G2.compose(&SL2Z::translation(n));
    let gtau = moebius(&g, tau)?;
    Ok(SmallWidth {
        g,
        n,
        gtau,
        wd: wd(gtau)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn width_examples() {
        assert!((wd(c(1.0, -1.0)).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(wd(c(0.0, -1.0)).unwrap(), f64::INFINITY);
        let t = -(c(1.0, -1.0) + 1.0).inv();
        assert!((wd(t).unwrap() - 0.5).abs() < 1e-15);
        assert!(wd(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn small_width_examples() {
        let s = find_small_width(c(1.0, -1.0)).unwrap();
        assert_eq!(s.n, 1);
        assert!((s.gtau - (-c(2.0, -1.0).inv())).norm() < 1e-15);
        assert!((s.wd - 0.5).abs() < 1e-15);

        let s = find_small_width(c(0.0, -1.0)).unwrap();
        assert_eq!(s.n, 2);
        assert!((s.wd - 0.5).abs() < 1e-15);

        let s = find_small_width(c(5.0, -1.0)).unwrap();
        assert_eq!(s.n, 1);
        assert!((s.wd - 1.0 / 6.0).abs() < 1e-15);

        let s = find_small_width(c(-3.5, 0.2)).unwrap();
        assert_eq!(s.n, 5);
        assert!(s.wd < 1.0);

        assert_eq!(find_small_width(c(2.0, 0.0)), Err(Error::RealTau));
    }

    #[test]
    fn moebius_examples() {
        let tau = c(0.3, -0.8);
        assert_eq!(moebius(&SL2Z::IDENTITY, tau).unwrap(), tau);
        assert!((moebius(&SL2Z::G2, c(0.0, 1.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let g = SL2Z::G2.compose(&SL2Z::translation(1));
        assert!((moebius(&g, c(1.0, -1.0)).unwrap() + c(2.0, -1.0).inv()).norm() < 1e-15);
        assert_eq!(moebius(&SL2Z::G2, c(0.0, 0.0)), Err(Error::Pole));
    }

    #[test]
    fn sl2z_group_law() {
        assert!(SL2Z::new(2, 1, 1, 1).is_ok());
        assert!(SL2Z::new(2, 1, 1, 2).is_err());
        let g = SL2Z::G1.compose(&SL2Z::G2);
        assert_eq!(g.compose(&g.inverse()), SL2Z::IDENTITY);
    }
}
