use super::{AElem, Omega};
use crate::error::Result;
use crate::numkit::{C64, SL2Z};

/// Generators of the SL(2, Z) action on `A_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    G1,
    G2,
    G1Inv,
    G2Inv,
}

impl Gen {
    pub fn inverse(self) -> Gen {
        match self {
            Gen::G1 => Gen::G1Inv,
            Gen::G2 => Gen::G2Inv,
            Gen::G1Inv => Gen::G1,
            Gen::G2Inv => Gen::G2,
        }
    }

    pub fn matrix(self) -> SL2Z {
        match self {
            Gen::G1 => SL2Z::G1,
            Gen::G2 => SL2Z::G2,
            Gen::G1Inv => SL2Z::G1.inverse(),
            Gen::G2Inv => SL2Z::G2.inverse(),
        }
    }

    /// Images of `U1` and `U2` as ordered products of generator powers:
    /// `sigma_1: U1 -> U1 U2, U2 -> U2` and `sigma_2: U1 -> U2^-1, U2 -> U1`.
    fn images(self) -> [&'static [(i64, i64)]; 2] {
        match self {
            Gen::G1 => [&[(1, 0), (0, 1)], &[(0, 1)]],
            Gen::G1Inv => [&[(1, 0), (0, -1)], &[(0, 1)]],
            Gen::G2 => [&[(0, -1)], &[(1, 0)]],
            Gen::G2Inv => [&[(0, 1)], &[(-1, 0)]],
        }
    }
}

fn product(theta: f64, factors: &[AElem]) -> Result<AElem> {
    factors
        .iter()
        .try_fold(AElem::one(theta), |acc, f| acc.mul(f))
}

fn power(x: &AElem, inv: &AElem, n: i64) -> Result<AElem> {
    let base = if n >= 0 { x } else { inv };
    let mut out = AElem::one(x.theta());
    for _ in 0..n.unsigned_abs() {
        out = out.mul(base)?;
    }
    Ok(out)
}

fn apply_gen(g: Gen, x: &AElem) -> Result<AElem> {
    let theta = x.theta();
    let one = C64::new(1.0, 0.0);
    let gens = |word: &[(i64, i64)], invert: bool| -> Result<AElem> {
        let mut factors: Vec<AElem> = word
            .iter()
            .map(|&(a, b)| {
                let s = if invert { -1 } else { 1 };
                AElem::monomial(theta, s * a, s * b, one)
            })
            .collect();
        if invert {
            factors.reverse();
        }
        product(theta, &factors)
    };
    let [w1, w2] = g.images();
    let (i1, i1inv) = (gens(w1, false)?, gens(w1, true)?);
    let (i2, i2inv) = (gens(w2, false)?, gens(w2, true)?);
    let mut out = AElem::zero(theta);
    for ((n1, n2), c) in x.coeffs() {
        let m = power(&i1, &i1inv, n1)?.mul(&power(&i2, &i2inv, n2)?)?;
        out = out.add(&m.scale(c))?;
    }
    Ok(out)
}

/// Applies the automorphisms of a word, first letter first.
pub fn sigma_apply(word: &[Gen], x: &AElem) -> Result<AElem> {
    word.iter().try_fold(x.clone(), |acc, &g| apply_gen(g, &acc))
}

pub fn sigma_inverse_word(word: &[Gen]) -> Vec<Gen> {
    word.iter().rev().map(|g| g.inverse()).collect()
}

/// `g omega` for the matrix `g = g_a g_b ...` of a word `[a, b, ...]`,
/// acting on `omega` as a column vector.
pub fn omega_action(word: &[Gen], w: &Omega) -> Omega {
    let g = word
        .iter()
        .fold(SL2Z::IDENTITY, |acc, gen| acc.compose(&gen.matrix()));
    let (w1, w2) = g.act_on_pair((w.w1, w.w2));
    Omega { w1, w2 }
}

/// Largest coefficient norm of `sigma^-1 delta_w sigma(x) - delta_{g w}(x)`
/// over the monomials `x` with `|n1|, |n2| <= bound`.
pub fn check_intertwine(word: &[Gen], w: &Omega, bound: i64, theta: f64) -> Result<f64> {
    let inv = sigma_inverse_word(word);
    let gw = omega_action(word, w);
    let mut worst: f64 = 0.0;
    for n1 in -bound..=bound {
        for n2 in -bound..=bound {
            let x = AElem::monomial(theta, n1, n2, C64::new(1.0, 0.0));
            let lhs = sigma_apply(&inv, &sigma_apply(word, &x)?.delta_omega(w))?;
            let r = lhs.sub(&x.delta_omega(&gw))?;
            worst = worst.max(r.coeffs().map(|(_, c)| c.norm()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: f64 = 0.618_033_988_749_894_9;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn generator_images() {
        let u1 = AElem::u1(THETA);
        assert_eq!(sigma_apply(&[Gen::G1], &u1).unwrap(), AElem::monomial(THETA, 1, 1, c(1.0, 0.0)));
        assert_eq!(sigma_apply(&[Gen::G2], &u1).unwrap(), AElem::monomial(THETA, 0, -1, c(1.0, 0.0)));
        let x = AElem::from_coeffs(THETA, [((2, -1), c(1.0, 2.0)), ((-3, 1), c(0.5, 0.0)), ((0, 0), c(1.0, 0.0))]);
        for g in [Gen::G1, Gen::G2, Gen::G1Inv, Gen::G2Inv] {
            let back = sigma_apply(&[g, g.inverse()], &x).unwrap();
            assert!(back.sub(&x).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn intertwining_for_generators_and_words() {
        let w = Omega::new(c(0.3, -1.2), c(1.0, 0.4)).unwrap();
        for word in [
            vec![],
            vec![Gen::G1],
            vec![Gen::G2],
            vec![Gen::G1Inv],
            vec![Gen::G1, Gen::G2],
            vec![Gen::G2, Gen::G1, Gen::G2Inv],
        ] {
            assert!(check_intertwine(&word, &w, 3, THETA).unwrap() < 1e-12, "{word:?}");
        }
        let g1w = omega_action(&[Gen::G1], &w);
        assert_eq!((g1w.w1, g1w.w2), (w.w1 + w.w2, w.w2));
        let g2w = omega_action(&[Gen::G2], &w);
        assert_eq!((g2w.w1, g2w.w2), (-w.w2, w.w1));
    }

    #[test]
    fn multiplicative() {
        let x = AElem::from_coeffs(THETA, [((1, 2), c(1.0, 0.0)), ((-1, 0), c(0.0, 1.0))]);
        let y = AElem::from_coeffs(THETA, [((2, -1), c(0.5, 0.0)), ((0, 3), c(1.0, 1.0))]);
        for g in [Gen::G1, Gen::G2] {
            let lhs = sigma_apply(&[g], &x.mul(&y).unwrap()).unwrap();
            let rhs = sigma_apply(&[g], &x).unwrap().mul(&sigma_apply(&[g], &y).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
        }
    }
}
