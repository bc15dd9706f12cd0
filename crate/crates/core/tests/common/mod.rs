//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use bqtau::bqtau::{scramble, BqObject, NormalForm};
use bqtau::laurent::{LaurentParams, PolyMat, ShearStep};
use bqtau::numkit::{identity, smallest_singular_value, CMat, Tolerances, Transversal, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const THETA: f64 = 0.618_033_988_749_894_9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn tau() -> C64 {
    c(1.0, -1.0)
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn strip() -> Transversal {
    Transversal::new(tau(), 0.0).unwrap()
}

pub fn params() -> LaurentParams {
    LaurentParams::from_theta(tau(), THETA).unwrap()
}

pub fn rand_c(r: &mut ChaCha8Rng) -> C64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn rand_mat(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| rand_c(r))
}

/// `I + 0.3 X` with `X` random: condition number stays small.
pub fn well_conditioned(r: &mut ChaCha8Rng, n: usize) -> CMat {
    loop {
        let s = identity(n) + rand_mat(r, n, n) * c(0.3, 0.0);
        if smallest_singular_value(&s) > 0.2 {
            return s;
        }
    }
}

/// A point of `t` at coordinate `Re(z/tau)` in `[a + 0.15, a + 0.85]`.
pub fn strip_point(r: &mut ChaCha8Rng, t: &Transversal) -> C64 {
    t.tau * c(t.offset + r.gen_range(0.15..0.85), r.gen_range(-0.5..0.5))
}

/// A random nonzero scalar of modulus in [0.5, 2).
pub fn rand_b(r: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(r.gen_range(0.5..2.0), r.gen_range(0.0..std::f64::consts::TAU))
}

/// A diagonalizable normal form: `A0 = S D S^-1`, `B0 = S E S^-1` with
/// distinct strip eigenvalues `D` and nonzero `E`. Returns it with `S`, `D`.
pub fn random_normal_form(r: &mut ChaCha8Rng, n: usize, t: &Transversal) -> (NormalForm, CMat, Vec<C64>) {
    let s = well_conditioned(r, n);
    let sinv = s.clone().try_inverse().unwrap();
    let d: Vec<C64> = (0..n).map(|_| strip_point(r, t)).collect();
    let e: Vec<C64> = (0..n).map(|_| rand_b(r)).collect();
    let a0 = &s * CMat::from_diagonal(&nalgebra::DVector::from_vec(d.clone())) * &sinv;
    let b0 = &s * CMat::from_diagonal(&nalgebra::DVector::from_vec(e)) * &sinv;
    let nf = NormalForm::from_matrices(a0, b0, *t, THETA, &tol()).unwrap();
    (nf, s, d)
}

/// `I + sum_{d=1}^{deg} N_d z^d` with strictly upper triangular `N_d`,
/// so the inverse is again a polynomial.
pub fn unipotent_gauge(r: &mut ChaCha8Rng, n: usize, deg: i32, p: LaurentParams) -> PolyMat {
    let mut terms = vec![(0, identity(n))];
    for d in 1..=deg {
        let m = CMat::from_fn(n, n, |i, j| if j > i { rand_c(r) * 0.5 } else { c(0.0, 0.0) });
        terms.push((d, m));
    }
    PolyMat::from_terms(n, terms, p).unwrap()
}

/// Scrambles a random normal form with up to two shears, a constant change
/// of basis and a unipotent gauge of degree `deg`.
pub fn scrambled(r: &mut ChaCha8Rng, n: usize, deg: i32) -> (NormalForm, BqObject) {
    let t = strip();
    let (seed, s, _) = random_normal_form(r, n, &t);
    let mut shears = Vec::new();
    let passes = r.gen_range(0..=2);
    for pass in 0..passes {
        let exponents: Vec<i32> = (0..n).map(|_| r.gen_range(-1..=1)).collect();
        let similarity = if pass == 0 { s.clone() } else { identity(n) };
        shears.push(ShearStep { similarity, exponents });
    }
    let r0 = well_conditioned(r, n);
    let u = unipotent_gauge(r, n, deg, params());
    let p = u.left_mul_const(&r0);
    let k = (deg as usize) * n + 4;
    let obj = scramble(&seed, &shears, &p, k, &tol()).unwrap();
    (seed, obj)
}

/// A commuting invertible pair `(p1(X), p2(X))` for a random `X`.
pub fn commuting_pair(r: &mut ChaCha8Rng, n: usize) -> (CMat, CMat) {
    loop {
        let x = rand_mat(r, n, n);
        let poly = |r: &mut ChaCha8Rng| {
            let (a, b, cc) = (rand_c(r), rand_c(r), rand_c(r));
            identity(n) * (a + c(1.5, 0.0)) + &x * b + &x * &x * (cc * 0.3)
        };
        let (m1, m2) = (poly(r), poly(r));
        if smallest_singular_value(&m1) > 0.1 && smallest_singular_value(&m2) > 0.1 {
            return (m1, m2);
        }
    }
}
