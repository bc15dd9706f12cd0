use crate::error::{Error, Result};
use crate::numkit::C64;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Degree, rank and slope of the standard bundle `E_{m,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdBundleData {
    pub deg: i64,
    pub rk: f64,
    pub slope: f64,
}

/// `deg = m`, `rk = m theta + n`, `slope = deg / rk`.
pub fn std_bundle_data(m: i64, n: i64, theta: f64) -> Result<StdBundleData> {
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime { m, n });
    }
    let rk = m as f64 * theta + n as f64;
    if rk.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NonPositiveRank { rank: rk });
    }
    Ok(StdBundleData {
        deg: m,
        rk,
        slope: m as f64 / rk,
    })
}

/// Labels of the image of a class `(deg, rk) = (m, m theta + n)` under the
/// exchange `rk -> -deg`, `deg -> rk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsSwap {
    /// Rank label of the image, `-m`.
    pub rank: i64,
    /// Degree label `m theta + n` of the image, as the pair `(m, n)`.
    pub degree_theta: i64,
    pub degree_const: i64,
    /// For `m = 0` the image is the class of a torsion sheaf of degree `n`.
    pub torsion: bool,
}

pub fn ps_k_swap(m: i64, n: i64) -> PsSwap {
    PsSwap {
        rank: -m,
        degree_theta: m,
        degree_const: n,
        torsion: m == 0,
    }
}

/// `Z(m, n) = -m + i (m theta + n)`.
pub fn stability_z(m: i64, n: i64, theta: f64) -> Result<C64> {
    if m == 0 && n == 0 {
        return Err(Error::ZeroClass);
    }
    let rk = m as f64 * theta + n as f64;
    if rk < 0.0 {
        return Err(Error::NonPositiveRank { rank: rk });
    }
    Ok(C64::new(-(m as f64), rk))
}

/// `arg(Z) / pi` with the argument taken in `(0, pi]`.
pub fn phase(m: i64, n: i64, theta: f64) -> Result<f64> {
    let z = stability_z(m, n, theta)?;
    if z.im == 0.0 && z.re > 0.0 {
        return Err(Error::InvalidInput(format!(
            "Z({m}, {n}) = {z} lies on the positive real axis, outside the phase range (0, 1]"
        )));
    }
    Ok(z.im.atan2(z.re) / std::f64::consts::PI)
}
