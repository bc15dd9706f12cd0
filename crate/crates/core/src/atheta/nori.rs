use crate::error::{Error, Result};
use crate::numkit::{check_square, smallest_singular_value, spectral, spectral_norm, CMat, Tolerances};

/// Outcome of the finite-monodromy test.
#[derive(Debug, Clone, PartialEq)]
pub struct NoriReport {
    pub finite: bool,
    /// Least common multiple of the eigenvalue orders when finite.
    pub order: Option<u64>,
    pub d_max: u64,
    /// Why the test failed, if it did.
    pub reason: Option<String>,
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Whether every matrix is diagonalizable with eigenvalues that are roots
/// of unity of order at most `d_max`.
pub fn is_nori_finite(mats: &[CMat], d_max: u64, tol: &Tolerances) -> Result<NoriReport> {
    if d_max == 0 {
        return Err(Error::InvalidInput("d_max must be at least 1".into()));
    }
    let fail = |reason: String| NoriReport {
        finite: false,
        order: None,
        d_max,
        reason: Some(reason),
    };
    let mut order = 1u64;
    for (idx, m) in mats.iter().enumerate() {
        let n = check_square(m)?;
        if n == 0 {
            continue;
        }
        if smallest_singular_value(m) <= tol.eps_res * spectral_norm(m) {
            return Err(Error::Singular(format!("monodromy matrix {idx} is not invertible")));
        }
        let spec = spectral(m, tol)?;
        let scale = m.norm().max(1.0);
        for (c, block) in spec.clusters.iter().zip(&spec.blocks) {
            let k = block.nrows();
            let nilpotent = (block - CMat::identity(k, k) * c.eigenvalue).norm();
            if nilpotent > tol.eps_spec * scale {
                return Ok(fail(format!(
                    "matrix {idx} is not diagonalizable at eigenvalue {} (nilpotent part {nilpotent:e})",
                    c.eigenvalue
                )));
            }
        }
        let cond = spec.similarity.norm() * spec.similarity_inv.norm();
        if cond * tol.eps_spec > 1.0 {
            return Ok(fail(format!(
                "matrix {idx} has an ill-conditioned eigenbasis (condition {cond:e})"
            )));
        }
        for c in &spec.clusters {
            let l = c.eigenvalue;
            if (l.norm() - 1.0).abs() > tol.eps_spec {
                return Ok(fail(format!("eigenvalue {l} of matrix {idx} is off the unit circle")));
            }
            match (1..=d_max).find(|&d| (l.powu(d as u32) - 1.0).norm() <= tol.eps_spec * d as f64) {
                Some(d) => order = lcm(order, d),
                None => {
                    return Ok(fail(format!(
                        "eigenvalue {l} of matrix {idx} is not a root of unity of order <= {d_max}"
                    )))
                }
            }
        }
    }
    Ok(NoriReport {
        finite: true,
        order: Some(order),
        d_max,
        reason: None,
    })
}
