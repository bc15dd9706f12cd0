use super::{Morphism, NormalForm};
use crate::error::{Error, Result};
use crate::numkit::{identity, inverse, kron, reduce_to_transversal, CMat, Tolerances};

/// `A0 = A0x (x) I + I (x) A0y` reduced into the strip, `B0 = B0x (x) B0y`.
pub fn tensor(x: &NormalForm, y: &NormalForm, tol: &Tolerances) -> Result<NormalForm> {
    x.check_compatible(y)?;
    let sum = kron(&x.a0, &identity(y.dim())) + kron(&identity(x.dim()), &y.a0);
    let branch = reduce_to_transversal(&sum, &x.transversal, tol)?;
    let mut nf = NormalForm::from_matrices(branch.matrix, kron(&x.b0, &y.b0), x.transversal, x.theta, tol)?;
    nf.diagnostics.warnings.extend(branch.warnings);
    Ok(nf)
}

/// `A0 = -A0^T` reduced into the strip, `B0 = (B0^T)^-1`.
pub fn dual(x: &NormalForm, tol: &Tolerances) -> Result<NormalForm> {
    let branch = reduce_to_transversal(&(-x.a0.transpose()), &x.transversal, tol)?;
    let b0 = inverse(&x.b0.transpose(), "B0^T")?;
    let mut nf = NormalForm::from_matrices(branch.matrix, b0, x.transversal, x.theta, tol)?;
    nf.diagnostics.warnings.extend(branch.warnings);
    Ok(nf)
}

fn pairing_row(n: usize) -> CMat {
    let mut e = CMat::zeros(1, n * n);
    for i in 0..n {
        e[(0, i * n + i)] = 1.0.into();
    }
    e
}

/// Evaluation `X^v (x) X -> 1`, `e_i^* (x) e_j -> delta_ij`.
pub fn evaluation(x: &NormalForm, tol: &Tolerances) -> Result<Morphism> {
    let source = tensor(&dual(x, tol)?, x, tol)?;
    let unit = NormalForm::unit(x.transversal, x.theta, tol)?;
    Morphism::new(source, unit, pairing_row(x.dim()), tol)
}

/// Coevaluation `1 -> X (x) X^v`, `1 -> sum_i e_i (x) e_i^*`.
pub fn coevaluation(x: &NormalForm, tol: &Tolerances) -> Result<Morphism> {
    let target = tensor(x, &dual(x, tol)?, tol)?;
    let unit = NormalForm::unit(x.transversal, x.theta, tol)?;
    Morphism::new(unit, target, pairing_row(x.dim()).transpose(), tol)
}

/// Residuals of the two zig-zag identities and of the intertwining
/// equations of evaluation and coevaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleReport {
    /// `||(1_X (x) ev)(coev (x) 1_X) - 1_X||`
    pub left: f64,
    /// `||(ev (x) 1_Xv)(1_Xv (x) coev) - 1_Xv||`
    pub right: f64,
    pub evaluation_residual: f64,
    pub coevaluation_residual: f64,
}

pub fn triangle_identities(x: &NormalForm, tol: &Tolerances) -> Result<TriangleReport> {
    let n = x.dim();
    if n == 0 {
        return Err(Error::InvalidInput("rigidity check needs a nonzero object".into()));
    }
    let ev = evaluation(x, tol)?;
    let coev = coevaluation(x, tol)?;
    let id = identity(n);
    let left = kron(&id, &ev.phi) * kron(&coev.phi, &id) - &id;
    let right = kron(&ev.phi, &id) * kron(&id, &coev.phi) - &id;
    Ok(TriangleReport {
        left: left.norm(),
        right: right.norm(),
        evaluation_residual: ev.intertwining_residual(),
        coevaluation_residual: coev.intertwining_residual(),
    })
}
