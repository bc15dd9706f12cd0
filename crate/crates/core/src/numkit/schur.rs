use std::ops::Range;

use nalgebra::linalg::Schur;

use super::{check_finite, check_square, CMat, Tolerances, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Complex Schur form `m = q t q^H` with `t` upper triangular.
pub(crate) fn schur(m: &CMat) -> Result<(CMat, CMat)> {
    check_square(m)?;
    check_finite(m)?;
    // The QR iteration can stall when deflation is tested at exactly machine
    // epsilon; retry with slightly looser deflation thresholds.
    let (q, mut t) = [1.0, 8.0, 64.0]
        .iter()
        .find_map(|f| Schur::try_new(m.clone(), f * f64::EPSILON, MAX_SWEEPS))
        .ok_or(Error::NoConvergence {
            iterations: MAX_SWEEPS,
        })?
        .unpack();
    let n = t.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

/// Schur form whose diagonal is grouped into contiguous eigenvalue clusters.
#[derive(Debug, Clone)]
pub(crate) struct ClusteredSchur {
    pub q: CMat,
    pub t: CMat,
    pub blocks: Vec<Range<usize>>,
    pub centers: Vec<C64>,
}

/// Greedy single-link clustering of `values` with radius `radius`.
/// Returns a cluster label per value.
fn cluster_labels(values: &[C64], radius: f64) -> Vec<usize> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Clustering radius for a matrix of the given norm.
pub(crate) fn cluster_radius(tol: &Tolerances, norm: f64) -> f64 {
    tol.eps_spec * norm.max(1.0)
}

/// Unitary swap of the adjacent diagonal entries `k`, `k + 1` of `t`.
fn swap_adjacent(q: &mut CMat, t: &mut CMat, k: usize) {
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let x0 = t[(k, k + 1)];
    let x1 = b - a;
    let r = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    if r == 0.0 {
        return;
    }
    let (c, s) = (x0 / r, x1 / r);
    // g has first column (c, s): g^H t g moves b to position k
    let g = CMat::from_row_slice(2, 2, &[c, -s.conj(), s, c.conj()]);
    let gh = g.adjoint();
    let n = t.nrows();
    let rows = t.view((k, 0), (2, n)).into_owned();
    t.view_mut((k, 0), (2, n)).copy_from(&(&gh * rows));
    let cols = t.view((0, k), (n, 2)).into_owned();
    t.view_mut((0, k), (n, 2)).copy_from(&(cols * &g));
    let qc = q.view((0, k), (n, 2)).into_owned();
    q.view_mut((0, k), (n, 2)).copy_from(&(qc * &g));
    t[(k + 1, k)] = C64::new(0.0, 0.0);
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Schur form of `m` reordered so that each eigenvalue cluster occupies a
/// contiguous diagonal block; clusters are ordered by (Re, Im) of their
/// centers.
pub(crate) fn clustered_schur(m: &CMat, tol: &Tolerances) -> Result<ClusteredSchur> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(ClusteredSchur {
            q: CMat::zeros(0, 0),
            t: CMat::zeros(0, 0),
            blocks: Vec::new(),
            centers: Vec::new(),
        });
    }
    let (mut q, mut t) = schur(m)?;
    let diag: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let radius = cluster_radius(tol, m.norm());
    let labels = cluster_labels(&diag, radius);

    let mut roots: Vec<usize> = labels.clone();
    roots.sort_unstable();
    roots.dedup();
    let mut centers: Vec<(usize, C64)> = roots
        .iter()
        .map(|&r| {
            let members: Vec<C64> = (0..n).filter(|&i| labels[i] == r).map(|i| diag[i]).collect();
            let sum: C64 = members.iter().sum();
            (r, sum / members.len() as f64)
        })
        .collect();
    centers.sort_by(|x, y| x.1.re.total_cmp(&y.1.re).then(x.1.im.total_cmp(&y.1.im)));
    let rank_of = |label: usize| centers.iter().position(|c| c.0 == label).unwrap();

    // bubble the diagonal into cluster order; entries of one cluster keep their relative order
    let mut ranks: Vec<usize> = labels.iter().map(|&l| rank_of(l)).collect();
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            if ranks[k] > ranks[k + 1] {
                swap_adjacent(&mut q, &mut t, k);
                ranks.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }

    let mut blocks = Vec::with_capacity(centers.len());
    let mut start = 0;
    for r in 0..centers.len() {
        let len = ranks.iter().filter(|&&x| x == r).count();
        blocks.push(start..start + len);
        start += len;
    }
    Ok(ClusteredSchur {
        q,
        t,
        blocks,
        centers: centers.into_iter().map(|c| c.1).collect(),
    })
}

/// Solves `a x - x b = c` for upper triangular `a` (n x n) and `b` (m x m).
pub(crate) fn solve_triangular_sylvester(a: &CMat, b: &CMat, c: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let m = b.nrows();
    let mut x = CMat::zeros(n, m);
    for j in 0..m {
        let mut rhs: Vec<C64> = (0..n).map(|r| c[(r, j)]).collect();
        for i in 0..j {
            let bij = b[(i, j)];
            if bij != C64::new(0.0, 0.0) {
                for (r, v) in rhs.iter_mut().enumerate() {
                    *v += x[(r, i)] * bij;
                }
            }
        }
        let shift = b[(j, j)];
        for r in (0..n).rev() {
            let mut acc = rhs[r];
            for s in (r + 1)..n {
                acc -= a[(r, s)] * x[(s, j)];
            }
            let d = a[(r, r)] - shift;
            if d.norm() == 0.0 {
                return Err(Error::SpectrumCollision {
                    left: a[(r, r)],
                    right: shift,
                    gap: 0.0,
                });
            }
            x[(r, j)] = acc / d;
        }
    }
    Ok(x)
}
