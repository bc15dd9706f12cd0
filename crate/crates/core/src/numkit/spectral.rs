use super::schur::{clustered_schur, solve_triangular_sylvester};
use super::{block_diag, CMat, Tolerances, C64};
use crate::error::Result;

/// One eigenvalue cluster together with a basis of its generalized eigenspace.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub eigenvalue: C64,
    pub multiplicity: usize,
    /// `n x multiplicity` basis of the invariant subspace.
    pub basis: CMat,
}

/// Block-diagonal spectral decomposition `m = similarity * diag(blocks) * similarity^-1`
/// with one upper triangular block per eigenvalue cluster.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub clusters: Vec<Cluster>,
    pub similarity: CMat,
    pub similarity_inv: CMat,
    pub blocks: Vec<CMat>,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.similarity.nrows()
    }

    pub fn block_form(&self) -> CMat {
        block_diag(&self.blocks)
    }

    /// `similarity * block_form * similarity^-1`.
    pub fn reassemble(&self) -> CMat {
        &self.similarity * self.block_form() * &self.similarity_inv
    }

    /// Index ranges of the clusters inside the block form.
    pub fn ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut at = 0;
        self.clusters
            .iter()
            .map(|c| {
                let r = at..at + c.multiplicity;
                at += c.multiplicity;
                r
            })
            .collect()
    }

    /// Spectral projector onto the generalized eigenspace of cluster `j`.
    pub fn projector(&self, j: usize) -> CMat {
        let r = self.ranges()[j].clone();
        let s = self.similarity.columns(r.start, r.len());
        let sinv = self.similarity_inv.rows(r.start, r.len());
        s * sinv
    }
}

/// Clusters the spectrum of `m` (radius `eps_spec`, scaled by `max(1, ||m||_F)`)
/// and block-diagonalizes `m` along the clusters.
pub fn spectral(m: &CMat, tol: &Tolerances) -> Result<SpectralData> {
    let cs = clustered_schur(m, tol)?;
    let n = cs.t.nrows();
    let mut t = cs.t.clone();
    let mut x = CMat::identity(n, n);
    let mut xinv = CMat::identity(n, n);
    for (i, block) in cs.blocks.iter().enumerate() {
        if i + 1 == cs.blocks.len() {
            break;
        }
        let r1 = block.clone();
        let rest = block.end..n;
        let t11 = t.view((r1.start, r1.start), (r1.len(), r1.len())).into_owned();
        let t22 = t.view((rest.start, rest.start), (rest.len(), rest.len())).into_owned();
        let t12 = t.view((r1.start, rest.start), (r1.len(), rest.len())).into_owned();
        let y = solve_triangular_sylvester(&t11, &t22, &(-t12))?;
        t.view_mut((r1.start, rest.start), (r1.len(), rest.len())).fill(C64::new(0.0, 0.0));
        // x <- x [[I, y], [0, I]]
        let xa = x.columns(r1.start, r1.len()).into_owned();
        let mut xb = x.columns_mut(rest.start, rest.len());
        xb += &xa * &y;
        // xinv <- [[I, -y], [0, I]] xinv
        let xib = xinv.rows(rest.start, rest.len()).into_owned();
        let mut xia = xinv.rows_mut(r1.start, r1.len());
        xia -= &y * xib;
    }
    let similarity = &cs.q * &x;
    let similarity_inv = &xinv * cs.q.adjoint();
    let blocks: Vec<CMat> = cs
        .blocks
        .iter()
        .map(|r| t.view((r.start, r.start), (r.len(), r.len())).into_owned())
        .collect();
    let clusters = cs
        .blocks
        .iter()
        .zip(&cs.centers)
        .map(|(r, &eigenvalue)| Cluster {
            eigenvalue,
            multiplicity: r.len(),
            basis: similarity.columns(r.start, r.len()).into_owned(),
        })
        .collect();
    Ok(SpectralData {
        clusters,
        similarity,
        similarity_inv,
        blocks,
    })
}
