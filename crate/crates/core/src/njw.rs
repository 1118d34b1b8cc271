//! NJW spectral clustering: affinity, normalized Laplacian, leading
//! eigenvectors, row normalisation, then k-means on the embedded rows.

use crate::affinity::{
    affinity_global, affinity_local, normalized_laplacian, AffinityMatrix, DistanceExponent,
    LaplacianMatrix,
};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansResult};
use crate::linalg::{symmetric_eigen, EigenPairs, Matrix};
use crate::scaling::ScalingEstimate;

/// Row-normalized leading eigenvectors; every row has unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    y: Matrix,
}

impl SpectralEmbedding {
    pub fn matrix(&self) -> &Matrix {
        &self.y
    }

    pub fn into_matrix(self) -> Matrix {
        self.y
    }

    pub fn dims(&self) -> usize {
        self.y.cols()
    }
}

pub fn spectral_embed(l: &LaplacianMatrix, k: usize) -> Result<SpectralEmbedding> {
    check_k(l.len(), k)?;
    let eig = symmetric_eigen(l.matrix())?;
    embed_from_eigen(&eig, k)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension must lie in [1, {n}], got {k}"
        )));
    }
    Ok(())
}

/// Embedding from an already computed spectrum (descending order).
pub fn embed_from_eigen(eig: &EigenPairs, k: usize) -> Result<SpectralEmbedding> {
    check_k(eig.len(), k)?;
    let mut y = eig.leading_vectors(k);
    for i in 0..y.rows() {
        let row = y.row_mut(i);
        let norm_sq: f64 = row.iter().map(|v| v * v).sum();
        if !(norm_sq >= f64::MIN_POSITIVE) {
            return Err(Error::DegenerateEmbedding(i));
        }
        let norm = norm_sq.sqrt();
        row.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(SpectralEmbedding { y })
}

/// Affinity matching the kind of scale estimate.
pub fn build_affinity(
    data: &Matrix,
    scaling: &ScalingEstimate,
    exponent: DistanceExponent,
) -> Result<AffinityMatrix> {
    match scaling {
        ScalingEstimate::Global(g) => affinity_global(data, g.sigma_sq, exponent),
        ScalingEstimate::Local(l) => affinity_local(data, &l.sigmas, exponent),
    }
}

/// Everything produced by one NJW pass.
#[derive(Debug, Clone)]
pub struct NjwRun {
    pub eigen: EigenPairs,
    pub embedding: SpectralEmbedding,
    pub kmeans: KMeansResult,
}

impl NjwRun {
    pub fn assignments(&self) -> &[usize] {
        &self.kmeans.assignments
    }
}

pub fn njw_run(
    data: &Matrix,
    k: usize,
    scaling: &ScalingEstimate,
    seed: u64,
    exponent: DistanceExponent,
) -> Result<NjwRun> {
    check_k(data.rows(), k)?;
    let a = build_affinity(data, scaling, exponent)?;
    let l = normalized_laplacian(&a)?;
    let eigen = symmetric_eigen(l.matrix())?;
    njw_from_eigen(eigen, k, seed)
}

pub(crate) fn njw_from_eigen(eigen: EigenPairs, k: usize, seed: u64) -> Result<NjwRun> {
    let embedding = embed_from_eigen(&eigen, k)?;
    let km = kmeans(embedding.matrix(), k, seed)?;
    Ok(NjwRun {
        eigen,
        embedding,
        kmeans: km,
    })
}

/// Cluster ids for each point of `data` (dense, possibly fewer than `k`
/// when k-means drops empty clusters).
pub fn njw_cluster(
    data: &Matrix,
    k: usize,
    scaling: &ScalingEstimate,
    seed: u64,
    exponent: DistanceExponent,
) -> Result<Vec<usize>> {
    Ok(njw_run(data, k, scaling, seed, exponent)?
        .kmeans
        .assignments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affinity::AffinityMatrix;
    use crate::scaling::estimate_global_sigma;
    use approx::assert_abs_diff_eq;

    fn block_laplacian(sizes: &[usize]) -> LaplacianMatrix {
        let n: usize = sizes.iter().sum();
        let mut block = Vec::new();
        for (b, &s) in sizes.iter().enumerate() {
            block.extend(std::iter::repeat_n(b, s));
        }
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j && block[i] == block[j] {
                    m[(i, j)] = 1.0;
                }
            }
        }
        normalized_laplacian(&AffinityMatrix::new(m).unwrap()).unwrap()
    }

    #[test]
    fn two_block_embedding() {
        let l = block_laplacian(&[4, 3]);
        let y = spectral_embed(&l, 2).unwrap();
        let y = y.matrix();
        for i in 0..7 {
            let norm: f64 = y.row(i).iter().map(|v| v * v).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
        // rows within a block coincide, rows across blocks are orthogonal
        for i in 0..7 {
            for j in 0..7 {
                let dot: f64 = y.row(i).iter().zip(y.row(j)).map(|(a, b)| a * b).sum();
                let expected = if (i < 4) == (j < 4) { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expected, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn one_dimensional_embedding() {
        let l = block_laplacian(&[5]);
        let y = spectral_embed(&l, 1).unwrap();
        for v in y.matrix().as_slice() {
            assert_abs_diff_eq!(v.abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn embed_rejects_bad_k() {
        let l = block_laplacian(&[3]);
        assert!(matches!(
            spectral_embed(&l, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            spectral_embed(&l, 4),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn separated_groups() {
        let data = Matrix::column_vector(&[0.0, 0.1, 100.0, 100.1]).unwrap();
        let scale = estimate_global_sigma(&data, 0.95).unwrap();
        let a = njw_cluster(&data, 2, &scale, 0, DistanceExponent::Squared).unwrap();
        assert_eq!(a[0], a[1]);
        assert_eq!(a[2], a[3]);
        assert_ne!(a[0], a[2]);

        let one = njw_cluster(&data, 1, &scale, 0, DistanceExponent::Squared).unwrap();
        assert_eq!(one, vec![0; 4]);
    }
}
