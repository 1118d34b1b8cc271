//! Gaussian affinity matrices and the symmetric normalized Laplacian.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pairwise_squared_distances, Matrix};

/// Power applied to the Euclidean distance inside the Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DistanceExponent {
    /// `exp(-‖sᵢ - sⱼ‖ / scale)`
    #[serde(rename = "1")]
    Linear,
    /// `exp(-‖sᵢ - sⱼ‖² / scale)`
    #[default]
    #[serde(rename = "2")]
    Squared,
}

impl DistanceExponent {
    pub fn from_power(p: u8) -> Result<Self> {
        match p {
            1 => Ok(DistanceExponent::Linear),
            2 => Ok(DistanceExponent::Squared),
            other => Err(Error::InvalidParameter(format!(
                "distance exponent must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn power(self) -> u8 {
        match self {
            DistanceExponent::Linear => 1,
            DistanceExponent::Squared => 2,
        }
    }

    #[inline]
    fn apply(self, sq_dist: f64) -> f64 {
        match self {
            DistanceExponent::Linear => sq_dist.sqrt(),
            DistanceExponent::Squared => sq_dist,
        }
    }
}

/// Symmetric affinity matrix with zero diagonal and entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix(Matrix);

impl AffinityMatrix {
    /// Wrap a precomputed affinity, checking its invariants.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("affinity matrix must be square".into()));
        }
        let n = m.rows();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::InvalidData(format!(
                    "affinity diagonal entry {i} is nonzero"
                )));
            }
            for j in 0..n {
                let v = m[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidData(format!(
                        "affinity entry ({i}, {j}) = {v} outside [0, 1]"
                    )));
                }
                if v != m[(j, i)] {
                    return Err(Error::InvalidData(
                        "affinity matrix is not symmetric".into(),
                    ));
                }
            }
        }
        Ok(AffinityMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    /// Indices whose affinity row sums to zero.
    pub fn isolated_points(&self) -> Vec<usize> {
        self.0
            .row_iter()
            .enumerate()
            .filter(|(_, r)| !(r.iter().sum::<f64>() > 0.0))
            .map(|(i, _)| i)
            .collect()
    }

    /// Restriction to the listed points.
    pub fn restrict(&self, indices: &[usize]) -> AffinityMatrix {
        AffinityMatrix(self.0.select_square(indices))
    }
}

/// Normalized Laplacian `D^{-1/2} A D^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(Matrix);

impl LaplacianMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }
}

fn fill_affinity(sq: &Matrix, kernel: impl Fn(usize, usize, f64) -> f64 + Sync) -> Matrix {
    let n = sq.rows();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        kernel(i, j, sq[(i, j)])
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Matrix::zeros(n, n);
    for (i, r) in rows.into_iter().enumerate() {
        out.row_mut(i).copy_from_slice(&r);
    }
    // the kernels are symmetric in (i, j) up to floating-point association;
    // mirror the upper triangle so the result is exactly symmetric
    for i in 0..n {
        for j in (i + 1)..n {
            out[(j, i)] = out[(i, j)];
        }
    }
    out
}

/// `A_ij = exp(-dist(sᵢ, sⱼ) / (2σ²))` for i ≠ j.
pub fn affinity_global(
    data: &Matrix,
    sigma_sq: f64,
    exponent: DistanceExponent,
) -> Result<AffinityMatrix> {
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma_sq must be positive and finite, got {sigma_sq}"
        )));
    }
    let sq = pairwise_squared_distances(data);
    let denom = 2.0 * sigma_sq;
    Ok(AffinityMatrix(fill_affinity(&sq, |_, _, d2| {
        (-exponent.apply(d2) / denom).exp()
    })))
}

/// `A_ij = exp(-dist(sᵢ, sⱼ) / (σᵢσⱼ))` for i ≠ j. When `σᵢσⱼ = 0` the
/// entry is 1 for coincident points and 0 otherwise.
pub fn affinity_local(
    data: &Matrix,
    local_sigmas: &[f64],
    exponent: DistanceExponent,
) -> Result<AffinityMatrix> {
    if local_sigmas.len() != data.rows() {
        return Err(Error::Dimension(format!(
            "{} local scales for {} points",
            local_sigmas.len(),
            data.rows()
        )));
    }
    if local_sigmas.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidParameter(
            "local scales must be finite and nonnegative".into(),
        ));
    }
    let sq = pairwise_squared_distances(data);
    Ok(AffinityMatrix(fill_affinity(&sq, |i, j, d2| {
        let scale = local_sigmas[i] * local_sigmas[j];
        if scale > 0.0 {
            (-exponent.apply(d2) / scale).exp()
        } else if d2 == 0.0 {
            1.0
        } else {
            0.0
        }
    })))
}

/// `L = D^{-1/2} A D^{-1/2}` with `D_ii = Σ_j A_ij`. Fails with the offending
/// indices when any row of `A` sums to zero.
pub fn normalized_laplacian(a: &AffinityMatrix) -> Result<LaplacianMatrix> {
    let isolated = a.isolated_points();
    if !isolated.is_empty() {
        return Err(Error::IsolatedPoints(isolated));
    }
    let m = a.matrix();
    let n = m.rows();
    let inv_sqrt: Vec<f64> = m
        .row_iter()
        .map(|r| 1.0 / r.iter().sum::<f64>().sqrt())
        .collect();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        let src = m.row(i);
        let di = inv_sqrt[i];
        for (j, dst) in l.row_mut(i).iter_mut().enumerate() {
            *dst = di * src[j] * inv_sqrt[j];
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            l[(j, i)] = l[(i, j)];
        }
    }
    Ok(LaplacianMatrix(l))
}
