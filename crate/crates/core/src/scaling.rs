//! Data-driven estimation of the affinity scale: a global σ² from the PCA
//! variance spectrum, or per-point local σᵢ from k-nearest-neighbour distances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pca, squared_distance, Matrix};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.95;
pub const DEFAULT_KNN: usize = 7;

/// Global scale parameter derived from the principal axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalScale {
    pub sigma_sq: f64,
    /// Number of leading principal axes `y` entering the weighted mean.
    pub components_used: usize,
    /// Cumulative explained-variance ratio of those axes.
    pub variance_captured: f64,
    /// Feature count of the data the scale was estimated on.
    pub dims: usize,
}

/// Per-point scale: distance to the k-th nearest neighbour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalScale {
    pub sigmas: Vec<f64>,
    /// Neighbour rank actually used, `min(k, n - 1)`.
    pub k_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalingEstimate {
    Global(GlobalScale),
    Local(LocalScale),
}

impl ScalingEstimate {
    /// A fixed global σ² supplied by the caller.
    pub fn fixed_global(sigma_sq: f64, dims: usize) -> Result<Self> {
        if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma_sq must be positive and finite, got {sigma_sq}"
            )));
        }
        Ok(ScalingEstimate::Global(GlobalScale {
            sigma_sq,
            components_used: dims,
            variance_captured: 1.0,
            dims,
        }))
    }

    pub fn sigma_sq(&self) -> Option<f64> {
        match self {
            ScalingEstimate::Global(g) => Some(g.sigma_sq),
            ScalingEstimate::Local(_) => None,
        }
    }

    pub fn local_sigmas(&self) -> Option<&[f64]> {
        match self {
            ScalingEstimate::Global(_) => None,
            ScalingEstimate::Local(l) => Some(&l.sigmas),
        }
    }
}

/// Global σ² as the variance-weighted mean of the leading principal-axis
/// variances, where `y` is the smallest number of axes whose explained
/// variance ratio reaches `variance_threshold`.
pub fn estimate_global_sigma(data: &Matrix, variance_threshold: f64) -> Result<ScalingEstimate> {
    if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "variance threshold must lie in (0, 1], got {variance_threshold}"
        )));
    }
    let p = pca(data)?;
    let m = p.weights.len();

    // Cumulative sums can land an ulp short of 1.0 when every axis is needed.
    let target = variance_threshold - 1e-12;
    let mut y = m;
    let mut cumulative = 0.0;
    for (i, w) in p.weights.iter().enumerate() {
        cumulative += w;
        if cumulative >= target {
            y = i + 1;
            break;
        }
    }
    let (num, den) = p.weights[..y]
        .iter()
        .zip(&p.variances[..y])
        .fold((0.0, 0.0), |(num, den), (w, v)| (num + w * v, den + w));
    let sigma_sq = num / den;
    if !(sigma_sq > 0.0) {
        return Err(Error::DegenerateData);
    }
    Ok(ScalingEstimate::Global(GlobalScale {
        sigma_sq,
        components_used: y,
        variance_captured: den.min(1.0),
        dims: m,
    }))
}

/// σᵢ = distance from point i to its k-th nearest neighbour, with
/// `k` clamped to `n - 1`.
pub fn estimate_local_sigmas(data: &Matrix, k: usize) -> Result<ScalingEstimate> {
    let n = data.rows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("knn k must be at least 1".into()));
    }
    if !data.all_finite() {
        return Err(Error::InvalidData("data contains NaN or Inf".into()));
    }
    let k_effective = k.min(n - 1);
    let sigmas = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data.row(i);
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| squared_distance(xi, data.row(j)))
                .collect();
            let (_, kth, _) = dists.select_nth_unstable_by(k_effective - 1, f64::total_cmp);
            kth.sqrt()
        })
        .collect();
    Ok(ScalingEstimate::Local(LocalScale {
        sigmas,
        k_effective,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn corners(var_x: f64, var_y: f64) -> Matrix {
        let a = (0.75 * var_x).sqrt();
        let b = (0.75 * var_y).sqrt();
        Matrix::from_rows(&[[a, b], [a, -b], [-a, b], [-a, -b]]).unwrap()
    }

    fn global(est: ScalingEstimate) -> GlobalScale {
        match est {
            ScalingEstimate::Global(g) => g,
            other => panic!("expected global estimate, got {other:?}"),
        }
    }

    #[test]
    fn two_axes_needed() {
        let g = global(estimate_global_sigma(&corners(9.0, 1.0), 0.95).unwrap());
        assert_eq!(g.components_used, 2);
        assert_abs_diff_eq!(g.sigma_sq, 8.2, epsilon = 1e-12);
        assert_abs_diff_eq!(g.variance_captured, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn one_axis_suffices() {
        let g = global(estimate_global_sigma(&corners(99.0, 1.0), 0.95).unwrap());
        assert_eq!(g.components_used, 1);
        assert_abs_diff_eq!(g.sigma_sq, 99.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.variance_captured, 0.99, epsilon = 1e-12);
    }

    #[test]
    fn single_feature() {
        let data = Matrix::from_rows(&[[0.0], [2.0]]).unwrap();
        let g = global(estimate_global_sigma(&data, 0.95).unwrap());
        assert_eq!(g.components_used, 1);
        assert_abs_diff_eq!(g.sigma_sq, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn full_threshold_uses_every_axis() {
        let g = global(estimate_global_sigma(&corners(99.0, 1.0), 1.0).unwrap());
        assert_eq!(g.components_used, 2);
        assert_abs_diff_eq!(g.sigma_sq, 0.99 * 99.0 + 0.01 * 1.0, epsilon = 1e-10);
    }

    #[test]
    fn global_errors() {
        let same = Matrix::from_rows(&[[1.0, 1.0]; 4]).unwrap();
        assert_eq!(
            estimate_global_sigma(&same, 0.95),
            Err(Error::DegenerateData)
        );
        let one = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        assert!(matches!(
            estimate_global_sigma(&one, 0.95),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            estimate_global_sigma(&corners(2.0, 1.0), 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn local_small_set() {
        let data = Matrix::from_rows(&[[0.0], [1.0], [10.0]]).unwrap();
        let est = estimate_local_sigmas(&data, 7).unwrap();
        let ScalingEstimate::Local(l) = est else {
            panic!()
        };
        assert_eq!(l.k_effective, 2);
        assert_eq!(l.sigmas, vec![10.0, 9.0, 10.0]);
    }

    #[test]
    fn local_pair_and_duplicates() {
        let pair = Matrix::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let est = estimate_local_sigmas(&pair, 7).unwrap();
        assert_eq!(est.local_sigmas().unwrap(), &[5.0, 5.0]);

        let dup = Matrix::from_rows(&[[1.0], [1.0], [5.0]]).unwrap();
        let est = estimate_local_sigmas(&dup, 1).unwrap();
        assert_eq!(est.local_sigmas().unwrap(), &[0.0, 0.0, 4.0]);
    }

    #[test]
    fn local_errors() {
        let one = Matrix::from_rows(&[[1.0]]).unwrap();
        assert!(matches!(
            estimate_local_sigmas(&one, 7),
            Err(Error::InsufficientData { .. })
        ));
    }
}
