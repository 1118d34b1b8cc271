//! Cluster-count estimation from the largest gap in the leading part of the
//! Laplacian spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SEARCH_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigengapEstimate {
    pub k: usize,
    /// `gaps[i] = |λ_{i+1} - λ_{i+2}|` (zero-based storage of δ₁..δₙ₋₁).
    pub gaps: Vec<f64>,
    /// Largest gap index considered.
    pub search_limit: usize,
}

/// `K = argmax_{1 ≤ i ≤ limit} |λᵢ - λᵢ₊₁|` with
/// `limit = max(1, ⌊search_fraction · n⌋)`; ties go to the smallest `i`.
pub fn eigengap_k(eigenvalues: &[f64], search_fraction: f64) -> Result<EigengapEstimate> {
    let n = eigenvalues.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if !(search_fraction > 0.0 && search_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "search fraction must lie in (0, 1], got {search_fraction}"
        )));
    }
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("eigenvalues contain NaN or Inf".into()));
    }
    if let Some(i) = eigenvalues.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::InvalidData(format!(
            "eigenvalues not sorted descending at index {i}"
        )));
    }
    let gaps: Vec<f64> = eigenvalues
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .collect();
    let search_limit = ((search_fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let mut k = 1;
    for i in 1..search_limit {
        if gaps[i] > gaps[k - 1] {
            k = i + 1;
        }
    }
    Ok(EigengapEstimate {
        k,
        gaps,
        search_limit,
    })
}
