//! Deterministic Lloyd k-means with farthest-point initialisation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{squared_distance, Matrix};

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
    /// Number of distinct seeded first centres tried; the lowest SSE wins.
    pub restarts: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Dense cluster ids in `0..centroids.rows()`.
    pub assignments: Vec<usize>,
    pub centroids: Matrix,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// SSE after each assignment step, ending with the final value.
    pub sse_trace: Vec<f64>,
}

impl KMeansResult {
    /// Number of non-empty clusters; may be below the requested k.
    pub fn effective_k(&self) -> usize {
        self.centroids.rows()
    }
}

/// k-means with default options; the seed picks the first centres.
pub fn kmeans(data: &Matrix, k: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_with(data, k, seed, KMeansOptions::default())
}

/// Best of `opts.restarts` farthest-point runs whose first centres are
/// distinct indices drawn from `seed`. Ties keep the earlier draw.
pub fn kmeans_with(
    data: &Matrix,
    k: usize,
    seed: u64,
    opts: KMeansOptions,
) -> Result<KMeansResult> {
    check_k(data, k)?;
    let n = data.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = rand::seq::index::sample(&mut rng, n, opts.restarts.clamp(1, n));
    let mut best: Option<KMeansResult> = None;
    for first in starts.iter() {
        let run = kmeans_from_start(data, k, first, opts)?;
        if best.as_ref().is_none_or(|b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}

fn check_k(data: &Matrix, k: usize) -> Result<()> {
    let n = data.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must lie in [1, {n}], got {k}"
        )));
    }
    Ok(())
}

/// k-means whose first centre is the point at index `first`; the remaining
/// centres are chosen greedily as the point farthest from all chosen centres.
pub fn kmeans_from_start(
    data: &Matrix,
    k: usize,
    first: usize,
    opts: KMeansOptions,
) -> Result<KMeansResult> {
    check_k(data, k)?;
    if first >= data.rows() {
        return Err(Error::InvalidParameter(format!(
            "start index {first} out of range"
        )));
    }
    if !data.all_finite() {
        return Err(Error::InvalidData("data contains NaN or Inf".into()));
    }
    let mut centroids = farthest_point_init(data, k, first);
    let mut assignments = assign(data, &centroids);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        iterations += 1;
        trace.push(sse_unchecked(data, &assignments, &centroids));

        let (updated, remap) = update_centroids(data, &assignments, centroids.rows());
        let movement = remap
            .iter()
            .enumerate()
            .filter_map(|(old, new)| new.map(|new| (old, new)))
            .map(|(old, new)| squared_distance(centroids.row(old), updated.row(new)).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;

        let next = assign(data, &centroids);
        let changed = next
            .iter()
            .zip(&assignments)
            .any(|(&a, &b)| remap[b] != Some(a));
        assignments = next;
        if !changed || movement < opts.tol {
            converged = true;
            break;
        }
    }
    let sse = sse_unchecked(data, &assignments, &centroids);
    trace.push(sse);
    debug_assert!(
        trace
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1e-300)),
        "SSE increased during Lloyd iteration: {trace:?}"
    );
    Ok(KMeansResult {
        assignments,
        centroids,
        sse,
        iterations,
        converged,
        sse_trace: trace,
    })
}

fn farthest_point_init(data: &Matrix, k: usize, first: usize) -> Matrix {
    let n = data.rows();
    let mut chosen = vec![first];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(data.row(i), data.row(first)))
        .collect();
    while chosen.len() < k {
        let mut best = 0;
        for i in 1..n {
            if nearest[i] > nearest[best] {
                best = i;
            }
        }
        // every remaining point coincides with a centre
        if nearest[best] <= 0.0 {
            break;
        }
        chosen.push(best);
        let c = data.row(best);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(data.row(i), c));
        }
    }
    data.select_rows(&chosen)
}

/// Nearest centroid per point; ties go to the lowest id.
fn assign(data: &Matrix, centroids: &Matrix) -> Vec<usize> {
    data.row_iter()
        .map(|x| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centre) in centroids.row_iter().enumerate() {
                let d = squared_distance(x, centre);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Cluster means, dropping empty clusters. `remap[old]` is the new id.
fn update_centroids(
    data: &Matrix,
    assignments: &[usize],
    k: usize,
) -> (Matrix, Vec<Option<usize>>) {
    let d = data.cols();
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (x, &c) in data.row_iter().zip(assignments) {
        counts[c] += 1;
        for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(x) {
            *s += v;
        }
    }
    let mut remap = vec![None; k];
    let mut rows = Vec::new();
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        remap[c] = Some(rows.len());
        let cnt = counts[c] as f64;
        rows.push(
            sums[c * d..(c + 1) * d]
                .iter()
                .map(|s| s / cnt)
                .collect::<Vec<_>>(),
        );
    }
    (
        Matrix::from_rows(&rows).expect("at least one non-empty cluster"),
        remap,
    )
}

fn sse_unchecked(data: &Matrix, assignments: &[usize], centroids: &Matrix) -> f64 {
    data.row_iter()
        .zip(assignments)
        .map(|(x, &c)| squared_distance(x, centroids.row(c)))
        .sum()
}

/// Sum of squared distances from each point to its cluster centroid.
pub fn sse(data: &Matrix, assignments: &[usize], centroids: &Matrix) -> Result<f64> {
    if assignments.len() != data.rows() {
        return Err(Error::Dimension(format!(
            "{} assignments for {} points",
            assignments.len(),
            data.rows()
        )));
    }
    if centroids.cols() != data.cols() {
        return Err(Error::Dimension(format!(
            "centroids have {} columns, data has {}",
            centroids.cols(),
            data.cols()
        )));
    }
    if let Some(bad) = assignments.iter().find(|&&c| c >= centroids.rows()) {
        return Err(Error::Dimension(format!(
            "assignment {bad} outside {} centroids",
            centroids.rows()
        )));
    }
    Ok(sse_unchecked(data, assignments, centroids))
}

/// Centroids as per-cluster means of `assignments` (ids dense in `0..k`).
pub fn cluster_means(data: &Matrix, assignments: &[usize], k: usize) -> Result<Matrix> {
    if assignments.len() != data.rows() {
        return Err(Error::Dimension("assignment length mismatch".into()));
    }
    if let Some(bad) = assignments.iter().find(|&&c| c >= k) {
        return Err(Error::Dimension(format!(
            "assignment {bad} outside {k} clusters"
        )));
    }
    let (m, remap) = update_centroids(data, assignments, k);
    if remap.iter().any(Option::is_none) {
        return Err(Error::InvalidData("cluster ids are not dense".into()));
    }
    Ok(m)
}
