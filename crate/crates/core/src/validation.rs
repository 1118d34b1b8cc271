//! Internal validation (SSE elbow sweep) and external validation against
//! ground-truth labels: association matrix, majority-vote confusion matrix,
//! support-weighted precision/recall/F-measure and cluster-quality
//! indicators.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affinity::{normalized_laplacian, DistanceExponent};
use crate::error::{Error, Result};
use crate::kmeans::{cluster_means, sse};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::njw::{build_affinity, njw_from_eigen};
use crate::scaling::ScalingEstimate;

/// Counts of (ground-truth label, generated cluster) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationMatrix<L> {
    /// `counts[l][c]` indexed by position in `label_ids` / `cluster_ids`.
    pub counts: Vec<Vec<usize>>,
    /// Sorted ascending.
    pub label_ids: Vec<L>,
    /// Sorted ascending.
    pub cluster_ids: Vec<usize>,
}

impl<L> AssociationMatrix<L> {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        (0..self.cluster_ids.len())
            .map(|c| self.counts.iter().map(|r| r[c]).sum())
            .collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }
}

pub fn association_matrix<L: Ord + Clone>(
    assignments: &[usize],
    labels: &[L],
) -> Result<AssociationMatrix<L>> {
    if assignments.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} assignments but {} labels",
            assignments.len(),
            labels.len()
        )));
    }
    let label_pos: BTreeMap<&L, usize> = {
        let mut m: BTreeMap<&L, usize> = labels.iter().map(|l| (l, 0)).collect();
        m.values_mut().enumerate().for_each(|(i, v)| *v = i);
        m
    };
    let cluster_pos: BTreeMap<usize, usize> = {
        let mut m: BTreeMap<usize, usize> = assignments.iter().map(|&c| (c, 0)).collect();
        m.values_mut().enumerate().for_each(|(i, v)| *v = i);
        m
    };
    let mut counts = vec![vec![0usize; cluster_pos.len()]; label_pos.len()];
    for (l, c) in labels.iter().zip(assignments) {
        counts[label_pos[l]][cluster_pos[c]] += 1;
    }
    Ok(AssociationMatrix {
        counts,
        label_ids: label_pos.keys().map(|&l| l.clone()).collect(),
        cluster_ids: cluster_pos.keys().copied().collect(),
    })
}

/// Label × label counts after majority-vote labelling of clusters.
/// Rows are true labels, columns assigned labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix<L> {
    pub counts: Vec<Vec<usize>>,
    pub label_ids: Vec<L>,
    /// Cluster id → label assigned by majority vote.
    pub cluster_label_map: BTreeMap<usize, L>,
}

impl<L> ConfusionMatrix<L> {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }
}

/// Label every cluster with its modal class and merge clusters sharing a
/// label. Ties go to the class with larger total support, then to the
/// smaller label.
pub fn confusion_from_association<L: Ord + Clone>(am: &AssociationMatrix<L>) -> ConfusionMatrix<L> {
    let n_labels = am.label_ids.len();
    let support = am.class_sizes();
    let mut counts = vec![vec![0usize; n_labels]; n_labels];
    let mut cluster_label_map = BTreeMap::new();
    for (c, &cid) in am.cluster_ids.iter().enumerate() {
        let mut best = 0;
        for l in 1..n_labels {
            let (a, b) = (am.counts[l][c], am.counts[best][c]);
            if a > b || (a == b && support[l] > support[best]) {
                best = l;
            }
        }
        cluster_label_map.insert(cid, am.label_ids[best].clone());
        for (l, row) in counts.iter_mut().enumerate() {
            row[best] += am.counts[l][c];
        }
    }
    ConfusionMatrix {
        counts,
        label_ids: am.label_ids.clone(),
        cluster_label_map,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics<L> {
    pub label: L,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<L> {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub per_label: Vec<LabelMetrics<L>>,
    /// Generated clusters per ground-truth class.
    pub indicator_cluster_ratio: f64,
    /// Fraction of classes that own at least one cluster.
    pub indicator_label_recovery: f64,
    pub n_clusters: usize,
    pub n_labels: usize,
}

pub fn metrics<L: Ord + Clone>(
    cm: &ConfusionMatrix<L>,
    n_clusters_generated: usize,
) -> MetricsReport<L> {
    let n_labels = cm.label_ids.len();
    let total = cm.total();
    let mut per_label = Vec::with_capacity(n_labels);
    let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
    for l in 0..n_labels {
        let tp = cm.counts[l][l] as f64;
        let support: usize = cm.counts[l].iter().sum();
        let predicted: usize = cm.counts.iter().map(|r| r[l]).sum();
        let precision = if predicted > 0 {
            tp / predicted as f64
        } else {
            0.0
        };
        let recall = if support > 0 {
            tp / support as f64
        } else {
            0.0
        };
        let f_measure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let w = support as f64;
        wp += w * precision;
        wr += w * recall;
        wf += w * f_measure;
        per_label.push(LabelMetrics {
            label: cm.label_ids[l].clone(),
            precision,
            recall,
            f_measure,
            support,
        });
    }
    let denom = total.max(1) as f64;
    let recovered = cm
        .label_ids
        .iter()
        .filter(|l| cm.cluster_label_map.values().any(|v| v == *l))
        .count();
    let labels_f = n_labels.max(1) as f64;
    MetricsReport {
        accuracy: cm.trace() as f64 / denom,
        precision: wp / denom,
        recall: wr / denom,
        f_measure: wf / denom,
        per_label,
        indicator_cluster_ratio: n_clusters_generated as f64 / labels_f,
        indicator_label_recovery: recovered as f64 / labels_f,
        n_clusters: n_clusters_generated,
        n_labels,
    }
}

/// Association, majority-vote confusion and metrics in one call.
pub fn evaluate<L: Ord + Clone>(assignments: &[usize], labels: &[L]) -> Result<MetricsReport<L>> {
    let am = association_matrix(assignments, labels)?;
    let cm = confusion_from_association(&am);
    Ok(metrics(&cm, am.cluster_ids.len()))
}

/// Space in which the elbow SSE is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElbowSpace {
    /// Row-normalized spectral embedding, where the final k-means runs.
    #[default]
    Embedding,
    /// Original feature space, using the NJW partition's cluster means.
    Raw,
}

/// SSE of NJW clustering for every k in `k_min..=k_max`, all with the same
/// k-means seed. Values are reported raw; no monotonicity is enforced. A k
/// whose embedding has a zero row reports NaN.
pub fn elbow_sweep(
    data: &Matrix,
    k_min: usize,
    k_max: usize,
    scaling: &ScalingEstimate,
    seed: u64,
    space: ElbowSpace,
    exponent: DistanceExponent,
) -> Result<Vec<(usize, f64)>> {
    let n = data.rows();
    if k_min == 0 || k_min > k_max || k_max > n {
        return Err(Error::InvalidParameter(format!(
            "k range [{k_min}, {k_max}] must lie within [1, {n}]"
        )));
    }
    let a = build_affinity(data, scaling, exponent)?;
    let l = normalized_laplacian(&a)?;
    let eigen = symmetric_eigen(l.matrix())?;
    (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let run = match njw_from_eigen(eigen.clone(), k, seed) {
                Ok(run) => run,
                Err(Error::DegenerateEmbedding(_)) => return Ok((k, f64::NAN)),
                Err(e) => return Err(e),
            };
            let value = match space {
                ElbowSpace::Embedding => run.kmeans.sse,
                ElbowSpace::Raw => {
                    let centroids =
                        cluster_means(data, run.assignments(), run.kmeans.effective_k())?;
                    sse(data, run.assignments(), &centroids)?
                }
            };
            Ok((k, value))
        })
        .collect()
}
