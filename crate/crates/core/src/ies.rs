//! Iterative eigengap search: a depth-first divisive tree over the data.
//!
//! Every node re-estimates its own scale and cluster count from its members.
//! A node whose spectrum shows a single cluster is accepted as a final
//! cluster; otherwise it is split by NJW with the estimated count and its
//! children are pushed onto a LIFO stack.
//!
//! Each node's k-means seed is derived from the master seed and the node's
//! path of child indices, so the result does not depend on the order in
//! which siblings are visited. With `parallel` set, siblings are processed
//! concurrently and the tree is identical to the sequential one.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affinity::{normalized_laplacian, DistanceExponent};
use crate::eigengap::{eigengap_k, DEFAULT_SEARCH_FRACTION};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::njw::{build_affinity, njw_from_eigen};
use crate::scaling::{
    estimate_global_sigma, estimate_local_sigmas, ScalingEstimate, DEFAULT_KNN,
    DEFAULT_VARIANCE_THRESHOLD,
};

pub const DEFAULT_MIN_NODE_SIZE: usize = 5;
pub const DEFAULT_DEPTH_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    IesGlobal,
    IesLocal,
    Els,
    Njw,
    LegacyEigengap,
}

impl Method {
    pub fn scale_mode(self) -> ScaleMode {
        match self {
            Method::IesLocal | Method::Els => ScaleMode::Local,
            Method::IesGlobal | Method::Njw | Method::LegacyEigengap => ScaleMode::Global,
        }
    }

    /// Single-pass methods stop after splitting the root.
    fn depth_limit(self, cfg: &IesConfig) -> usize {
        match self {
            Method::IesGlobal | Method::IesLocal => cfg.depth_cap,
            Method::Els | Method::Njw | Method::LegacyEigengap => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafReason {
    EigengapOne,
    MinSize,
    Degenerate,
    Isolated,
    DepthCap,
    SplitCollapse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IesConfig {
    pub variance_threshold: f64,
    pub knn_k: usize,
    pub search_fraction: f64,
    pub min_node_size: usize,
    pub depth_cap: usize,
    pub distance_exponent: DistanceExponent,
    /// Fixed global σ² used instead of the PCA estimate.
    pub sigma_sq_override: Option<f64>,
    /// Process sibling nodes concurrently.
    pub parallel: bool,
}

impl Default for IesConfig {
    fn default() -> Self {
        IesConfig {
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
            knn_k: DEFAULT_KNN,
            search_fraction: DEFAULT_SEARCH_FRACTION,
            min_node_size: DEFAULT_MIN_NODE_SIZE,
            depth_cap: DEFAULT_DEPTH_CAP,
            distance_exponent: DistanceExponent::Squared,
            sigma_sq_override: None,
            parallel: false,
        }
    }
}

impl IesConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.variance_threshold > 0.0 && self.variance_threshold <= 1.0) {
            return bad(format!(
                "variance_threshold {} not in (0, 1]",
                self.variance_threshold
            ));
        }
        if !(self.search_fraction > 0.0 && self.search_fraction <= 1.0) {
            return bad(format!(
                "search_fraction {} not in (0, 1]",
                self.search_fraction
            ));
        }
        if self.knn_k == 0 {
            return bad("knn_k must be at least 1".into());
        }
        if self.min_node_size < 2 {
            return bad(format!(
                "min_node_size must be at least 2, got {}",
                self.min_node_size
            ));
        }
        if self.depth_cap == 0 {
            return bad("depth_cap must be at least 1".into());
        }
        if let Some(s) = self.sigma_sq_override {
            if !(s > 0.0) || !s.is_finite() {
                return bad(format!("sigma override must be positive, got {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Child positions from the root down to this node.
    pub path: Vec<usize>,
    pub depth: usize,
    pub seed: u64,
    pub members: Vec<usize>,
    /// Scale estimated on this node's members (absent when the node was
    /// closed before estimation).
    pub sigma: Option<ScalingEstimate>,
    pub estimated_k: Option<usize>,
    /// Eigengaps inspected when estimating `estimated_k`.
    pub gaps: Option<Vec<f64>>,
    pub children: Vec<usize>,
    pub leaf_reason: Option<LeafReason>,
}

impl ClusterTreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringOutcome {
    pub mode: Method,
    /// Nodes in depth-first pre-order; `tree[i].id == i`.
    pub tree: Vec<ClusterTreeNode>,
    /// Leaf node id for every input row.
    pub leaf_assignments: Vec<usize>,
    pub runtime_ms: f64,
    pub master_seed: u64,
}

impl ClusteringOutcome {
    pub fn leaves(&self) -> impl Iterator<Item = &ClusterTreeNode> {
        self.tree.iter().filter(|n| n.is_leaf())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Dense cluster labels `0..leaf_count`, numbered in tree order.
    pub fn cluster_labels(&self) -> Vec<usize> {
        let mut dense = vec![usize::MAX; self.tree.len()];
        for (rank, leaf) in self.leaves().enumerate() {
            dense[leaf.id] = rank;
        }
        self.leaf_assignments.iter().map(|&id| dense[id]).collect()
    }

    pub fn max_depth(&self) -> usize {
        self.tree.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Check the structural invariants of the tree.
    pub fn validate(&self) -> Result<()> {
        let n = self.leaf_assignments.len();
        let fail = |msg: String| Err(Error::InvalidData(format!("cluster tree: {msg}")));
        let mut seen = vec![false; n];
        for node in &self.tree {
            if node.is_leaf() != node.leaf_reason.is_some() {
                return fail(format!("node {} leaf flag and reason disagree", node.id));
            }
            if node.is_leaf() {
                for &i in &node.members {
                    if i >= n || seen[i] {
                        return fail(format!("point {i} in more than one leaf"));
                    }
                    seen[i] = true;
                    if self.leaf_assignments[i] != node.id {
                        return fail(format!("point {i} assigned to wrong leaf"));
                    }
                }
                continue;
            }
            if node.children.len() < 2 {
                return fail(format!("internal node {} has one child", node.id));
            }
            let mut union: Vec<usize> = Vec::with_capacity(node.members.len());
            for &c in &node.children {
                let child = &self.tree[c];
                if child.members.is_empty() || child.members.len() >= node.members.len() {
                    return fail(format!("child {c} does not shrink its parent"));
                }
                union.extend_from_slice(&child.members);
            }
            union.sort_unstable();
            if union != node.members {
                return fail(format!("children of node {} do not partition it", node.id));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return fail(format!("point {i} belongs to no leaf"));
        }
        Ok(())
    }
}

/// Full iterative search with the given scale mode.
pub fn ies_cluster(
    data: &Matrix,
    mode: ScaleMode,
    config: &IesConfig,
    master_seed: u64,
) -> Result<ClusteringOutcome> {
    let method = match mode {
        ScaleMode::Global => Method::IesGlobal,
        ScaleMode::Local => Method::IesLocal,
    };
    run_tree(data, method, config, master_seed, None)
}

/// One round of eigengap search with local scaling.
pub fn els_cluster(
    data: &Matrix,
    config: &IesConfig,
    master_seed: u64,
) -> Result<ClusteringOutcome> {
    run_tree(data, Method::Els, config, master_seed, None)
}

/// One round of eigengap search with the PCA global scale.
pub fn legacy_eigengap_cluster(
    data: &Matrix,
    config: &IesConfig,
    master_seed: u64,
) -> Result<ClusteringOutcome> {
    run_tree(data, Method::LegacyEigengap, config, master_seed, None)
}

/// Plain NJW with a caller-chosen cluster count.
pub fn njw_partition(
    data: &Matrix,
    k: usize,
    config: &IesConfig,
    master_seed: u64,
) -> Result<ClusteringOutcome> {
    if k == 0 || k > data.rows() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in [1, {}], got {k}",
            data.rows()
        )));
    }
    run_tree(data, Method::Njw, config, master_seed, Some(k))
}

pub fn cluster_with(
    data: &Matrix,
    method: Method,
    config: &IesConfig,
    master_seed: u64,
    k: Option<usize>,
) -> Result<ClusteringOutcome> {
    match method {
        Method::IesGlobal => ies_cluster(data, ScaleMode::Global, config, master_seed),
        Method::IesLocal => ies_cluster(data, ScaleMode::Local, config, master_seed),
        Method::Els => els_cluster(data, config, master_seed),
        Method::LegacyEigengap => legacy_eigengap_cluster(data, config, master_seed),
        Method::Njw => {
            let k = k.ok_or_else(|| Error::Config("njw mode requires k".into()))?;
            njw_partition(data, k, config, master_seed)
        }
    }
}

/// Seed for the node at `path`, independent of traversal order.
pub fn node_seed(master_seed: u64, path: &[usize]) -> u64 {
    let mut h = splitmix64(master_seed ^ 0x1E5_0000_0000_0001);
    for &p in path {
        h = splitmix64(h ^ (p as u64).wrapping_add(1));
    }
    h
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Ctx<'a> {
    data: &'a Matrix,
    method: Method,
    config: &'a IesConfig,
    master_seed: u64,
    depth_limit: usize,
    root_k: Option<usize>,
}

struct ChildSpec {
    members: Vec<usize>,
    /// Closed immediately with this reason, without processing.
    closed: Option<LeafReason>,
}

/// Result of processing one node, before ids are assigned.
struct Visit {
    path: Vec<usize>,
    depth: usize,
    seed: u64,
    members: Vec<usize>,
    sigma: Option<ScalingEstimate>,
    estimated_k: Option<usize>,
    gaps: Option<Vec<f64>>,
    outcome: VisitOutcome,
}

enum VisitOutcome {
    Leaf(LeafReason),
    Split(Vec<ChildSpec>),
}

impl Ctx<'_> {
    fn closed(
        &self,
        path: Vec<usize>,
        depth: usize,
        members: Vec<usize>,
        reason: LeafReason,
    ) -> Visit {
        Visit {
            seed: node_seed(self.master_seed, &path),
            path,
            depth,
            members,
            sigma: None,
            estimated_k: None,
            gaps: None,
            outcome: VisitOutcome::Leaf(reason),
        }
    }

    fn visit(&self, path: Vec<usize>, depth: usize, members: Vec<usize>) -> Result<Visit> {
        let cfg = self.config;
        let n = members.len();
        if n < cfg.min_node_size {
            return Ok(self.closed(path, depth, members, LeafReason::MinSize));
        }
        if depth >= self.depth_limit {
            return Ok(self.closed(path, depth, members, LeafReason::DepthCap));
        }
        let mut v = self.closed(path, depth, members, LeafReason::Degenerate);
        let sub = self.data.select_rows(&v.members);

        let scaling = match self.method.scale_mode() {
            ScaleMode::Global => match cfg.sigma_sq_override {
                Some(s) => ScalingEstimate::fixed_global(s, sub.cols())?,
                None => match estimate_global_sigma(&sub, cfg.variance_threshold) {
                    Ok(s) => s,
                    Err(Error::DegenerateData) => return Ok(v),
                    Err(e) => return Err(e),
                },
            },
            ScaleMode::Local => estimate_local_sigmas(&sub, cfg.knn_k)?,
        };
        let affinity = build_affinity(&sub, &scaling, cfg.distance_exponent)?;
        v.sigma = Some(scaling);

        // Isolated points become singleton leaves; the rest of the node is
        // split as usual. A point with no neighbours leaves none behind, so
        // the remainder is either empty or has at least two points.
        let isolated = affinity.isolated_points();
        let children: Vec<ChildSpec> = isolated
            .iter()
            .map(|&i| ChildSpec {
                members: vec![v.members[i]],
                closed: Some(LeafReason::Isolated),
            })
            .collect();
        let kept: Vec<usize> = if isolated.is_empty() {
            (0..n).collect()
        } else {
            let mut is_isolated = vec![false; n];
            isolated.iter().for_each(|&i| is_isolated[i] = true);
            (0..n).filter(|&i| !is_isolated[i]).collect()
        };
        if kept.is_empty() {
            v.outcome = VisitOutcome::Split(children);
            return Ok(v);
        }
        let affinity = if isolated.is_empty() {
            affinity
        } else {
            affinity.restrict(&kept)
        };
        let kept_members: Vec<usize> = kept.iter().map(|&i| v.members[i]).collect();
        let settle = |children: Vec<ChildSpec>, reason: LeafReason| {
            if children.is_empty() {
                VisitOutcome::Leaf(reason)
            } else {
                let mut all = vec![ChildSpec {
                    members: kept_members.clone(),
                    closed: Some(reason),
                }];
                all.extend(children);
                VisitOutcome::Split(all)
            }
        };

        let laplacian = normalized_laplacian(&affinity)?;
        let eigen = symmetric_eigen(laplacian.matrix())?;
        let gap = eigengap_k(&eigen.values, cfg.search_fraction)?;
        let k = match (depth, self.root_k) {
            (0, Some(k)) => k.min(kept.len()),
            _ => gap.k,
        };
        v.estimated_k = Some(k);
        v.gaps = Some(gap.gaps[..gap.search_limit].to_vec());
        if k == 1 {
            let reason = if self.root_k.is_some() {
                LeafReason::SplitCollapse
            } else {
                LeafReason::EigengapOne
            };
            v.outcome = settle(children, reason);
            return Ok(v);
        }

        let run = match njw_from_eigen(eigen, k, v.seed) {
            Ok(run) => run,
            Err(Error::DegenerateEmbedding(_)) => {
                v.outcome = settle(children, LeafReason::Degenerate);
                return Ok(v);
            }
            Err(e) => return Err(e),
        };
        let groups = run.kmeans.effective_k();
        if groups < 2 {
            v.outcome = settle(children, LeafReason::SplitCollapse);
            return Ok(v);
        }
        let mut buckets = vec![Vec::new(); groups];
        for (&member, &c) in kept_members.iter().zip(run.assignments()) {
            buckets[c].push(member);
        }
        let isolated_children = children;
        let mut children: Vec<ChildSpec> = buckets
            .into_iter()
            .map(|members| ChildSpec {
                members,
                closed: None,
            })
            .collect();
        children.extend(isolated_children);
        v.outcome = VisitOutcome::Split(children);
        Ok(v)
    }

    fn visit_child(&self, parent: &Visit, pos: usize, spec: ChildSpec) -> Result<Visit> {
        let mut path = parent.path.clone();
        path.push(pos);
        match spec.closed {
            Some(reason) => Ok(self.closed(path, parent.depth + 1, spec.members, reason)),
            None => self.visit(path, parent.depth + 1, spec.members),
        }
    }
}

fn into_node(v: Visit, id: usize, parent: Option<usize>) -> (ClusterTreeNode, Vec<ChildSpec>) {
    let (leaf_reason, specs) = match v.outcome {
        VisitOutcome::Leaf(r) => (Some(r), Vec::new()),
        VisitOutcome::Split(s) => (None, s),
    };
    let node = ClusterTreeNode {
        id,
        parent,
        path: v.path,
        depth: v.depth,
        seed: v.seed,
        members: v.members,
        sigma: v.sigma,
        estimated_k: v.estimated_k,
        gaps: v.gaps,
        children: Vec::new(),
        leaf_reason,
    };
    (node, specs)
}

fn run_tree(
    data: &Matrix,
    method: Method,
    config: &IesConfig,
    master_seed: u64,
    root_k: Option<usize>,
) -> Result<ClusteringOutcome> {
    let start = Instant::now();
    config.validate()?;
    let n = data.rows();
    if n == 0 {
        return Err(Error::InvalidData("empty dataset".into()));
    }
    if !data.all_finite() {
        return Err(Error::InvalidData("data contains NaN or Inf".into()));
    }
    let ctx = Ctx {
        data,
        method,
        config,
        master_seed,
        depth_limit: method.depth_limit(config),
        root_k,
    };
    let tree = if config.parallel {
        let root = ctx.visit(Vec::new(), 0, (0..n).collect())?;
        let mut tree = Vec::new();
        flatten(build_parallel(&ctx, root)?, None, &mut tree);
        tree
    } else {
        build_sequential(&ctx, n)?
    };

    let mut leaf_assignments = vec![usize::MAX; n];
    for node in tree.iter().filter(|n| n.is_leaf()) {
        for &i in &node.members {
            leaf_assignments[i] = node.id;
        }
    }
    let outcome = ClusteringOutcome {
        mode: method,
        tree,
        leaf_assignments,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        master_seed,
    };
    outcome.validate()?;
    Ok(outcome)
}

/// Depth-first traversal with an explicit LIFO stack.
fn build_sequential(ctx: &Ctx<'_>, n: usize) -> Result<Vec<ClusterTreeNode>> {
    struct Pending {
        parent: Option<usize>,
        path: Vec<usize>,
        depth: usize,
        spec: ChildSpec,
    }
    let mut tree: Vec<ClusterTreeNode> = Vec::new();
    let mut stack = vec![Pending {
        parent: None,
        path: Vec::new(),
        depth: 0,
        spec: ChildSpec {
            members: (0..n).collect(),
            closed: None,
        },
    }];
    while let Some(p) = stack.pop() {
        let visit = match p.spec.closed {
            Some(reason) => ctx.closed(p.path, p.depth, p.spec.members, reason),
            None => ctx.visit(p.path, p.depth, p.spec.members)?,
        };
        let id = tree.len();
        if let Some(parent) = p.parent {
            tree[parent].children.push(id);
        }
        let (node, specs) = into_node(visit, id, p.parent);
        // reversed so the first child is popped next
        for (pos, spec) in specs.into_iter().enumerate().rev() {
            let mut path = node.path.clone();
            path.push(pos);
            stack.push(Pending {
                parent: Some(id),
                path,
                depth: node.depth + 1,
                spec,
            });
        }
        tree.push(node);
    }
    Ok(tree)
}

struct Subtree {
    visit: Visit,
    children: Vec<Subtree>,
}

fn build_parallel(ctx: &Ctx<'_>, mut visit: Visit) -> Result<Subtree> {
    let specs = match &mut visit.outcome {
        VisitOutcome::Leaf(_) => Vec::new(),
        VisitOutcome::Split(s) => std::mem::take(s),
    };
    let children = specs
        .into_par_iter()
        .enumerate()
        .map(|(pos, spec)| {
            let child = ctx.visit_child(&visit, pos, spec)?;
            build_parallel(ctx, child)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Subtree { visit, children })
}

fn flatten(sub: Subtree, parent: Option<usize>, tree: &mut Vec<ClusterTreeNode>) {
    let id = tree.len();
    if let Some(p) = parent {
        tree[p].children.push(id);
    }
    let (node, _) = into_node(sub.visit, id, parent);
    tree.push(node);
    for child in sub.children {
        flatten(child, Some(id), tree);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn blobs(centers: &[(f64, f64)], per: usize, spread: f64, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, spread).unwrap();
        let mut rows = Vec::new();
        for &(x, y) in centers {
            for _ in 0..per {
                rows.push([x + noise.sample(&mut rng), y + noise.sample(&mut rng)]);
            }
        }
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn two_separated_groups_split_once() {
        let data = blobs(&[(0.0, 0.0), (20.0, 0.0)], 30, 1.0, 3);
        let out = ies_cluster(&data, ScaleMode::Global, &IesConfig::default(), 0).unwrap();
        let root = &out.tree[0];
        assert_eq!(root.estimated_k, Some(2));
        assert_eq!(root.children.len(), 2);
        let labels = out.cluster_labels();
        assert!(labels[..30].iter().all(|&l| l == labels[0]));
        assert!(labels[30..].iter().all(|&l| l == labels[30]));
        assert_ne!(labels[0], labels[30]);
    }

    #[test]
    fn tiny_dataset_is_one_leaf() {
        let data = blobs(&[(0.0, 0.0)], 4, 1.0, 1);
        let out = ies_cluster(&data, ScaleMode::Global, &IesConfig::default(), 0).unwrap();
        assert_eq!(out.tree.len(), 1);
        assert_eq!(out.tree[0].leaf_reason, Some(LeafReason::MinSize));
    }

    #[test]
    fn identical_points_are_degenerate() {
        let data = Matrix::from_rows(&[[1.0, 2.0]; 8]).unwrap();
        let out = ies_cluster(&data, ScaleMode::Global, &IesConfig::default(), 0).unwrap();
        assert_eq!(out.tree[0].leaf_reason, Some(LeafReason::Degenerate));
    }

    #[test]
    fn far_outlier_is_ejected() {
        // local scaling: the outlier's nearest neighbours are far, but every
        // other point's scale is tiny, so its affinity row underflows to zero
        let mut rows: Vec<[f64; 1]> = (0..10).map(|i| [i as f64 * 0.01]).collect();
        rows.push([1e4]);
        let data = Matrix::from_rows(&rows).unwrap();
        let cfg = IesConfig {
            knn_k: 1,
            ..IesConfig::default()
        };
        let out = ies_cluster(&data, ScaleMode::Local, &cfg, 0).unwrap();
        let leaf = out.tree[out.leaf_assignments[10]].clone();
        assert_eq!(leaf.members, vec![10]);
        assert_eq!(leaf.leaf_reason, Some(LeafReason::Isolated));
        out.validate().unwrap();
    }

    #[test]
    fn single_pass_still_splits_after_ejecting_outlier() {
        let mut rows: Vec<[f64; 1]> = (0..10).map(|i| [i as f64 * 0.01]).collect();
        rows.extend((0..10).map(|i| [1.0 + i as f64 * 0.01]));
        rows.push([1e4]);
        let data = Matrix::from_rows(&rows).unwrap();
        let out = els_cluster(&data, &IesConfig::default(), 0).unwrap();
        assert_eq!(out.leaf_count(), 3);
        assert_eq!(out.tree[0].estimated_k, Some(2));
        let labels = out.cluster_labels();
        assert!(labels[..10].iter().all(|&l| l == labels[0]));
        assert!(labels[10..20].iter().all(|&l| l == labels[10]));
        assert_ne!(labels[0], labels[10]);
        assert_ne!(labels[20], labels[0]);
        assert_ne!(labels[20], labels[10]);
    }

    #[test]
    fn seeds_depend_on_path_only() {
        assert_eq!(node_seed(7, &[0, 1]), node_seed(7, &[0, 1]));
        assert_ne!(node_seed(7, &[0, 1]), node_seed(7, &[1, 0]));
        assert_ne!(node_seed(7, &[]), node_seed(8, &[]));
    }

    #[test]
    fn njw_mode_requires_valid_k() {
        let data = blobs(&[(0.0, 0.0)], 6, 1.0, 1);
        let cfg = IesConfig::default();
        assert!(njw_partition(&data, 0, &cfg, 0).is_err());
        assert!(matches!(
            cluster_with(&data, Method::Njw, &cfg, 0, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn config_validation() {
        let cfg = IesConfig {
            min_node_size: 1,
            ..IesConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = IesConfig {
            sigma_sq_override: Some(-1.0),
            ..IesConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(IesConfig::default().validate().is_ok());
    }

    #[test]
    fn empty_dataset_rejected() {
        let empty = Matrix::zeros(0, 3);
        assert!(matches!(
            ies_cluster(&empty, ScaleMode::Global, &IesConfig::default(), 0),
            Err(Error::InvalidData(_))
        ));
    }
}
