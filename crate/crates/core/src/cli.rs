//! Run configuration, method dispatch and report serialisation behind the
//! `cluster` binary.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::affinity::DistanceExponent;
use crate::dataset::{load_dataset, write_dataset, ColumnRef, Dataset, Label, LoadOptions};
use crate::eigengap::DEFAULT_SEARCH_FRACTION;
use crate::error::{Error, Result};
use crate::ies::{
    cluster_with, ClusterTreeNode, IesConfig, Method, DEFAULT_DEPTH_CAP, DEFAULT_MIN_NODE_SIZE,
};
use crate::scaling::{
    estimate_global_sigma, ScalingEstimate, DEFAULT_KNN, DEFAULT_VARIANCE_THRESHOLD,
};
use crate::synthetic::{generate_synthetic, SyntheticSpec};
use crate::validation::{elbow_sweep, evaluate, ElbowSpace, MetricsReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    IesGlobal,
    IesLocal,
    Els,
    Njw,
    LegacyEigengap,
    Elbow,
}

impl RunMode {
    fn method(self) -> Option<Method> {
        match self {
            RunMode::IesGlobal => Some(Method::IesGlobal),
            RunMode::IesLocal => Some(Method::IesLocal),
            RunMode::Els => Some(Method::Els),
            RunMode::Njw => Some(Method::Njw),
            RunMode::LegacyEigengap => Some(Method::LegacyEigengap),
            RunMode::Elbow => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ElbowSpaceArg {
    Embedding,
    Raw,
}

impl From<ElbowSpaceArg> for ElbowSpace {
    fn from(a: ElbowSpaceArg) -> Self {
        match a {
            ElbowSpaceArg::Embedding => ElbowSpace::Embedding,
            ElbowSpaceArg::Raw => ElbowSpace::Raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    /// Global σ (not squared); the affinity uses its square.
    pub sigma_override: Option<f64>,
    pub k_override: Option<usize>,
    pub k_min: usize,
    pub k_max: Option<usize>,
    pub variance_threshold: f64,
    pub knn_k: usize,
    pub search_fraction: f64,
    pub min_node_size: usize,
    pub depth_cap: usize,
    pub distance_exponent: DistanceExponent,
    pub master_seed: u64,
    pub elbow_space: ElbowSpace,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: RunMode::IesGlobal,
            sigma_override: None,
            k_override: None,
            k_min: 1,
            k_max: None,
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
            knn_k: DEFAULT_KNN,
            search_fraction: DEFAULT_SEARCH_FRACTION,
            min_node_size: DEFAULT_MIN_NODE_SIZE,
            depth_cap: DEFAULT_DEPTH_CAP,
            distance_exponent: DistanceExponent::Squared,
            master_seed: 0,
            elbow_space: ElbowSpace::Embedding,
            parallel: false,
        }
    }
}

impl RunConfig {
    pub fn ies_config(&self) -> IesConfig {
        IesConfig {
            variance_threshold: self.variance_threshold,
            knn_k: self.knn_k,
            search_fraction: self.search_fraction,
            min_node_size: self.min_node_size,
            depth_cap: self.depth_cap,
            distance_exponent: self.distance_exponent,
            sigma_sq_override: self.sigma_override.map(|s| s * s),
            parallel: self.parallel,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if let Err(e) = self.ies_config().validate() {
            return cfg(e.to_string());
        }
        if let Some(s) = self.sigma_override {
            if matches!(self.mode, RunMode::IesLocal | RunMode::Els) {
                return cfg("--sigma applies only to global-scale modes".into());
            }
            if !(s > 0.0) || !s.is_finite() {
                return cfg(format!("--sigma must be positive, got {s}"));
            }
        }
        match self.mode {
            RunMode::Njw => match self.k_override {
                None => return cfg("mode njw requires --k".into()),
                Some(k) if k == 0 || k > n => {
                    return cfg(format!("--k must lie in [1, {n}], got {k}"))
                }
                _ => {}
            },
            RunMode::Elbow => {
                let k_max = self.elbow_k_max(n);
                if self.k_min == 0 || self.k_min > k_max || k_max > n {
                    return cfg(format!(
                        "elbow range [{}, {k_max}] must lie within [1, {n}]",
                        self.k_min
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn elbow_k_max(&self, n: usize) -> usize {
        self.k_max.or(self.k_override).unwrap_or(n.min(20))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub variance_threshold: f64,
    pub knn_k: usize,
    pub search_fraction: f64,
    pub min_node_size: usize,
    pub depth_cap: usize,
    pub distance_exponent: u8,
    pub sigma: Option<f64>,
    pub k: Option<usize>,
    pub master_seed: u64,
    pub n_points: usize,
    pub n_features: usize,
}

/// Per-node scale summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaTraceEntry {
    pub node: usize,
    pub depth: usize,
    pub size: usize,
    pub kind: String,
    pub sigma_sq: Option<f64>,
    pub components_used: Option<usize>,
    pub variance_captured: Option<f64>,
    pub local_sigma_min: Option<f64>,
    pub local_sigma_median: Option<f64>,
    pub local_sigma_max: Option<f64>,
    pub estimated_k: Option<usize>,
}

impl SigmaTraceEntry {
    fn from_node(node: &ClusterTreeNode) -> Option<Self> {
        let sigma = node.sigma.as_ref()?;
        let mut e = SigmaTraceEntry {
            node: node.id,
            depth: node.depth,
            size: node.members.len(),
            kind: String::new(),
            sigma_sq: None,
            components_used: None,
            variance_captured: None,
            local_sigma_min: None,
            local_sigma_median: None,
            local_sigma_max: None,
            estimated_k: node.estimated_k,
        };
        match sigma {
            ScalingEstimate::Global(g) => {
                e.kind = "global".into();
                e.sigma_sq = Some(g.sigma_sq);
                e.components_used = Some(g.components_used);
                e.variance_captured = Some(g.variance_captured);
            }
            ScalingEstimate::Local(l) => {
                e.kind = "local".into();
                let mut s = l.sigmas.clone();
                s.sort_by(f64::total_cmp);
                e.local_sigma_min = s.first().copied();
                e.local_sigma_max = s.last().copied();
                e.local_sigma_median = s.get(s.len() / 2).copied();
            }
        }
        Some(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub mode: Method,
    pub params: ReportParams,
    pub sigma_trace: Vec<SigmaTraceEntry>,
    pub tree: Vec<ClusterTreeNode>,
    /// Dense cluster index per input row, numbered in tree order.
    pub assignments: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport<Label>>,
    pub runtime_ms: f64,
}

impl Report {
    pub fn cluster_count(&self) -> usize {
        self.tree.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidData(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Report(Box<Report>),
    Elbow(Vec<(usize, f64)>),
}

impl RunOutput {
    pub fn to_text(&self) -> Result<String> {
        match self {
            RunOutput::Report(r) => r.to_json(),
            RunOutput::Elbow(curve) => Ok(elbow_csv(curve)),
        }
    }
}

pub fn elbow_csv(curve: &[(usize, f64)]) -> String {
    let mut out = String::from("k,sse\n");
    for (k, v) in curve {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

/// Execute the configured mode on a loaded dataset.
pub fn run(config: &RunConfig, dataset: &Dataset) -> Result<RunOutput> {
    let n = dataset.len();
    config.validate(n)?;
    let data = &dataset.features;

    let Some(method) = config.mode.method() else {
        let scaling = match config.sigma_override {
            Some(s) => ScalingEstimate::fixed_global(s * s, data.cols())?,
            None => estimate_global_sigma(data, config.variance_threshold)?,
        };
        let curve = elbow_sweep(
            data,
            config.k_min,
            config.elbow_k_max(n),
            &scaling,
            config.master_seed,
            config.elbow_space,
            config.distance_exponent,
        )?;
        return Ok(RunOutput::Elbow(curve));
    };

    let start = Instant::now();
    let outcome = cluster_with(
        data,
        method,
        &config.ies_config(),
        config.master_seed,
        config.k_override,
    )?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let assignments = outcome.cluster_labels();
    let metrics = match &dataset.labels {
        Some(labels) => Some(evaluate(&assignments, labels)?),
        None => None,
    };
    Ok(RunOutput::Report(Box::new(Report {
        schema_version: SCHEMA_VERSION,
        mode: method,
        params: ReportParams {
            variance_threshold: config.variance_threshold,
            knn_k: config.knn_k,
            search_fraction: config.search_fraction,
            min_node_size: config.min_node_size,
            depth_cap: config.depth_cap,
            distance_exponent: config.distance_exponent.power(),
            sigma: config.sigma_override,
            k: config.k_override,
            master_seed: config.master_seed,
            n_points: n,
            n_features: data.cols(),
        },
        sigma_trace: outcome
            .tree
            .iter()
            .filter_map(SigmaTraceEntry::from_node)
            .collect(),
        tree: outcome.tree,
        assignments,
        metrics,
        runtime_ms,
    })))
}

#[derive(Debug, Parser)]
#[command(
    name = "cluster",
    version,
    about = "Automated spectral clustering with iterative eigengap search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a CSV dataset and write a JSON report.
    Run(RunArgs),
    /// Sweep k and write the SSE elbow curve as CSV.
    Elbow(ElbowArgs),
    /// Generate a labelled synthetic dataset from a JSON spec.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Ground-truth label column (header name or zero-based index).
    #[arg(long = "label-col")]
    pub label_col: Option<String>,
    /// Non-feature column to ignore; may be repeated.
    #[arg(long = "drop-col")]
    pub drop_col: Vec<String>,
    /// The first line holds data, not column names.
    #[arg(long)]
    pub no_header: bool,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        let opts = LoadOptions {
            label_column: self.label_col.as_deref().map(ColumnRef::parse),
            drop_columns: self.drop_col.iter().map(|c| ColumnRef::parse(c)).collect(),
            has_header: !self.no_header,
        };
        load_dataset(&self.input, &opts)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub mode: RunMode,
    #[command(flatten)]
    pub input: InputArgs,
    /// Fixed global σ (global-scale modes only).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Cluster count for njw, upper k for elbow.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "k-min", default_value_t = 1)]
    pub k_min: usize,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long = "variance-threshold", default_value_t = DEFAULT_VARIANCE_THRESHOLD)]
    pub variance_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_KNN)]
    pub knn: usize,
    #[arg(long = "search-fraction", default_value_t = DEFAULT_SEARCH_FRACTION)]
    pub search_fraction: f64,
    #[arg(long = "min-node-size", default_value_t = DEFAULT_MIN_NODE_SIZE)]
    pub min_node_size: usize,
    #[arg(long = "depth-cap", default_value_t = DEFAULT_DEPTH_CAP)]
    pub depth_cap: usize,
    #[arg(long = "distance-exponent", default_value_t = 2)]
    pub distance_exponent: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "elbow-space", value_enum, default_value = "embedding")]
    pub elbow_space: ElbowSpaceArg,
    /// Process sibling tree nodes concurrently.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub output: PathBuf,
}

impl RunArgs {
    pub fn config(&self) -> Result<RunConfig> {
        Ok(RunConfig {
            mode: self.mode,
            sigma_override: self.sigma,
            k_override: self.k,
            k_min: self.k_min,
            k_max: self.k_max,
            variance_threshold: self.variance_threshold,
            knn_k: self.knn,
            search_fraction: self.search_fraction,
            min_node_size: self.min_node_size,
            depth_cap: self.depth_cap,
            distance_exponent: DistanceExponent::from_power(self.distance_exponent)
                .map_err(|e| Error::Config(e.to_string()))?,
            master_seed: self.seed,
            elbow_space: self.elbow_space.into(),
            parallel: self.parallel,
        })
    }
}

#[derive(Debug, Args)]
pub struct ElbowArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "k-min")]
    pub k_min: usize,
    #[arg(long = "k-max")]
    pub k_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long = "variance-threshold", default_value_t = DEFAULT_VARIANCE_THRESHOLD)]
    pub variance_threshold: f64,
    #[arg(long = "distance-exponent", default_value_t = 2)]
    pub distance_exponent: u8,
    #[arg(long = "elbow-space", value_enum, default_value = "embedding")]
    pub elbow_space: ElbowSpaceArg,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

fn write_output(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = args.config()?;
            let dataset = args.input.load()?;
            let out = run(&config, &dataset)?;
            write_output(&args.output, &out.to_text()?)
        }
        Command::Elbow(args) => {
            let config = RunConfig {
                mode: RunMode::Elbow,
                sigma_override: args.sigma,
                k_min: args.k_min,
                k_max: Some(args.k_max),
                variance_threshold: args.variance_threshold,
                distance_exponent: DistanceExponent::from_power(args.distance_exponent)
                    .map_err(|e| Error::Config(e.to_string()))?,
                master_seed: args.seed,
                elbow_space: args.elbow_space.into(),
                ..RunConfig::default()
            };
            let dataset = args.input.load()?;
            let out = run(&config, &dataset)?;
            write_output(&args.output, &out.to_text()?)
        }
        Command::Synth(args) => {
            let text = std::fs::read_to_string(&args.spec)
                .map_err(|e| Error::Io(format!("{}: {e}", args.spec.display())))?;
            let spec: SyntheticSpec =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            let dataset = generate_synthetic(&spec)?;
            let mut buf = Vec::new();
            write_dataset(&dataset, &mut buf)?;
            std::fs::write(&args.output, buf)
                .map_err(|e| Error::Io(format!("{}: {e}", args.output.display())))
        }
    }
}
