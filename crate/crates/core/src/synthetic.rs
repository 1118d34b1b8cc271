//! Seeded Gaussian-blob generator for multi-scale test data, and a
//! white-noise augmentation helper.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spread {
    Uniform(f64),
    PerDim(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    /// Padded with zeros up to `dims`.
    pub center: Vec<f64>,
    pub spread: Spread,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub noise_sd: f64,
    pub dims: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dims == 0 {
            return bad("dims must be at least 1".into());
        }
        if self.groups.is_empty() {
            return bad("at least one group is required".into());
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return bad(format!(
                "noise_sd must be nonnegative, got {}",
                self.noise_sd
            ));
        }
        for (g, spec) in self.groups.iter().enumerate() {
            if spec.count == 0 {
                return bad(format!("group {g} has zero count"));
            }
            if spec.center.len() > self.dims || spec.center.iter().any(|c| !c.is_finite()) {
                return bad(format!(
                    "group {g} center must have at most {} finite values",
                    self.dims
                ));
            }
            let ok = match &spec.spread {
                Spread::Uniform(s) => *s >= 0.0 && s.is_finite(),
                Spread::PerDim(v) => {
                    v.len() == self.dims && v.iter().all(|s| *s >= 0.0 && s.is_finite())
                }
            };
            if !ok {
                return bad(format!(
                    "group {g} spread must be nonnegative with one value or {} values",
                    self.dims
                ));
            }
        }
        Ok(())
    }

    /// Three groups at two scales: `far` separates group 0 from a pair of
    /// subgroups which are themselves `near` apart.
    pub fn nested(
        dims: usize,
        per_group: usize,
        far: f64,
        near: f64,
        spread: f64,
        seed: u64,
    ) -> Self {
        let axis = |a: f64, b: f64| {
            let mut c = vec![0.0; dims];
            c[0] = a;
            if dims > 1 {
                c[1] = b;
            } else {
                c[0] += b;
            }
            c
        };
        let group = |center| GroupSpec {
            center,
            spread: Spread::Uniform(spread),
            count: per_group,
        };
        SyntheticSpec {
            groups: vec![
                group(axis(0.0, 0.0)),
                group(axis(far, 0.0)),
                group(axis(far, near)),
            ],
            noise_sd: 0.0,
            dims,
            seed,
        }
    }
}

/// Sample the spec; labels are group indices.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let n: usize = spec.groups.iter().map(|g| g.count).sum();
    let mut values = Vec::with_capacity(n * spec.dims);
    let mut labels = Vec::with_capacity(n);
    for (g, group) in spec.groups.iter().enumerate() {
        for _ in 0..group.count {
            for d in 0..spec.dims {
                let center = group.center.get(d).copied().unwrap_or(0.0);
                let spread = match &group.spread {
                    Spread::Uniform(s) => *s,
                    Spread::PerDim(v) => v[d],
                };
                let mut x = center;
                if spread > 0.0 {
                    x += spread * std_normal.sample(&mut rng);
                }
                if spec.noise_sd > 0.0 {
                    x += spec.noise_sd * std_normal.sample(&mut rng);
                }
                values.push(x);
            }
            labels.push(Label(g.to_string()));
        }
    }
    Ok(Dataset {
        features: Matrix::from_vec(n, spec.dims, values)?,
        labels: Some(labels),
        feature_names: (0..spec.dims).map(|d| format!("x{d}")).collect(),
    })
}

/// Append `copies` noisy replicas of every row (labels carried over).
pub fn augment_with_noise(
    dataset: &Dataset,
    copies: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise_sd must be nonnegative, got {noise_sd}"
        )));
    }
    let noise = Normal::new(0.0, noise_sd.max(f64::MIN_POSITIVE)).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dataset.len();
    let m = dataset.dims();
    let mut values = dataset.features.as_slice().to_vec();
    let mut labels = dataset.labels.clone();
    for _ in 0..copies {
        for i in 0..n {
            for &v in dataset.features.row(i) {
                values.push(if noise_sd > 0.0 {
                    v + noise.sample(&mut rng)
                } else {
                    v
                });
            }
            if let (Some(out), Some(src)) = (labels.as_mut(), dataset.labels.as_ref()) {
                out.push(src[i].clone());
            }
        }
    }
    Ok(Dataset {
        features: Matrix::from_vec(n * (copies + 1), m, values)?,
        labels,
        feature_names: dataset.feature_names.clone(),
    })
}
