//! Linde–Buzo–Gray clustering of subspaces under the first-angle distance.
//!
//! One outer iteration is one prototype update followed by one labeling
//! pass. Distances are `d_ij = sin²θ₁(K_i, X_j)` and distortion is their
//! mean over samples at the assigned centers.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::index;
use serde::Serialize;

use crate::data::SubspaceDataset;
use crate::error::{Error, Result};
use crate::linalg::{self, max_cosine_unchecked, orthonormalize, Subspace, DEFAULT_RANK_TOL};
use crate::prototypes::{flag_mean, flag_median, svbf_fit, FlagMedianConfig, SvbfConfig, SvbfInit};
use crate::seed::{self, par_map};

const INIT_STREAM: u64 = 0x1417;
const HEAL_STREAM: u64 = 0x4EA1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrototypeMethod {
    Svbf,
    FlagMean,
    FlagMedian,
}

impl PrototypeMethod {
    pub const ALL: [PrototypeMethod; 3] = [Self::Svbf, Self::FlagMean, Self::FlagMedian];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Svbf => "svbf",
            Self::FlagMean => "flagmean",
            Self::FlagMedian => "flagmedian",
        }
    }

    /// Stable numeric tag used in seed derivation.
    pub(crate) fn code(self) -> u64 {
        match self {
            Self::Svbf => 1,
            Self::FlagMean => 2,
            Self::FlagMedian => 3,
        }
    }
}

impl fmt::Display for PrototypeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrototypeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svbf" => Ok(Self::Svbf),
            "flagmean" | "flag-mean" => Ok(Self::FlagMean),
            "flagmedian" | "flag-median" => Ok(Self::FlagMedian),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    SampleSeeded,
    RandomOrthonormal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LbgConfig {
    pub num_centers: usize,
    pub max_outer_iters: usize,
    pub distortion_rel_tol: f64,
    pub prototype_method: PrototypeMethod,
    pub prototype_dim: usize,
    pub init_strategy: InitStrategy,
    pub seed: u64,
    /// Solver settings for `Svbf`; its dimension and init are overridden.
    pub svbf: SvbfConfig,
    pub flag_median: FlagMedianConfig,
}

impl LbgConfig {
    pub fn new(
        prototype_method: PrototypeMethod,
        num_centers: usize,
        prototype_dim: usize,
    ) -> Self {
        Self {
            num_centers,
            max_outer_iters: 7,
            distortion_rel_tol: 1e-4,
            prototype_method,
            prototype_dim,
            init_strategy: InitStrategy::SampleSeeded,
            seed: 0,
            svbf: SvbfConfig::new(prototype_dim),
            flag_median: FlagMedianConfig::default(),
        }
    }

    fn validate(&self, dataset: &SubspaceDataset) -> Result<usize> {
        let n = dataset.ambient_dim().ok_or(Error::EmptyInput)?;
        if self.num_centers == 0 {
            return Err(Error::InvalidConfig(
                "number of centers must be positive".into(),
            ));
        }
        if self.prototype_dim == 0 {
            return Err(Error::InvalidConfig(
                "prototype dimension must be positive".into(),
            ));
        }
        if self.prototype_dim > n {
            return Err(Error::DimensionTooLarge {
                k: self.prototype_dim,
                n,
            });
        }
        Ok(n)
    }
}

#[derive(Debug, Clone)]
pub struct ClusterModel {
    pub prototypes: Vec<Subspace>,
    pub labels: Vec<usize>,
    /// Distortion after each accepted labeling pass, starting with the one
    /// against the initial prototypes.
    pub distortion_history: Vec<f64>,
    pub config: LbgConfig,
    pub iterations_used: usize,
}

impl ClusterModel {
    pub fn final_distortion(&self) -> f64 {
        *self
            .distortion_history
            .last()
            .expect("history is never empty")
    }
}

/// Result of a labeling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub labels: Vec<usize>,
    /// `sin²θ₁` from each sample to its assigned prototype.
    pub distances: Vec<f64>,
    pub distortion: f64,
}

/// Turns a sample into a `k`-dimensional prototype: its first `k` basis
/// columns, or the whole sample padded with random orthogonal directions.
fn prototype_from_sample(sample: &Subspace, k: usize, rng: &mut seed::Rng) -> Subspace {
    let (n, l) = (sample.ambient_dim(), sample.dim());
    if k <= l {
        return sample.leading(k);
    }
    loop {
        let mut raw = DMatrix::zeros(n, k);
        raw.columns_mut(0, l).copy_from(sample.basis());
        raw.columns_mut(l, k - l)
            .copy_from(&linalg::gaussian_matrix(rng, n, k - l));
        if let Ok(mut s) = orthonormalize(&raw, DEFAULT_RANK_TOL) {
            // Keep the sample's own basis verbatim in the leading columns.
            let mut basis = s.basis().clone();
            basis.columns_mut(0, l).copy_from(sample.basis());
            if let Ok(exact) = Subspace::new(basis) {
                s = exact;
            }
            return s;
        }
    }
}

/// Initial prototypes: distinct seeded samples, or random orthonormal bases.
pub fn init_prototypes(dataset: &SubspaceDataset, cfg: &LbgConfig) -> Result<Vec<Subspace>> {
    let n = cfg.validate(dataset)?;
    let (m, k) = (cfg.num_centers, cfg.prototype_dim);
    let mut rng = seed::rng(seed::derive(&[cfg.seed, INIT_STREAM]));
    match cfg.init_strategy {
        InitStrategy::SampleSeeded => {
            if m > dataset.len() {
                return Err(Error::TooManyCenters {
                    centers: m,
                    samples: dataset.len(),
                });
            }
            let picks = index::sample(&mut rng, dataset.len(), m);
            Ok(picks
                .iter()
                .map(|j| prototype_from_sample(&dataset.samples()[j], k, &mut rng))
                .collect())
        }
        InitStrategy::RandomOrthonormal => Ok((0..m)
            .map(|_| linalg::random_orthonormal(&mut rng, n, k))
            .collect()),
    }
}

fn distance(prototype: &Subspace, sample: &Subspace) -> f64 {
    let c = max_cosine_unchecked(prototype.basis(), sample.basis());
    (1.0 - c * c).max(0.0)
}

/// Labels every sample with its nearest prototype (lowest index on ties).
pub fn assign(dataset: &SubspaceDataset, prototypes: &[Subspace]) -> Result<Assignment> {
    let n = dataset.ambient_dim().ok_or(Error::EmptyInput)?;
    if prototypes.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = prototypes.iter().find(|p| p.ambient_dim() != n) {
        return Err(Error::AmbientMismatch {
            expected: n,
            found: p.ambient_dim(),
        });
    }
    let samples = dataset.samples();
    let nearest = par_map(samples.len(), |j| {
        let mut best = (0, f64::INFINITY);
        for (i, p) in prototypes.iter().enumerate() {
            let d = distance(p, &samples[j]);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    });
    let distortion = nearest.iter().map(|&(_, d)| d).sum::<f64>() / samples.len() as f64;
    let (labels, distances) = nearest.into_iter().unzip();
    Ok(Assignment {
        labels,
        distances,
        distortion,
    })
}

/// Refits every non-empty cluster with the configured method and re-seeds
/// empty clusters at the samples worst served by the current prototypes.
///
/// Empty clusters are healed in index order by farthest-point traversal:
/// each picks the sample with the largest distance to its nearest current
/// or already-healed prototype (lowest sample index on ties).
pub fn update_prototypes(
    dataset: &SubspaceDataset,
    labels: &[usize],
    current: &[Subspace],
    cfg: &LbgConfig,
) -> Result<Vec<Subspace>> {
    cfg.validate(dataset)?;
    let samples = dataset.samples();
    if labels.len() != samples.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: samples.len(),
        });
    }
    let m = current.len();
    let mut members: Vec<Vec<&Subspace>> = vec![Vec::new(); m];
    for (j, &c) in labels.iter().enumerate() {
        if c >= m {
            return Err(Error::InvalidConfig(format!(
                "label {c} out of range for {m} centers"
            )));
        }
        members[c].push(&samples[j]);
    }

    let k = cfg.prototype_dim;
    let fitted = par_map(m, |c| -> Result<Option<Subspace>> {
        let group = &members[c];
        if group.is_empty() {
            return Ok(None);
        }
        let prototype = match cfg.prototype_method {
            PrototypeMethod::Svbf => {
                let svbf = SvbfConfig {
                    prototype_dim: k,
                    init: SvbfInit::FromGivenSubspace(current[c].clone()),
                    ..cfg.svbf.clone()
                };
                svbf_fit(group, &svbf)?.prototype
            }
            PrototypeMethod::FlagMean => flag_mean(group, k)?.prototype,
            PrototypeMethod::FlagMedian => flag_median(group, k, &cfg.flag_median)?,
        };
        Ok(Some(prototype))
    });

    let mut next = Vec::with_capacity(m);
    let mut empty = Vec::new();
    for (c, f) in fitted.into_iter().enumerate() {
        match f? {
            Some(p) => next.push(p),
            None => {
                empty.push(c);
                next.push(current[c].clone());
            }
        }
    }
    if !empty.is_empty() {
        let mut reach: Vec<f64> = par_map(samples.len(), |j| {
            distance(&current[labels[j]], &samples[j])
        });
        let mut used = vec![false; samples.len()];
        for c in empty {
            let far =
                (0..samples.len())
                    .filter(|&j| !used[j])
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if reach[b] >= reach[j] => Some(b),
                        _ => Some(j),
                    });
            let Some(j) = far else { break };
            used[j] = true;
            let mut rng = seed::rng(seed::derive(&[cfg.seed, HEAL_STREAM, c as u64, j as u64]));
            let healed = prototype_from_sample(&samples[j], k, &mut rng);
            for (r, s) in reach.iter_mut().zip(samples) {
                *r = r.min(distance(&healed, s));
            }
            next[c] = healed;
        }
    }
    Ok(next)
}

/// Runs LBG to convergence.
///
/// Stops when the relative distortion improvement falls below
/// `distortion_rel_tol` or after `max_outer_iters` update/assign pairs. An
/// update that would raise distortion is discarded and ends the run, so
/// the returned prototypes and labels always belong to the best pass.
pub fn lbg_cluster(dataset: &SubspaceDataset, cfg: &LbgConfig) -> Result<ClusterModel> {
    let prototypes = init_prototypes(dataset, cfg)?;
    lbg_cluster_from(dataset, cfg, prototypes)
}

/// Runs LBG from caller-supplied starting prototypes; `cfg.init_strategy`
/// is ignored and `cfg.num_centers` must match their count.
pub fn lbg_cluster_from(
    dataset: &SubspaceDataset,
    cfg: &LbgConfig,
    initial: Vec<Subspace>,
) -> Result<ClusterModel> {
    let n = cfg.validate(dataset)?;
    if initial.len() != cfg.num_centers {
        return Err(Error::LengthMismatch {
            left: cfg.num_centers,
            right: initial.len(),
        });
    }
    if let Some(p) = initial.iter().find(|p| p.dim() != cfg.prototype_dim) {
        return Err(Error::InvalidConfig(format!(
            "initial prototype has dimension {}, expected {}",
            p.dim(),
            cfg.prototype_dim
        )));
    }
    if let Some(p) = initial.iter().find(|p| p.ambient_dim() != n) {
        return Err(Error::AmbientMismatch {
            expected: n,
            found: p.ambient_dim(),
        });
    }
    let mut prototypes = initial;
    let mut current = assign(dataset, &prototypes)?;
    let mut history = vec![current.distortion];
    let mut iterations = 0;
    while iterations < cfg.max_outer_iters {
        let candidate = update_prototypes(dataset, &current.labels, &prototypes, cfg)?;
        let next = assign(dataset, &candidate)?;
        if next.distortion > current.distortion {
            log::debug!(
                "discarding update: distortion {} -> {}",
                current.distortion,
                next.distortion
            );
            break;
        }
        let improvement = current.distortion - next.distortion;
        let previous = current.distortion;
        prototypes = candidate;
        current = next;
        history.push(current.distortion);
        iterations += 1;
        if improvement <= cfg.distortion_rel_tol * previous {
            break;
        }
    }
    Ok(ClusterModel {
        prototypes,
        labels: current.labels,
        distortion_history: history,
        config: cfg.clone(),
        iterations_used: iterations,
    })
}
