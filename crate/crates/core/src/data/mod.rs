//! Dataset construction: a synthetic incidence generator, MNIST IDX
//! ingestion, a CSV feature-matrix loader, and the native `SUBDS1` container.

mod idx;
mod matrix_csv;
mod native;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, orthonormalize, Subspace, DEFAULT_RANK_TOL};
use crate::seed::{self, par_map};

pub use idx::{
    encode_idx_images, encode_idx_labels, load_idx_images, parse_idx_images, parse_idx_labels,
    IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC,
};
pub use matrix_csv::{load_matrix_dataset, read_matrix_dataset};
pub use native::{load_dataset, read_dataset, save_dataset, write_dataset, SUBDS_MAGIC};

/// Feature vectors (one per row) with their integer classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub features: DMatrix<f64>,
    pub classes: Vec<u32>,
}

/// A collection of subspaces sharing one ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDataset {
    samples: Vec<Subspace>,
    class_labels: Option<Vec<u32>>,
    name: String,
}

impl SubspaceDataset {
    pub fn new(
        samples: Vec<Subspace>,
        class_labels: Option<Vec<u32>>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if let Some(first) = samples.first() {
            let n = first.ambient_dim();
            if let Some(bad) = samples.iter().find(|s| s.ambient_dim() != n) {
                return Err(Error::AmbientMismatch {
                    expected: n,
                    found: bad.ambient_dim(),
                });
            }
        }
        if let Some(labels) = &class_labels {
            if labels.len() != samples.len() {
                return Err(Error::LengthMismatch {
                    left: samples.len(),
                    right: labels.len(),
                });
            }
        }
        Ok(Self {
            samples,
            class_labels,
            name: name.into(),
        })
    }

    pub fn samples(&self) -> &[Subspace] {
        &self.samples
    }

    pub fn class_labels(&self) -> Option<&[u32]> {
        self.class_labels.as_deref()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `None` for an empty dataset.
    pub fn ambient_dim(&self) -> Option<usize> {
        self.samples.first().map(Subspace::ambient_dim)
    }
}

/// Parameters of the synthetic incidence generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSpec {
    pub num_prototypes: usize,
    pub samples_per_prototype: usize,
    pub ambient_dim: usize,
    pub sample_dim: usize,
    pub noise_level: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            num_prototypes: 5,
            samples_per_prototype: 10,
            ambient_dim: 25,
            sample_dim: 10,
            noise_level: 0.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_prototypes == 0 || self.samples_per_prototype == 0 {
            return Err(Error::InvalidConfig(
                "prototype and per-group counts must be positive".into(),
            ));
        }
        if self.sample_dim == 0 {
            return Err(Error::InvalidConfig("sample dim must be positive".into()));
        }
        if self.sample_dim >= self.ambient_dim {
            return Err(Error::InvalidConfig("sample dim must be < ambient".into()));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(Error::InvalidConfig(
                "noise level must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Synthetic dataset plus the generating lines (one per class).
#[derive(Debug, Clone)]
pub struct SynthData {
    pub dataset: SubspaceDataset,
    pub generators: Vec<Subspace>,
}

const SYNTH_RETRIES: usize = 5;

/// Subspaces clustered around random one-dimensional prototypes.
///
/// Each sample of group `g` is `orthonormalize([u | G])` with
/// `u = normalize(w_g + noise_level · z)`, `z` and `G` Gaussian. At zero noise
/// every sample contains its generating line `w_g`.
pub fn synth_generate(spec: &SynthSpec) -> Result<SubspaceDataset> {
    Ok(synth_generate_with_generators(spec)?.dataset)
}

pub fn synth_generate_with_generators(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let (n, l) = (spec.ambient_dim, spec.sample_dim);
    let mut rng = seed::rng(spec.seed);
    let generators: Vec<DVector<f64>> = (0..spec.num_prototypes)
        .map(|_| loop {
            let v = linalg::gaussian_vector(&mut rng, n);
            let norm = v.norm();
            if norm > 0.0 {
                break v / norm;
            }
        })
        .collect();

    let total = spec.num_prototypes * spec.samples_per_prototype;
    let mut samples = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (g, w) in generators.iter().enumerate() {
        for _ in 0..spec.samples_per_prototype {
            let mut made = None;
            for _ in 0..SYNTH_RETRIES {
                let noise = linalg::gaussian_vector(&mut rng, n);
                let u = w + noise * spec.noise_level;
                let fill = linalg::gaussian_matrix(&mut rng, n, l - 1);
                let unorm = u.norm();
                if unorm.is_nan() || unorm == 0.0 {
                    continue;
                }
                let mut raw = DMatrix::zeros(n, l);
                raw.set_column(0, &(u / unorm));
                raw.columns_mut(1, l - 1).copy_from(&fill);
                if let Ok(s) = orthonormalize(&raw, DEFAULT_RANK_TOL) {
                    made = Some(s);
                    break;
                }
            }
            let sample = made.ok_or(Error::RankDeficient {
                effective_rank: l - 1,
                expected: l,
            })?;
            samples.push(sample);
            labels.push(g as u32);
        }
    }
    let generators = generators
        .into_iter()
        .map(|w| {
            Subspace::from_orthonormal_unchecked(DMatrix::from_column_slice(n, 1, w.as_slice()))
        })
        .collect();
    Ok(SynthData {
        dataset: SubspaceDataset::new(samples, Some(labels), "synthetic")?,
        generators,
    })
}

/// Per-class bookkeeping from [`group_into_subspaces`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGrouping {
    pub class: u32,
    pub members: usize,
    pub groups_kept: usize,
    /// Groups whose vectors were numerically dependent.
    pub groups_dropped: usize,
    /// Vectors left over after forming whole groups.
    pub remainder: usize,
}

#[derive(Debug, Clone)]
pub struct Grouped {
    pub dataset: SubspaceDataset,
    pub per_class: Vec<ClassGrouping>,
}

/// Groups same-class vectors into orthonormal subspace samples.
///
/// Rows of each kept class are shuffled with a class-specific seed and cut
/// into consecutive groups of `group_size`; the remainder is dropped. A
/// group whose `n × group_size` matrix is rank deficient is skipped with a
/// warning. Output order follows `keep_classes`, then group index.
pub fn group_into_subspaces(
    vectors: &DMatrix<f64>,
    classes: &[u32],
    group_size: usize,
    keep_classes: &[u32],
    seed: u64,
) -> Result<Grouped> {
    let (rows, n) = vectors.shape();
    if rows != classes.len() {
        return Err(Error::LengthMismatch {
            left: rows,
            right: classes.len(),
        });
    }
    if group_size == 0 {
        return Err(Error::InvalidConfig("group size must be positive".into()));
    }
    if group_size > n {
        return Err(Error::DimensionTooLarge { k: group_size, n });
    }

    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let mut per_class = Vec::with_capacity(keep_classes.len());
    for &class in keep_classes {
        let mut members: Vec<usize> = (0..rows).filter(|&r| classes[r] == class).collect();
        if members.len() < group_size {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                group_size,
            });
        }
        members.shuffle(&mut seed::rng(seed::derive(&[seed, u64::from(class)])));
        let groups = members.len() / group_size;
        let built = par_map(groups, |g| {
            let idx = &members[g * group_size..(g + 1) * group_size];
            let raw = DMatrix::from_fn(n, group_size, |i, j| vectors[(idx[j], i)]);
            orthonormalize(&raw, DEFAULT_RANK_TOL)
        });
        let mut kept = 0;
        let mut dropped = 0;
        for (g, result) in built.into_iter().enumerate() {
            match result {
                Ok(s) => {
                    samples.push(s);
                    labels.push(class);
                    kept += 1;
                }
                Err(Error::RankDeficient { effective_rank, .. }) => {
                    warn!("class {class} group {g}: rank {effective_rank} < {group_size}, dropped");
                    dropped += 1;
                }
                Err(e) => return Err(e),
            }
        }
        per_class.push(ClassGrouping {
            class,
            members: members.len(),
            groups_kept: kept,
            groups_dropped: dropped,
            remainder: members.len() % group_size,
        });
    }
    Ok(Grouped {
        dataset: SubspaceDataset::new(samples, Some(labels), "grouped")?,
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{orthonormality_error, sin2_theta1};

    #[test]
    fn default_synth_shape() {
        let ds = synth_generate(&SynthSpec::default()).unwrap();
        assert_eq!(ds.len(), 50);
        assert!(ds
            .samples()
            .iter()
            .all(|s| s.ambient_dim() == 25 && s.dim() == 10));
        let labels = ds.class_labels().unwrap();
        for g in 0..5 {
            assert_eq!(labels.iter().filter(|&&c| c == g).count(), 10);
        }
    }

    #[test]
    fn noiseless_samples_contain_generator() {
        let synth = synth_generate_with_generators(&SynthSpec::default()).unwrap();
        let labels = synth.dataset.class_labels().unwrap();
        for (s, &c) in synth.dataset.samples().iter().zip(labels) {
            let d = sin2_theta1(s, &synth.generators[c as usize]).unwrap();
            assert!(d < 1e-12, "{d}");
            assert!(orthonormality_error(s.basis()) < 1e-10);
        }
    }

    #[test]
    fn synth_is_seed_deterministic() {
        let a = synth_generate(&SynthSpec {
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let b = synth_generate(&SynthSpec {
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let c = synth_generate(&SynthSpec {
            seed: 4,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples()[0].basis(), c.samples()[0].basis());
    }

    #[test]
    fn synth_rejects_bad_dims() {
        let spec = SynthSpec {
            sample_dim: 30,
            ..Default::default()
        };
        let err = synth_generate(&spec).unwrap_err();
        assert!(err.to_string().contains("sample dim must be < ambient"));
    }

    fn random_rows(rows: usize, n: usize, seed: u64) -> DMatrix<f64> {
        linalg::gaussian_matrix(&mut seed::rng(seed), rows, n)
    }

    #[test]
    fn grouping_counts_and_remainder() {
        let g = group_into_subspaces(&random_rows(20, 30, 1), &[4; 20], 10, &[4], 0).unwrap();
        assert_eq!(g.dataset.len(), 2);
        assert_eq!(g.dataset.class_labels().unwrap(), &[4, 4]);

        let g = group_into_subspaces(&random_rows(25, 30, 1), &[4; 25], 10, &[4], 0).unwrap();
        assert_eq!(g.dataset.len(), 2);
        assert_eq!(g.per_class[0].remainder, 5);
    }

    #[test]
    fn grouping_filters_classes() {
        let classes: Vec<u32> = (0..200).map(|i| (i % 10) as u32).collect();
        let g =
            group_into_subspaces(&random_rows(200, 40, 2), &classes, 5, &[0, 2, 4, 6], 1).unwrap();
        let mut seen: Vec<u32> = g.dataset.class_labels().unwrap().to_vec();
        seen.dedup();
        assert_eq!(seen, vec![0, 2, 4, 6]);
        assert_eq!(g.dataset.len(), 4 * 4);
    }

    #[test]
    fn grouping_drops_dependent_groups() {
        // Every row identical: all groups are rank one.
        let rows = DMatrix::from_element(6, 4, 1.0);
        let g = group_into_subspaces(&rows, &[0; 6], 3, &[0], 0).unwrap();
        assert_eq!(g.dataset.len(), 0);
        assert_eq!(g.per_class[0].groups_dropped, 2);
    }

    #[test]
    fn grouping_errors() {
        let rows = random_rows(5, 10, 0);
        assert!(matches!(
            group_into_subspaces(&rows, &[1; 5], 10, &[1], 0),
            Err(Error::ClassTooSmall {
                class: 1,
                count: 5,
                ..
            })
        ));
        assert!(matches!(
            group_into_subspaces(&rows, &[1; 5], 11, &[1], 0),
            Err(Error::DimensionTooLarge { .. })
        ));
        assert!(group_into_subspaces(&rows, &[1; 4], 2, &[1], 0).is_err());
        assert!(group_into_subspaces(&rows, &[1; 5], 0, &[1], 0).is_err());
    }

    #[test]
    fn dataset_validates_labels() {
        let s = linalg::random_subspace(4, 2, 0).unwrap();
        assert!(SubspaceDataset::new(vec![s.clone()], Some(vec![1, 2]), "x").is_err());
        let t = linalg::random_subspace(5, 2, 0).unwrap();
        assert!(SubspaceDataset::new(vec![s, t], None, "x").is_err());
    }
}
