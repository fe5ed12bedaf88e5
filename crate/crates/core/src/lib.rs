//! Subspace clustering on the Grassmann manifold.
//!
//! Samples are linear subspaces of a common ambient space, stored as
//! column-orthonormal bases. Clustering follows the Linde–Buzo–Gray
//! alternation (label by nearest prototype, refit prototypes, repeat) with
//! the first-principal-angle distance `sin²θ₁`. Three prototype solvers are
//! available:
//!
//! * [`prototypes::svbf_fit`]: the subspace `K` minimizing `Σ sin²θ₁(Xᵢ, K)`,
//!   i.e. the subspace that comes closest to sharing a direction with every
//!   cluster member (a Schubert variety of best fit);
//! * [`prototypes::flag_mean`]: the closed-form chordal flag mean;
//! * [`prototypes::flag_median`]: the IRLS-weighted flag median.
//!
//! The [`metrics`] module runs reproducible center-count sweeps and the
//! [`data`] module builds datasets from synthetic generators, MNIST IDX
//! files, or CSV feature matrices.
//!
//! ```
//! use subclust::data::{synth_generate, SynthSpec};
//! use subclust::{lbg_cluster, purity, LbgConfig, PrototypeMethod};
//!
//! let data = synth_generate(&SynthSpec { noise_level: 0.2, ..Default::default() })?;
//! let mut cfg = LbgConfig::new(PrototypeMethod::Svbf, 5, 1);
//! cfg.seed = 7;
//! let model = lbg_cluster(&data, &cfg)?;
//! assert!(model.final_distortion() < 0.5);
//! let p = purity(&model.labels, data.class_labels().unwrap())?;
//! assert!(p > 0.0 && p <= 1.0);
//! # Ok::<(), subclust::Error>(())
//! ```

pub mod data;
pub mod error;
pub mod lbg;
pub mod linalg;
pub mod metrics;
pub mod prototypes;
mod seed;

pub use data::SubspaceDataset;
pub use error::{Error, Result};
pub use lbg::{
    lbg_cluster, lbg_cluster_from, ClusterModel, InitStrategy, LbgConfig, PrototypeMethod,
};
pub use linalg::{AngleVector, Subspace};
pub use metrics::{purity, sweep, SweepReport};
pub use prototypes::{flag_mean, flag_median, svbf_fit, FitResult, SvbfConfig, SvbfInit};
