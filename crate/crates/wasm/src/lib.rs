//! Browser bindings for a small interactive view of subspace clustering:
//! planes through the origin of `R³` are drawn as great circles on the unit
//! sphere, and line prototypes as antipodal point pairs.

use nalgebra::DMatrix;
use subclust::data::{synth_generate_with_generators, SynthSpec};
use subclust::lbg::{lbg_cluster, LbgConfig};
use subclust::linalg::{principal_angles, Subspace};
use subclust::metrics::purity;
use subclust::prototypes::{flag_mean, flag_median, svbf_fit, SvbfConfig};
use subclust::{PrototypeMethod, SubspaceDataset};
use wasm_bindgen::prelude::*;

const AMBIENT: usize = 3;

fn column_major(s: &Subspace) -> Vec<f64> {
    s.basis().as_slice().to_vec()
}

/// Orthonormalizes a column-major `3 × (len / 3)` array.
fn subspace(values: &[f64]) -> Result<Subspace, String> {
    if values.is_empty() || !values.len().is_multiple_of(AMBIENT) {
        return Err(format!(
            "expected a multiple of {AMBIENT} coordinates, got {}",
            values.len()
        ));
    }
    let raw = DMatrix::from_column_slice(AMBIENT, values.len() / AMBIENT, values);
    subclust::linalg::orthonormalize(&raw, subclust::linalg::DEFAULT_RANK_TOL)
        .map_err(|e| e.to_string())
}

fn angles(a: &[f64], b: &[f64]) -> Result<Vec<f64>, String> {
    let (u, v) = (subspace(a)?, subspace(b)?);
    principal_angles(&u, &v)
        .map(|t| t.into_vec())
        .map_err(|e| e.to_string())
}

/// Principal angles (radians, ascending) between the spans of two sets of
/// vectors in `R³`, each given as consecutive `x, y, z` triples.
#[wasm_bindgen(js_name = principalAngles)]
pub fn principal_angles_js(a: &[f64], b: &[f64]) -> Result<Vec<f64>, JsError> {
    angles(a, b).map_err(|e| JsError::new(&e))
}

/// A synthetic scene: planes scattered around a few random lines, plus the
/// latest clustering of them.
#[wasm_bindgen]
pub struct Scene {
    dataset: SubspaceDataset,
    generators: Vec<Subspace>,
    labels: Vec<u32>,
    prototypes: Vec<Subspace>,
    history: Vec<f64>,
}

impl Scene {
    fn generate(groups: usize, per_group: usize, noise: f64, seed: u64) -> Result<Self, String> {
        let spec = SynthSpec {
            num_prototypes: groups,
            samples_per_prototype: per_group,
            ambient_dim: AMBIENT,
            sample_dim: 2,
            noise_level: noise,
            seed,
        };
        let synth = synth_generate_with_generators(&spec).map_err(|e| e.to_string())?;
        Ok(Self {
            dataset: synth.dataset,
            generators: synth.generators,
            labels: Vec::new(),
            prototypes: Vec::new(),
            history: Vec::new(),
        })
    }

    fn run(&mut self, method: &str, centers: usize, seed: u64) -> Result<f64, String> {
        let method: PrototypeMethod = method.parse().map_err(|e: subclust::Error| e.to_string())?;
        let mut cfg = LbgConfig::new(method, centers, 1);
        cfg.seed = seed;
        cfg.svbf.seed = seed;
        let model = lbg_cluster(&self.dataset, &cfg).map_err(|e| e.to_string())?;
        let classes = self
            .dataset
            .class_labels()
            .expect("synthetic data is labeled");
        let score = purity(&model.labels, classes).map_err(|e| e.to_string())?;
        self.labels = model.labels.iter().map(|&l| l as u32).collect();
        self.history = model.distortion_history;
        self.prototypes = model.prototypes;
        Ok(score)
    }

    /// The three prototype lines fitted to the planes of one generator group,
    /// in the order svbf, flag mean, flag median.
    fn fit_group(&self, group: u32) -> Result<Vec<Subspace>, String> {
        let classes = self
            .dataset
            .class_labels()
            .expect("synthetic data is labeled");
        let members: Vec<&Subspace> = self
            .dataset
            .samples()
            .iter()
            .zip(classes)
            .filter(|(_, &c)| c == group)
            .map(|(s, _)| s)
            .collect();
        if members.is_empty() {
            return Err(format!("no group {group}"));
        }
        let err = |e: subclust::Error| e.to_string();
        Ok(vec![
            svbf_fit(&members, &SvbfConfig::new(1))
                .map_err(err)?
                .prototype,
            flag_mean(&members, 1).map_err(err)?.prototype,
            flag_median(&members, 1, &Default::default()).map_err(err)?,
        ])
    }
}

#[wasm_bindgen]
impl Scene {
    #[wasm_bindgen(constructor)]
    pub fn new(groups: usize, per_group: usize, noise: f64, seed: u32) -> Result<Scene, JsError> {
        Self::generate(groups, per_group, noise, u64::from(seed)).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter, js_name = planeCount)]
    pub fn plane_count(&self) -> usize {
        self.dataset.len()
    }

    /// Plane bases, six numbers (two unit columns) per plane.
    #[wasm_bindgen(js_name = planeBases)]
    pub fn plane_bases(&self) -> Vec<f64> {
        self.dataset
            .samples()
            .iter()
            .flat_map(column_major)
            .collect()
    }

    /// Generator group of every plane.
    pub fn classes(&self) -> Vec<u32> {
        self.dataset.class_labels().unwrap_or_default().to_vec()
    }

    /// Generating lines, three numbers per line.
    pub fn generators(&self) -> Vec<f64> {
        self.generators.iter().flat_map(column_major).collect()
    }

    /// Clusters the planes into `centers` groups with line prototypes and
    /// returns the purity of the result against the generator groups.
    pub fn cluster(&mut self, method: &str, centers: usize, seed: u32) -> Result<f64, JsError> {
        self.run(method, centers, u64::from(seed))
            .map_err(|e| JsError::new(&e))
    }

    /// Cluster index of every plane from the last `cluster` call.
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    /// Prototype lines from the last `cluster` call, three numbers each.
    pub fn prototypes(&self) -> Vec<f64> {
        self.prototypes.iter().flat_map(column_major).collect()
    }

    #[wasm_bindgen(js_name = distortionHistory)]
    pub fn distortion_history(&self) -> Vec<f64> {
        self.history.clone()
    }

    /// Fits all three prototype kinds to one generator group. Returns nine
    /// numbers (svbf, flag mean, flag median lines) followed by each line's
    /// angle in radians to the true generator.
    #[wasm_bindgen(js_name = compareGroup)]
    pub fn compare_group(&self, group: u32) -> Result<Vec<f64>, JsError> {
        let fits = self.fit_group(group).map_err(|e| JsError::new(&e))?;
        let truth = &self.generators[group as usize];
        let mut out: Vec<f64> = fits.iter().flat_map(column_major).collect();
        for f in &fits {
            let a = principal_angles(f, truth).map_err(|e| JsError::new(&e.to_string()))?;
            out.push(a.first());
        }
        Ok(out)
    }
}
