//! Cluster representatives on the Grassmannian.
//!
//! [`svbf_fit`] learns the subspace `K` minimizing `Σᵢ sin²θ₁(Xᵢ, K)`: the
//! subspace that comes closest to meeting every sample in at least one
//! direction. Only this single-direction incidence condition is modeled.
//! [`flag_mean`] and [`flag_median`] are the classical averages it is
//! compared against.

use std::borrow::Borrow;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, leading_subspace, Subspace};
use crate::seed::{self, par_map};

/// Starting point of the SVBF block-coordinate iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SvbfInit {
    FromFlagMean,
    FromGivenSubspace(Subspace),
    RandomOrthonormal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvbfConfig {
    pub prototype_dim: usize,
    pub max_inner_iters: usize,
    /// Stop once an update improves the objective by less than this fraction.
    pub objective_tol: f64,
    pub init: SvbfInit,
    pub seed: u64,
}

impl SvbfConfig {
    pub fn new(prototype_dim: usize) -> Self {
        Self {
            prototype_dim,
            max_inner_iters: 100,
            objective_tol: 1e-9,
            init: SvbfInit::FromFlagMean,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub prototype: Subspace,
    /// Final `Σ sin²θ₁(Xᵢ, K)`.
    pub objective: f64,
    /// Objective before the first update and after every accepted update.
    pub objective_history: Vec<f64>,
    pub iterations_used: usize,
}

/// A flag mean together with its uniqueness diagnostic.
#[derive(Debug, Clone)]
pub struct FlagMean {
    pub prototype: Subspace,
    /// The `k`-th and `(k+1)`-th singular values of the concatenated bases
    /// coincide, so the prototype is one of several equally good choices.
    pub degenerate_spectrum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagMedianConfig {
    pub max_irls_iters: usize,
    /// Floor on distances before inversion.
    pub eps: f64,
    /// Convergence threshold on the largest principal angle between iterates.
    pub tol: f64,
}

impl Default for FlagMedianConfig {
    fn default() -> Self {
        Self {
            max_irls_iters: 50,
            eps: 1e-8,
            tol: 1e-8,
        }
    }
}

fn validate<S: Borrow<Subspace>>(samples: &[S], k: usize) -> Result<usize> {
    let first = samples.first().ok_or(Error::EmptyInput)?.borrow();
    let n = first.ambient_dim();
    if let Some(bad) = samples
        .iter()
        .map(|s| s.borrow().ambient_dim())
        .find(|&d| d != n)
    {
        return Err(Error::AmbientMismatch {
            expected: n,
            found: bad,
        });
    }
    if k == 0 {
        return Err(Error::InvalidConfig(
            "prototype dimension must be positive".into(),
        ));
    }
    if k > n {
        return Err(Error::DimensionTooLarge { k, n });
    }
    Ok(n)
}

/// `[√w₁X₁ | √w₂X₂ | …]`, or the plain concatenation without weights.
fn concatenate<S: Borrow<Subspace>>(samples: &[S], weights: Option<&[f64]>) -> DMatrix<f64> {
    let n = samples[0].borrow().ambient_dim();
    let total: usize = samples.iter().map(|s| s.borrow().dim()).sum();
    let mut out = DMatrix::zeros(n, total);
    let mut col = 0;
    for (i, s) in samples.iter().enumerate() {
        let b = s.borrow().basis();
        let l = b.ncols();
        let mut block = out.columns_mut(col, l);
        block.copy_from(b);
        if let Some(w) = weights {
            block *= w[i].sqrt();
        }
        col += l;
    }
    out
}

/// Chordal flag mean: the top `k` left singular vectors of `[X₁ | … | X_p]`.
pub fn flag_mean<S: Borrow<Subspace>>(samples: &[S], k: usize) -> Result<FlagMean> {
    validate(samples, k)?;
    let lead = leading_subspace(&concatenate(samples, None), k, || None);
    Ok(FlagMean {
        prototype: Subspace::from_orthonormal_unchecked(lead.basis),
        degenerate_spectrum: lead.degenerate,
    })
}

/// Flag median by iteratively reweighted flag means.
///
/// Each round weights sample `i` by `1 / max(‖sin Θ(Xᵢ, K)‖₂, eps)` and
/// recomputes the weighted flag mean, starting from the unweighted one.
pub fn flag_median<S: Borrow<Subspace> + Sync>(
    samples: &[S],
    k: usize,
    cfg: &FlagMedianConfig,
) -> Result<Subspace> {
    validate(samples, k)?;
    let mut current = flag_mean(samples, k)?.prototype;
    for _ in 0..cfg.max_irls_iters {
        let weights = par_map(samples.len(), |i| {
            let sines = linalg::sin_theta_vector(samples[i].borrow(), &current)
                .expect("ambient dimensions validated");
            let d = sines.iter().map(|s| s * s).sum::<f64>().sqrt();
            1.0 / d.max(cfg.eps)
        });
        let lead = leading_subspace(&concatenate(samples, Some(&weights)), k, || {
            Some(current.basis().clone())
        });
        let next = Subspace::from_orthonormal_unchecked(lead.basis);
        let moved = linalg::principal_angles(&next, &current)?.last();
        current = next;
        if moved < cfg.tol {
            break;
        }
    }
    Ok(current)
}

/// For one sample, the unit vector of `span(X)` closest to `span(K)` and the
/// cosine of the angle it makes with `K`.
fn closest_direction(k: &DMatrix<f64>, x: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let b = k.tr_mul(x);
    let (sigma, v) = if b.nrows() == 1 {
        let s = b.norm();
        let v = if s > 0.0 {
            b.row(0).transpose() / s
        } else {
            unit(b.ncols())
        };
        (s, v)
    } else if b.ncols() == 1 {
        (b.norm(), DVector::from_element(1, 1.0))
    } else {
        let svd = b.svd(false, true);
        let top = svd.singular_values.imax();
        let vt = svd.v_t.expect("requested right singular vectors");
        (svd.singular_values[top], vt.row(top).transpose())
    };
    (sigma.clamp(0.0, 1.0), x * v)
}

fn unit(len: usize) -> DVector<f64> {
    let mut e = DVector::zeros(len);
    e[0] = 1.0;
    e
}

/// Objective value and the closest sample directions for a fixed `K`.
/// The sum runs in sample order so it does not depend on thread count.
fn evaluate<S: Borrow<Subspace> + Sync>(samples: &[S], k: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let per_sample = par_map(samples.len(), |i| {
        closest_direction(k, samples[i].borrow().basis())
    });
    let objective = per_sample.iter().map(|(c, _)| (1.0 - c * c).max(0.0)).sum();
    let cols: Vec<DVector<f64>> = per_sample.into_iter().map(|(_, w)| w).collect();
    (objective, DMatrix::from_columns(&cols))
}

/// Schubert variety of best fit: `argmin_K Σᵢ sin²θ₁(Xᵢ, K)` over `Gr(k, n)`.
///
/// Block-coordinate ascent on `Σ cos²θ₁`. With `K` fixed, the best unit
/// vector `wᵢ ∈ span(Xᵢ)` is `Xᵢvᵢ` for the top right singular vector `vᵢ` of
/// `KᵀXᵢ`. With the `wᵢ` fixed, the best `K` spans the top `k` eigenvectors of
/// `Σ wᵢwᵢᵀ`. Neither half-step can raise the objective; an update that
/// would (by rounding) is rejected and ends the iteration.
pub fn svbf_fit<S: Borrow<Subspace> + Sync>(samples: &[S], cfg: &SvbfConfig) -> Result<FitResult> {
    let k = cfg.prototype_dim;
    let n = validate(samples, k)?;
    let start = match &cfg.init {
        SvbfInit::FromFlagMean => flag_mean(samples, k)?.prototype,
        SvbfInit::FromGivenSubspace(s) => {
            if s.ambient_dim() != n {
                return Err(Error::AmbientMismatch {
                    expected: n,
                    found: s.ambient_dim(),
                });
            }
            if s.dim() != k {
                return Err(Error::InvalidConfig(format!(
                    "initial subspace has dimension {}, expected {k}",
                    s.dim()
                )));
            }
            s.clone()
        }
        SvbfInit::RandomOrthonormal => linalg::random_orthonormal(&mut seed::rng(cfg.seed), n, k),
    };

    let mut current = start.into_basis();
    let (mut objective, mut directions) = evaluate(samples, &current);
    let mut history = vec![objective];
    let mut iterations = 0;
    while iterations < cfg.max_inner_iters && objective > 0.0 {
        // Null directions of Σ wᵢwᵢᵀ do not affect the objective; fill them
        // from the samples themselves, then from the previous iterate.
        let next = leading_subspace(&directions, k, || {
            let members = concatenate(samples, None);
            let mut fill = DMatrix::zeros(n, members.ncols() + k);
            fill.columns_mut(0, members.ncols()).copy_from(&members);
            fill.columns_mut(members.ncols(), k).copy_from(&current);
            Some(fill)
        })
        .basis;
        let (next_objective, next_directions) = evaluate(samples, &next);
        if next_objective > objective {
            break;
        }
        let improvement = objective - next_objective;
        let previous = objective;
        current = next;
        objective = next_objective;
        directions = next_directions;
        history.push(objective);
        iterations += 1;
        if improvement <= cfg.objective_tol * previous {
            break;
        }
    }
    Ok(FitResult {
        prototype: Subspace::from_orthonormal_unchecked(current),
        objective,
        objective_history: history,
        iterations_used: iterations,
    })
}
