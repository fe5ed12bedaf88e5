//! Orthonormal bases and principal-angle geometry.
//!
//! A point on the Grassmannian `Gr(l, n)` is represented by an `n × l`
//! matrix with orthonormal columns. Principal angles between two subspaces
//! come from the singular values of `AᵀB`: `σᵢ = cos θᵢ`, with
//! `σ₁ ≥ … ≥ σ_r` and hence `θ₁ ≤ … ≤ θ_r`. Singular values are clamped into
//! `[0, 1]` before any inverse trigonometric function is applied.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::seed::Rng;

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Maximum entry of `BᵀB − I` accepted for a basis.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// A linear subspace of `Rⁿ` stored as an `n × l` column-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a basis after checking that it is finite and column-orthonormal.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (n, l) = basis.shape();
        if l == 0 || n < l {
            return Err(Error::InvalidBasis(format!("shape {n}x{l}")));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBasis("non-finite entry".into()));
        }
        let err = orthonormality_error(&basis);
        if err > ORTHONORMALITY_TOL {
            return Err(Error::InvalidBasis(format!("|BᵀB - I|_max = {err:e}")));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal_unchecked(basis: DMatrix<f64>) -> Self {
        debug_assert!(orthonormality_error(&basis) < 1e-8);
        Self { basis }
    }

    /// Builds a subspace from column-major data of an `n × l` orthonormal basis.
    pub fn from_column_slice(n: usize, l: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * l {
            return Err(Error::InvalidBasis(format!(
                "{} values for a {n}x{l} basis",
                data.len()
            )));
        }
        Self::new(DMatrix::from_column_slice(n, l, data))
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The subspace spanned by the first `k` basis columns.
    pub fn leading(&self, k: usize) -> Subspace {
        assert!(k >= 1 && k <= self.dim());
        Subspace {
            basis: self.basis.columns(0, k).into_owned(),
        }
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Subspace", 3)?;
        s.serialize_field("ambient_dim", &self.ambient_dim())?;
        s.serialize_field("dim", &self.dim())?;
        s.serialize_field("basis_column_major", self.basis.as_slice())?;
        s.end()
    }
}

/// Principal angles in radians, non-decreasing, each in `[0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(Vec<f64>);

impl AngleVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The smallest angle.
    pub fn first(&self) -> f64 {
        self.0[0]
    }

    /// The largest angle.
    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

pub(crate) fn orthonormality_error(basis: &DMatrix<f64>) -> f64 {
    let gram = basis.tr_mul(basis);
    let l = gram.nrows();
    let mut worst = 0.0f64;
    for j in 0..l {
        for i in 0..l {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Orthonormal basis for the column space of `raw`.
///
/// The basis comes from a Householder QR factorization, so the span of the
/// first `j` output columns equals the span of the first `j` input columns.
/// Fails with [`Error::RankDeficient`] when the ratio test
/// `σᵢ > tol · σ_max` keeps fewer than `l` singular values.
pub fn orthonormalize(raw: &DMatrix<f64>, tol: f64) -> Result<Subspace> {
    let (n, l) = raw.shape();
    if l == 0 || n < l {
        return Err(Error::InvalidConfig(format!(
            "cannot orthonormalize a {n}x{l} matrix"
        )));
    }
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidBasis("non-finite entry".into()));
    }
    let sv = raw.singular_values();
    let smax = sv.max();
    let rank = if smax > 0.0 {
        sv.iter().filter(|&&s| s > tol * smax).count()
    } else {
        0
    };
    if rank < l {
        return Err(Error::RankDeficient {
            effective_rank: rank,
            expected: l,
        });
    }
    let q = raw.clone().qr().q();
    Ok(Subspace { basis: q })
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::AmbientMismatch {
            expected: u.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    Ok(())
}

/// Principal angles between the column spans of two orthonormal bases.
///
/// Cosines are the singular values of `AᵀB`. Angles below π/4 are taken from
/// the sines instead, i.e. the singular values of `B − A(AᵀB)` where `B` is
/// the basis with fewer columns, since `acos` cannot resolve angles much
/// below `1e-8` near a cosine of one.
fn angles_between(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Vec<f64> {
    let (wide, narrow) = if v.ncols() <= u.ncols() {
        (u, v)
    } else {
        (v, u)
    };
    let cross = wide.tr_mul(narrow);
    let mut cosines: Vec<f64> = cross
        .singular_values()
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    if cosines.iter().all(|&c| c <= FRAC_1_SQRT_2) {
        return cosines.into_iter().map(f64::acos).collect();
    }
    let residual = narrow - wide * &cross;
    let mut sines: Vec<f64> = residual
        .singular_values()
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    sines.sort_by(f64::total_cmp);
    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            if c > FRAC_1_SQRT_2 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
}

/// Principal angles between `span(U)` and `span(V)`.
pub fn principal_angles(u: &Subspace, v: &Subspace) -> Result<AngleVector> {
    check_ambient(u, v)?;
    Ok(AngleVector(angles_between(&u.basis, &v.basis)))
}

/// Largest singular value of `UᵀV`, i.e. `cos θ₁`, clamped into `[0, 1]`.
pub fn max_cosine(u: &Subspace, v: &Subspace) -> Result<f64> {
    check_ambient(u, v)?;
    Ok(max_cosine_unchecked(u.basis(), v.basis()))
}

pub(crate) fn max_cosine_unchecked(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let product = u.tr_mul(v);
    let s = if product.nrows() == 1 || product.ncols() == 1 {
        product.norm()
    } else {
        product.singular_values().max()
    };
    s.clamp(0.0, 1.0)
}

/// First-angle chordal distance `sin²θ₁ = 1 − σ_max²`.
pub fn sin2_theta1(u: &Subspace, v: &Subspace) -> Result<f64> {
    let s = max_cosine(u, v)?;
    Ok((1.0 - s * s).max(0.0))
}

/// Sines of the principal angles, in non-decreasing angle order.
pub fn sin_theta_vector(u: &Subspace, v: &Subspace) -> Result<Vec<f64>> {
    Ok(principal_angles(u, v)?
        .into_vec()
        .into_iter()
        .map(f64::sin)
        .collect())
}

pub(crate) fn gaussian_matrix(rng: &mut Rng, n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(rng))
}

pub(crate) fn gaussian_vector(rng: &mut Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// A random `n × k` orthonormal basis from an orthonormalized Gaussian matrix.
pub(crate) fn random_orthonormal(rng: &mut Rng, n: usize, k: usize) -> Subspace {
    for _ in 0..8 {
        if let Ok(s) = orthonormalize(&gaussian_matrix(rng, n, k), DEFAULT_RANK_TOL) {
            return s;
        }
    }
    // Gaussian matrices are full rank with probability one.
    unreachable!("repeated rank-deficient Gaussian draws")
}

/// Seeded random point on `Gr(k, n)`.
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    if k == 0 || k > n {
        return Err(Error::DimensionTooLarge { k, n });
    }
    Ok(random_orthonormal(&mut crate::seed::rng(seed), n, k))
}

/// Appends `candidate` to an orthonormal column set if it carries a new
/// direction. Two Gram–Schmidt passes keep the set orthonormal to rounding.
fn extend_orthonormal(cols: &mut Vec<DVector<f64>>, candidate: &DVector<f64>) -> bool {
    let scale = candidate.norm();
    if !scale.is_finite() || scale == 0.0 {
        return false;
    }
    let mut r = candidate / scale;
    for _ in 0..2 {
        for c in cols.iter() {
            let d = c.dot(&r);
            r.axpy(-d, c, 1.0);
        }
    }
    let rn = r.norm();
    if rn < 1e-8 {
        return false;
    }
    cols.push(r / rn);
    true
}

/// Leading `k`-dimensional left singular subspace of a column block.
pub(crate) struct Leading {
    pub basis: DMatrix<f64>,
    /// `σ_k` and `σ_{k+1}` agree to within `1e-10` relatively.
    pub degenerate: bool,
}

/// Relative eigenvalue floor below which a direction counts as null and the
/// basis is completed from the fallback instead.
const NULL_EIGEN_REL: f64 = 1e-14;

/// Top-`k` left singular vectors of `w` (equivalently top-`k` eigenvectors
/// of `W Wᵀ`), computed from whichever Gram matrix is smaller.
///
/// Eigenvalue ties are resolved by the stable descending sort of the
/// eigensolver output. When `W` has fewer than `k` usable directions, the
/// basis is completed from the columns produced by `fallback` (projected off
/// the chosen columns) and then from coordinate axes.
pub(crate) fn leading_subspace<F>(w: &DMatrix<f64>, k: usize, fallback: F) -> Leading
where
    F: FnOnce() -> Option<DMatrix<f64>>,
{
    let (n, p) = w.shape();
    assert!(k >= 1 && k <= n);

    let use_small = p <= n;
    let gram = if use_small {
        w.tr_mul(w)
    } else {
        w * w.transpose()
    };
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambdas: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let lambda_max = lambdas.first().copied().unwrap_or(0.0);

    let sigma = |j: usize| lambdas.get(j).map_or(0.0, |l| l.sqrt());
    let degenerate = if k < n {
        let (sk, sk1) = (sigma(k - 1), sigma(k));
        sk == 0.0 || sk - sk1 < 1e-10 * sk
    } else {
        false
    };

    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(k);
    for (&idx, &lambda) in order.iter().zip(&lambdas) {
        if cols.len() == k || lambda.is_nan() || lambda <= NULL_EIGEN_REL * lambda_max {
            break;
        }
        let v = eig.eigenvectors.column(idx);
        let col = if use_small {
            (w * v) / lambda.sqrt()
        } else {
            v.into_owned()
        };
        extend_orthonormal(&mut cols, &col);
    }
    if cols.len() < k {
        if let Some(fb) = fallback() {
            for c in fb.column_iter() {
                if cols.len() == k {
                    break;
                }
                extend_orthonormal(&mut cols, &c.into_owned());
            }
        }
    }
    let mut axis = 0;
    while cols.len() < k {
        let mut e = DVector::zeros(n);
        e[axis] = 1.0;
        extend_orthonormal(&mut cols, &e);
        axis += 1;
    }
    Leading {
        basis: DMatrix::from_columns(&cols),
        degenerate,
    }
}
