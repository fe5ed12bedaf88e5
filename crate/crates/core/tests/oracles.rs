//! Checks against independent reference computations that share no code
//! with the library's SVD/eigen path.

use nalgebra::DMatrix;
use subclust::data::{synth_generate_with_generators, SynthSpec};
use subclust::lbg::{lbg_cluster, LbgConfig, PrototypeMethod};
use subclust::linalg::{orthonormalize, principal_angles, random_subspace, Subspace};
use subclust::metrics::{cell_seed, sweep};
use subclust::prototypes::{flag_mean, flag_median, svbf_fit, SvbfConfig, SvbfInit};

/// Modified Gram–Schmidt on the columns of `a`.
fn gram_schmidt(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for col in a {
        let mut v = col.clone();
        for q in &out {
            let d: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|x| x / norm).collect());
    }
    out
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// `(eigenvalues, eigenvectors as columns)` sorted by descending eigenvalue.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|r| v[r][i]).collect())
        .collect();
    (values, vectors)
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

fn subspace_from_columns(cols: &[Vec<f64>]) -> Subspace {
    let n = cols[0].len();
    let data: Vec<f64> = cols.iter().flatten().copied().collect();
    Subspace::new(DMatrix::from_column_slice(n, cols.len(), &data)).unwrap()
}

/// `Σ xᵢxᵢᵀ` over unit vectors.
fn scatter(lines: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = lines[0].len();
    let mut m = vec![vec![0.0; n]; n];
    for x in lines {
        for i in 0..n {
            for j in 0..n {
                m[i][j] += x[i] * x[j];
            }
        }
    }
    m
}

#[test]
fn orthonormalize_matches_gram_schmidt() {
    for seed in 0..20 {
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (seed + 1);
        let raw = DMatrix::from_fn(10, 3, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        let ours = orthonormalize(&raw, 1e-8).unwrap();
        let gram = ours.basis().tr_mul(ours.basis()) - DMatrix::identity(3, 3);
        assert!(gram.amax() < 1e-10);
        let oracle = subspace_from_columns(&gram_schmidt(&columns(&raw)));
        let angles = principal_angles(&ours, &oracle).unwrap();
        assert!(angles.last() < 1e-8, "seed {seed}: {angles:?}");
    }
}

#[test]
fn flag_mean_bisector_against_jacobi() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let lines = vec![vec![1.0, 0.0], vec![s, s]];
    let (_, vecs) = jacobi_eigen(scatter(&lines));
    let oracle = subspace_from_columns(&vecs[..1]);
    let x: Vec<Subspace> = lines
        .iter()
        .map(|l| subspace_from_columns(std::slice::from_ref(l)))
        .collect();
    let ours = flag_mean(&x, 1).unwrap().prototype;
    assert!(principal_angles(&ours, &oracle).unwrap().first() < 1e-12);
    // And the oracle itself is the 22.5 degree bisector.
    let b = &vecs[0];
    assert!((b[0].abs() - 0.923_879_532_511_286_7).abs() < 1e-12);
    assert!((b[1].abs() - 0.382_683_432_365_089_8).abs() < 1e-12);
}

/// Random unit lines whose scatter matrix has a relative gap of at least
/// 5% between its k-th and (k+1)-th eigenvalues.
fn gapped_lines(seed: u64, n: usize, p: usize, k: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut attempt = 0;
    loop {
        let lines: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                let s = random_subspace(n, 1, seed * 1000 + attempt * 100 + i as u64).unwrap();
                columns(s.basis()).remove(0)
            })
            .collect();
        let (vals, vecs) = jacobi_eigen(scatter(&lines));
        if vals[k - 1] - vals[k] > 0.05 * vals[0] {
            return (lines, vecs[..k].to_vec());
        }
        attempt += 1;
    }
}

#[test]
fn svbf_on_lines_is_the_scatter_eigenspace() {
    for seed in 0..10 {
        let k = 1 + (seed as usize % 3);
        let (lines, top) = gapped_lines(seed, 8, 12, k);
        let samples: Vec<Subspace> = lines
            .iter()
            .map(|l| subspace_from_columns(std::slice::from_ref(l)))
            .collect();
        let cfg = SvbfConfig {
            init: SvbfInit::RandomOrthonormal,
            seed,
            ..SvbfConfig::new(k)
        };
        let fit = svbf_fit(&samples, &cfg).unwrap();
        let oracle = subspace_from_columns(&top);
        let angles = principal_angles(&fit.prototype, &oracle).unwrap();
        assert!(angles.last() < 1e-6, "seed {seed}: {angles:?}");
    }
}

/// `Σ ‖sin Θ‖` for a line at angle `phi` against lines at angles `alphas`.
fn median_cost(phi: f64, alphas: &[f64]) -> f64 {
    alphas.iter().map(|a| (phi - a).sin().abs()).sum()
}

fn line_at(angle: f64) -> Subspace {
    subspace_from_columns(&[vec![angle.cos(), angle.sin()]])
}

#[test]
fn flag_median_against_grid_search() {
    let cases: [&[f64]; 3] = [
        &[0.0, 0.0, std::f64::consts::FRAC_PI_2],
        &[0.0, 0.2, 0.35, 1.4],
        &[0.1, 0.5, 0.6, 0.65, 2.5],
    ];
    for alphas in cases {
        let samples: Vec<Subspace> = alphas.iter().map(|&a| line_at(a)).collect();
        let k = flag_median(&samples, 1, &Default::default()).unwrap();
        let b = k.basis();
        let phi = b[(1, 0)].atan2(b[(0, 0)]);
        let steps = 200_000;
        let best = (0..steps)
            .map(|i| i as f64 * std::f64::consts::PI / steps as f64)
            .min_by(|x, y| median_cost(*x, alphas).total_cmp(&median_cost(*y, alphas)))
            .unwrap();
        let gap = principal_angles(&k, &line_at(best)).unwrap().first();
        assert!(gap < 1e-3, "{alphas:?}: irls {phi}, grid {best}");
        assert!(median_cost(phi, alphas) <= median_cost(best, alphas) + 1e-6);
    }
}

/// Fraction of samples whose label maps to their class under the best
/// one-to-one matching of clusters to classes, by full enumeration.
fn best_matching_accuracy(labels: &[usize], classes: &[u32], groups: usize) -> f64 {
    fn permutations(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let head = rest.remove(i);
            for mut tail in permutations(rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }
    permutations((0..groups).collect())
        .into_iter()
        .map(|perm| {
            labels
                .iter()
                .zip(classes)
                .filter(|(&l, &c)| l < groups && perm[l] == c as usize)
                .count()
        })
        .max()
        .unwrap() as f64
        / labels.len() as f64
}

#[test]
fn noiseless_svbf_lbg_recovers_groups() {
    let spec = SynthSpec::default();
    let synth = synth_generate_with_generators(&spec).unwrap();
    let ds = &synth.dataset;
    let classes = ds.class_labels().unwrap();
    for seed in 0..5 {
        let mut cfg = LbgConfig::new(PrototypeMethod::Svbf, 5, 1);
        cfg.seed = seed;
        let model = lbg_cluster(ds, &cfg).unwrap();
        assert!(
            model.final_distortion() < 1e-8,
            "seed {seed}: {:?}",
            model.distortion_history
        );
        assert_eq!(
            best_matching_accuracy(&model.labels, classes, 5),
            1.0,
            "seed {seed}"
        );
        // Every prototype is one of the generating lines.
        for p in &model.prototypes {
            let hit = synth
                .generators
                .iter()
                .any(|g| principal_angles(p, g).unwrap().first() < 1e-6);
            assert!(hit);
        }
    }
}

#[test]
fn sweep_median_purity_matches_matching_oracle() {
    let ds = synth_generate_with_generators(&SynthSpec {
        seed: 8,
        ..Default::default()
    })
    .unwrap()
    .dataset;
    let mut base = LbgConfig::new(PrototypeMethod::Svbf, 5, 1);
    base.seed = 21;
    let report = sweep(&ds, &[PrototypeMethod::Svbf], &[5], 5, &base).unwrap();
    for r in &report.records {
        let mut cfg = base.clone();
        cfg.seed = cell_seed(base.seed, PrototypeMethod::Svbf, 5, r.trial);
        cfg.svbf.seed = cfg.seed;
        let model = lbg_cluster(&ds, &cfg).unwrap();
        let oracle = best_matching_accuracy(&model.labels, ds.class_labels().unwrap(), 5);
        assert_eq!(oracle, 1.0);
        assert_eq!(r.purity, oracle);
    }
    assert_eq!(report.medians[0].median_purity, 1.0);
}
