//! Reference oracles for the eigenhist test suites.
//!
//! Nothing here shares code with the library under test: the dense Jacobi
//! eigensolver, the scalar-loop risk evaluation and the closed-form Laplacian
//! spectrum are written independently so they can be used to check it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic test RNG.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense symmetric matrix from tridiagonal bands.
pub fn tridiag_to_dense(diag: &[f64], offdiag: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = diag[i];
    }
    for (i, &e) in offdiag.iter().enumerate() {
        a[i][i + 1] = e;
        a[i + 1][i] = e;
    }
    a
}

/// Random symmetric tridiagonal bands with entries in [-1, 1] and
/// off-diagonal magnitudes bounded away from zero.
pub fn random_tridiag<R: Rng>(rng: &mut R, n: usize) -> (Vec<f64>, Vec<f64>) {
    let diag = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let offdiag = (0..n.saturating_sub(1))
        .map(|_| {
            let mag: f64 = rng.gen_range(0.05..1.0);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    (diag, offdiag)
}

/// Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations. Returns ascending eigenvalues and the matching eigenvectors
/// (`vectors[j]` is the unit eigenvector for `values[j]`).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i][j]).collect())
        .collect();
    (values, vectors)
}

/// Eigenvalues of the N-node path Laplacian: 2 - 2cos(pi j / N).
pub fn path_laplacian_eigenvalue(n: usize, j: usize) -> f64 {
    2.0 - 2.0 * (std::f64::consts::PI * j as f64 / n as f64).cos()
}

/// Risk curve evaluated straight from its defining double sum, one scalar at
/// a time. `basis[j][i]` is entry i of basis vector j.
pub fn brute_force_risk(basis: &[Vec<f64>], p: &[f64], n: u64) -> Vec<f64> {
    let k = basis.len();
    let nf = n as f64;
    let mut c = vec![0.0; k];
    let mut s2 = vec![0.0; k];
    for j in 0..k {
        for i in 0..p.len() {
            c[j] += basis[j][i] * p[i];
            s2[j] += basis[j][i] * basis[j][i] * p[i];
        }
    }
    let mut cbar2 = vec![0.0; k];
    if n > 1 {
        for j in 0..k {
            let raw = (nf * c[j] * c[j] - s2[j]) / (nf - 1.0);
            cbar2[j] = if raw > 0.0 { raw } else { 0.0 };
        }
    }
    let mut risk = vec![0.0; k];
    for m in 1..=k {
        let mut variance = 0.0;
        for j in 0..m {
            variance += s2[j] - cbar2[j];
        }
        let mut bias = 0.0;
        for j in m..k {
            bias += cbar2[j];
        }
        risk[m - 1] = variance / nf + bias;
    }
    risk
}

/// Reference Gaussian kernel sum on the integer grid with no truncation.
pub fn untruncated_gaussian_grid(samples: &[u64], support: usize, bandwidth: f64) -> Vec<f64> {
    let mut q = vec![0.0; support];
    for (i, qi) in q.iter_mut().enumerate() {
        for &x in samples {
            let d = i as f64 - x as f64;
            *qi += (-d * d / (2.0 * bandwidth * bandwidth)).exp();
        }
    }
    let total: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= total);
    q
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
