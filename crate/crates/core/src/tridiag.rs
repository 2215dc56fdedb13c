//! Smallest eigenpairs of real symmetric tridiagonal matrices.
//!
//! Eigenvalues come from Sturm-sequence bisection and eigenvectors from
//! inverse iteration on the shifted matrix, in the style of LAPACK's
//! `stebz`/`stein` pair. Computing `k` eigenpairs of an `N`-dimensional
//! matrix takes `O(kN)` time and memory, with no dense storage anywhere.

use crate::error::{Error, Result};

/// Absolute bisection tolerance.
pub const BISECTION_TOL_ABS: f64 = 1e-14;
/// Bisection tolerance relative to [`TridiagMatrix::scale`].
pub const BISECTION_TOL_REL: f64 = 1e-12;
/// Eigenvalues closer than this (relative to scale) share a cluster and have
/// their vectors reorthogonalized against each other.
pub const CLUSTER_TOL_REL: f64 = 1e-6;
/// Inverse-iteration sweeps per start vector.
pub const MAX_SWEEPS: usize = 8;
/// Residual target for a converged eigenvector, relative to scale.
const RESIDUAL_TOL_REL: f64 = 1e-11;

/// Symmetric tridiagonal matrix stored as its two distinct bands.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::param("tridiagonal matrix must have N >= 1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::param(format!(
                "off-diagonal length {} does not match N - 1 = {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::param("matrix entries must be finite"));
        }
        Ok(Self { diag, offdiag })
    }

    /// Laplacian of the path graph on `n` nodes: diagonal `[1, 2, ..., 2, 1]`,
    /// off-diagonal `-1`. For `n == 1` this is the 1x1 zero matrix.
    pub fn path_laplacian(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("path Laplacian needs at least one node"));
        }
        let mut diag = vec![2.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        if n == 1 {
            diag[0] = 0.0;
        }
        Self::new(diag, vec![-1.0; n - 1])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Radius of Gershgorin disc `i`.
    fn radius(&self, i: usize) -> f64 {
        let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
        let right = self.offdiag.get(i).map_or(0.0, |e| e.abs());
        left + right
    }

    /// Interval `[lo, hi]` containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        (0..self.dim()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = self.radius(i);
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    /// Largest absolute Gershgorin bound; the reference magnitude for all
    /// tolerances.
    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        lo.abs().max(hi.abs())
    }

    /// Scale with the all-zero matrix mapped to 1 so tolerances stay positive.
    fn tol_scale(&self) -> f64 {
        let s = self.scale();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Number of eigenvalues strictly less than `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let e2: Vec<f64> = self.offdiag.iter().map(|e| e * e).collect();
        sturm_count_sq(&self.diag, &e2, x, f64::EPSILON * self.tol_scale())
    }

    /// `y = T x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length must match matrix dimension");
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for (i, &e) in self.offdiag.iter().enumerate() {
            y[i] += e * x[i + 1];
            y[i + 1] += e * x[i];
        }
        y
    }

    /// `x^T T x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// The `k` smallest eigenpairs, eigenvalues ascending.
    pub fn smallest_eigenpairs(&self, k: usize) -> Result<EigenBasis> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(Error::param(format!(
                "requested {k} eigenpairs of a {n}x{n} matrix; need 1 <= k <= N"
            )));
        }
        let scale = self.tol_scale();
        let e2: Vec<f64> = self.offdiag.iter().map(|e| e * e).collect();
        let values = self.bisect_smallest(k, &e2, scale);
        let vectors = self.inverse_iteration(&values, scale)?;
        Ok(EigenBasis { n, values, vectors })
    }

    /// Bisection for eigenvalues 0..k, all brackets advanced together. Each
    /// pass picks trial shifts inside the open brackets (a bracket shared by
    /// `m` eigenvalues is cut into `m + 1` pieces), counts them in one sweep
    /// over the matrix, and lets every count tighten every bracket.
    fn bisect_smallest(&self, k: usize, e2: &[f64], scale: f64) -> Vec<f64> {
        let (lo, hi) = self.gershgorin_bounds();
        let pivot_floor = f64::EPSILON * scale;
        let tol = BISECTION_TOL_ABS + BISECTION_TOL_REL * scale;
        let mut lower = vec![lo; k];
        let mut upper = vec![hi; k];
        let mut shifts = Vec::with_capacity(k);
        loop {
            shifts.clear();
            let mut j = 0;
            while j < k {
                let (a, b) = (lower[j], upper[j]);
                let mut shared = 1;
                while j + shared < k && lower[j + shared] == a && upper[j + shared] == b {
                    shared += 1;
                }
                if b - a > tol {
                    let pieces = (shared + 1) as f64;
                    for s in 1..=shared {
                        let x = a + (b - a) * (s as f64 / pieces);
                        if x > a && x < b {
                            shifts.push(x);
                        }
                    }
                }
                j += shared;
            }
            if shifts.is_empty() {
                break;
            }
            let counts = sturm_counts(&self.diag, e2, &shifts, pivot_floor);
            for (&x, &count) in shifts.iter().zip(&counts) {
                for i in 0..k {
                    if count > i {
                        upper[i] = upper[i].min(x);
                    } else {
                        lower[i] = lower[i].max(x);
                    }
                }
            }
        }
        lower.iter().zip(&upper).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    fn inverse_iteration(&self, values: &[f64], scale: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let k = values.len();
        let cluster_gap = CLUSTER_TOL_REL * scale;
        let residual_tol = RESIDUAL_TOL_REL * scale;
        let mut vectors = vec![0.0; n * k];
        let mut cluster_start = 0;
        for j in 0..k {
            if j > 0 && values[j] - values[j - 1] > cluster_gap {
                cluster_start = j;
            }
            let lu = ShiftedLu::factor(self, values[j], f64::EPSILON * scale);
            let (done, rest) = vectors.split_at_mut(j * n);
            let cluster = &done[cluster_start * n..];
            let target = &mut rest[..n];

            let mut last_residual = f64::INFINITY;
            let mut converged = false;
            for attempt in 0..2 {
                start_vector(target, j, attempt);
                for _sw in 0..MAX_SWEEPS {
                    if !sweep(&lu, cluster, target) {
                        break;
                    }
                    last_residual = self.residual(target, values[j]);
                    if last_residual <= residual_tol {
                        converged = true;
                        break;
                    }
                }
                if converged {
                    break;
                }
            }
            // One sweep past the residual test squeezes out what is left of
            // the neighbouring eigenvectors.
            if converged && sweep(&lu, cluster, target) {
                last_residual = self.residual(target, values[j]);
                converged = last_residual <= residual_tol;
            }
            if !converged {
                return Err(Error::NoConvergence {
                    index: j,
                    residual: last_residual,
                });
            }
            fix_sign(target);
        }
        Ok(vectors)
    }

    fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        let n = self.dim();
        let mut sum = 0.0;
        for i in 0..n {
            let mut tv = (self.diag[i] - lambda) * v[i];
            if i > 0 {
                tv += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                tv += self.offdiag[i] * v[i + 1];
            }
            sum += tv * tv;
        }
        sum.sqrt()
    }
}

/// Sturm count from squared off-diagonals. Pivots smaller in magnitude than
/// `floor` are replaced by `+-floor`; an exact zero counts as nonnegative.
pub(crate) fn sturm_count_sq(diag: &[f64], e2: &[f64], x: f64, floor: f64) -> usize {
    let guard = |d: f64| {
        if d.abs() < floor {
            if d < 0.0 {
                -floor
            } else {
                floor
            }
        } else {
            d
        }
    };
    let mut d = guard(diag[0] - x);
    let mut count = usize::from(d < 0.0);
    for i in 1..diag.len() {
        d = guard((diag[i] - x) - e2[i - 1] / d);
        count += usize::from(d < 0.0);
    }
    count
}

/// One inverse-iteration step followed by Gram-Schmidt against the cluster.
fn sweep(lu: &ShiftedLu, cluster: &[f64], target: &mut [f64]) -> bool {
    let n = target.len();
    lu.solve_in_place(target);
    if !normalize(target) {
        return false;
    }
    for prev in cluster.chunks_exact(n) {
        let d = dot(prev, target);
        target.iter_mut().zip(prev).for_each(|(t, p)| *t -= d * p);
    }
    normalize(target)
}

const LANES: usize = 8;

/// Sturm counts for several shifts at once. The pivot recurrence is a chain
/// of dependent divisions, so running independent shifts side by side keeps
/// the divider busy.
fn sturm_counts(diag: &[f64], e2: &[f64], shifts: &[f64], floor: f64) -> Vec<usize> {
    let mut out = Vec::with_capacity(shifts.len());
    for chunk in shifts.chunks(LANES) {
        let mut x = [0.0; LANES];
        x[..chunk.len()].copy_from_slice(chunk);
        let guard = |d: f64| if d.abs() < floor { if d < 0.0 { -floor } else { floor } } else { d };
        let mut d = [0.0; LANES];
        let mut count = [0usize; LANES];
        for l in 0..LANES {
            d[l] = guard(diag[0] - x[l]);
            count[l] = usize::from(d[l] < 0.0);
        }
        for i in 1..diag.len() {
            let (a, b) = (diag[i], e2[i - 1]);
            for l in 0..LANES {
                d[l] = guard((a - x[l]) - b / d[l]);
                count[l] += usize::from(d[l] < 0.0);
            }
        }
        out.extend_from_slice(&count[..chunk.len()]);
    }
    out
}

/// Alternating-sign start vector with deterministic magnitude jitter from a
/// Weyl sequence, so it is never exactly orthogonal to smooth eigenvectors (a
/// pure `+-1` pattern is orthogonal to the constant vector whenever N is even).
fn start_vector(v: &mut [f64], index: usize, attempt: usize) {
    const PHI: f64 = 0.618_033_988_749_894_9;
    let offset = (index as f64 * std::f64::consts::SQRT_2 + attempt as f64 * 1.732_050_807_568_877_2).fract();
    let mut frac = offset;
    for (i, x) in v.iter_mut().enumerate() {
        let mag = 1.0 + 0.5 * frac;
        *x = if i % 2 == 0 { mag } else { -mag };
        frac += PHI;
        if frac >= 1.0 {
            frac -= 1.0;
        }
    }
    normalize(v);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale to unit length; false when the vector is zero or not finite.
fn normalize(v: &mut [f64]) -> bool {
    let norm = dot(v, v).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    let inv = 1.0 / norm;
    v.iter_mut().for_each(|x| *x *= inv);
    true
}

/// Make the first entry of largest magnitude positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// LU factorization with partial pivoting of `T - shift * I`, laid out like
/// LAPACK `gttrf`: U has the main diagonal plus two superdiagonals.
struct ShiftedLu {
    /// Reciprocals of U's diagonal.
    inv_d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &TridiagMatrix, shift: f64, pivot_floor: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut du = t.offdiag.clone();
        let mut dl = t.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for x in d.iter_mut() {
            if x.abs() < pivot_floor {
                *x = if *x < 0.0 { -pivot_floor } else { pivot_floor };
            }
            *x = 1.0 / *x;
        }
        Self {
            inv_d: d,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.inv_d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] *= self.inv_d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) * self.inv_d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) * self.inv_d[i];
        }
    }
}

/// The `k` smallest eigenvalues of a tridiagonal matrix with their
/// orthonormal eigenvectors, stored column-major (`N` rows by `k` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    n: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenBasis {
    /// Row count (matrix dimension).
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of eigenpairs held.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n)
    }

    /// Keep only the first `k` eigenpairs.
    pub fn truncated(&self, k: usize) -> EigenBasis {
        let k = k.min(self.len());
        EigenBasis {
            n: self.n,
            values: self.values[..k].to_vec(),
            vectors: self.vectors[..k * self.n].to_vec(),
        }
    }

    /// Coefficients `V^T x` of the first `k` columns.
    pub fn coefficients(&self, x: &[f64], k: usize) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must match basis rows");
        self.columns().take(k).map(|v| dot(v, x)).collect()
    }

    /// `V[:, ..c.len()] c`.
    pub fn combine(&self, coefs: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n];
        for (v, &c) in self.columns().zip(coefs) {
            u.iter_mut().zip(v).for_each(|(ui, vi)| *ui += c * vi);
        }
        u
    }

    /// `V (V^T x)`, as two matrix-vector products.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.combine(&self.coefficients(x, self.len()))
    }

    /// Largest entry of `|V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.columns().enumerate() {
            for (j, b) in self.columns().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}
