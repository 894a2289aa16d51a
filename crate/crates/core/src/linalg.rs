//! Dense complex linear algebra helpers shared by the geometric modules.
//!
//! Everything works on `DMatrix<Complex64>`; dimensions in this crate stay
//! small (spin spaces of dimension 2n, Hilbert spaces of a few hundred), so
//! the routines favour clarity over blocking.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Frobenius (Hilbert–Schmidt) norm.
pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn min_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    fro(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermitian_defect(m) <= tol * (1.0 + fro(m))
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * real(0.5)
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Rescales `v` so that its largest-magnitude entry is real and positive.
/// Ties are broken by the lowest index.
pub fn fix_phase(v: &mut nalgebra::DVectorViewMut<'_, Complex64>) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // small relative slack so that numerically equal entries keep a stable winner
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / v[best].norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order and each eigenvector phase-normalised by [`fix_phase`].
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        fix_phase(&mut vectors.column_mut(dst));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Counts eigenvalues of a Hermitian matrix above `tol` and below `-tol`.
pub fn signature(m: &CMat, tol: f64) -> (usize, usize) {
    let ev = hermitian_eigenvalues(m);
    let p = ev.iter().filter(|&&l| l > tol).count();
    let q = ev.iter().filter(|&&l| l < -tol).count();
    (p, q)
}

/// Splitting of a Hermitian matrix into its image and kernel.
#[derive(Debug, Clone)]
pub struct ImageSplit {
    /// Nonzero eigenvalues, positive ones first, each group in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors for `values` (columns).
    pub image: CMat,
    /// Orthonormal basis of the numerical kernel.
    pub kernel: CMat,
    pub p: usize,
    pub q: usize,
}

/// Eigenvalues with magnitude at most `rel_tol · max|λ|` count as zero.
pub fn image_split(m: &CMat, rel_tol: f64) -> ImageSplit {
    let (vals, vecs) = hermitian_eigen(m);
    let norm = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cut = rel_tol * norm;
    let f = vals.len();
    let p = vals.iter().filter(|&&l| l > cut).count();
    let q = vals.iter().filter(|&&l| l < -cut).count();
    // descending order: positives occupy the front, negatives the back
    let image_idx: Vec<usize> = (0..p).chain(f - q..f).collect();
    let kernel_idx: Vec<usize> = (p..f - q).collect();
    ImageSplit {
        values: image_idx.iter().map(|&k| vals[k]).collect(),
        image: vecs.select_columns(image_idx.iter()),
        kernel: vecs.select_columns(kernel_idx.iter()),
        p,
        q,
    }
}

/// Complex Schur form `m = Q T Q†` computed for `m − μ1` with `μ = tr(m)/n`
/// and shifted back. Returns `None` if the QR iteration does not converge
/// within `200 n` sweeps; unshifted, the iteration can stall on matrices
/// close to a multiple of the identity.
pub fn schur(m: &CMat) -> Option<(CMat, CMat)> {
    let n = m.nrows();
    let mu = trace(m) / n.max(1) as f64;
    let shifted = m - identity(n) * mu;
    let (q, mut t) = nalgebra::Schur::try_new(shifted, f64::EPSILON, 200 * n.max(1))?.unpack();
    for i in 0..n {
        t[(i, i)] += mu;
    }
    Some((q, t))
}

/// Eigenvalues of a general complex matrix (diagonal of its complex Schur form).
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    let (_, t) = schur(m).unwrap_or_else(|| m.clone().schur().unpack());
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Diagonalisation `M = V diag(λ) V⁻¹` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: CMat,
    pub vectors_inv: CMat,
}

impl Diagonalization {
    /// Applies a scalar function to the spectrum: `V f(Λ) V⁻¹`.
    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fl;
            }
        }
        scaled * &self.vectors_inv
    }
}

/// Diagonalises `m` through its complex Schur form and triangular
/// back-substitution for the eigenvectors.
///
/// Returns `None` when the eigenvector matrix is numerically singular
/// (condition number above `max_cond`), i.e. `m` is not safely diagonalisable.
pub fn diagonalize(m: &CMat, max_cond: f64) -> Option<Diagonalization> {
    let n = m.nrows();
    if n == 0 {
        return None;
    }
    let (q, t) = schur(m)?;
    let scale = fro(&t).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for l in (j + 1)..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = real(small);
            }
            y[(j, k)] = -acc / denom;
        }
        let norm = y.column(k).norm();
        y.column_mut(k).unscale_mut(norm);
    }
    let vectors = q * y;
    let sv = singular_values(&vectors);
    let cond = sv[0] / sv[sv.len() - 1];
    if !cond.is_finite() || cond > max_cond {
        return None;
    }
    let vectors_inv = inverse(&vectors)?;
    Some(Diagonalization {
        eigenvalues: (0..n).map(|i| t[(i, i)]).collect(),
        vectors,
        vectors_inv,
    })
}

/// Numeric rank of a real matrix: singular values above `rel_tol · σ_max`.
pub fn real_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0_f64, |a, &s| a.max(s));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Stacks `[a | b]` horizontally.
pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// Assembles the 2×2 block matrix `[[a, b], [c, d]]`.
pub fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (r1, c1) = a.shape();
    let (r2, c2) = d.shape();
    assert_eq!(b.shape(), (r1, c2));
    assert_eq!(c.shape(), (r2, c1));
    let mut out = CMat::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(a);
    out.view_mut((0, c1), (r1, c2)).copy_from(b);
    out.view_mut((r1, 0), (r2, c1)).copy_from(c);
    out.view_mut((r1, c1), (r2, c2)).copy_from(d);
    out
}

pub fn diag_real(values: &[f64]) -> CMat {
    let n = values.len();
    CMat::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { ZERO })
}
