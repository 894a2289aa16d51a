//! Seeded random matrices for property suites and experiments.
//!
//! Procedure: every entry is an independent standard complex Gaussian
//! `(a + ib)/√2` with `a, b ~ N(0,1)`; Hermitian matrices are `(G + G†)/2`,
//! isometries come from the QR factorisation of a Gaussian matrix. Draw order
//! is column-major, so a fixed seed reproduces the same matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, real, CMat};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

pub fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    linalg::hermitian_part(&gaussian(rng, n, n))
}

/// Rescales `m` to Frobenius norm `norm` (zero stays zero).
pub fn with_norm(m: CMat, norm: f64) -> CMat {
    let current = linalg::fro(&m);
    if current == 0.0 {
        m
    } else {
        m * real(norm / current)
    }
}

/// `rows × cols` matrix with orthonormal columns (`cols ≤ rows`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    assert!(cols <= rows);
    let q = gaussian(rng, rows, cols).qr().q();
    q.columns(0, cols).into_owned()
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    isometry(rng, n, n)
}

/// Hermitian `f × f` matrix of rank `p + q` with `p` positive and `q`
/// negative eigenvalues, magnitudes uniform in `[lo, hi]`.
pub fn fixed_signature<R: Rng + ?Sized>(
    rng: &mut R,
    f: usize,
    p: usize,
    q: usize,
    lo: f64,
    hi: f64,
) -> CMat {
    let v = isometry(rng, f, p + q);
    let values: Vec<f64> = (0..p + q)
        .map(|k| {
            let mag = rng.random_range(lo..=hi);
            if k < p {
                mag
            } else {
                -mag
            }
        })
        .collect();
    &v * linalg::diag_real(&values) * v.adjoint()
}

/// Unitary `exp`-free rotation near the identity: Cayley transform of a
/// random anti-Hermitian generator with Frobenius norm `scale`.
pub fn unitary_near_identity<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMat {
    let h = with_norm(hermitian(rng, n), scale);
    let k = h * linalg::I;
    cayley(&k)
}

/// Cayley transform `(1 − K/2)⁻¹ (1 + K/2)`.
pub fn cayley(k: &CMat) -> CMat {
    let n = k.nrows();
    let half = k * real(0.5);
    let minus = linalg::identity(n) - &half;
    let plus = linalg::identity(n) + &half;
    linalg::inverse(&minus).expect("Cayley transform of a small generator") * plus
}

/// Point of the same signature class near `x`: conjugation by a unitary
/// near the identity plus a Hermitian perturbation supported on the image.
pub fn perturb_regular<R: Rng + ?Sized>(rng: &mut R, x: &CMat, scale: f64) -> CMat {
    let f = x.nrows();
    let w = unitary_near_identity(rng, f, scale);
    let (vals, vecs) = linalg::hermitian_eigen(x);
    let norm = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cut = 1e-8 * norm;
    let bumped: Vec<f64> = vals
        .iter()
        .map(|&l| {
            if l.abs() > cut {
                l * (1.0 + scale * rng.random_range(-0.5..=0.5))
            } else {
                0.0
            }
        })
        .collect();
    let y0 = &vecs * linalg::diag_real(&bumped) * vecs.adjoint();
    linalg::hermitian_part(&(&w * y0 * w.adjoint()))
}
