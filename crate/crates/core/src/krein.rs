//! Linear algebra in finite-dimensional indefinite inner product spaces.
//!
//! A [`KreinSpace`] is fixed by a Hermitian, invertible Gram matrix `X` in a
//! working basis, so that `≺u|v≻ = u† X v`. Operators are plain square
//! matrices in the same basis; the Krein adjoint is `A* = X⁻¹ A† X`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, real, CMat};
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KreinError {
    #[error("Gram matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("Gram matrix is singular (smallest singular value {min_sv:.3e})")]
    SingularGram { min_sv: f64 },
    #[error("Gram signature ({found_p},{found_q}) differs from the declared ({p},{q})")]
    SignatureMismatch { p: usize, q: usize, found_p: usize, found_q: usize },
    #[error("operator has shape {rows}x{cols}, space has dimension {dim}")]
    DimensionMismatch { rows: usize, cols: usize, dim: usize },
    #[error("‖B − 1‖ = {distance:.4} is not below the admissible radius {radius}")]
    OutOfConvergenceRadius { distance: f64, radius: f64 },
    #[error("operator is not Krein-symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
}

/// How [`KreinSpace::sqrt_near_identity`] obtained its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtMethod {
    /// Principal square root through an eigendecomposition.
    Diagonalization,
    /// The operator was not safely diagonalisable; the binomial series was used.
    SeriesOnly,
}

#[derive(Debug, Clone)]
pub struct SqrtPair {
    /// `B^{1/2}`.
    pub half: CMat,
    /// `B^{-1/2}`.
    pub neg_half: CMat,
    pub method: SqrtMethod,
}

#[derive(Debug, Clone)]
pub struct Polar {
    /// Krein-unitary factor.
    pub unitary: CMat,
    /// Krein-symmetric factor near the identity.
    pub symmetric: CMat,
    pub method: SqrtMethod,
}

#[derive(Debug, Clone)]
pub struct KreinSpace {
    gram: CMat,
    gram_inv: CMat,
    p: usize,
    q: usize,
    tolerances: Tolerances,
}

impl KreinSpace {
    /// Validates `gram` and reads off its signature.
    pub fn new(gram: CMat, tolerances: Tolerances) -> Result<Self, KreinError> {
        assert!(gram.is_square(), "Gram matrix must be square");
        let defect = linalg::hermitian_defect(&gram);
        if defect > tolerances.tol * (1.0 + linalg::fro(&gram)) {
            return Err(KreinError::NotHermitian { defect });
        }
        let gram = linalg::hermitian_part(&gram);
        let sv = linalg::singular_values(&gram);
        let max_sv = sv.first().copied().unwrap_or(0.0);
        let min_sv = sv.last().copied().unwrap_or(0.0);
        if sv.is_empty() || min_sv <= tolerances.tol_singular_rel * max_sv {
            return Err(KreinError::SingularGram { min_sv });
        }
        let gram_inv = linalg::inverse(&gram).ok_or(KreinError::SingularGram { min_sv })?;
        let (p, q) = linalg::signature(&gram, 0.0);
        Ok(Self { gram, gram_inv, p, q, tolerances })
    }

    /// Like [`KreinSpace::new`] but also insists on the signature `(p, q)`.
    pub fn with_signature(gram: CMat, p: usize, q: usize, tolerances: Tolerances) -> Result<Self, KreinError> {
        let space = Self::new(gram, tolerances)?;
        if space.signature() != (p, q) {
            return Err(KreinError::SignatureMismatch { p, q, found_p: space.p, found_q: space.q });
        }
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMat {
        &self.gram_inv
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn check_operator(&self, a: &CMat) -> Result<(), KreinError> {
        let dim = self.dim();
        if a.nrows() != dim || a.ncols() != dim {
            return Err(KreinError::DimensionMismatch { rows: a.nrows(), cols: a.ncols(), dim });
        }
        Ok(())
    }

    /// `≺u|v≻ = u† X v`.
    pub fn inner(&self, u: &CMat, v: &CMat) -> CMat {
        u.adjoint() * &self.gram * v
    }

    /// `A* = X⁻¹ A† X`.
    pub fn adjoint(&self, a: &CMat) -> CMat {
        &self.gram_inv * a.adjoint() * &self.gram
    }

    /// `‖U† X U − X‖` (Frobenius).
    pub fn unitarity_residual(&self, u: &CMat) -> f64 {
        linalg::fro(&(u.adjoint() * &self.gram * u - &self.gram))
    }

    pub fn is_unitary(&self, u: &CMat, tol: f64) -> bool {
        self.unitarity_residual(u) <= tol
    }

    /// `‖S − X⁻¹ S† X‖` (Frobenius).
    pub fn symmetry_residual(&self, s: &CMat) -> f64 {
        linalg::fro(&(s - self.adjoint(s)))
    }

    pub fn is_symmetric(&self, s: &CMat, tol: f64) -> bool {
        self.symmetry_residual(s) <= tol
    }

    /// `(B^{1/2}, B^{-1/2})` for a Krein-symmetric `B` close to the identity.
    ///
    /// The principal square root is taken through an eigendecomposition; if
    /// `B` is not safely diagonalisable, or the result fails its residual
    /// check, the binomial series is used instead and the output is flagged
    /// [`SqrtMethod::SeriesOnly`].
    pub fn sqrt_near_identity(&self, b: &CMat) -> Result<SqrtPair, KreinError> {
        self.check_operator(b)?;
        let tol = &self.tolerances;
        let n = self.dim();
        let distance = linalg::op_norm(&(b - linalg::identity(n)));
        if distance >= tol.radius_series {
            return Err(KreinError::OutOfConvergenceRadius { distance, radius: tol.radius_series });
        }
        let residual = self.symmetry_residual(b);
        if residual > tol.tol * (1.0 + linalg::fro(b)) {
            return Err(KreinError::NotSymmetric { residual });
        }
        if let Some((half, neg_half)) = sqrt_by_diagonalization(b, tol.max_eigvec_cond) {
            let id = linalg::identity(n);
            let ok = linalg::fro(&(&half * &half - b)) <= tol.tol_sqrt
                && linalg::fro(&(&half * &neg_half - &id)) <= tol.tol_sqrt;
            if ok {
                return Ok(SqrtPair { half, neg_half, method: SqrtMethod::Diagonalization });
            }
        }
        Ok(SqrtPair {
            half: binomial_series(b, 0.5),
            neg_half: binomial_series(b, -0.5),
            method: SqrtMethod::SeriesOnly,
        })
    }

    /// Polar decomposition `A = U S` with `U` Krein-unitary and `S`
    /// Krein-symmetric near 1: `S = (A*A)^{1/2}`, `U = A (A*A)^{-1/2}`.
    pub fn polar_decompose(&self, a: &CMat) -> Result<Polar, KreinError> {
        self.check_operator(a)?;
        let b = self.adjoint(a) * a;
        let roots = self.sqrt_near_identity(&b)?;
        Ok(Polar { unitary: a * &roots.neg_half, symmetric: roots.half, method: roots.method })
    }

    /// Krein-unitary Cayley transform of the Krein-anti-symmetric generator `i X⁻¹ H`.
    pub fn cayley_unitary(&self, h: &CMat) -> CMat {
        let k = &self.gram_inv * linalg::hermitian_part(h) * linalg::I;
        crate::random::cayley(&k)
    }

    /// Krein-symmetric operator `X⁻¹ H` built from a Hermitian `H`.
    pub fn symmetric_from_hermitian(&self, h: &CMat) -> CMat {
        &self.gram_inv * linalg::hermitian_part(h)
    }
}

/// Principal `(B^{1/2}, B^{-1/2})` via eigendecomposition; `None` if `B` is
/// not safely diagonalisable or has an eigenvalue on `(−∞, 0]`.
pub fn sqrt_by_diagonalization(b: &CMat, max_cond: f64) -> Option<(CMat, CMat)> {
    let d = linalg::diagonalize(b, max_cond)?;
    if d.eigenvalues.iter().any(|l| l.im == 0.0 && l.re <= 0.0) {
        return None;
    }
    Some((d.apply(|l| l.sqrt()), d.apply(|l| l.sqrt().inv())))
}

/// First `count` coefficients of `(1 + z)^power = Σ c_k z^k`.
pub fn binomial_coefficients(power: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 1.0;
    for k in 0..count {
        out.push(c);
        c *= (power - k as f64) / (k as f64 + 1.0);
    }
    out
}

/// `B^power = Σ_k c_k (B − 1)^k`, truncated once a term drops below 1e−15
/// in Frobenius norm or after 200 terms.
pub fn binomial_series(b: &CMat, power: f64) -> CMat {
    const MAX_TERMS: usize = 200;
    const TERM_FLOOR: f64 = 1e-15;
    let n = b.nrows();
    let delta = b - linalg::identity(n);
    let mut sum = linalg::identity(n);
    let mut pow = linalg::identity(n);
    let mut c = 1.0;
    for k in 1..MAX_TERMS {
        c *= (power - (k - 1) as f64) / k as f64;
        pow = &pow * &delta;
        let term = &pow * real(c);
        let size = linalg::fro(&term);
        sum += term;
        if size < TERM_FLOOR {
            break;
        }
    }
    sum
}

/// Principal square root of a complex scalar; `None` on the cut `(−∞, 0]`.
pub fn principal_sqrt(z: Complex64) -> Option<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 {
        None
    } else {
        Some(z.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real, identity, ONE, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eta11() -> KreinSpace {
        KreinSpace::new(diag_real(&[1.0, -1.0]), Tolerances::default()).unwrap()
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let s = eta11();
        let a = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let expected = CMat::from_row_slice(2, 2, &[ZERO, ZERO, -ONE, ZERO]);
        assert!(linalg::fro(&(s.adjoint(&a) - expected)) < 1e-15);
        assert!(linalg::fro(&(s.adjoint(&s.adjoint(&a)) - a)) < 1e-15);
    }

    #[test]
    fn phases_and_boosts_are_unitary() {
        let s = eta11();
        let u = CMat::from_row_slice(2, 2, &[Complex64::from_polar(1.0, 0.3), ZERO, ZERO, Complex64::from_polar(1.0, -1.9)]);
        assert!(s.is_unitary(&u, 1e-12));
        let t: f64 = 0.7;
        let boost = CMat::from_row_slice(2, 2, &[real(t.cosh()), real(t.sinh()), real(t.sinh()), real(t.cosh())]);
        assert!(s.is_unitary(&boost, 1e-12));
        // a Euclidean rotation is not a U(1,1) element
        let rot = CMat::from_row_slice(2, 2, &[real(t.cos()), real(-t.sin()), real(t.sin()), real(t.cos())]);
        assert!(!s.is_unitary(&rot, 1e-6));
    }

    #[test]
    fn symmetry_examples() {
        let s = eta11();
        assert!(s.is_symmetric(&identity(2), 1e-14));
        assert!(!s.is_symmetric(&(identity(2) * linalg::I), 1e-3));
        let b = c(0.4, -1.2);
        let m = CMat::from_row_slice(2, 2, &[real(2.0), b, -b.conj(), real(-0.5)]);
        assert!(s.is_symmetric(&m, 1e-14));
    }

    #[test]
    fn rejects_singular_and_non_hermitian_gram() {
        let t = Tolerances::default();
        assert!(matches!(KreinSpace::new(diag_real(&[1.0, 0.0]), t), Err(KreinError::SingularGram { .. })));
        let mut g = identity(2);
        g[(0, 1)] = ONE;
        assert!(matches!(KreinSpace::new(g, t), Err(KreinError::NotHermitian { .. })));
        assert!(matches!(
            KreinSpace::with_signature(diag_real(&[1.0, 1.0]), 1, 1, t),
            Err(KreinError::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn series_coefficients_match_factorial_form() {
        // c_n = (-1)^{n+1} (2n)! / (4^n (n!)^2 (2n-1)) for the square root,
        // c_n = (-1)^n (2n)! / (4^n (n!)^2) for the inverse square root.
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        let sq = binomial_coefficients(0.5, 8);
        let isq = binomial_coefficients(-0.5, 8);
        for n in 1..8u32 {
            let central = fact(2 * n) / (4f64.powi(n as i32) * fact(n).powi(2));
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((sq[n as usize] - (-sign) * central / (2.0 * n as f64 - 1.0)).abs() < 1e-15);
            assert!((isq[n as usize] - sign * central).abs() < 1e-15);
        }
        assert_eq!(sq[2], -0.125);
        assert_eq!(isq[2], 0.375);
    }

    #[test]
    fn scalar_square_root() {
        let s = KreinSpace::new(diag_real(&[1.0, 1.0, -1.0, -1.0]), Tolerances::default()).unwrap();
        let b = identity(4) * real(1.21);
        let r = s.sqrt_near_identity(&b).unwrap();
        assert!(linalg::fro(&(r.half - identity(4) * real(1.1))) < 1e-14);
        assert!(linalg::fro(&(r.neg_half - identity(4) * real(1.0 / 1.1))) < 1e-14);
        let id = s.sqrt_near_identity(&identity(4)).unwrap();
        assert!(linalg::fro(&(id.half - identity(4))) < 1e-15);
    }

    #[test]
    fn sqrt_domain_errors() {
        let s = eta11();
        let far = identity(2) * real(1.9);
        assert!(matches!(s.sqrt_near_identity(&far), Err(KreinError::OutOfConvergenceRadius { .. })));
        let anti = identity(2) + identity(2) * c(0.0, 0.1);
        assert!(matches!(s.sqrt_near_identity(&anti), Err(KreinError::NotSymmetric { .. })));
    }

    #[test]
    fn non_diagonalisable_falls_back_to_series() {
        // 1 + N with N nilpotent and Krein-symmetric for gram [[0,1],[1,0]]
        let g = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let s = KreinSpace::new(g, Tolerances::default()).unwrap();
        let b = CMat::from_row_slice(2, 2, &[ONE, real(0.3), ZERO, ONE]);
        assert!(s.is_symmetric(&b, 1e-14));
        let r = s.sqrt_near_identity(&b).unwrap();
        assert_eq!(r.method, SqrtMethod::SeriesOnly);
        let expected = CMat::from_row_slice(2, 2, &[ONE, real(0.15), ZERO, ONE]);
        assert!(linalg::fro(&(r.half - expected)) < 1e-15);
    }

    #[test]
    fn polar_of_unitary_and_symmetric() {
        let s = KreinSpace::new(diag_real(&[1.0, 1.0, -1.0, -1.0]), Tolerances::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = crate::random::with_norm(crate::random::hermitian(&mut rng, 4), 0.2);
        let u = s.cayley_unitary(&h);
        let p = s.polar_decompose(&u).unwrap();
        assert!(linalg::fro(&(&p.unitary - &u)) < 1e-12);
        assert!(linalg::fro(&(&p.symmetric - identity(4))) < 1e-12);

        let sym = identity(4) + s.symmetric_from_hermitian(&crate::random::with_norm(crate::random::hermitian(&mut rng, 4), 0.1));
        let p = s.polar_decompose(&sym).unwrap();
        assert!(linalg::fro(&(&p.unitary - identity(4))) < 1e-12);
        assert!(linalg::fro(&(&p.symmetric - &sym)) < 1e-12);
    }
}
