//! Pure-gauge perturbations of a box system and the symmetric wave gauge in
//! spinor coordinates.
//!
//! A real gauge function `Λ` acts on the wave functions by the local phase
//! `ψ ↦ e^{iΛ}ψ`. Wave values at a point are passed around as `4 × f`
//! matrices (one column per Hilbert-space basis vector), kernels as `4 × 4`
//! matrices acting on spinors with inner product `ψ†γ⁰φ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::cfs::{self, CfsError, CorrelationOperator};
use crate::dirac_box::{spinor_gram, DiracBox, SpacetimePoint};
use crate::krein::{KreinError, KreinSpace};
use crate::linalg::{self, real, CMat};
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbationError {
    #[error("P(x,x) is not of the form αγ⁰ (residual {residual:.3e}, α = {alpha:.3e})")]
    NotDiagonalKernel { residual: f64, alpha: f64 },
    #[error(transparent)]
    Krein(#[from] KreinError),
    #[error(transparent)]
    Cfs(#[from] CfsError),
}

/// One term `c cos(q⃗·x⃗ − ωt + φ)` with `q⃗ = (π/L) n⃗`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub amplitude: f64,
    pub n: [i64; 3],
    pub omega: f64,
    pub phase: f64,
}

/// Real, spatially `2L`-periodic gauge function given by a finite Fourier sum.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    pub l: f64,
    pub terms: Vec<FourierTerm>,
}

impl GaugeFunction {
    pub fn zero(l: f64) -> Self {
        Self { l, terms: Vec::new() }
    }

    pub fn constant(l: f64, theta: f64) -> Self {
        Self { l, terms: vec![FourierTerm { amplitude: theta, n: [0; 3], omega: 0.0, phase: 0.0 }] }
    }

    /// `count` terms with Gaussian amplitudes of scale `amplitude`, lattice
    /// frequencies in `{−2,…,2}³`, `ω` uniform in `[−1, 1]` and phases uniform.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, l: f64, count: usize, amplitude: f64) -> Self {
        let terms = (0..count)
            .map(|_| {
                let c: f64 = rng.sample(StandardNormal);
                FourierTerm {
                    amplitude: amplitude * c,
                    n: [rng.random_range(-2..=2), rng.random_range(-2..=2), rng.random_range(-2..=2)],
                    omega: rng.random_range(-1.0..=1.0),
                    phase: rng.random_range(0.0..2.0 * PI),
                }
            })
            .collect();
        Self { l, terms }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            l: self.l,
            terms: self.terms.iter().map(|t| FourierTerm { amplitude: s * t.amplitude, ..*t }).collect(),
        }
    }

    pub fn value(&self, x: &SpacetimePoint) -> f64 {
        let unit = PI / self.l;
        self.terms
            .iter()
            .map(|t| {
                let qx = unit * (t.n[0] as f64 * x.x[0] + t.n[1] as f64 * x.x[1] + t.n[2] as f64 * x.x[2]);
                t.amplitude * (qx - t.omega * x.t + t.phase).cos()
            })
            .sum()
    }
}

/// `e^{iΛ} W`, applied exactly.
pub fn apply_local_phase(waves: &CMat, lambda: f64) -> CMat {
    waves * Complex64::from_polar(1.0, lambda)
}

/// `‖e^{iΛ}W − W − iΛW‖`, the error of the first-order phase law.
pub fn phase_first_order_residual(waves: &CMat, lambda: f64) -> f64 {
    linalg::fro(&(apply_local_phase(waves, lambda) - waves - waves * Complex64::new(0.0, lambda)))
}

/// `F̃(x) = −W̃† γ⁰ W̃`.
pub fn perturbed_correlation(waves_tilde: &CMat) -> CMat {
    cfs::local_correlation(waves_tilde, &spinor_gram())
}

/// Bra/ket kernel `−W_x W_y† γ⁰`; with `W_y` perturbed this is `P(x, F̃(y))`.
pub fn braket_kernel(w_x: &CMat, w_y: &CMat) -> CMat {
    -(w_x * w_y.adjoint() * spinor_gram())
}

/// `P(x, F̃(x)) = −W W̃† γ⁰`.
pub fn mixed_kernel(waves: &CMat, waves_tilde: &CMat) -> CMat {
    braket_kernel(waves, waves_tilde)
}

/// `α = tr(γ⁰ P)/4`, provided `P` is `αγ⁰` up to `rel · ‖αγ⁰‖`.
pub fn diagonal_alpha(p_xx: &CMat, rel: f64) -> Result<f64, PerturbationError> {
    let g = spinor_gram();
    let alpha = (&g * p_xx).trace().re / 4.0;
    let residual = linalg::fro(&(p_xx - &g * real(alpha)));
    if alpha == 0.0 || residual > rel * 2.0 * alpha.abs() {
        return Err(PerturbationError::NotDiagonalKernel { residual, alpha });
    }
    Ok(alpha)
}

fn spinor_space(tol: &Tolerances) -> KreinSpace {
    KreinSpace::new(spinor_gram(), *tol).expect("γ⁰ is a valid Gram matrix")
}

/// `A^{±1/2}` for a closed chain close to `α²`: the square root of `A/α²`
/// near the identity, rescaled by `|α|^{±1}`.
fn chain_roots(a: &CMat, alpha: f64, tol: &Tolerances) -> Result<(CMat, CMat), PerturbationError> {
    let space = spinor_space(tol);
    let roots = space.sqrt_near_identity(&(a * real(1.0 / (alpha * alpha))))?;
    Ok((roots.half * real(alpha.abs()), roots.neg_half * real(1.0 / alpha.abs())))
}

/// Symmetric wave gauge at `y` with base point `x`, in spinor coordinates:
/// `U_x γ⁰ A^{-1/2} P Ψ(y)` with `P = −W_x W_y† γ⁰` and `A = P P*`.
///
/// `α` is read off `P(x,x) = −W_x W_x† γ⁰`, which must be `αγ⁰`.
pub fn symmetric_gauge_value(w_x: &CMat, w_y: &CMat, u_x: &CMat, tol: &Tolerances) -> Result<CMat, PerturbationError> {
    let g = spinor_gram();
    let alpha = diagonal_alpha(&braket_kernel(w_x, w_x), tol.massless_form_rel)?;
    let p = braket_kernel(w_x, w_y);
    let p_adj = &g * p.adjoint() * &g;
    let a = &p * p_adj;
    let (_, neg_half) = chain_roots(&a, alpha, tol)?;
    Ok(u_x * &g * neg_half * p * w_y)
}

/// `Ψ̃_V(x) = U_x γ⁰ A_{x,F̃(x)}^{-1/2} P(x, F̃(x)) Ψ̃(x)`.
pub fn perturbed_symmetric_gauge(waves: &CMat, waves_tilde: &CMat, u_x: &CMat, tol: &Tolerances) -> Result<CMat, PerturbationError> {
    symmetric_gauge_value(waves, waves_tilde, u_x, tol)
}

/// Orthonormal waves spanning the spin space at `x` and their spinors.
#[derive(Debug, Clone)]
pub struct BasisWaves {
    pub alpha: f64,
    /// `f × 4`, columns `u_a` (Hilbert-space vectors).
    pub vectors: CMat,
    /// `4 × 4`, columns `χ_a = γ⁰ u_a(x) / α`.
    pub chi: CMat,
    /// `max_y ‖u_a(y) − P(y,x) χ_a‖` over the sample points.
    pub max_residual: f64,
}

/// Spin basis of `F(x)` as wave functions, with `u_a(y) = P(y,x) χ_a`
/// checked at every point of `samples` through the mode-sum kernel.
pub fn basis_waves(
    dbox: &DiracBox,
    x: &SpacetimePoint,
    samples: &[SpacetimePoint],
    tol: &Tolerances,
) -> Result<BasisWaves, PerturbationError> {
    let g = spinor_gram();
    let w_x = dbox.wave_values(x);
    let alpha = diagonal_alpha(&braket_kernel(&w_x, &w_x), tol.massless_form_rel)?;
    let fx = CorrelationOperator::new(dbox.correlation_matrix(x), 2, tol)?;
    let vectors = cfs::spin_space(&fx, tol)?.basis;
    let chi = &g * &w_x * &vectors * real(1.0 / alpha);
    let mut max_residual: f64 = 0.0;
    for y in std::iter::once(x).chain(samples) {
        let lhs = dbox.wave_values(y) * &vectors;
        let rhs = dbox.kernel_mode_sum(y, x) * &chi;
        max_residual = max_residual.max(linalg::fro(&(lhs - rhs)));
    }
    Ok(BasisWaves { alpha, vectors, chi, max_residual })
}

/// `U_x γ⁰ A_{x,F̃(x)}^{1/2} χ_a` for all four spinors (columns of `chi`).
pub fn gauged_basis(waves: &CMat, waves_tilde: &CMat, chi: &CMat, u_x: &CMat, tol: &Tolerances) -> Result<CMat, PerturbationError> {
    let g = spinor_gram();
    let alpha = diagonal_alpha(&braket_kernel(waves, waves), tol.massless_form_rel)?;
    let p = mixed_kernel(waves, waves_tilde);
    let a = &p * (&g * p.adjoint() * &g);
    let (half, _) = chain_roots(&a, alpha, tol)?;
    Ok(u_x * &g * half * chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac_box::DiracBoxConfig;
    use crate::linalg::{fro, identity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn massless() -> DiracBox {
        DiracBox::new(DiracBoxConfig::new(PI, 1.0 / 2.2, 0.0).unwrap()).unwrap()
    }

    fn pt(t: f64, x: [f64; 3]) -> SpacetimePoint {
        SpacetimePoint { t, x }
    }

    #[test]
    fn gauge_function_values() {
        let z = GaugeFunction::zero(1.0);
        assert_eq!(z.value(&pt(0.3, [0.1, 0.2, 0.3])), 0.0);
        let c = GaugeFunction::constant(1.0, 0.8);
        assert_eq!(c.value(&pt(0.3, [0.1, 0.2, 0.3])), 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = GaugeFunction::random(&mut rng, 1.5, 4, 1.0);
        let a = r.value(&pt(0.2, [0.4, -0.5, 1.0]));
        let b = r.value(&pt(0.2, [0.4 + 3.0, -0.5 - 3.0, 1.0]));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn local_phase_examples() {
        let b = massless();
        let w = b.wave_values(&pt(0.1, [0.2, 0.0, -0.4]));
        assert_eq!(apply_local_phase(&w, 0.0), w);
        let theta = 1.3;
        assert!(fro(&(apply_local_phase(&w, theta) - &w * Complex64::from_polar(1.0, theta))) < 1e-15);
        let r1 = phase_first_order_residual(&w, 1e-2);
        let r2 = phase_first_order_residual(&w, 5e-3);
        assert!((r1 / r2 - 4.0).abs() < 0.05);
    }

    #[test]
    fn correlation_and_mixed_kernel() {
        let b = massless();
        let x = pt(0.1, [0.2, 0.0, -0.4]);
        let w = b.wave_values(&x);
        let lam = 0.77;
        let wt = apply_local_phase(&w, lam);
        assert!(fro(&(perturbed_correlation(&wt) - b.correlation_matrix(&x))) < 1e-12);
        let pxx = b.kernel_mode_sum(&x, &x);
        assert!(fro(&(mixed_kernel(&w, &wt) - &pxx * Complex64::from_polar(1.0, -lam))) < 1e-12);
        assert!(fro(&(mixed_kernel(&w, &w) - &pxx)) < 1e-12);
    }

    #[test]
    fn alpha_of_massless_box() {
        let b = massless();
        let x = pt(0.0, [0.0; 3]);
        let alpha = diagonal_alpha(&b.kernel_mode_sum(&x, &x), 1e-6).unwrap();
        let expected = -(b.lattice_count() as f64) / (32.0 * PI * PI.powi(3));
        assert!((alpha - expected).abs() < 1e-14);
        let massive = DiracBox::new(DiracBoxConfig::new(PI, 0.4, 1.0).unwrap()).unwrap();
        assert!(matches!(
            diagonal_alpha(&massive.kernel_mode_sum(&x, &x), 1e-6),
            Err(PerturbationError::NotDiagonalKernel { .. })
        ));
    }

    #[test]
    fn gauge_value_phase_independent() {
        let b = massless();
        let t = Tolerances::default();
        let x = pt(0.1, [0.3, -0.2, 0.5]);
        let w = b.wave_values(&x);
        let base = perturbed_symmetric_gauge(&w, &w, &identity(4), &t).unwrap();
        // α < 0: the formula returns −Ψ(x)
        assert!(fro(&(&base + &w)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lam = GaugeFunction::random(&mut rng, PI, 3, 1.0).value(&x);
        let pert = perturbed_symmetric_gauge(&w, &apply_local_phase(&w, lam), &identity(4), &t).unwrap();
        assert!(fro(&(pert - base)) < 1e-12);
    }

    #[test]
    fn basis_waves_and_gauged_basis() {
        let b = massless();
        let t = Tolerances::default();
        let x = pt(0.0, [0.1, 0.2, 0.3]);
        let ys = [pt(0.5, [1.0, -2.0, 0.7]), pt(-1.0, [2.5, 0.1, -3.0])];
        let bw = basis_waves(&b, &x, &ys, &t).unwrap();
        assert!(bw.max_residual < 1e-12);
        assert!(fro(&(bw.vectors.adjoint() * &bw.vectors - identity(4))) < 1e-12);
        let w = b.wave_values(&x);
        let wt = apply_local_phase(&w, 0.4);
        let gb = gauged_basis(&w, &wt, &bw.chi, &identity(4), &t).unwrap();
        let via_gauge = perturbed_symmetric_gauge(&w, &wt, &identity(4), &t).unwrap() * &bw.vectors;
        assert!(fro(&(gb - via_gauge)) < 1e-12);
    }
}
