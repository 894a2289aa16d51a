//! Closed chain of a purely vectorial kernel `P = u̸ + iζ̸`.
//!
//! With `P* = u̸ − iζ̸` the closed chain is `A = (u² + ζ²) − i[u̸, ζ̸]`, whose
//! eigenvalues `λ± = u² + ζ² ± 2√(u²ζ² − (uζ)²)` each have multiplicity two.
//! All scalar square roots use the principal branch.

use num_complex::Complex64;
use thiserror::Error;

use crate::dirac_box::{minkowski, slash, spinor_gram};
use crate::linalg::{self, real, CMat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("closed chain is degenerate (|λ₊ − λ₋| = {gap:.3e})")]
    DegenerateChain { gap: f64 },
    #[error("eigenvalue {lambda} lies on the branch cut (−∞, 0]")]
    BranchCut { lambda: Complex64 },
}

/// Kernel `u̸ + iζ̸` given by two real contravariant four-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorKernel {
    pub u: [f64; 4],
    pub zeta: [f64; 4],
}

impl VectorKernel {
    pub fn kernel(&self) -> CMat {
        slash(&self.u) + slash(&self.zeta) * linalg::I
    }

    /// `u̸ − iζ̸`, the spin adjoint of [`VectorKernel::kernel`].
    pub fn kernel_adjoint(&self) -> CMat {
        slash(&self.u) - slash(&self.zeta) * linalg::I
    }

    /// `u²ζ² − (uζ)²`.
    pub fn discriminant(&self) -> f64 {
        let uu = minkowski(&self.u, &self.u);
        let zz = minkowski(&self.zeta, &self.zeta);
        let uz = minkowski(&self.u, &self.zeta);
        uu * zz - uz * uz
    }

    /// Kernel multiplied by the phase `e^{iθ}`, again in vector form.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let mut u = [0.0; 4];
        let mut zeta = [0.0; 4];
        for mu in 0..4 {
            u[mu] = c * self.u[mu] - s * self.zeta[mu];
            zeta[mu] = s * self.u[mu] + c * self.zeta[mu];
        }
        Self { u, zeta }
    }
}

fn commutator(vk: &VectorKernel) -> CMat {
    let u = slash(&vk.u);
    let z = slash(&vk.zeta);
    &u * &z - &z * &u
}

/// `A = (u² + ζ²)·1 − i[u̸, ζ̸]`.
pub fn chain_from_uv(vk: &VectorKernel) -> CMat {
    let s = minkowski(&vk.u, &vk.u) + minkowski(&vk.zeta, &vk.zeta);
    linalg::identity(4) * real(s) - commutator(vk) * linalg::I
}

/// `(λ₊, λ₋)`.
pub fn chain_eigenvalues(vk: &VectorKernel) -> (Complex64, Complex64) {
    let s = minkowski(&vk.u, &vk.u) + minkowski(&vk.zeta, &vk.zeta);
    let root = real(vk.discriminant()).sqrt();
    (real(s) + root * 2.0, real(s) - root * 2.0)
}

fn check_gap(vk: &VectorKernel, rel: f64) -> Result<(Complex64, Complex64), SpectralError> {
    let (lp, lm) = chain_eigenvalues(vk);
    let gap = (lp - lm).norm();
    if gap <= rel * (lp.norm() + lm.norm() + 1e-30) {
        return Err(SpectralError::DegenerateChain { gap });
    }
    Ok((lp, lm))
}

/// `E± = ½(1 ∓ i[u̸, ζ̸] / (2√(u²ζ² − (uζ)²)))`.
pub fn spectral_projectors(vk: &VectorKernel, degeneracy_rel: f64) -> Result<(CMat, CMat), SpectralError> {
    check_gap(vk, degeneracy_rel)?;
    let root = real(vk.discriminant()).sqrt();
    let term = commutator(vk) * (linalg::I / (root * 2.0));
    let id = linalg::identity(4);
    Ok(((&id - &term) * real(0.5), (&id + &term) * real(0.5)))
}

fn principal_roots(vk: &VectorKernel, degeneracy_rel: f64) -> Result<(Complex64, Complex64), SpectralError> {
    let (lp, lm) = check_gap(vk, degeneracy_rel)?;
    for lambda in [lp, lm] {
        if lambda.im == 0.0 && lambda.re <= 0.0 {
            return Err(SpectralError::BranchCut { lambda });
        }
    }
    Ok((lp.sqrt(), lm.sqrt()))
}

/// `A^{-1/2} P = Σ_s λ_s^{-1/2} E_s P` by spectral calculus.
///
/// For a degenerate chain (`u²ζ² = (uζ)²`) the operator `C = A − s`,
/// `s = u² + ζ²`, squares to zero and `A^{-1/2} = s^{-1/2}(1 − C/(2s))` is
/// used instead of the projectors.
pub fn inv_sqrt_chain_times_p(vk: &VectorKernel, degeneracy_rel: f64) -> Result<CMat, SpectralError> {
    match principal_roots(vk, degeneracy_rel) {
        Ok((sp, sm)) => {
            let (ep, em) = spectral_projectors(vk, degeneracy_rel)?;
            Ok((ep * sp.inv() + em * sm.inv()) * vk.kernel())
        }
        Err(SpectralError::DegenerateChain { .. }) => {
            let s = real(minkowski(&vk.u, &vk.u) + minkowski(&vk.zeta, &vk.zeta));
            if s.re <= 0.0 {
                return Err(SpectralError::BranchCut { lambda: s });
            }
            let c = commutator(vk) * (-linalg::I);
            let inv_sqrt = (linalg::identity(4) - c * (s * 2.0).inv()) * s.sqrt().inv();
            Ok(inv_sqrt * vk.kernel())
        }
        Err(e) => Err(e),
    }
}

/// The closed form exactly as typeset:
///
/// `½(S − (ζ² − i(uζ))/R · T) u̸ + (i/2)(S − (u² − i(uζ))/R · T) ζ̸`
///
/// with `S = (√λ₊ + √λ₋)/√(λ₊λ₋)`, `T = (√λ₊ − √λ₋)/√(λ₊λ₋)` and
/// `R = √(u²ζ² − 2(uζ)²)`.
pub fn inv_sqrt_chain_times_p_typeset(vk: &VectorKernel, degeneracy_rel: f64) -> Result<CMat, SpectralError> {
    let (sp, sm) = principal_roots(vk, degeneracy_rel)?;
    let (lp, lm) = chain_eigenvalues(vk);
    let uu = minkowski(&vk.u, &vk.u);
    let zz = minkowski(&vk.zeta, &vk.zeta);
    let uz = minkowski(&vk.u, &vk.zeta);
    let denom = (lp * lm).sqrt();
    let s = (sp + sm) / denom;
    let t = (sp - sm) / denom;
    let r = real(uu * zz - 2.0 * uz * uz).sqrt();
    let cu = (s - (Complex64::new(zz, -uz) / r) * t) * 0.5;
    let cz = (s - (Complex64::new(uu, -uz) / r) * t) * (linalg::I * 0.5);
    Ok(slash(&vk.u) * cu + slash(&vk.zeta) * cz)
}

/// `‖R R* − 1‖` with `R* = γ⁰ R† γ⁰`.
pub fn spin_unitarity_residual(r: &CMat) -> f64 {
    let g = spinor_gram();
    linalg::fro(&(r * (&g * r.adjoint() * &g) - linalg::identity(4)))
}

/// Both evaluations of `A^{-1/2} P` and their comparison.
#[derive(Debug, Clone)]
pub struct DualRouteReport {
    pub spectral: CMat,
    /// `None` if the typeset radicand vanishes.
    pub typeset: Option<CMat>,
    /// Frobenius distance between the two routes (`∞` if the typeset form is undefined).
    pub deviation: f64,
    pub spectral_unitarity: f64,
}

pub fn dual_route(vk: &VectorKernel, degeneracy_rel: f64) -> Result<DualRouteReport, SpectralError> {
    let spectral = inv_sqrt_chain_times_p(vk, degeneracy_rel)?;
    let typeset = inv_sqrt_chain_times_p_typeset(vk, degeneracy_rel)?;
    let typeset = if typeset.iter().all(|z| z.is_finite()) { Some(typeset) } else { None };
    let deviation = typeset.as_ref().map_or(f64::INFINITY, |t| linalg::fro(&(t - &spectral)));
    let spectral_unitarity = spin_unitarity_residual(&spectral);
    Ok(DualRouteReport { spectral, typeset, deviation, spectral_unitarity })
}

/// `γ⁰ A^{-1/2} P` for `u = α e₀ + τ u₁`, `ζ = τ ζ₁`.
pub fn expansion_value(alpha: f64, u1: &[f64; 4], zeta1: &[f64; 4], tau: f64, degeneracy_rel: f64) -> Result<CMat, SpectralError> {
    let mut u = [0.0; 4];
    let mut zeta = [0.0; 4];
    for mu in 0..4 {
        u[mu] = tau * u1[mu];
        zeta[mu] = tau * zeta1[mu];
    }
    u[0] += alpha;
    let vk = VectorKernel { u, zeta };
    Ok(spinor_gram() * inv_sqrt_chain_times_p(&vk, degeneracy_rel)?)
}

/// First-order coefficient `(−γ⁰(u⃗₁·γ⃗) + iζ₁⁰)/|α|`; the zeroth order is `sign(α)·1`.
pub fn first_order_coefficient(alpha: f64, u1: &[f64; 4], zeta1: &[f64; 4]) -> CMat {
    let g = crate::dirac_box::gamma_matrices();
    let ug = &g[1] * real(u1[1]) + &g[2] * real(u1[2]) + &g[3] * real(u1[3]);
    (-(&g[0] * ug) + linalg::identity(4) * Complex64::new(0.0, zeta1[0])) * real(1.0 / alpha.abs())
}

/// First-order coefficient as typeset, `−γ⁰(u⃗₁·γ⃗) + iζ₁⁰/|α|`.
pub fn first_order_coefficient_typeset(alpha: f64, u1: &[f64; 4], zeta1: &[f64; 4]) -> CMat {
    let g = crate::dirac_box::gamma_matrices();
    let ug = &g[1] * real(u1[1]) + &g[2] * real(u1[2]) + &g[3] * real(u1[3]);
    -(&g[0] * ug) + linalg::identity(4) * Complex64::new(0.0, zeta1[0] / alpha.abs())
}

#[derive(Debug, Clone)]
pub struct ExpansionReport {
    /// `(g(τ) − g(−τ))/(2τ)` at `τ = 1e−4`.
    pub coefficient_fd: CMat,
    pub coefficient_expected: CMat,
    pub coefficient_error: f64,
    /// Distance between the typeset and the expected coefficient.
    pub typeset_deviation: f64,
    /// `‖C + C*‖` for the extracted coefficient, with `C* = γ⁰C†γ⁰`.
    pub antisymmetry_residual: f64,
    /// `(τ, r(τ), r(τ/2))` with `r(τ) = ‖g(τ) − sign(α) − τ C‖`.
    pub residuals: Vec<(f64, f64, f64)>,
    pub ratios: Vec<f64>,
}

pub fn unitary_expansion(
    alpha: f64,
    u1: &[f64; 4],
    zeta1: &[f64; 4],
    tau_list: &[f64],
    degeneracy_rel: f64,
) -> Result<ExpansionReport, SpectralError> {
    let h = 1e-4;
    let g = |tau: f64| expansion_value(alpha, u1, zeta1, tau, degeneracy_rel);
    let coefficient_fd = (g(h)? - g(-h)?) * real(0.5 / h);
    let coefficient_expected = first_order_coefficient(alpha, u1, zeta1);
    let coefficient_error = linalg::fro(&(&coefficient_fd - &coefficient_expected));
    let typeset_deviation = linalg::fro(&(first_order_coefficient_typeset(alpha, u1, zeta1) - &coefficient_expected));
    let gram = spinor_gram();
    let antisymmetry_residual = linalg::fro(&(&coefficient_fd + &gram * coefficient_fd.adjoint() * &gram));
    let zeroth = linalg::identity(4) * real(alpha.signum());
    let resid = |tau: f64| -> Result<f64, SpectralError> {
        Ok(linalg::fro(&(g(tau)? - &zeroth - &coefficient_expected * real(tau))))
    };
    let mut residuals = Vec::with_capacity(tau_list.len());
    let mut ratios = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        let (r, rh) = (resid(tau)?, resid(tau / 2.0)?);
        residuals.push((tau, r, rh));
        ratios.push(r / rh);
    }
    Ok(ExpansionReport {
        coefficient_fd,
        coefficient_expected,
        coefficient_error,
        typeset_deviation,
        antisymmetry_residual,
        residuals,
        ratios,
    })
}
