//! Negative-energy Dirac plane waves in the periodic box `[−L, L]³`.
//!
//! Units are natural (`ħ = c = 1`), the metric is `diag(1, −1, −1, −1)` and
//! the gamma matrices are in the Dirac representation. The Hilbert space is
//! spanned by the plane waves with momenta `k⃗ ∈ (π/L)ℤ³`, energy `ω < 1/ε`,
//! and two polarisations each; the spinor inner product is `ψ†γ⁰φ`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::cfs::{self, CfsError, CorrelationOperator};
use crate::linalg::{self, c, real, CMat, ONE, ZERO};
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoxError {
    #[error("invalid box configuration: {field} = {value}")]
    InvalidConfig { field: &'static str, value: f64 },
    #[error("no momentum mode lies below the cutoff")]
    EmptyCutoff,
    #[error("spinor normalisation ≺χ|χ≻ = −1 is undefined for m = 0")]
    MasslessNormalization,
    #[error("only {f} modes; at least 4 are needed")]
    TooFewModes { f: usize },
    #[error(transparent)]
    Cfs(#[from] CfsError),
}

/// Box half-length `l`, regularisation length `eps` and mass `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracBoxConfig {
    pub l: f64,
    pub eps: f64,
    pub m: f64,
}

impl DiracBoxConfig {
    pub fn new(l: f64, eps: f64, m: f64) -> Result<Self, BoxError> {
        if !(l.is_finite() && l > 0.0) {
            return Err(BoxError::InvalidConfig { field: "L", value: l });
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(BoxError::InvalidConfig { field: "eps", value: eps });
        }
        if !(m.is_finite() && m >= 0.0) {
            return Err(BoxError::InvalidConfig { field: "m", value: m });
        }
        Ok(Self { l, eps, m })
    }

    /// `8/(3π²) · (L/ε)³`, the large-box estimate of the number of modes.
    pub fn asymptotic_dimension(&self) -> f64 {
        8.0 / (3.0 * PI * PI) * (self.l / self.eps).powi(3)
    }
}

/// Spacetime point with spatial components reduced into `[−L, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: [f64; 3],
}

impl SpacetimePoint {
    pub fn new(t: f64, x: [f64; 3], l: f64) -> Self {
        let period = 2.0 * l;
        let reduce = |v: f64| {
            let r = (v + l).rem_euclid(period) - l;
            // rem_euclid can round up to exactly `period`
            if r >= l {
                r - period
            } else {
                r
            }
        };
        Self { t, x: [reduce(x[0]), reduce(x[1]), reduce(x[2])] }
    }

    pub fn origin() -> Self {
        Self { t: 0.0, x: [0.0; 3] }
    }
}

/// One Hilbert-space mode: lattice momentum, energy and polarisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMode {
    /// Integer lattice vector `n⃗` with `k⃗ = (π/L) n⃗`.
    pub n: [i64; 3],
    pub k: [f64; 3],
    pub omega: f64,
    /// Polarisation, 1 or 2.
    pub a: u8,
}

impl MomentumMode {
    /// Contravariant four-momentum `(−ω, k⃗)`.
    pub fn four_momentum(&self) -> [f64; 4] {
        [-self.omega, self.k[0], self.k[1], self.k[2]]
    }
}

/// `γ⁰ … γ³` in the Dirac representation.
pub fn gamma_matrices() -> [CMat; 4] {
    let z = ZERO;
    let o = ONE;
    let i = linalg::I;
    let g0 = linalg::diag_real(&[1.0, 1.0, -1.0, -1.0]);
    // γ^j = [[0, σ_j], [−σ_j, 0]]
    let g1 = CMat::from_row_slice(4, 4, &[z, z, z, o, z, z, o, z, z, -o, z, z, -o, z, z, z]);
    let g2 = CMat::from_row_slice(4, 4, &[z, z, z, -i, z, z, i, z, z, i, z, z, -i, z, z, z]);
    let g3 = CMat::from_row_slice(4, 4, &[z, z, o, z, z, z, z, -o, -o, z, z, z, z, o, z, z]);
    [g0, g1, g2, g3]
}

/// Spinor Gram matrix `γ⁰`.
pub fn spinor_gram() -> CMat {
    linalg::diag_real(&[1.0, 1.0, -1.0, -1.0])
}

/// `a̸ = γ^μ a_μ = γ⁰a⁰ − γ⃗·a⃗` for a contravariant real vector `a`.
pub fn slash(a: &[f64; 4]) -> CMat {
    let g = gamma_matrices();
    &g[0] * real(a[0]) - &g[1] * real(a[1]) - &g[2] * real(a[2]) - &g[3] * real(a[3])
}

/// Minkowski product `a⁰b⁰ − a⃗·b⃗`.
pub fn minkowski(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Lattice vectors `n⃗` with `ω = √((π/L)²|n⃗|² + m²) < 1/ε` (the zero vector
/// is dropped when `m = 0`), ordered by `(|n⃗|², n₁, n₂, n₃)`.
pub fn lattice_points(cfg: &DiracBoxConfig) -> Vec<[i64; 3]> {
    let cutoff2 = 1.0 / (cfg.eps * cfg.eps);
    let unit = PI / cfg.l;
    let bound = (cutoff2.sqrt() / unit).floor() as i64 + 1;
    let mut pts = Vec::new();
    for n1 in -bound..=bound {
        for n2 in -bound..=bound {
            for n3 in -bound..=bound {
                let n2sum = n1 * n1 + n2 * n2 + n3 * n3;
                if cfg.m == 0.0 && n2sum == 0 {
                    continue;
                }
                let omega2 = unit * unit * n2sum as f64 + cfg.m * cfg.m;
                if omega2 < cutoff2 {
                    pts.push([n1, n2, n3]);
                }
            }
        }
    }
    pts.sort_by_key(|n| (n[0] * n[0] + n[1] * n[1] + n[2] * n[2], n[0], n[1], n[2]));
    pts
}

/// All modes below the cutoff, two polarisations per lattice point.
pub fn momentum_modes(cfg: &DiracBoxConfig) -> Result<Vec<MomentumMode>, BoxError> {
    let unit = PI / cfg.l;
    let pts = lattice_points(cfg);
    if pts.is_empty() {
        return Err(BoxError::EmptyCutoff);
    }
    let mut modes = Vec::with_capacity(2 * pts.len());
    for n in pts {
        let k = [unit * n[0] as f64, unit * n[1] as f64, unit * n[2] as f64];
        let omega = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + cfg.m * cfg.m).sqrt();
        for a in [1, 2] {
            modes.push(MomentumMode { n, k, omega, a });
        }
    }
    Ok(modes)
}

fn unit_spinor(i: usize) -> CMat {
    CMat::from_fn(4, 1, |r, _| if r == i { ONE } else { ZERO })
}

fn spin_product(u: &CMat, v: &CMat) -> num_complex::Complex64 {
    (u.adjoint() * spinor_gram() * v)[(0, 0)]
}

/// `χ_{k,1}, χ_{k,2}` solving `(k̸ − m)χ = 0` with `≺χ_a|χ_b≻ = −δ_ab`:
/// `(k̸ + m)` applied to `e₃`, `e₄`, then Gram–Schmidt in the spin product.
pub fn chi_spinors(mode: &MomentumMode, m: f64) -> Result<[CMat; 2], BoxError> {
    if m <= 0.0 {
        return Err(BoxError::MasslessNormalization);
    }
    let proj = slash(&mode.four_momentum()) + linalg::identity(4) * real(m);
    let v1 = &proj * unit_spinor(2);
    let chi1 = &v1 * real(1.0 / (-spin_product(&v1, &v1).re).sqrt());
    let v2 = &proj * unit_spinor(3);
    let v2 = &v2 + &chi1 * spin_product(&chi1, &v2);
    let chi2 = &v2 * real(1.0 / (-spin_product(&v2, &v2).re).sqrt());
    Ok([chi1, chi2])
}

/// Mode spinors `w_a = √ω ŵ_a`, where `ŵ_1, ŵ_2` is the Euclidean
/// Gram–Schmidt basis of `(k̸ + m)e₃, (k̸ + m)e₄`. On this eigenspace the spin
/// product is `−(m/ω)` times the Euclidean one, so for `m > 0` this equals
/// `√m χ_a`; unlike `χ_a` it stays defined at `m = 0`.
pub fn mode_spinors(k: &[f64; 3], omega: f64, m: f64) -> [CMat; 2] {
    let proj = slash(&[-omega, k[0], k[1], k[2]]) + linalg::identity(4) * real(m);
    let v1 = &proj * unit_spinor(2);
    let w1 = &v1 * real(1.0 / v1.norm());
    let v2 = &proj * unit_spinor(3);
    let v2 = &v2 - &w1 * (w1.adjoint() * &v2)[(0, 0)];
    let w2 = &v2 * real(1.0 / v2.norm());
    [w1 * real(omega.sqrt()), w2 * real(omega.sqrt())]
}

/// `e^{−ik(x−y)}` for `k = (−ω, k⃗)`, i.e. `e^{i(ω Δt + k⃗·Δx⃗)}`.
fn phase(k: &[f64; 3], omega: f64, x: &SpacetimePoint, y: &SpacetimePoint) -> num_complex::Complex64 {
    let arg = omega * (x.t - y.t) + k[0] * (x.x[0] - y.x[0]) + k[1] * (x.x[1] - y.x[1]) + k[2] * (x.x[2] - y.x[2]);
    num_complex::Complex64::from_polar(1.0, arg)
}

/// Mode set with precomputed spinors.
#[derive(Debug, Clone)]
pub struct DiracBox {
    pub cfg: DiracBoxConfig,
    pub modes: Vec<MomentumMode>,
    spinors: Vec<CMat>,
}

impl DiracBox {
    pub fn new(cfg: DiracBoxConfig) -> Result<Self, BoxError> {
        let modes = momentum_modes(&cfg)?;
        let mut spinors = Vec::with_capacity(modes.len());
        for pair in modes.chunks(2) {
            let w = mode_spinors(&pair[0].k, pair[0].omega, cfg.m);
            spinors.push(w[0].clone());
            spinors.push(w[1].clone());
        }
        Ok(Self { cfg, modes, spinors })
    }

    /// Hilbert-space dimension.
    pub fn f(&self) -> usize {
        self.modes.len()
    }

    /// Number of lattice momenta.
    pub fn lattice_count(&self) -> usize {
        self.modes.len() / 2
    }

    fn normalization(&self, omega: f64) -> f64 {
        1.0 / (4.0 * self.cfg.l.powf(1.5) * (PI * omega).sqrt())
    }

    /// Value of the `j`-th plane wave: `e^{−ikx} w_a / (4 L^{3/2} √(πω))`.
    pub fn plane_wave(&self, j: usize, x: &SpacetimePoint) -> CMat {
        let mode = &self.modes[j];
        &self.spinors[j] * (phase(&mode.k, mode.omega, x, &SpacetimePoint::origin()) * self.normalization(mode.omega))
    }

    /// `4 × f` matrix of all wave values at `x` (the evaluation map `e_x`).
    pub fn wave_values(&self, x: &SpacetimePoint) -> CMat {
        let mut w = CMat::zeros(4, self.f());
        for j in 0..self.f() {
            w.set_column(j, &self.plane_wave(j, x).column(0));
        }
        w
    }

    /// Box scalar product of two modes, `2π ∫ ψ_i† ψ_j d³x`, in closed form.
    pub fn mode_scalar_product(&self, i: usize, j: usize) -> num_complex::Complex64 {
        let (mi, mj) = (&self.modes[i], &self.modes[j]);
        if mi.n != mj.n {
            return ZERO;
        }
        let volume = (2.0 * self.cfg.l).powi(3);
        let inner = (self.spinors[i].adjoint() * &self.spinors[j])[(0, 0)];
        inner * (2.0 * PI * volume * self.normalization(mi.omega) * self.normalization(mj.omega))
    }

    /// `F(x)_ij = −ψ_i(x)† γ⁰ ψ_j(x)`.
    pub fn correlation_matrix(&self, x: &SpacetimePoint) -> CMat {
        cfs::local_correlation(&self.wave_values(x), &spinor_gram())
    }

    /// `(2L)⁻³ Σ_k⃗ (4πω)⁻¹ e^{−ik(x−y)} (k̸ + m)` over the lattice momenta.
    pub fn kernel_mode_sum(&self, x: &SpacetimePoint, y: &SpacetimePoint) -> CMat {
        let pre = 1.0 / (2.0 * self.cfg.l).powi(3);
        let mut p = CMat::zeros(4, 4);
        for mode in self.modes.iter().step_by(2) {
            let kk = slash(&mode.four_momentum()) + linalg::identity(4) * real(self.cfg.m);
            p += kk * (phase(&mode.k, mode.omega, x, y) * (pre / (4.0 * PI * mode.omega)));
        }
        p
    }

    /// `−Σ_modes ψ(x) ψ(y)† γ⁰`.
    pub fn kernel_braket(&self, x: &SpacetimePoint, y: &SpacetimePoint) -> CMat {
        -(self.wave_values(x) * self.wave_values(y).adjoint() * spinor_gram())
    }

    /// `−N/(32πL³) γ⁰`, the equal-point kernel of the massless box.
    pub fn massless_diagonal(&self) -> CMat {
        spinor_gram() * real(-(self.lattice_count() as f64) / (32.0 * PI * self.cfg.l.powi(3)))
    }
}

/// Local correlation operators (`n = 2`) of the box system at `points`.
pub fn build_correlation_map(
    dbox: &DiracBox,
    points: &[SpacetimePoint],
    tol: &Tolerances,
) -> Result<Vec<CorrelationOperator>, BoxError> {
    if dbox.f() < 4 {
        return Err(BoxError::TooFewModes { f: dbox.f() });
    }
    points
        .iter()
        .map(|x| Ok(CorrelationOperator::new(dbox.correlation_matrix(x), 2, tol)?))
        .collect()
}

/// Writes a 4×4 matrix `u̸ + iζ̸` as its pair of real vectors `(u, ζ)`.
///
/// Uses `tr(γ^μ a̸) = 4 a^μ`; the residual of the reconstruction measures how
/// far the input is from the vector form.
pub fn vector_decomposition(p: &CMat) -> ([f64; 4], [f64; 4], f64) {
    let g = gamma_matrices();
    let mut u = [0.0; 4];
    let mut zeta = [0.0; 4];
    for mu in 0..4 {
        let tr = (&g[mu] * p).trace() * 0.25;
        u[mu] = tr.re;
        zeta[mu] = tr.im;
    }
    let recon = slash(&u) + slash(&zeta) * c(0.0, 1.0);
    let residual = linalg::fro(&(recon - p));
    (u, zeta, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fro;

    fn cfg(l: f64, inv_eps: f64, m: f64) -> DiracBoxConfig {
        DiracBoxConfig::new(l, 1.0 / inv_eps, m).unwrap()
    }

    #[test]
    fn clifford_relations() {
        let g = gamma_matrices();
        let eta = [1.0, -1.0, -1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let anti = &g[i] * &g[j] + &g[j] * &g[i];
                let expected = if i == j { linalg::identity(4) * real(2.0 * eta[i]) } else { CMat::zeros(4, 4) };
                assert!(fro(&(anti - expected)) < 1e-15);
            }
        }
        assert!(fro(&(&g[0] - g[0].adjoint())) == 0.0);
        for gj in &g[1..] {
            assert!(fro(&(gj + gj.adjoint())) == 0.0);
        }
        assert_eq!(linalg::signature(&spinor_gram(), 0.5), (2, 2));
    }

    #[test]
    fn reference_mode_count() {
        // brute force over integer vectors with |n|² < 2.5² − 1
        let mut count = 0;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    if ((a * a + b * b + c * c) as f64) < 5.25 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 57);
        let modes = momentum_modes(&cfg(PI, 2.5, 1.0)).unwrap();
        assert_eq!(modes.len(), 114);
        assert_eq!(modes[0].n, [0, 0, 0]);
        assert_eq!((modes[0].a, modes[1].a), (1, 2));
        assert_eq!(lattice_points(&cfg(PI, 2.5, 0.0)).len(), 80);
    }

    #[test]
    fn cutoff_below_mass_is_empty() {
        assert_eq!(momentum_modes(&cfg(PI, 0.5, 1.0)), Err(BoxError::EmptyCutoff));
        assert!(DiracBoxConfig::new(1.0, 0.0, 1.0).is_err());
        assert!(DiracBoxConfig::new(-1.0, 1.0, 1.0).is_err());
        assert!(DiracBoxConfig::new(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn chi_at_rest() {
        let modes = momentum_modes(&cfg(PI, 2.5, 1.0)).unwrap();
        let chi = chi_spinors(&modes[0], 1.0).unwrap();
        assert!(fro(&(&chi[0] - unit_spinor(2))) < 1e-15);
        assert!(fro(&(&chi[1] - unit_spinor(3))) < 1e-15);
        assert_eq!(chi_spinors(&modes[0], 0.0), Err(BoxError::MasslessNormalization));
    }

    #[test]
    fn chi_properties_and_projector() {
        let m = 0.7;
        for mode in momentum_modes(&cfg(2.0, 3.0, m)).unwrap().iter().step_by(2) {
            let chi = chi_spinors(mode, m).unwrap();
            let km = slash(&mode.four_momentum());
            let mut proj = CMat::zeros(4, 4);
            for s in &chi {
                assert!(fro(&((&km - linalg::identity(4) * real(m)) * s)) < 1e-13);
                assert!((spin_product(s, s) + 1.0).norm() < 1e-13);
                proj -= s * s.adjoint() * spinor_gram();
            }
            assert!(spin_product(&chi[0], &chi[1]).norm() < 1e-13);
            let expected = (km + linalg::identity(4) * real(m)) * real(1.0 / (2.0 * m));
            assert!(fro(&(proj - expected)) < 1e-13);
            let w = mode_spinors(&mode.k, mode.omega, m);
            for a in 0..2 {
                assert!(fro(&(&w[a] - &chi[a] * real(m.sqrt()))) < 1e-13);
            }
        }
    }

    #[test]
    fn plane_wave_periodicity_and_phase() {
        let b = DiracBox::new(cfg(1.5, 3.0, 0.5)).unwrap();
        let x = SpacetimePoint { t: 0.0, x: [0.3, -0.2, 1.1] };
        let shifted = SpacetimePoint { t: 0.0, x: [0.3 + 3.0, -0.2, 1.1] };
        let later = SpacetimePoint { t: 0.8, ..x };
        for j in [0, 5, 13] {
            assert!(fro(&(b.plane_wave(j, &x) - b.plane_wave(j, &shifted))) < 1e-13);
            let ph = num_complex::Complex64::from_polar(1.0, b.modes[j].omega * 0.8);
            assert!(fro(&(b.plane_wave(j, &later) - b.plane_wave(j, &x) * ph)) < 1e-14);
        }
    }

    #[test]
    fn point_reduction() {
        let p = SpacetimePoint::new(0.0, [3.5, -5.0, 2.0], 2.0);
        assert!((p.x[0] + 0.5).abs() < 1e-15);
        assert!((p.x[1] + 1.0).abs() < 1e-15);
        assert!((p.x[2] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn massless_diagonal_kernel() {
        let b = DiracBox::new(cfg(PI, 2.5, 0.0)).unwrap();
        let x = SpacetimePoint { t: 0.4, x: [0.1, 0.2, -0.3] };
        assert!(fro(&(b.kernel_mode_sum(&x, &x) - b.massless_diagonal())) < 1e-12);
        assert!(fro(&(b.kernel_braket(&x, &x) - b.massless_diagonal())) < 1e-12);
    }

    #[test]
    fn vector_decomposition_roundtrip() {
        let u = [0.3, -1.0, 0.2, 0.5];
        let z = [1.1, 0.0, -0.4, 0.9];
        let p = slash(&u) + slash(&z) * c(0.0, 1.0);
        let (u2, z2, res) = vector_decomposition(&p);
        assert!(res < 1e-14);
        for i in 0..4 {
            assert!((u[i] - u2[i]).abs() < 1e-15 && (z[i] - z2[i]).abs() < 1e-15);
        }
    }
}
