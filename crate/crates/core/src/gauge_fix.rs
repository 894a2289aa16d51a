//! Wave charts and gauges around a regular base point `x`.
//!
//! A wave chart point is a map `ψ : H → S_x`, stored in the splitting
//! `H = I ⊕ J` with `I = S_x`: `ψ = ψ_I basis_I† + ψ_J basis_J†`. The
//! realisation map sends `ψ` to `−ψ*ψ = ψ† X ψ`.

use rayon::prelude::*;
use thiserror::Error;

use crate::cfs::{self, CfsError, SpinSpaceData};
use crate::krein::{KreinError, KreinSpace, SqrtMethod};
use crate::linalg::{self, CMat};
use crate::manifold::{ChartCoordinates, ChartFrame, ManifoldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error("ψ_I is not invertible (smallest singular value {min_sv:.3e})")]
    NotInvertible { min_sv: f64 },
    #[error("the two wave charts are not related by a Krein-unitary map (residual {residual:.3e})")]
    NotOnOrbit { residual: f64 },
    #[error("point is outside the wave chart domain: {quantity} = {value:.4} exceeds {limit}")]
    OutOfChartDomain { quantity: &'static str, value: f64, limit: f64 },
    #[error("U_x is not a Krein isometry onto the target space (residual {residual:.3e})")]
    NotKreinIsometry { residual: f64 },
    #[error(transparent)]
    Krein(#[from] KreinError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Cfs(#[from] CfsError),
}

/// `ψ = (ψ_I, ψ_J)` relative to the spin space of the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveChartPoint {
    /// `2n × 2n`.
    pub psi_i: CMat,
    /// `2n × (f − 2n)`.
    pub psi_j: CMat,
}

impl WaveChartPoint {
    /// `(1, 0)`, the wave evaluation operator of the base point.
    pub fn base(sx: &SpinSpaceData) -> Self {
        let r = sx.basis.ncols();
        Self { psi_i: linalg::identity(r), psi_j: CMat::zeros(r, sx.f() - r) }
    }

    /// `ψ` as a `2n × f` matrix in the ambient basis of H.
    pub fn ambient(&self, sx: &SpinSpaceData) -> CMat {
        &self.psi_i * sx.basis.adjoint() + &self.psi_j * sx.complement.adjoint()
    }

    pub fn from_ambient(sx: &SpinSpaceData, psi: &CMat) -> Self {
        Self { psi_i: psi * &sx.basis, psi_j: psi * &sx.complement }
    }

    pub fn left_mul(&self, u: &CMat) -> Self {
        Self { psi_i: u * &self.psi_i, psi_j: u * &self.psi_j }
    }

    /// Frobenius distance between the ambient maps.
    pub fn distance(&self, other: &Self) -> f64 {
        (linalg::fro(&(&self.psi_i - &other.psi_i)).powi(2) + linalg::fro(&(&self.psi_j - &other.psi_j)).powi(2)).sqrt()
    }
}

/// `−ψ*ψ = ψ† X ψ` in the ambient basis.
pub fn realize(sx: &SpinSpaceData, psi: &WaveChartPoint) -> CMat {
    let amb = psi.ambient(sx);
    linalg::hermitian_part(&(amb.adjoint() * &sx.x * amb))
}

fn invertibility(sx: &SpinSpaceData, m: &CMat) -> Result<(), GaugeError> {
    let sv = linalg::singular_values(m);
    let min_sv = *sv.last().unwrap_or(&0.0);
    if min_sv <= sx.krein.tolerances().tol_singular_rel * sv.first().copied().unwrap_or(0.0) {
        return Err(GaugeError::NotInvertible { min_sv });
    }
    Ok(())
}

/// Recovers the Krein-unitary `U` with `ψ̃ = U ψ`, namely `U = ψ̃_I ψ_I⁻¹`,
/// after checking that both points have the same realisation and that `U`
/// also carries `ψ_J` to `ψ̃_J`.
pub fn gauge_orbit_witness(sx: &SpinSpaceData, psi: &WaveChartPoint, psi_t: &WaveChartPoint) -> Result<CMat, GaugeError> {
    invertibility(sx, &psi.psi_i)?;
    invertibility(sx, &psi_t.psi_i)?;
    let tol = sx.krein.tolerances().tol_sqrt;
    let y = realize(sx, psi);
    let yt = realize(sx, psi_t);
    let scale = 1.0 + linalg::fro(&y);
    let residual = linalg::fro(&(&y - &yt));
    if residual > tol * scale {
        return Err(GaugeError::NotOnOrbit { residual });
    }
    let inv = linalg::inverse(&psi.psi_i).ok_or(GaugeError::NotInvertible { min_sv: 0.0 })?;
    let u = &psi_t.psi_i * inv;
    let residual = sx.krein.unitarity_residual(&u).max(linalg::fro(&(&u * &psi.psi_j - &psi_t.psi_j)));
    if residual > tol * scale {
        return Err(GaugeError::NotOnOrbit { residual });
    }
    Ok(u)
}

/// Symmetric representative of the gauge orbit: with the Krein polar
/// decomposition `ψ_I = U S`, returns `(S, U⁻¹ ψ_J)`.
pub fn symmetrize(sx: &SpinSpaceData, psi: &WaveChartPoint) -> Result<WaveChartPoint, GaugeError> {
    let polar = sx.krein.polar_decompose(&psi.psi_i)?;
    let u_inv = sx.krein.adjoint(&polar.unitary);
    Ok(WaveChartPoint { psi_i: polar.symmetric, psi_j: u_inv * &psi.psi_j })
}

/// Symmetric wave chart value together with its diagnostics.
#[derive(Debug, Clone)]
pub struct SymmetricChartPoint {
    pub point: WaveChartPoint,
    /// `U_xy = M^{-1/2} X⁻¹ P(x,y) : S_y → S_x` with `M = X⁻¹ A_xy X⁻¹`.
    pub connector: CMat,
    /// `‖U_xy U_xy* − 1‖`.
    pub connector_residual: f64,
    pub sqrt_method: SqrtMethod,
}

/// `φ(y) = (X⁻¹ A_xy X⁻¹)^{-1/2} X⁻¹ P(x,y) Ψ(y)`, using `P(x,x) = X`.
///
/// `y` is accepted only if its chart coordinates satisfy `‖X⁻¹A‖ ≤ radius`
/// and `‖M − 1‖ < radius` with `radius = radius_series`.
pub fn symmetric_wave_chart(sx: &SpinSpaceData, sy: &SpinSpaceData) -> Result<SymmetricChartPoint, GaugeError> {
    let tol = *sx.krein.tolerances();
    let frame = ChartFrame::from_spin_space(sx);
    let coords = frame.chart_inverse(sy.point())?;
    let x_inv = sx.krein.gram_inv() * linalg::real(-1.0);
    let ka = linalg::op_norm(&(&x_inv * &coords.a));
    if ka > tol.radius_series {
        return Err(GaugeError::OutOfChartDomain { quantity: "‖X⁻¹A‖", value: ka, limit: tol.radius_series });
    }
    let a_xy = cfs::closed_chain(sx, sy);
    let m = &x_inv * a_xy * &x_inv;
    let dist = linalg::op_norm(&(&m - linalg::identity(m.nrows())));
    if dist >= tol.radius_series {
        return Err(GaugeError::OutOfChartDomain { quantity: "‖M − 1‖", value: dist, limit: tol.radius_series });
    }
    let roots = sx.krein.sqrt_near_identity(&m)?;
    let connector = &roots.neg_half * &x_inv * cfs::kernel(sx, sy);
    let connector_adj = cfs::kernel_adjoint(sx, sy, &connector);
    let connector_residual = linalg::fro(&(&connector * connector_adj - linalg::identity(m.nrows())));
    let phi = &connector * sy.wave_evaluation();
    Ok(SymmetricChartPoint {
        point: WaveChartPoint::from_ambient(sx, &phi),
        connector,
        connector_residual,
        sqrt_method: roots.method,
    })
}

/// `W(A, B) = (√(1 + X⁻¹A), (1 + X⁻¹A)^{-1/2} X⁻¹ B)`.
pub fn gaussian_wave_map(sx: &SpinSpaceData, c: &ChartCoordinates) -> Result<WaveChartPoint, GaugeError> {
    let x_inv = sx.krein.gram_inv() * linalg::real(-1.0);
    let k = &x_inv * &c.a;
    let roots = sx.krein.sqrt_near_identity(&(linalg::identity(k.nrows()) + k))?;
    Ok(WaveChartPoint { psi_j: &roots.neg_half * &x_inv * &c.b, psi_i: roots.half })
}

#[derive(Debug, Clone)]
pub struct CoincidenceReport {
    /// Largest deviation over the points where both charts are defined.
    pub max_deviation: f64,
    /// Per-point deviation or the domain error that prevented it.
    pub per_point: Vec<Result<f64, GaugeError>>,
}

impl CoincidenceReport {
    pub fn domain_failures(&self) -> usize {
        self.per_point.iter().filter(|r| r.is_err()).count()
    }
}

/// Compares the symmetric wave chart with the Gaussian wave map composed
/// with the chart inverse at every sample point.
pub fn charts_coincide_check(sx: &SpinSpaceData, samples: &[SpinSpaceData]) -> CoincidenceReport {
    let frame = ChartFrame::from_spin_space(sx);
    let per_point: Vec<Result<f64, GaugeError>> = samples
        .iter()
        .map(|sy| {
            let sym = symmetric_wave_chart(sx, sy)?;
            let coords = frame.chart_inverse(sy.point())?;
            let gauss = gaussian_wave_map(sx, &coords)?;
            Ok(sym.point.distance(&gauss))
        })
        .collect();
    let max_deviation = per_point.iter().filter_map(|r| r.as_ref().ok()).fold(0.0_f64, |a, &d| a.max(d));
    CoincidenceReport { max_deviation, per_point }
}

/// Gauge `y ↦ U_x φ(y)` on a finite point set.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    /// `Ψ_V(y)` as `2n × f` ambient matrices, one per point.
    pub values: Vec<CMat>,
    /// `‖y + Ψ_V(y)* Ψ_V(y)‖` per point.
    pub residuals: Vec<f64>,
    pub target_gram: CMat,
    pub u_x: CMat,
}

impl GaugeMap {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a: f64, &r| a.max(r))
    }
}

fn check_isometry(sx: &SpinSpaceData, u_x: &CMat, target: &KreinSpace) -> Result<(), GaugeError> {
    let residual = linalg::fro(&(u_x.adjoint() * target.gram() * u_x - sx.krein.gram()));
    if residual > sx.krein.tolerances().tol_sqrt * (1.0 + linalg::fro(sx.krein.gram())) {
        return Err(GaugeError::NotKreinIsometry { residual });
    }
    Ok(())
}

fn gauge_value(sx: &SpinSpaceData, sy: &SpinSpaceData, u_x: &CMat, target: &KreinSpace) -> Result<(CMat, f64), GaugeError> {
    let phi = symmetric_wave_chart(sx, sy)?;
    let value = u_x * phi.point.ambient(sx);
    let residual = linalg::fro(&(sy.point() + value.adjoint() * target.gram() * &value));
    Ok((value, residual))
}

/// Symmetric wave gauge over `omega` with values in the space `target`,
/// identified with `S_x` through the Krein isometry `u_x`.
pub fn build_gauge(sx: &SpinSpaceData, omega: &[SpinSpaceData], u_x: &CMat, target: &KreinSpace) -> Result<GaugeMap, GaugeError> {
    check_isometry(sx, u_x, target)?;
    let (values, residuals) = omega
        .iter()
        .map(|sy| gauge_value(sx, sy, u_x, target))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    Ok(GaugeMap { values, residuals, target_gram: target.gram().clone(), u_x: u_x.clone() })
}

/// [`build_gauge`] with the points processed in parallel; the output order
/// matches `omega`.
pub fn build_gauge_par(sx: &SpinSpaceData, omega: &[SpinSpaceData], u_x: &CMat, target: &KreinSpace) -> Result<GaugeMap, GaugeError> {
    check_isometry(sx, u_x, target)?;
    let (values, residuals) = omega
        .par_iter()
        .map(|sy| gauge_value(sx, sy, u_x, target))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    Ok(GaugeMap { values, residuals, target_gram: target.gram().clone(), u_x: u_x.clone() })
}
