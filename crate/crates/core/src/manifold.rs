//! Charts on the manifold of Hermitian `f × f` matrices of rank `p + q` with
//! `p` positive and `q` negative eigenvalues, the Hilbert–Schmidt metric, and
//! a numerical test that the chart is Gaussian at its base point.
//!
//! Around a base point `x` with image `I` and kernel `J`, the chart is
//! `Λ(A, B) = W [[X + A, B], [B†, B† (X + A)⁻¹ B]] W†` where
//! `W = [basis_I | basis_J]` and `X` is `x` restricted to `I`.

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::cfs::SpinSpaceData;
use crate::linalg::{self, real, CMat};
use crate::random;
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("signature ({p},{q}) does not fit into dimension {f}")]
    InvalidSignature { p: usize, q: usize, f: usize },
    #[error("base point has signature ({found_p},{found_q}), expected ({p},{q})")]
    BaseSignature { p: usize, q: usize, found_p: usize, found_q: usize },
    #[error("A is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("coordinate shapes do not match the chart")]
    ShapeMismatch,
    #[error("X + A lost its signature or came too close to singular (smallest |eigenvalue| {min_abs:.3e})")]
    SignatureLost { min_abs: f64 },
    #[error("point is outside the chart: smallest singular value of U11 is {min_sv:.3e}")]
    TooFarFromBase { min_sv: f64 },
    #[error("point has signature ({found_p},{found_q}), expected ({p},{q})")]
    NotInManifold { p: usize, q: usize, found_p: usize, found_q: usize },
}

/// `2(p+q)f − (p+q)²`.
pub fn manifold_dim(p: usize, q: usize, f: usize) -> Result<usize, ManifoldError> {
    let r = p + q;
    if r > f {
        return Err(ManifoldError::InvalidSignature { p, q, f });
    }
    Ok(2 * r * f - r * r)
}

/// Chart coordinates: `a` Hermitian `r × r`, `b` of shape `r × (f − r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoordinates {
    pub a: CMat,
    pub b: CMat,
}

impl ChartCoordinates {
    pub fn zero(r: usize, f: usize) -> Self {
        Self { a: CMat::zeros(r, r), b: CMat::zeros(r, f - r) }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { a: &self.a * real(t), b: &self.b * real(t) }
    }

    /// Hilbert–Schmidt norm of the tangent vector `[[A, B], [B†, 0]]`.
    pub fn norm(&self) -> f64 {
        (linalg::fro(&self.a).powi(2) + 2.0 * linalg::fro(&self.b).powi(2)).sqrt()
    }
}

/// Splitting `H = I ⊕ J` around a base point.
#[derive(Debug, Clone)]
pub struct ChartFrame {
    base: CMat,
    /// `[basis_I | basis_J]`, unitary.
    w: CMat,
    /// `x` restricted to `I` in the basis of `I`.
    pub x: CMat,
    x_min_abs: f64,
    p: usize,
    q: usize,
    tolerances: Tolerances,
}

impl ChartFrame {
    pub fn new(base: &CMat, p: usize, q: usize, tolerances: Tolerances) -> Result<Self, ManifoldError> {
        let f = base.nrows();
        manifold_dim(p, q, f)?;
        let split = linalg::image_split(base, tolerances.tol_rank_rel);
        if split.p != p || split.q != q {
            return Err(ManifoldError::BaseSignature { p, q, found_p: split.p, found_q: split.q });
        }
        let x_min_abs = split.values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        Ok(Self {
            base: linalg::hermitian_part(base),
            w: linalg::hstack(&split.image, &split.kernel),
            x: linalg::diag_real(&split.values),
            x_min_abs,
            p,
            q,
            tolerances,
        })
    }

    /// Frame whose `I` basis is the spin basis of `s` and whose `J` basis is
    /// its complement, so that chart coordinates and wave coordinates share
    /// one splitting.
    pub fn from_spin_space(s: &SpinSpaceData) -> Self {
        let n = s.n();
        let x_min_abs = linalg::hermitian_eigenvalues(&s.x).iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        Self {
            base: s.point().clone(),
            w: linalg::hstack(&s.basis, &s.complement),
            x: s.x.clone(),
            x_min_abs,
            p: n,
            q: n,
            tolerances: *s.krein.tolerances(),
        }
    }

    pub fn f(&self) -> usize {
        self.w.nrows()
    }

    pub fn r(&self) -> usize {
        self.p + self.q
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn base(&self) -> &CMat {
        &self.base
    }

    pub fn basis_i(&self) -> CMat {
        self.w.columns(0, self.r()).into_owned()
    }

    pub fn basis_j(&self) -> CMat {
        self.w.columns(self.r(), self.f() - self.r()).into_owned()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    /// Expresses an ambient matrix in the `(I, J)` splitting.
    pub fn to_frame(&self, y: &CMat) -> CMat {
        self.w.adjoint() * y * &self.w
    }

    pub fn from_frame(&self, m: &CMat) -> CMat {
        &self.w * m * self.w.adjoint()
    }

    fn check_shapes(&self, c: &ChartCoordinates) -> Result<(), ManifoldError> {
        let (r, f) = (self.r(), self.f());
        if c.a.shape() != (r, r) || c.b.shape() != (r, f - r) {
            return Err(ManifoldError::ShapeMismatch);
        }
        Ok(())
    }

    /// `(X + A)⁻¹` after checking the chart's signature condition: the
    /// smallest `|eigenvalue|` of `X + A` must exceed half of that of `X`.
    fn shifted_inverse(&self, a: &CMat) -> Result<CMat, ManifoldError> {
        let xa = &self.x + a;
        let ev = linalg::hermitian_eigenvalues(&xa);
        let min_abs = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let p = ev.iter().filter(|&&l| l > 0.0).count();
        if min_abs <= 0.5 * self.x_min_abs || p != self.p {
            return Err(ManifoldError::SignatureLost { min_abs });
        }
        linalg::inverse(&xa).ok_or(ManifoldError::SignatureLost { min_abs })
    }

    /// `Λ(A, B)` in ambient coordinates.
    pub fn chart_forward(&self, c: &ChartCoordinates) -> Result<CMat, ManifoldError> {
        self.check_shapes(c)?;
        let defect = linalg::hermitian_defect(&c.a);
        if defect > self.tolerances.tol * (1.0 + linalg::fro(&c.a)) {
            return Err(ManifoldError::NotHermitian { defect });
        }
        let a = linalg::hermitian_part(&c.a);
        let k = self.shifted_inverse(&a)?;
        let lower = c.b.adjoint() * &k * &c.b;
        let m = linalg::block2(&(&self.x + &a), &c.b, &c.b.adjoint(), &lower);
        Ok(linalg::hermitian_part(&self.from_frame(&m)))
    }

    /// Reads `(A, B)` off the eigensystem of `y`:
    /// with eigenvectors `U = [[U11], [U21]]` (in the `(I, J)` splitting) and
    /// nonzero eigenvalues `D`, `A = U11 D U11† − X`, `B = (U11 D U11†)(U11†)⁻¹ U21†`.
    pub fn chart_inverse(&self, y: &CMat) -> Result<ChartCoordinates, ManifoldError> {
        let (r, f) = (self.r(), self.f());
        let yf = linalg::hermitian_part(&self.to_frame(y));
        let split = linalg::image_split(&yf, self.tolerances.tol_rank_rel);
        if split.p != self.p || split.q != self.q {
            return Err(ManifoldError::NotInManifold { p: self.p, q: self.q, found_p: split.p, found_q: split.q });
        }
        let u11 = split.image.rows(0, r).into_owned();
        let u21 = split.image.rows(r, f - r).into_owned();
        let min_sv = linalg::min_singular_value(&u11);
        if min_sv < self.tolerances.chart_min_singular {
            return Err(ManifoldError::TooFarFromBase { min_sv });
        }
        let d = linalg::diag_real(&split.values);
        let y11 = &u11 * d * u11.adjoint();
        let u11_adj_inv = linalg::inverse(&u11.adjoint()).ok_or(ManifoldError::TooFarFromBase { min_sv })?;
        let b = &y11 * u11_adj_inv * u21.adjoint();
        let a = linalg::hermitian_part(&(y11 - &self.x));
        Ok(ChartCoordinates { a, b })
    }

    /// Differential of the chart at `c` applied to the tangent vector `dc`:
    /// `W [[dA, dB], [dB†, dB† K B + B† K dB − B† K dA K B]] W†` with `K = (X + A)⁻¹`.
    pub fn chart_differential(&self, c: &ChartCoordinates, dc: &ChartCoordinates) -> Result<CMat, ManifoldError> {
        self.check_shapes(c)?;
        self.check_shapes(dc)?;
        let k = self.shifted_inverse(&linalg::hermitian_part(&c.a))?;
        let kb = &k * &c.b;
        let lower = dc.b.adjoint() * &kb + kb.adjoint() * &dc.b - kb.adjoint() * &dc.a * &kb;
        let m = linalg::block2(&dc.a, &dc.b, &dc.b.adjoint(), &lower);
        Ok(self.from_frame(&m))
    }

    /// Number of real chart parameters, `r² + 2r(f − r)`.
    pub fn param_count(&self) -> usize {
        let (r, f) = (self.r(), self.f());
        r * r + 2 * r * (f - r)
    }

    /// Coordinates of the `k`-th real parameter direction: Hermitian units for
    /// `A` (diagonal, then real and imaginary off-diagonal pairs), then real
    /// and imaginary units for every entry of `B`.
    pub fn param_direction(&self, k: usize) -> ChartCoordinates {
        let (r, f) = (self.r(), self.f());
        let mut c = ChartCoordinates::zero(r, f);
        let mut idx = 0;
        for i in 0..r {
            if idx == k {
                c.a[(i, i)] = real(1.0);
                return c;
            }
            idx += 1;
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if idx == k {
                    c.a[(i, j)] = real(1.0);
                    c.a[(j, i)] = real(1.0);
                    return c;
                }
                if idx + 1 == k {
                    c.a[(i, j)] = linalg::I;
                    c.a[(j, i)] = -linalg::I;
                    return c;
                }
                idx += 2;
            }
        }
        for i in 0..r {
            for j in 0..(f - r) {
                if idx == k {
                    c.b[(i, j)] = real(1.0);
                    return c;
                }
                if idx + 1 == k {
                    c.b[(i, j)] = linalg::I;
                    return c;
                }
                idx += 2;
            }
        }
        panic!("parameter index {k} out of range");
    }

    /// Real Jacobian of `Λ` at `c` by central differences with step `h`;
    /// rows are the real and imaginary parts of all `f²` entries.
    pub fn jacobian(&self, c: &ChartCoordinates, h: f64) -> Result<DMatrix<f64>, ManifoldError> {
        let f = self.f();
        let np = self.param_count();
        let mut jac = DMatrix::zeros(2 * f * f, np);
        for k in 0..np {
            let e = self.param_direction(k);
            let plus = self.chart_forward(&add(c, &e, h))?;
            let minus = self.chart_forward(&add(c, &e, -h))?;
            let d = (plus - minus) * real(0.5 / h);
            for (idx, z) in d.iter().enumerate() {
                jac[(2 * idx, k)] = z.re;
                jac[(2 * idx + 1, k)] = z.im;
            }
        }
        Ok(jac)
    }

    /// Numeric rank of the Jacobian at the chart origin.
    pub fn jacobian_rank_at_origin(&self) -> Result<usize, ManifoldError> {
        let jac = self.jacobian(&ChartCoordinates::zero(self.r(), self.f()), 1e-4)?;
        Ok(linalg::real_rank(&jac, self.tolerances.jacobian_rank_rel))
    }

    /// Metric components `g_kl = tr(dΛ(e_k) dΛ(e_l))` at `c`.
    pub fn metric_components(&self, c: &ChartCoordinates) -> Result<DMatrix<f64>, ManifoldError> {
        let np = self.param_count();
        let tangents = (0..np)
            .map(|k| self.chart_differential(c, &self.param_direction(k)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut g = DMatrix::zeros(np, np);
        for k in 0..np {
            for l in k..np {
                let v = riemannian_metric(&tangents[k], &tangents[l]);
                g[(k, l)] = v;
                g[(l, k)] = v;
            }
        }
        Ok(g)
    }

    /// Largest central-difference derivative `|∂_k g_ij|` at the chart origin
    /// with step `h`.
    pub fn metric_gradient_at_origin(&self, h: f64) -> Result<f64, ManifoldError> {
        let zero = ChartCoordinates::zero(self.r(), self.f());
        let mut worst: f64 = 0.0;
        for k in 0..self.param_count() {
            let e = self.param_direction(k);
            let gp = self.metric_components(&add(&zero, &e, h))?;
            let gm = self.metric_components(&add(&zero, &e, -h))?;
            let d = (gp - gm) / (2.0 * h);
            worst = worst.max(d.amax());
        }
        Ok(worst)
    }

    /// Random coordinates with Hilbert–Schmidt tangent norm `scale`.
    pub fn random_coordinates<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> ChartCoordinates {
        let (r, f) = (self.r(), self.f());
        let c = ChartCoordinates { a: random::hermitian(rng, r), b: random::gaussian(rng, r, f - r) };
        let norm = c.norm();
        c.scaled(scale / norm)
    }
}

fn add(c: &ChartCoordinates, e: &ChartCoordinates, h: f64) -> ChartCoordinates {
    ChartCoordinates { a: &c.a + &e.a * real(h), b: &c.b + &e.b * real(h) }
}

/// `√tr((x − y)²)`.
pub fn hs_distance(x: &CMat, y: &CMat) -> f64 {
    let d = x - y;
    linalg::trace(&(&d * &d)).re.max(0.0).sqrt()
}

/// `tr(u v)` for Hermitian `u`, `v`.
pub fn riemannian_metric(u: &CMat, v: &CMat) -> f64 {
    linalg::trace(&(u * v)).re
}

/// Outcome of [`gaussian_check`].
#[derive(Debug, Clone)]
pub struct GaussianReport {
    /// `tr(Δ²)` with `Δ = [[A − Ã, B − B̃], [(B − B̃)†, 0]]`.
    pub c2_expected: f64,
    /// Quadratic coefficient extracted from `D(t)` at small `t`.
    pub c2_fit: f64,
    pub c2_rel_error: f64,
    /// `(t, r(t), r(t/2))` with `r(t) = D(t) − c2_expected t²`.
    pub residuals: Vec<(f64, f64, f64)>,
    /// `r(t)/r(t/2)` per entry of `t_list`; `None` if both residuals vanish.
    pub ratios: Vec<Option<f64>>,
}

/// Squared distance `D(t) = d(Λ(tA, tB), Λ(tÃ, tB̃))²` along two rays from the
/// base point, compared against the flat quadratic form.
///
/// `c2_fit` uses Richardson extrapolation of `D(t)/t²` at `t = 1e−4` and
/// `t = 5e−5`.
pub fn gaussian_check(
    frame: &ChartFrame,
    first: &ChartCoordinates,
    second: &ChartCoordinates,
    t_list: &[f64],
) -> Result<GaussianReport, ManifoldError> {
    let dist2 = |t: f64| -> Result<f64, ManifoldError> {
        let y1 = frame.chart_forward(&first.scaled(t))?;
        let y2 = frame.chart_forward(&second.scaled(t))?;
        Ok(hs_distance(&y1, &y2).powi(2))
    };
    let da = &first.a - &second.a;
    let db = &first.b - &second.b;
    let r = frame.r();
    let delta = linalg::block2(&da, &db, &db.adjoint(), &CMat::zeros(frame.f() - r, frame.f() - r));
    let c2_expected = riemannian_metric(&delta, &delta);

    let t0 = 1e-4;
    let q1 = dist2(t0)? / (t0 * t0);
    let q2 = dist2(t0 / 2.0)? / (t0 * t0 / 4.0);
    let c2_fit = (4.0 * q2 - q1) / 3.0;
    let c2_rel_error = if c2_expected == 0.0 { c2_fit.abs() } else { (c2_fit - c2_expected).abs() / c2_expected };

    let mut residuals = Vec::with_capacity(t_list.len());
    let mut ratios = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let rt = dist2(t)? - c2_expected * t * t;
        let rh = dist2(t / 2.0)? - c2_expected * t * t / 4.0;
        residuals.push((t, rt, rh));
        ratios.push(if rh == 0.0 { None } else { Some(rt / rh) });
    }
    Ok(GaussianReport { c2_expected, c2_fit, c2_rel_error, residuals, ratios })
}
