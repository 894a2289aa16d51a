use serde::{Deserialize, Serialize};

/// Numerical thresholds used across the crate.
///
/// All fields can be overridden individually from an experiment config;
/// missing fields fall back to [`Tolerances::default`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Generic residual tolerance for unitarity / symmetry / Hermiticity tests.
    pub tol: f64,
    /// Residual tolerance for square roots and polar factors.
    pub tol_sqrt: f64,
    /// A Gram matrix is singular if its smallest singular value is below
    /// `tol_singular_rel · ‖gram‖`.
    pub tol_singular_rel: f64,
    /// Largest admissible `‖B − 1‖` (operator norm) for square roots near the identity.
    pub radius_series: f64,
    /// Eigenvalues with magnitude below `tol_rank_rel · ‖x‖` count as zero.
    pub tol_rank_rel: f64,
    /// Smallest admissible singular value of the `U₁₁` block in chart inversion.
    pub chart_min_singular: f64,
    /// Relative singular-value cutoff for numeric Jacobian ranks.
    pub jacobian_rank_rel: f64,
    /// Relative gap below which the two closed-chain eigenvalues count as equal.
    pub degeneracy_rel: f64,
    /// Relative size of the non-`γ⁰` part of `P(x,x)` tolerated by the massless formulas.
    pub massless_form_rel: f64,
    /// Condition-number ceiling for eigenvector matrices in diagonalisation.
    pub max_eigvec_cond: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            tol_sqrt: 1e-9,
            tol_singular_rel: 1e-12,
            radius_series: 0.8,
            tol_rank_rel: 1e-8,
            chart_min_singular: 0.5,
            jacobian_rank_rel: 1e-6,
            degeneracy_rel: 1e-8,
            massless_form_rel: 1e-6,
            max_eigvec_cond: 1e8,
        }
    }
}

impl Tolerances {
    /// Returns the name of the first non-positive field, if any.
    pub fn first_invalid(&self) -> Option<&'static str> {
        let fields = [
            ("tol", self.tol),
            ("tol_sqrt", self.tol_sqrt),
            ("tol_singular_rel", self.tol_singular_rel),
            ("radius_series", self.radius_series),
            ("tol_rank_rel", self.tol_rank_rel),
            ("chart_min_singular", self.chart_min_singular),
            ("jacobian_rank_rel", self.jacobian_rank_rel),
            ("degeneracy_rel", self.degeneracy_rel),
            ("massless_form_rel", self.massless_form_rel),
            ("max_eigvec_cond", self.max_eigvec_cond),
        ];
        fields
            .into_iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(name, _)| name)
    }
}
