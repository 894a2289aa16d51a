//! Causal fermion system data: correlation operators, spin spaces, wave
//! evaluation, kernels and closed chains.
//!
//! Conventions: `x` is an `f × f` Hermitian matrix in a fixed orthonormal
//! basis of H. The spin space `S_x = x(H)` carries `≺u|v≻_x = −⟨u|x v⟩`, so in
//! a Hilbert-orthonormal basis of `S_x` its Gram matrix is `−X` with
//! `X = basis† x basis`.

use thiserror::Error;

use crate::krein::{KreinError, KreinSpace};
use crate::linalg::{self, CMat};
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfsError {
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("operator is not regular: signature ({found_p},{found_q}), expected ({n},{n})")]
    NotRegular { n: usize, found_p: usize, found_q: usize },
    #[error("basis change is not Hilbert-unitary (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },
    #[error(transparent)]
    Krein(#[from] KreinError),
}

/// Hermitian `f × f` matrix with expected signature `(n, n)`.
#[derive(Debug, Clone)]
pub struct CorrelationOperator {
    matrix: CMat,
    n: usize,
}

impl CorrelationOperator {
    /// Accepts `matrix` if it is Hermitian to `tol.tol`; the stored matrix is
    /// the exact Hermitian part. Regularity is checked by [`spin_space`].
    pub fn new(matrix: CMat, n: usize, tol: &Tolerances) -> Result<Self, CfsError> {
        assert!(matrix.is_square(), "correlation operator must be square");
        let defect = linalg::hermitian_defect(&matrix);
        if defect > tol.tol * (1.0 + linalg::fro(&matrix)) {
            return Err(CfsError::NotHermitian { defect });
        }
        Ok(Self { matrix: linalg::hermitian_part(&matrix), n })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Spin space of a regular point together with its Krein structure.
#[derive(Debug, Clone)]
pub struct SpinSpaceData {
    point: CMat,
    /// `f × 2n`, orthonormal columns spanning `x(H)`.
    pub basis: CMat,
    /// `f × (f − 2n)`, orthonormal columns spanning the kernel of `x`.
    pub complement: CMat,
    /// `X = basis† x basis`.
    pub x: CMat,
    /// Spin inner product on `S_x` (Gram matrix `−X`).
    pub krein: KreinSpace,
}

/// Spin space of `x`.
///
/// Columns of the basis are eigenvectors of `x` for its nonzero eigenvalues,
/// ordered by descending eigenvalue, each with its largest-magnitude entry
/// real positive.
pub fn spin_space(x: &CorrelationOperator, tol: &Tolerances) -> Result<SpinSpaceData, CfsError> {
    let split = linalg::image_split(&x.matrix, tol.tol_rank_rel);
    if split.p != x.n || split.q != x.n {
        return Err(CfsError::NotRegular { n: x.n, found_p: split.p, found_q: split.q });
    }
    let xs = linalg::diag_real(&split.values);
    let krein = KreinSpace::with_signature(-&xs, x.n, x.n, *tol)?;
    Ok(SpinSpaceData { point: x.matrix.clone(), basis: split.image, complement: split.kernel, x: xs, krein })
}

impl SpinSpaceData {
    pub fn n(&self) -> usize {
        self.basis.ncols() / 2
    }

    pub fn f(&self) -> usize {
        self.basis.nrows()
    }

    /// The operator `x` this spin space was built from.
    pub fn point(&self) -> &CMat {
        &self.point
    }

    /// `Ψ(x) = basis†`, the orthogonal projection onto `S_x` in spin coordinates.
    pub fn wave_evaluation(&self) -> CMat {
        self.basis.adjoint()
    }

    /// `‖x − Ψ† X Ψ‖` (Frobenius).
    pub fn reconstruction_residual(&self) -> f64 {
        let psi = self.wave_evaluation();
        linalg::fro(&(&self.point - psi.adjoint() * &self.x * psi))
    }

    /// Same spin space in the basis `basis · u` for a Hilbert-unitary `u`.
    pub fn regauge(&self, u: &CMat, tol: &Tolerances) -> Result<Self, CfsError> {
        let residual = linalg::fro(&(u.adjoint() * u - linalg::identity(u.nrows())));
        if residual > tol.tol * (1.0 + linalg::fro(u)) {
            return Err(CfsError::NotOrthonormal { residual });
        }
        let x = linalg::hermitian_part(&(u.adjoint() * &self.x * u));
        let n = self.n();
        let krein = KreinSpace::with_signature(-&x, n, n, *tol)?;
        Ok(Self {
            point: self.point.clone(),
            basis: &self.basis * u,
            complement: self.complement.clone(),
            x,
            krein,
        })
    }
}

/// `P(x,y) = Ψ(x) · y · basis_y : S_y → S_x`.
pub fn kernel(sx: &SpinSpaceData, sy: &SpinSpaceData) -> CMat {
    sx.basis.adjoint() * &sy.point * &sy.basis
}

/// Krein adjoint of a map `S_y → S_x`: `X_y⁻¹ P† X_x` (the signs of the two
/// Gram matrices cancel).
pub fn kernel_adjoint(sx: &SpinSpaceData, sy: &SpinSpaceData, p: &CMat) -> CMat {
    sy.krein.gram_inv() * p.adjoint() * sx.krein.gram()
}

/// `A_xy = P(x,y) P(y,x)`, an endomorphism of `S_x`.
pub fn closed_chain(sx: &SpinSpaceData, sy: &SpinSpaceData) -> CMat {
    kernel(sx, sy) * kernel(sy, sx)
}

/// Local correlation operator `F_ij = −≺ψ_i|ψ_j≻` from the values of `f`
/// orthonormal waves at a point (`wave_values` has one column per wave) and
/// the Gram matrix of the spinor space.
pub fn local_correlation(wave_values: &CMat, spinor_gram: &CMat) -> CMat {
    linalg::hermitian_part(&-(wave_values.adjoint() * spinor_gram * wave_values))
}
