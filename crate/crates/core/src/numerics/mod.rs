//! Finite-dimensional Hermitian matrices, the Löwner order, and the Hilbert
//! space effect algebra operations on them.
//!
//! Every positivity decision goes through the Jacobi eigensolver in
//! [`eig_sym`]: a matrix is positive semidefinite when its smallest eigenvalue
//! is at least `-tol_psd * max(1, ||M||_F)`.

mod jacobi;
mod matrix;
pub mod random;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use jacobi::{eig_sym, Eigen, MAX_SWEEPS, OFF_DIAGONAL_RATIO};
pub use matrix::{inner, norm, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("row {row} has {len} entries, expected {dim}")]
    RaggedRow { row: usize, len: usize, dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("matrix is not an effect (spectrum [{min_eigenvalue:e}, {max_eigenvalue:e}])")]
    NotAnEffect { min_eigenvalue: f64, max_eigenvalue: f64 },
    #[error("effect is not idempotent (||A^2 - A||_F = {residual:e})")]
    NotAProjection { residual: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_herm: f64,
    /// Relative: scaled by `max(1, ||M||_F)`.
    pub tol_psd: f64,
    pub tol_idem: f64,
    pub tol_conv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tol_herm: 1e-10, tol_psd: 1e-10, tol_idem: 1e-10, tol_conv: 1e-8 }
    }
}

impl Tolerances {
    /// All four tolerances set to `tol`, clamped at zero.
    pub fn uniform(tol: f64) -> Self {
        let t = tol.max(0.0);
        Self { tol_herm: t, tol_psd: t, tol_idem: t, tol_conv: t }
    }
}

/// A square matrix equal to its adjoint within `tol_herm`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    pub fn new(m: Matrix, tol: &Tolerances) -> Result<Self, NumericsError> {
        let deviation = m.hermitian_deviation();
        if deviation > tol.tol_herm * m.frobenius_norm().max(1.0) {
            return Err(NumericsError::NotHermitian { deviation });
        }
        Ok(Self::hermitized(m))
    }

    /// `(M + M*) / 2`, for matrices Hermitian by construction up to rounding.
    pub fn hermitized(m: Matrix) -> Self {
        let sym = (&m + &m.adjoint()).scale(0.5);
        Self(sym)
    }

    pub fn from_real_rows(rows: &[&[f64]], tol: &Tolerances) -> Result<Self, NumericsError> {
        Self::new(Matrix::from_real_rows(rows)?, tol)
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self(Matrix::from_diagonal(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.0.check_same_dim(&other.0)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.0.check_same_dim(&other.0)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `(Mx, x)`, real for Hermitian `M`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        inner(&self.0.mul_vec(x), x).re
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.0.mul_vec(x)
    }

    pub fn min_eigenvalue(&self) -> Result<f64, NumericsError> {
        Ok(eig_sym(self)?.min())
    }
}

fn psd_threshold(m: &HermitianMatrix, tol: &Tolerances) -> f64 {
    -tol.tol_psd * m.frobenius_norm().max(1.0)
}

pub fn is_psd(m: &HermitianMatrix, tol: &Tolerances) -> Result<bool, NumericsError> {
    Ok(m.min_eigenvalue()? >= psd_threshold(m, tol))
}

/// `a <= b` in the Löwner order, i.e. `b - a` is positive semidefinite.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerances) -> Result<bool, NumericsError> {
    a.0.check_same_dim(&b.0)?;
    is_psd(&b.try_sub(a)?, tol)
}

/// A Hermitian matrix with `0 <= A <= I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect(HermitianMatrix);

impl Effect {
    pub fn new(m: HermitianMatrix, tol: &Tolerances) -> Result<Self, NumericsError> {
        let eig = eig_sym(&m)?;
        let threshold = psd_threshold(&m, tol);
        let lower_ok = eig.min() >= threshold;
        // I - M has eigenvalues 1 - lambda; its Frobenius norm bounds the scale
        let complement = HermitianMatrix::identity(m.dim()).try_sub(&m)?;
        let upper_ok = 1.0 - eig.max() >= psd_threshold(&complement, tol);
        if !(lower_ok && upper_ok) {
            return Err(NumericsError::NotAnEffect { min_eigenvalue: eig.min(), max_eigenvalue: eig.max() });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is an effect by construction.
    pub(crate) fn trusted(m: HermitianMatrix) -> Self {
        Self(m)
    }

    pub fn zero(dim: usize) -> Self {
        Self(HermitianMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim))
    }

    /// `s I` for `s` in `[0, 1]`.
    pub fn scalar(dim: usize, s: f64) -> Self {
        assert!((0.0..=1.0).contains(&s), "scalar effect needs 0 <= s <= 1");
        Self(HermitianMatrix::identity(dim).scale(s))
    }

    pub fn diagonal(diag: &[f64], tol: &Tolerances) -> Result<Self, NumericsError> {
        Self::new(HermitianMatrix::diagonal(diag), tol)
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &Matrix {
        self.0.as_matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// An idempotent effect.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection(Effect);

impl Projection {
    pub fn new(effect: Effect, tol: &Tolerances) -> Result<Self, NumericsError> {
        let residual = idempotency_residual(&effect);
        if residual > tol.tol_idem {
            return Err(NumericsError::NotAProjection { residual });
        }
        Ok(Self(effect))
    }

    /// Orthogonal projection onto the span of `v`, which must be non-zero.
    pub fn onto(v: &[Complex64]) -> Self {
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!(n2 > 0.0, "cannot project onto the zero vector");
        Self(Effect::trusted(HermitianMatrix::hermitized(Matrix::outer(v).scale(1.0 / n2))))
    }

    pub(crate) fn trusted(m: HermitianMatrix) -> Self {
        Self(Effect::trusted(m))
    }

    pub fn zero(dim: usize) -> Self {
        Self(Effect::zero(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Effect::identity(dim))
    }

    pub fn as_effect(&self) -> &Effect {
        &self.0
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        self.0.as_hermitian()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

fn idempotency_residual(a: &Effect) -> f64 {
    let m = a.as_matrix();
    (&(m * m) - m).frobenius_norm()
}

/// `A + B` when `A + B <= I`; `None` when the sum is undefined.
pub fn oplus(a: &Effect, b: &Effect, tol: &Tolerances) -> Result<Option<Effect>, NumericsError> {
    let sum = a.as_hermitian().try_add(b.as_hermitian())?;
    if loewner_leq(&sum, &HermitianMatrix::identity(sum.dim()), tol)? {
        Ok(Some(Effect::trusted(sum)))
    } else {
        Ok(None)
    }
}

/// `I - A`.
pub fn orthosupplement(a: &Effect) -> Effect {
    let id = HermitianMatrix::identity(a.dim());
    Effect::trusted(id.try_sub(a.as_hermitian()).expect("same dimension"))
}

pub fn is_projection(a: &Effect, tol: &Tolerances) -> bool {
    idempotency_residual(a) <= tol.tol_idem
}

/// A non-zero effect `B` with `B <= A` and `B <= I - A`, when `A` is not a projection.
///
/// Built from the first eigenpair with `tol < lambda < 1 - tol` as
/// `min(lambda, 1 - lambda) v v*`.
pub fn sharp_witness(a: &Effect, tol: &Tolerances) -> Result<Option<Effect>, NumericsError> {
    let eig = eig_sym(a.as_hermitian())?;
    let cut = tol.tol_idem;
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda > cut && lambda < 1.0 - cut {
            let v = eig.vectors.column(k);
            let w = lambda.min(1.0 - lambda);
            let b = HermitianMatrix::hermitized(Matrix::outer(&v).scale(w));
            return Ok(Some(Effect::trusted(b)));
        }
    }
    Ok(None)
}

/// The positive semidefinite square root.
pub fn sqrt_psd(m: &HermitianMatrix, tol: &Tolerances) -> Result<HermitianMatrix, NumericsError> {
    let eig = eig_sym(m)?;
    if eig.min() < psd_threshold(m, tol) {
        return Err(NumericsError::NotPsd { min_eigenvalue: eig.min() });
    }
    Ok(HermitianMatrix::hermitized(eig.reconstruct_with(|l| l.max(0.0).sqrt())))
}

/// `lo <= a <= hi`.
pub fn interval_membership(a: &Effect, lo: &Effect, hi: &Effect, tol: &Tolerances) -> Result<bool, NumericsError> {
    Ok(loewner_leq(lo.as_hermitian(), a.as_hermitian(), tol)? && loewner_leq(a.as_hermitian(), hi.as_hermitian(), tol)?)
}

/// `| ||(P - Q)x||^2 - [(Px, x) - (Px, Qx) - (Qx, Px) + (Qx, x)] |`.
///
/// The bracket is the expansion of the squared norm using `P* = P = P^2`.
pub fn prop6_identity_check(p: &Projection, q: &Projection, x: &[Complex64]) -> Result<f64, NumericsError> {
    if p.dim() != q.dim() {
        return Err(NumericsError::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    if x.len() != p.dim() {
        return Err(NumericsError::DimensionMismatch { left: p.dim(), right: x.len() });
    }
    let px = p.as_hermitian().apply(x);
    let qx = q.as_hermitian().apply(x);
    let diff: Vec<Complex64> = px.iter().zip(&qx).map(|(a, b)| a - b).collect();
    let lhs = norm(&diff).powi(2);
    let rhs = inner(&px, x) - inner(&px, &qx) - inner(&qx, &px) + inner(&qx, x);
    Ok((Complex64::new(lhs, 0.0) - rhs).norm())
}
