use std::sync::Arc;

use nalgebra::ComplexField;
use num_complex::Complex;

use super::BasePoint;
use crate::error::Result;
use crate::linalg::{inner, ComplexMatrix, Tolerance};
use crate::scalar::{real, Real};

type FieldFn<T> = dyn Fn(&ComplexMatrix<T>) -> Result<ComplexMatrix<T>> + Send + Sync;

/// A tangent vector field given as a `Z`-valued function on the component.
#[derive(Clone)]
pub struct VectorField<T: Real> {
    eval: Arc<FieldFn<T>>,
    fd_step: T,
}

impl<T: Real> std::fmt::Debug for VectorField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField")
            .field("fd_step", &self.fd_step)
            .finish_non_exhaustive()
    }
}

impl<T: Real> VectorField<T> {
    pub fn new<F>(fd_step: T, f: F) -> Self
    where
        F: Fn(&ComplexMatrix<T>) -> Result<ComplexMatrix<T>> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            fd_step,
        }
    }

    pub fn zero(fd_step: T) -> Self {
        Self::new(fd_step, |b| Ok(ComplexMatrix::zeros(b.nrows(), b.ncols())))
    }

    /// `b ↦ Φ_b(H_b)` where `H_b` is the hermitian part of `P_½(supp b) p(b)` and
    /// `p(b) = w_0 + w_1 b + b w_1* + w_2 b w_2* + b w_3 b*`.
    ///
    /// Values are real tangent directions of the component through a normal `b`.
    pub fn polynomial(coefficients: [ComplexMatrix<T>; 4], tol: Tolerance<T>) -> Self {
        let fd_step = tol.fd_step;
        Self::new(fd_step, move |b| {
            let base = BasePoint::normal(b, &tol)?;
            let [w0, w1, w2, w3] = &coefficients;
            let p = w0 + w1 * b + b * w1.adjoint() + w2 * b * w2.adjoint() + b * w3 * b.adjoint();
            let x = base.peirce_half(&p);
            let h = (&x + x.adjoint()) * real(T::lit(0.5));
            Ok(base.phi(&h))
        })
    }

    pub fn fd_step(&self) -> T {
        self.fd_step
    }

    pub fn at(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        (self.eval)(b)
    }

    /// `b ↦ c · Y(b)`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        let inner = self.eval.clone();
        Self::new(self.fd_step, move |b| Ok(inner(b)? * c))
    }

    /// `Y'_a x` by a central difference along `t ↦ chart(a, t Φ_a⁻¹(x))`, whose velocity at 0 is `x`.
    pub fn derivative(
        &self,
        base: &BasePoint<T>,
        x: &ComplexMatrix<T>,
    ) -> Result<ComplexMatrix<T>> {
        let h = self.fd_step;
        let w = base.phi_inverse(x);
        let plus = self.at(&base.chart(&(&w * real(h)))?)?;
        let minus = self.at(&base.chart(&(&w * real(-h)))?)?;
        Ok((plus - minus) / real(h + h))
    }
}

/// `(∇_X Y)_a = P_½(supp a) Y'_a X_a`.
pub fn connection<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    connection_at(x, y, &base)
}

fn connection_at<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
    base: &BasePoint<T>,
) -> Result<ComplexMatrix<T>> {
    let xa = x.at(base.point())?;
    Ok(base.peirce_half(&y.derivative(base, &xa)?))
}

/// `[X, Y]_a = Y'_a X_a − X'_a Y_a`.
pub fn lie_bracket<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    let xa = x.at(a)?;
    let ya = y.at(a)?;
    Ok(y.derivative(&base, &xa)? - x.derivative(&base, &ya)?)
}

/// `T(X, Y)_a = ∇_X Y − ∇_Y X − [X, Y]`.
pub fn torsion<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    let xa = x.at(a)?;
    let ya = y.at(a)?;
    let yx = y.derivative(&base, &xa)?;
    let xy = x.derivative(&base, &ya)?;
    let bracket = &yx - &xy;
    Ok(base.peirce_half(&yx) - base.peirce_half(&xy) - bracket)
}

/// `|X⟨Y, W⟩ − ⟨∇_X Y, W⟩ − ⟨Y, ∇_X W⟩|` for the hermitian trace form.
///
/// The left side is a central difference of `⟨Y, W⟩` along the curve used for `Y'_a X_a`.
pub fn check_metric_compatibility<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
    w: &VectorField<T>,
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    let base = BasePoint::normal(a, tol)?;
    let h = y.fd_step();
    let xa = x.at(a)?;
    let dir = base.phi_inverse(&xa);
    let plus = base.chart(&(&dir * real(h)))?;
    let minus = base.chart(&(&dir * real(-h)))?;
    let lhs =
        (inner(&y.at(&plus)?, &w.at(&plus)?) - inner(&y.at(&minus)?, &w.at(&minus)?)) / real(h + h);
    let rhs = inner(&connection_at(x, y, &base)?, &w.at(a)?)
        + inner(&y.at(a)?, &connection_at(x, w, &base)?);
    Ok((lhs - rhs).modulus())
}

/// `‖∇_X(iY) − i ∇_X Y‖`.
pub fn check_hermitian_connection<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    let base = BasePoint::normal(a, tol)?;
    let i = Complex::new(T::zero(), T::one());
    let iy = y.scaled(i);
    Ok((connection_at(x, &iy, &base)? - connection_at(x, y, &base)? * i).norm())
}
