use super::{peirce_half_with, BasePoint};
use crate::error::Result;
use crate::linalg::{mat_exp, range_projectors, ComplexMatrix, Tolerance};
use crate::scalar::{real, Real};
use crate::triple::{inner_derivation, Derivation};

/// `γ(t) = exp(t g(s, u)) a`, evaluated as `e^{tA} a e^{tB}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic<T: Real> {
    pub base: BasePoint<T>,
    pub direction: ComplexMatrix<T>,
    pub derivation: Derivation<T>,
    left: ComplexMatrix<T>,
    right: ComplexMatrix<T>,
    rank: usize,
}

impl<T: Real> Geodesic<T> {
    /// Requires `u` tangent at the base point.
    pub fn new(base: BasePoint<T>, u: ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        base.require_tangent(&u, tol)?;
        let derivation = inner_derivation(base.support(), &u)?;
        let (left, right) = base.derivation_factors(&u);
        let rank = super::support_rank(&base);
        Ok(Self {
            base,
            direction: u,
            derivation,
            left,
            right,
            rank,
        })
    }

    pub fn point(&self, t: T) -> Result<ComplexMatrix<T>> {
        if t == T::zero() {
            return Ok(self.base.point().clone());
        }
        let tc = real(t);
        Ok(mat_exp(&(&self.left * tc))? * self.base.point() * mat_exp(&(&self.right * tc))?)
    }

    /// `γ̇(0) = g(s, u) a`.
    pub fn initial_velocity(&self) -> Result<ComplexMatrix<T>> {
        self.derivation.apply(self.base.point())
    }

    /// `‖P_½(supp γ(t)) γ̈(t)‖` with a central second difference of step `h`.
    ///
    /// The support of `γ(t)` is read off its range projections, so non-normal points are allowed.
    pub fn residual(&self, t: T, h: T) -> Result<T> {
        curve_residual(|s| self.point(s), self.rank, t, h)
    }
}

/// `‖P_½(supp c(t)) c̈(t)‖` for any curve `c` whose points have support rank `rank`.
pub fn curve_residual<T: Real, F>(curve: F, rank: usize, t: T, h: T) -> Result<T>
where
    F: Fn(T) -> Result<ComplexMatrix<T>>,
{
    let g0 = curve(t)?;
    let gp = curve(t + h)?;
    let gm = curve(t - h)?;
    let accel = (gp + gm - &g0 * real(T::lit(2.0))) / real(h * h);
    let (l, r) = range_projectors(&g0, rank);
    Ok(peirce_half_with(&l, &r, &accel).norm())
}

pub fn geodesic<T: Real>(
    a: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Geodesic<T>> {
    Geodesic::new(BasePoint::normal(a, tol)?, u.clone(), tol)
}

pub fn geodesic_point<T: Real>(g: &Geodesic<T>, t: T) -> Result<ComplexMatrix<T>> {
    g.point(t)
}

pub fn geodesic_residual<T: Real>(g: &Geodesic<T>, t: T, fd_step: T) -> Result<T> {
    g.residual(t, fd_step)
}
