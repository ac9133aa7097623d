//! Components of normal algebraic elements as manifolds: tangent spaces, the linearisation
//! `Φ_a`, charts, the trace metric and the Peirce symmetry.
//!
//! A point is stored with its resolution `a = Σ λ_k e_k` and support `s = Σ e_k`. For a
//! normal square matrix the `e_k` are spectral projections; for a rectangular element they
//! are the tripotents of its singular value decomposition.

mod connection;
mod geodesic;

pub use connection::{
    check_hermitian_connection, check_metric_compatibility, connection, lie_bracket, torsion,
    VectorField,
};
pub use geodesic::{curve_residual, geodesic, geodesic_point, geodesic_residual, Geodesic};

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, inner, mat_exp, ComplexMatrix, Tolerance};
use crate::peirce::{peirce_projections, PeirceIndex};
use crate::random::Sampler;
use crate::scalar::{real, Real};
use crate::spectral::spectral_resolution;
use crate::triple::{triple_unchecked, Tripotent};

/// A point `a = Σ λ_k e_k` with `e_k` pairwise orthogonal tripotents and `λ_k ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePoint<T: Real> {
    point: ComplexMatrix<T>,
    values: Vec<Complex<T>>,
    tripotents: Vec<ComplexMatrix<T>>,
    support: ComplexMatrix<T>,
    left: ComplexMatrix<T>,
    right: ComplexMatrix<T>,
}

impl<T: Real> BasePoint<T> {
    /// Resolves a normal square matrix through its spectral projections.
    pub fn normal(a: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        let r = spectral_resolution(a, tol)?;
        if r.is_empty() {
            return Err(Error::ZeroElement);
        }
        Ok(Self::from_parts(a.clone(), r.values, r.projections))
    }

    /// Builds a point from an explicit resolution; the caller guarantees orthogonality.
    pub fn from_parts(
        point: ComplexMatrix<T>,
        values: Vec<Complex<T>>,
        tripotents: Vec<ComplexMatrix<T>>,
    ) -> Self {
        let (p, q) = point.shape();
        let support = tripotents
            .iter()
            .fold(DMatrix::zeros(p, q), |acc, e| acc + e);
        let left = &support * support.adjoint();
        let right = support.adjoint() * &support;
        Self {
            point,
            values,
            tripotents,
            support,
            left,
            right,
        }
    }

    pub fn point(&self) -> &ComplexMatrix<T> {
        &self.point
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn tripotents(&self) -> &[ComplexMatrix<T>] {
        &self.tripotents
    }

    pub fn support(&self) -> &ComplexMatrix<T> {
        &self.support
    }

    pub fn shape(&self) -> (usize, usize) {
        self.point.shape()
    }

    /// `min_k |λ_k|`.
    pub fn min_modulus(&self) -> T {
        self.values
            .iter()
            .map(|l| l.modulus())
            .fold(T::max_value().unwrap_or_else(T::one), |x, y| x.min(y))
    }

    /// `P_½(s) z = L z (1 − R) + (1 − L) z R` with `L = ss*`, `R = s*s`.
    pub fn peirce_half(&self, z: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        peirce_half_with(&self.left, &self.right, z)
    }

    /// `P_1(s) z = L z R`.
    pub fn peirce_one(&self, z: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &self.left * z * &self.right
    }

    /// `‖2{s s u} − u‖`, zero exactly on `Z_½(s)`.
    pub fn tangent_residual(&self, u: &ComplexMatrix<T>) -> T {
        let twice = &self.left * u + u * &self.right;
        (twice - u).norm()
    }

    pub fn is_tangent(&self, u: &ComplexMatrix<T>, tol: &Tolerance<T>) -> bool {
        u.shape() == self.shape() && self.tangent_residual(u) <= tol.abs * u.norm().max(T::one())
    }

    fn require_tangent(&self, u: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<()> {
        if u.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: u.shape(),
            });
        }
        ensure_finite(u)?;
        let residual = self.tangent_residual(u);
        if residual > tol.abs * u.norm().max(T::one()) {
            return Err(Error::NotTangent {
                residual: residual.as_f64(),
            });
        }
        Ok(())
    }

    /// `u_k = e_k e_k* u + u e_k* e_k`.
    pub fn decompose(&self, u: &ComplexMatrix<T>) -> Vec<ComplexMatrix<T>> {
        self.tripotents
            .iter()
            .map(|e| e * e.adjoint() * u + u * e.adjoint() * e)
            .collect()
    }

    /// `Φ_a(x) = {s x a} − {x s a}`.
    pub fn phi(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        triple_unchecked(&self.support, x, &self.point)
            - triple_unchecked(x, &self.support, &self.point)
    }

    /// The inverse of `Φ_a` on `Z_½(s)`: `x = Σ −2 y_k / λ_k`.
    pub fn phi_inverse(&self, y: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let (p, q) = self.shape();
        self.decompose(y)
            .iter()
            .zip(&self.values)
            .fold(DMatrix::zeros(p, q), |acc, (yk, l)| {
                acc + yk * (real(T::lit(-2.0)) / *l)
            })
    }

    /// `(A, B)` with `g(x, y) z = A z + z B`.
    pub fn derivation_factors(&self, u: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
        derivation_factors(&self.support, u)
    }

    /// `exp(g(s, u)) a = e^A a e^B`.
    pub fn chart(&self, u: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let (a, b) = self.derivation_factors(u);
        Ok(mat_exp(&a)? * &self.point * mat_exp(&b)?)
    }

    /// `S z = z − 2 P_½(s) z`.
    pub fn symmetry(&self, z: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        z - self.peirce_half(z) * real(T::lit(2.0))
    }
}

pub(crate) fn peirce_half_with<T: Real>(
    left: &ComplexMatrix<T>,
    right: &ComplexMatrix<T>,
    z: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let lz = left * z;
    let zr = z * right;
    let lzr = &lz * right;
    lz + zr - lzr * real(T::lit(2.0))
}

/// `g(x, y) = x□y − y□x` acts as `z ↦ A z + z B` with `A = ½(xy* − yx*)`, `B = ½(y*x − x*y)`.
pub fn derivation_factors<T: Real>(
    x: &ComplexMatrix<T>,
    y: &ComplexMatrix<T>,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let half = real(T::lit(0.5));
    let a = (x * y.adjoint() - y * x.adjoint()) * half;
    let b = (y.adjoint() * x - x.adjoint() * y) * half;
    (a, b)
}

/// Rank of the support tripotent.
pub(crate) fn support_rank<T: Real>(base: &BasePoint<T>) -> usize {
    let (p, q) = base.shape();
    crate::linalg::numerical_rank(
        base.support(),
        crate::linalg::projection_rank_threshold(p.max(q)),
    )
}

/// Tangency verdict with the decomposition `u = Σ u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDecomposition<T: Real> {
    pub tangent: bool,
    /// `‖2{s s u} − u‖`.
    pub residual: T,
    pub components: Vec<ComplexMatrix<T>>,
    /// Worst of `‖Σ u_k − u‖`, `‖e_j* u_k‖`, `‖u_k e_j*‖` (`j ≠ k`) and `‖P_½(e_k) u_k − u_k‖`.
    pub relation_residual: T,
}

/// A vector checked against `Z_½(supp a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T: Real> {
    pub base: ComplexMatrix<T>,
    pub vector: ComplexMatrix<T>,
    pub verified: bool,
}

impl<T: Real> TangentVector<T> {
    pub fn new(a: &ComplexMatrix<T>, u: ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        BasePoint::normal(a, tol)?.require_tangent(&u, tol)?;
        Ok(Self {
            base: a.clone(),
            vector: u,
            verified: true,
        })
    }
}

/// Frobenius-orthonormal complex basis of `Z_½(supp a)`.
pub fn tangent_space_basis<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<ComplexMatrix<T>>> {
    let base = BasePoint::normal(a, tol)?;
    let e = Tripotent::new(base.support().clone(), tol)?;
    Ok(peirce_projections(&e)?.basis(PeirceIndex::Half).to_vec())
}

pub fn is_tangent<T: Real>(
    a: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<TangentDecomposition<T>> {
    let base = BasePoint::normal(a, tol)?;
    decompose_tangent(&base, u, tol)
}

pub(crate) fn decompose_tangent<T: Real>(
    base: &BasePoint<T>,
    u: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<TangentDecomposition<T>> {
    if u.shape() != base.shape() {
        return Err(Error::ShapeMismatch {
            expected: base.shape(),
            found: u.shape(),
        });
    }
    let residual = base.tangent_residual(u);
    let components = base.decompose(u);
    let (p, q) = base.shape();
    let sum = components
        .iter()
        .fold(DMatrix::zeros(p, q), |acc, c| acc + c);
    let mut relation = (sum - u).norm();
    for (k, uk) in components.iter().enumerate() {
        let ek = &base.tripotents[k];
        let lk = ek * ek.adjoint();
        let rk = ek.adjoint() * ek;
        relation = relation.max((peirce_half_with(&lk, &rk, uk) - uk).norm());
        for (j, ej) in base.tripotents.iter().enumerate() {
            if j != k {
                relation = relation
                    .max((ej.adjoint() * uk).norm())
                    .max((uk * ej.adjoint()).norm());
            }
        }
    }
    let tangent = residual <= tol.abs * u.norm().max(T::one());
    Ok(TangentDecomposition {
        tangent,
        residual,
        components: if tangent { components } else { Vec::new() },
        relation_residual: relation,
    })
}

/// `Φ_a(x) = {s x a} − {x s a}` with `s = supp a`.
pub fn phi<T: Real>(
    a: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    if x.shape() != base.shape() {
        return Err(Error::ShapeMismatch {
            expected: base.shape(),
            found: x.shape(),
        });
    }
    Ok(base.phi(x))
}

/// `x ∈ Z_½(supp a)` with `Φ_a(x) = y`.
pub fn phi_restricted_inverse<T: Real>(
    a: &ComplexMatrix<T>,
    y: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    base.require_tangent(y, tol)?;
    Ok(base.phi_inverse(y))
}

/// `(exp g(supp a, u)) a`.
pub fn chart<T: Real>(
    a: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    base.require_tangent(u, tol)?;
    base.chart(u)
}

/// Solves `chart(a, u) = b` for a tangent `u` with `‖u‖ ≤ ½ min|λ_k|`.
///
/// Iterates `u ← u + θ Φ_a⁻¹ P_½(s)(b − chart(a, u))`, halving `θ` whenever the residual grows.
pub fn chart_inverse<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    chart_inverse_at(&base, b, tol)
}

pub(crate) fn chart_inverse_at<T: Real>(
    base: &BasePoint<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    if b.shape() != base.shape() {
        return Err(Error::ShapeMismatch {
            expected: base.shape(),
            found: b.shape(),
        });
    }
    ensure_finite(b)?;
    let radius = base.min_modulus() * T::lit(0.5);
    let target = tol.bound(b.norm());
    let mut u = base.phi_inverse(&base.peirce_half(&(b - base.point())));
    let mut residual = (base.chart(&u)? - b).norm();
    let mut theta = T::one();
    for _ in 0..200 {
        if u.norm() > radius {
            return Err(Error::NoConvergence);
        }
        if residual <= target {
            return Ok(u);
        }
        let step = base.phi_inverse(&base.peirce_half(&(b - base.chart(&u)?)));
        let candidate = &u + &step * real(theta);
        let r = (base.chart(&candidate)? - b).norm();
        if r < residual {
            u = candidate;
            residual = r;
            theta = (theta * T::lit(2.0)).min(T::one());
        } else {
            theta *= T::lit(0.5);
            if theta < T::lit(1e-6) {
                break;
            }
        }
    }
    if residual <= target && u.norm() <= radius {
        Ok(u)
    } else {
        Err(Error::NoConvergence)
    }
}

/// `(trace(v* u), Re trace(v* u))` for tangent `u`, `v`.
pub fn riemann_metric<T: Real>(
    a: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<(Complex<T>, T)> {
    let base = BasePoint::normal(a, tol)?;
    base.require_tangent(u, tol)?;
    base.require_tangent(v, tol)?;
    let h = inner(u, v);
    Ok((h, h.re))
}

/// The Peirce reflection of `supp a` applied to `z`.
pub fn symmetry_at<T: Real>(
    a: &ComplexMatrix<T>,
    z: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let base = BasePoint::normal(a, tol)?;
    if z.shape() != base.shape() {
        return Err(Error::ShapeMismatch {
            expected: base.shape(),
            found: z.shape(),
        });
    }
    Ok(base.symmetry(z))
}

/// Smallest singular value of `u ↦ Φ_a(u)` on `Z_½(supp a)`, in an orthonormal basis.
///
/// Returns `None` when the tangent space is trivial.
pub fn phi_min_singular_value<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Option<T>> {
    let base = BasePoint::normal(a, tol)?;
    let basis = tangent_space_basis(a, tol)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let images: Vec<ComplexMatrix<T>> = basis.iter().map(|b| base.phi(b)).collect();
    let m = DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        inner(&images[j], &basis[i])
    });
    Ok(crate::linalg::singular_values(&m).last().copied())
}

/// Random unit vector of `Z_½(s)`; hermitian when `selfadjoint` and the point is square.
pub fn sample_tangent<T: Real>(
    base: &BasePoint<T>,
    sampler: &mut Sampler,
    selfadjoint: bool,
) -> ComplexMatrix<T> {
    let (p, q) = base.shape();
    let mut u = base.peirce_half(&sampler.ginibre(p, q));
    if selfadjoint && p == q {
        u = (&u + u.adjoint()) * real(T::lit(0.5));
    }
    let n = u.norm();
    if n > T::zero() {
        u / real(n)
    } else {
        u
    }
}

/// `Φ_a(iv + u)` by the closed form `−2i Σ λ_k v_k − ½ Σ λ_k u_k`.
pub fn phi_closed_form<T: Real>(
    base: &BasePoint<T>,
    v_parts: &[ComplexMatrix<T>],
    u: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let (p, q) = base.shape();
    let mut out = DMatrix::zeros(p, q);
    for (vk, l) in v_parts.iter().zip(base.values()) {
        out += vk * (Complex::new(T::zero(), T::lit(-2.0)) * *l);
    }
    for (uk, l) in base.decompose(u).iter().zip(base.values()) {
        out += uk * (real(T::lit(-0.5)) * *l);
    }
    out
}
