//! Algebraic elements of the rectangular Cartan factors `L(ℂ^q, ℂ^p)`: tripotent spectral
//! resolutions, components `N(n, Λ, R)`, the extended tangent space, Neher equivalence, fibers
//! and the base manifold.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_same_shape, mat_exp, orthonormal_complement, singular_triplets,
    ComplexMatrix, Tolerance,
};
use crate::manifold::{derivation_factors, BasePoint, Geodesic};
use crate::peirce::{
    joint_peirce, peirce_part, peirce_projections, selfadjoint_split, sharp, PeirceIndex,
};
use crate::scalar::{real, Real};
use crate::spectral::ComponentSignature;
use crate::triple::{
    box_op, inner_derivation, triple_exp, triple_product, triple_unchecked, Tripotent,
};

/// `a = Σ λ_k e_k` with `0 < λ_1 < ⋯ < λ_n` and pairwise orthogonal tripotents `e_k = A_k A'_k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripotentResolution<T: Real> {
    pub values: Vec<T>,
    pub tripotents: Vec<ComplexMatrix<T>>,
    pub ranks: Vec<usize>,
    left: Vec<ComplexMatrix<T>>,
    right: Vec<ComplexMatrix<T>>,
    shape: (usize, usize),
}

impl<T: Real> TripotentResolution<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Orthonormal frames `(A_k, A'_k)` with `e_k = A_k A'_k*`.
    pub fn frames(&self, k: usize) -> (&ComplexMatrix<T>, &ComplexMatrix<T>) {
        (&self.left[k], &self.right[k])
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let (p, q) = self.shape;
        self.values
            .iter()
            .zip(&self.tripotents)
            .fold(DMatrix::zeros(p, q), |acc, (l, e)| acc + e * real(*l))
    }

    /// `Σ e_k`.
    pub fn support(&self) -> ComplexMatrix<T> {
        let (p, q) = self.shape;
        self.tripotents
            .iter()
            .fold(DMatrix::zeros(p, q), |acc, e| acc + e)
    }

    pub fn signature(&self) -> ComponentSignature<T> {
        ComponentSignature::new(
            self.values
                .iter()
                .map(|&l| Complex::new(l, T::zero()))
                .collect(),
            self.ranks.clone(),
        )
    }

    /// `max_{j≠k} max(‖e_j e_k*‖, ‖e_k* e_j‖)`; zero iff `e_j□e_k = 0` for all `j ≠ k`.
    pub fn orthogonality_residual(&self) -> T {
        let mut worst = T::zero();
        for (j, ej) in self.tripotents.iter().enumerate() {
            for ek in self.tripotents.iter().skip(j + 1) {
                worst = worst
                    .max((ej * ek.adjoint()).norm())
                    .max((ek.adjoint() * ej).norm());
            }
        }
        worst
    }

    pub fn base_point(&self) -> BasePoint<T> {
        BasePoint::from_parts(
            self.reconstruct(),
            self.values.iter().map(|&l| real(l)).collect(),
            self.tripotents.clone(),
        )
    }

    /// `x ↦ A_k* x A'_k`, the coordinates of `Z_1(e_k)` as `r_k × r_k` matrices.
    pub fn peirce_one_coordinates(&self, k: usize, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.left[k].adjoint() * x * &self.right[k]
    }

    /// Inverse of [`Self::peirce_one_coordinates`].
    pub fn from_peirce_one_coordinates(&self, k: usize, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &self.left[k] * x * self.right[k].adjoint()
    }

    fn peirce_one(&self, k: usize, z: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let l = &self.left[k];
        let r = &self.right[k];
        l * (l.adjoint() * z * r) * r.adjoint()
    }
}

/// Tripotent resolution from the singular value decomposition; singular values within
/// `tol.cluster_radius()` of each other (transitively) are merged and those below it dropped.
pub fn jb_spectral<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<TripotentResolution<T>> {
    ensure_finite(a)?;
    let radius = tol.cluster_radius();
    let st = singular_triplets(a);
    let mut idx: Vec<usize> = (0..st.values.len())
        .filter(|&i| st.values[i] > radius)
        .collect();
    if idx.is_empty() {
        return Err(Error::ZeroElement);
    }
    idx.sort_by(|&i, &j| {
        st.values[i]
            .partial_cmp(&st.values[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        match clusters.last_mut() {
            Some(c) if st.values[i] - st.values[*c.last().unwrap_or(&i)] <= radius => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let mut values = Vec::with_capacity(clusters.len());
    let mut tripotents = Vec::with_capacity(clusters.len());
    let mut ranks = Vec::with_capacity(clusters.len());
    let mut left = Vec::with_capacity(clusters.len());
    let mut right = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mean = c.iter().fold(T::zero(), |acc, &i| acc + st.values[i]) / T::lit(c.len() as f64);
        let l = DMatrix::from_columns(
            &c.iter()
                .map(|&i| st.left.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        let r = DMatrix::from_columns(
            &c.iter()
                .map(|&i| st.right.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        values.push(mean);
        tripotents.push(&l * r.adjoint());
        ranks.push(c.len());
        left.push(l);
        right.push(r);
    }
    Ok(TripotentResolution {
        values,
        tripotents,
        ranks,
        left,
        right,
        shape: a.shape(),
    })
}

/// `a^(2l+1)` by `a^(2m+1) = {a, a^(2m−1), a}`.
pub fn odd_power<T: Real>(a: &ComplexMatrix<T>, l: usize) -> ComplexMatrix<T> {
    let mut p = a.clone();
    for _ in 0..l {
        p = triple_unchecked(a, &p, a);
    }
    p
}

/// `‖a^(2l+1) − Σ λ_k^{2l+1} e_k‖ / max(1, λ_n^{2l+1})` for `a` the element resolved by `r`.
pub fn odd_power_residual<T: Real>(
    a: &ComplexMatrix<T>,
    r: &TripotentResolution<T>,
    l: usize,
) -> Result<T> {
    if a.shape() != r.shape() {
        return Err(Error::ShapeMismatch {
            expected: r.shape(),
            found: a.shape(),
        });
    }
    Ok(odd_power_unchecked(a, r, l))
}

fn odd_power_unchecked<T: Real>(a: &ComplexMatrix<T>, r: &TripotentResolution<T>, l: usize) -> T {
    let exponent = (2 * l + 1) as i32;
    let (p, q) = r.shape();
    let expected = r
        .values
        .iter()
        .zip(&r.tripotents)
        .fold(DMatrix::zeros(p, q), |acc, (lam, e)| {
            acc + e * real(lam.powi(exponent))
        });
    let scale = r
        .values
        .last()
        .map_or(T::one(), |m| m.powi(exponent).max(T::one()));
    (odd_power(a, l) - expected).norm() / scale
}

/// [`odd_power_residual`] for the element `Σ λ_k e_k` itself.
pub fn odd_power_check<T: Real>(r: &TripotentResolution<T>, l: usize) -> T {
    odd_power_unchecked(&r.reconstruct(), r, l)
}

/// `(n, Λ, R)` with real increasing `Λ`.
pub fn jb_signature<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComponentSignature<T>> {
    Ok(jb_spectral(a, tol)?.signature())
}

/// True iff `a` and `b` lie in the same component `N(n, Λ, R)`.
pub fn jb_same_component<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<bool> {
    ensure_same_shape(a, b)?;
    let sa = jb_signature(a, tol)?;
    let sb = jb_signature(b, tol)?;
    Ok(sa.matches(&sb, tol.cluster_radius()))
}

fn matched<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<(TripotentResolution<T>, TripotentResolution<T>, Vec<usize>)> {
    ensure_same_shape(a, b)?;
    let ra = jb_spectral(a, tol)?;
    let rb = jb_spectral(b, tol)?;
    let map = ra
        .signature()
        .matching(&rb.signature(), tol.cluster_radius())
        .ok_or(Error::DifferentComponents)?;
    Ok((ra, rb, map))
}

/// Unitaries `(U, V)` with `V a U = b`: `V` carries the range frames of `a` onto those of `b`,
/// `U*` the domain frames, each completed arbitrarily on the orthogonal complement.
pub fn connect_type1<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let (ra, rb, map) = matched(a, b, tol)?;
    let stack = |frames: Vec<&ComplexMatrix<T>>| -> ComplexMatrix<T> {
        let cols: Vec<_> = frames
            .iter()
            .flat_map(|f| f.column_iter().map(|c| c.into_owned()))
            .collect();
        let m = DMatrix::from_columns(&cols);
        let comp = orthonormal_complement(&m);
        let mut all = cols;
        all.extend(comp.column_iter().map(|c| c.into_owned()));
        DMatrix::from_columns(&all)
    };
    let a_left = stack(ra.left.iter().collect());
    let a_right = stack(ra.right.iter().collect());
    let b_left = stack(map.iter().map(|&j| &rb.left[j]).collect());
    let b_right = stack(map.iter().map(|&j| &rb.right[j]).collect());
    let v = &b_left * a_left.adjoint();
    let u = &a_right * b_right.adjoint();
    Ok((u, v))
}

/// `‖V a U − b‖`.
pub fn connect_residual<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
) -> T {
    (v * a * u - b).norm()
}

/// A vector `i Σ v_k + u` of `(⊕ iA(e_k)) ⊕ Z_½(supp a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedTangent<T: Real> {
    pub base: ComplexMatrix<T>,
    /// `v_k ∈ A(e_k)`, one per spectral value.
    pub ia_part: Vec<ComplexMatrix<T>>,
    pub half_part: ComplexMatrix<T>,
}

impl<T: Real> ExtendedTangent<T> {
    /// Splits `z` as `i Σ v_k + u`, failing with `NotTangent` when `z` has other components.
    pub fn split(
        r: &TripotentResolution<T>,
        z: &ComplexMatrix<T>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        if z.shape() != r.shape() {
            return Err(Error::ShapeMismatch {
                expected: r.shape(),
                found: z.shape(),
            });
        }
        ensure_finite(z)?;
        let residual = extended_tangent_residual(r, z);
        if residual > tol.abs * z.norm().max(T::one()) {
            return Err(Error::NotTangent {
                residual: residual.as_f64(),
            });
        }
        let minus_i = Complex::new(T::zero(), -T::one());
        let ia_part = (0..r.len()).map(|k| r.peirce_one(k, z) * minus_i).collect();
        let half_part = r.base_point().peirce_half(z);
        Ok(Self {
            base: r.reconstruct(),
            ia_part,
            half_part,
        })
    }

    pub fn vector(&self) -> ComplexMatrix<T> {
        let i = Complex::new(T::zero(), T::one());
        self.ia_part
            .iter()
            .fold(self.half_part.clone(), |acc, v| acc + v * i)
    }
}

/// Worst of `‖z − Σ P_1(e_k) z − P_½(s) z‖` and `‖(P_1(e_k) z)^# + P_1(e_k) z‖`.
pub fn extended_tangent_residual<T: Real>(r: &TripotentResolution<T>, z: &ComplexMatrix<T>) -> T {
    let base = r.base_point();
    let mut rest = z - base.peirce_half(z);
    let mut worst = T::zero();
    for (k, e) in r.tripotents.iter().enumerate() {
        let zk = r.peirce_one(k, z);
        worst = worst.max((sharp(e, &zk) + &zk).norm());
        rest -= zk;
    }
    worst.max(rest.norm())
}

/// Real basis of the extended tangent space, orthonormal for `Re trace(v* u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedTangentBasis<T: Real> {
    /// `i A_k H A'_k*` for an orthonormal basis `H` of the hermitian `r_k × r_k` matrices.
    pub fiber: Vec<Vec<ComplexMatrix<T>>>,
    /// `{w, i w}` for a complex orthonormal basis `w` of `Z_½(supp a)`.
    pub half: Vec<ComplexMatrix<T>>,
    resolution: TripotentResolution<T>,
}

impl<T: Real> ExtendedTangentBasis<T> {
    /// Real dimension `Σ r_k² + 2 dim_ℂ Z_½(supp a)`.
    pub fn dim(&self) -> usize {
        self.fiber.iter().map(Vec::len).sum::<usize>() + self.half.len()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &ComplexMatrix<T>> {
        self.fiber.iter().flatten().chain(&self.half)
    }

    pub fn resolution(&self) -> &TripotentResolution<T> {
        &self.resolution
    }

    pub fn contains(&self, z: &ComplexMatrix<T>, tol: &Tolerance<T>) -> bool {
        z.shape() == self.resolution.shape()
            && extended_tangent_residual(&self.resolution, z) <= tol.abs * z.norm().max(T::one())
    }
}

/// Orthonormal basis of the hermitian `r × r` matrices for the real trace form.
fn hermitian_basis<T: Real>(r: usize) -> Vec<ComplexMatrix<T>> {
    let mut out = Vec::with_capacity(r * r);
    let s = real(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    for j in 0..r {
        for k in j..r {
            if j == k {
                out.push(crate::linalg::unit(r, r, j, j));
            } else {
                let e = crate::linalg::unit::<T>(r, r, j, k);
                out.push((&e + e.adjoint()) * s);
                out.push(
                    (&e - e.adjoint())
                        * Complex::new(T::zero(), T::lit(std::f64::consts::FRAC_1_SQRT_2)),
                );
            }
        }
    }
    out
}

pub fn extended_tangent_basis<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ExtendedTangentBasis<T>> {
    let r = jb_spectral(a, tol)?;
    let i = Complex::new(T::zero(), T::one());
    let fiber = (0..r.len())
        .map(|k| {
            hermitian_basis::<T>(r.ranks[k])
                .iter()
                .map(|h| r.from_peirce_one_coordinates(k, h) * i)
                .collect()
        })
        .collect();
    let s = Tripotent::new(r.support(), tol)?;
    let half = peirce_projections(&s)?
        .basis(PeirceIndex::Half)
        .iter()
        .flat_map(|w| [w.clone(), w * i])
        .collect();
    Ok(ExtendedTangentBasis {
        fiber,
        half,
        resolution: r,
    })
}

/// `(exp g(supp a, z)) a` for `z` in the extended tangent space.
pub fn chart_ext<T: Real>(
    a: &ComplexMatrix<T>,
    z: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let r = jb_spectral(a, tol)?;
    ExtendedTangent::split(&r, z, tol)?;
    let (left, right) = derivation_factors(&r.support(), z);
    Ok(mat_exp(&left)? * a * mat_exp(&right)?)
}

/// Both formulations of Neher equivalence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeherCheck<T> {
    /// `‖e□e − f□f‖` on kernels.
    pub box_residual: T,
    /// `max(‖P_1(f) e − e‖, ‖P_1(e) f − f‖)`.
    pub peirce_residual: T,
}

pub fn neher_residuals<T: Real>(e: &Tripotent<T>, f: &Tripotent<T>) -> Result<NeherCheck<T>> {
    ensure_same_shape(e.matrix(), f.matrix())?;
    let box_residual = (box_op(e.matrix(), e.matrix())?.kernel()
        - box_op(f.matrix(), f.matrix())?.kernel())
    .norm();
    let fe = peirce_part(f, e.matrix(), PeirceIndex::One)?;
    let ef = peirce_part(e, f.matrix(), PeirceIndex::One)?;
    let peirce_residual = (fe - e.matrix()).norm().max((ef - f.matrix()).norm());
    Ok(NeherCheck {
        box_residual,
        peirce_residual,
    })
}

/// `e ∼ f` iff `e□e = f□f`.
pub fn neher_equivalent<T: Real>(
    e: &Tripotent<T>,
    f: &Tripotent<T>,
    tol: &Tolerance<T>,
) -> Result<bool> {
    Ok(neher_residuals(e, f)?.box_residual <= tol.bound(T::one()))
}

/// `e ∼ f` iff `e ∈ Z_1(f)` and `f ∈ Z_1(e)`.
pub fn neher_equivalent_peirce<T: Real>(
    e: &Tripotent<T>,
    f: &Tripotent<T>,
    tol: &Tolerance<T>,
) -> Result<bool> {
    Ok(neher_residuals(e, f)?.peirce_residual <= tol.bound(T::one()))
}

/// `a ∼ b` iff the tripotents attached to equal spectral values are Neher equivalent.
pub fn equivalent_elements<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<bool> {
    let (ra, rb, map) = matched(a, b, tol)?;
    for (k, &j) in map.iter().enumerate() {
        let e = Tripotent::new(ra.tripotents[k].clone(), tol)?;
        let f = Tripotent::new(rb.tripotents[j].clone(), tol)?;
        if !neher_equivalent(&e, &f, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A point of the fiber through `a` with its factorization over the unit circles of `Z_1(e_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSample<T: Real> {
    /// `exp(t g(supp a, iv)) a`.
    pub point: ComplexMatrix<T>,
    /// `ψ_k(t) = exp(t g(e_k, iv_k)) e_k`.
    pub factors: Vec<ComplexMatrix<T>>,
    pub parts: Vec<ComplexMatrix<T>>,
    /// `‖point − Σ λ_k ψ_k‖`.
    pub factorization_residual: T,
    /// `max_k ‖ψ_k − P_1(e_k) ψ_k‖`.
    pub membership_residual: T,
    /// `max_k ‖ψ_k^# − ψ_k^{-1}‖`, the inverse taken in `r_k × r_k` coordinates of `Z_1(e_k)`.
    pub unit_circle_residual: T,
    /// `max_k ‖{ψ_k e_k ψ_k^#} − e_k‖`.
    pub jordan_unit_residual: T,
}

/// Splits `v ∈ ⊕ A(e_k)` with the joint Peirce projections; `NotInA` otherwise.
pub fn split_fiber_direction<T: Real>(
    r: &TripotentResolution<T>,
    v: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<ComplexMatrix<T>>> {
    ensure_same_shape(&r.reconstruct(), v)?;
    ensure_finite(v)?;
    let family: Vec<Tripotent<T>> = r
        .tripotents
        .iter()
        .map(|e| Tripotent::new(e.clone(), tol))
        .collect::<Result<_>>()?;
    let joint = joint_peirce(&family, tol)?;
    let bound = tol.abs * v.norm().max(T::one());
    let mut rest = v.clone();
    let mut parts = Vec::with_capacity(r.len());
    for (k, e) in family.iter().enumerate() {
        let Some(p) = joint.projection(k + 1, k + 1) else {
            return Err(Error::NotInA {
                residual: f64::INFINITY,
            });
        };
        let vk = p.apply(v)?;
        let (h, skew) = selfadjoint_split(e, &vk, tol).map_err(|_| Error::NotInA {
            residual: f64::INFINITY,
        })?;
        if skew.norm() > bound {
            return Err(Error::NotInA {
                residual: skew.norm().as_f64(),
            });
        }
        rest -= &vk;
        parts.push(h);
    }
    if rest.norm() > bound {
        return Err(Error::NotInA {
            residual: rest.norm().as_f64(),
        });
    }
    Ok(parts)
}

pub fn fiber_sample<T: Real>(
    a: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    t: T,
    tol: &Tolerance<T>,
) -> Result<FiberSample<T>> {
    let r = jb_spectral(a, tol)?;
    let parts = split_fiber_direction(&r, v, tol)?;
    let i = Complex::new(T::zero(), T::one());
    let s = r.support();
    let point = triple_exp(&inner_derivation(&s, &(v * i))?, t)?.apply(a)?;

    let (p, q) = r.shape();
    let mut factors = Vec::with_capacity(r.len());
    let mut sum = DMatrix::zeros(p, q);
    let mut membership = T::zero();
    let mut unit_circle = T::zero();
    let mut jordan_unit = T::zero();
    for (k, e) in r.tripotents.iter().enumerate() {
        let (left, right) = derivation_factors(e, &(&parts[k] * i));
        let tc = real(t);
        let psi = mat_exp(&(left * tc))? * e * mat_exp(&(right * tc))?;
        membership = membership.max((&psi - r.peirce_one(k, &psi)).norm());
        let psi_sharp = sharp(e, &psi);
        let coords = r.peirce_one_coordinates(k, &psi);
        let inv = coords.clone().try_inverse().ok_or(Error::Singular)?;
        unit_circle = unit_circle.max((r.peirce_one_coordinates(k, &psi_sharp) - inv).norm());
        jordan_unit = jordan_unit.max((triple_product(&psi, e, &psi_sharp)? - e).norm());
        sum += &psi * real(r.values[k]);
        factors.push(psi);
    }
    Ok(FiberSample {
        factorization_residual: (&point - sum).norm(),
        point,
        factors,
        parts,
        membership_residual: membership,
        unit_circle_residual: unit_circle,
        jordan_unit_residual: jordan_unit,
    })
}

/// The geodesic `t ↦ (exp t g(supp a, u)) a` of the base manifold, `u ∈ Z_½(supp a)`.
pub fn base_geodesic<T: Real>(
    a: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Geodesic<T>> {
    let r = jb_spectral(a, tol)?;
    let base = BasePoint::from_parts(
        a.clone(),
        r.values.iter().map(|&l| real(l)).collect(),
        r.tripotents.clone(),
    );
    Geodesic::new(base, u.clone(), tol)
}

#[cfg(test)]
mod tests;
