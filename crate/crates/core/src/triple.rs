//! The JB*-triple structure of a rectangular matrix space: `2{abc} = ab*c + cb*a`.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_same_shape, numerical_rank, operator_norm, projection_rank_threshold,
    ComplexMatrix, Linearity, SuperOperator, Tolerance,
};
use crate::scalar::{real, Real};

/// `{abc} = (a b* c + c b* a) / 2`.
///
/// Both terms are formed the same way, so swapping `a` and `c` gives a bitwise identical result.
pub fn triple_product<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    c: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    ensure_same_shape(a, b)?;
    ensure_same_shape(a, c)?;
    Ok(triple_unchecked(a, b, c))
}

pub(crate) fn triple_unchecked<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    c: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let bh = b.adjoint();
    let left = a * &bh * c;
    let right = c * &bh * a;
    (left + right) * real(T::lit(0.5))
}

/// The box operator `a□b : z ↦ {abz}`, complex-linear.
pub fn box_op<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<SuperOperator<T>> {
    ensure_same_shape(a, b)?;
    let (m, n) = a.shape();
    let bh = b.adjoint();
    let left = SuperOperator::sandwich(&(a * &bh), &DMatrix::identity(n, n));
    let right = SuperOperator::sandwich(&DMatrix::identity(m, m), &(&bh * a));
    Ok(left.add(&right)?.scale(real(T::lit(0.5))))
}

/// The conjugate-linear quadratic operator `Q(a,b) : z ↦ {azb}`.
pub fn quad<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<SuperOperator<T>> {
    ensure_same_shape(a, b)?;
    let shape = a.shape();
    Ok(SuperOperator::from_fn(
        shape,
        shape,
        Linearity::ConjugateLinear,
        |z| triple_unchecked(a, z, b),
    ))
}

/// `‖{eee} − e‖_F`.
pub fn tripotent_residual<T: Real>(e: &ComplexMatrix<T>) -> T {
    (triple_unchecked(e, e, e) - e).norm()
}

/// True iff `{eee} = e` within `tol` (relative to `‖e‖`); equivalently `e` is a partial isometry.
pub fn is_tripotent<T: Real>(e: &ComplexMatrix<T>, tol: &Tolerance<T>) -> bool {
    is_finite_matrix(e) && tripotent_residual(e) <= tol.bound(e.norm())
}

fn is_finite_matrix<T: Real>(m: &ComplexMatrix<T>) -> bool {
    crate::linalg::is_finite(m)
}

/// A verified tripotent (partial isometry) together with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Tripotent<T: Real> {
    matrix: ComplexMatrix<T>,
    rank: usize,
    minimal: bool,
}

impl<T: Real> Tripotent<T> {
    pub fn new(matrix: ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        ensure_finite(&matrix)?;
        let residual = tripotent_residual(&matrix);
        if residual > tol.bound(matrix.norm()) {
            return Err(Error::NotTripotent {
                residual: residual.as_f64(),
            });
        }
        let dim = matrix.nrows().max(matrix.ncols());
        let rank = numerical_rank(&matrix, projection_rank_threshold(dim));
        Ok(Self {
            matrix,
            rank,
            minimal: rank == 1,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank-one tripotents are the minimal ones in a rectangular matrix space.
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }
}

/// `x` and `y` are orthogonal iff `x□y = 0` (kernel Frobenius norm at most `tol.abs`).
pub fn are_orthogonal<T: Real>(
    x: &ComplexMatrix<T>,
    y: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<bool> {
    Ok(box_op(x, y)?.kernel_norm() <= tol.abs)
}

/// An inner derivation `g(e,u) = e□u − u□e` with the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<T: Real> {
    pub op: SuperOperator<T>,
    pub base: ComplexMatrix<T>,
    pub direction: ComplexMatrix<T>,
}

impl<T: Real> Derivation<T> {
    pub fn apply(&self, z: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.op.apply(z)
    }
}

/// `g(e, u) = e□u − u□e`.
pub fn inner_derivation<T: Real>(
    e: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
) -> Result<Derivation<T>> {
    let op = box_op(e, u)?.sub(&box_op(u, e)?)?;
    Ok(Derivation {
        op,
        base: e.clone(),
        direction: u.clone(),
    })
}

/// Outcome of a sampled identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck<T> {
    pub holds: bool,
    pub worst_residual: T,
}

fn require_linear<T: Real>(op: &SuperOperator<T>) -> Result<()> {
    if op.is_linear() {
        Ok(())
    } else {
        Err(Error::MixedLinearity)
    }
}

/// Checks `δ{zzz} = {(δz)zz} + {z(δz)z} + {zz(δz)}` on every sample.
pub fn is_triple_derivation<T: Real>(
    delta: &SuperOperator<T>,
    samples: &[ComplexMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<IdentityCheck<T>> {
    require_linear(delta)?;
    let mut worst = T::zero();
    for z in samples {
        let dz = delta.apply(z)?;
        let lhs = delta.apply(&triple_unchecked(z, z, z))?;
        let rhs =
            triple_unchecked(&dz, z, z) + triple_unchecked(z, &dz, z) + triple_unchecked(z, z, &dz);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(IdentityCheck {
        holds: worst <= tol.abs,
        worst_residual: worst,
    })
}

/// Checks the Leibniz rule `δ(xy) = δ(x)y + xδ(y)` on consecutive sample pairs.
pub fn is_cstar_derivation<T: Real>(
    delta: &SuperOperator<T>,
    samples: &[ComplexMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<IdentityCheck<T>> {
    require_linear(delta)?;
    let n = samples.len();
    let mut worst = T::zero();
    for i in 0..n {
        let x = &samples[i];
        let y = &samples[(i + 1) % n];
        if x.ncols() != y.nrows() {
            return Err(Error::NotSquare {
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        let lhs = delta.apply(&(x * y))?;
        let rhs = delta.apply(x)? * y + x * delta.apply(y)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(IdentityCheck {
        holds: worst <= tol.abs,
        worst_residual: worst,
    })
}

/// `exp(t · δ)`, a triple automorphism.
pub fn triple_exp<T: Real>(delta: &Derivation<T>, t: T) -> Result<SuperOperator<T>> {
    delta.op.scale(real(t)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomorphismCheck<T> {
    pub holds: bool,
    /// Worst `‖φ{zzz} − {φz φz φz}‖`.
    pub multiplicative_residual: T,
    /// Worst `|‖φz‖ − ‖z‖|` in operator norm.
    pub isometry_residual: T,
}

/// Sampled check that `φ` preserves the triple product and the operator norm.
pub fn is_triple_automorphism<T: Real>(
    phi: &SuperOperator<T>,
    samples: &[ComplexMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<AutomorphismCheck<T>> {
    require_linear(phi)?;
    if phi.dim_in() != phi.dim_out() || phi.min_singular_value() <= tol.abs {
        return Err(Error::Singular);
    }
    let mut mult = T::zero();
    let mut iso = T::zero();
    for z in samples {
        let pz = phi.apply(z)?;
        let lhs = phi.apply(&triple_unchecked(z, z, z))?;
        let rhs = triple_unchecked(&pz, &pz, &pz);
        mult = mult.max((lhs - rhs).norm());
        iso = iso.max((operator_norm(&pz) - operator_norm(z)).abs());
    }
    Ok(AutomorphismCheck {
        holds: mult <= tol.abs && iso <= tol.abs,
        multiplicative_residual: mult,
        isometry_residual: iso,
    })
}

/// Residuals of the four JB*-triple axioms on one quadruple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomReport<T> {
    /// Symmetry in the outer slots and (conjugate-)linearity in each slot.
    pub linearity: T,
    /// `‖[a□b, c□d] − ({abc}□d − c□{dab})‖`.
    pub commutator: T,
    /// `‖K − K*‖` for the kernel `K` of `a□a`.
    pub hermitian: T,
    /// Smallest eigenvalue of the hermitian part of `a□a`.
    pub min_eigenvalue: T,
    /// `|‖{aaa}‖ − ‖a‖³| / max(1, ‖a‖³)` in operator norm.
    pub norm: T,
}

impl<T: Real> AxiomReport<T> {
    pub fn passes(&self, tol: T) -> bool {
        self.linearity <= tol
            && self.commutator <= tol
            && self.hermitian <= tol
            && self.min_eigenvalue >= -tol
            && self.norm <= tol
    }
}

/// Eigenvalues (ascending) of the hermitian part of the kernel of `a□a`.
pub fn box_spectrum<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let k = box_op(a, a)?.kernel().clone();
    let h = (&k + k.adjoint()) * real(T::lit(0.5));
    let mut ev: Vec<T> = nalgebra::linalg::SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}

/// Evaluates the four axioms on `(a, b, c, d)`.
pub fn check_jb_axioms<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    c: &ComplexMatrix<T>,
    d: &ComplexMatrix<T>,
) -> Result<AxiomReport<T>> {
    for m in [b, c, d] {
        ensure_same_shape(a, m)?;
    }
    let t = triple_unchecked;
    let alpha = Complex::new(T::lit(0.3), T::lit(-0.7));

    let symmetry = (t(a, b, c) - t(c, b, a)).norm();
    let outer = (t(&(a * alpha + d), b, c) - t(a, b, c) * alpha - t(d, b, c)).norm();
    let middle = (t(a, &(b * alpha + d), c) - t(a, b, c) * alpha.conjugate() - t(a, d, c)).norm();
    let linearity = symmetry.max(outer).max(middle);

    let ab = box_op(a, b)?;
    let cd = box_op(c, d)?;
    let bracket = ab.compose(&cd)?.sub(&cd.compose(&ab)?)?;
    let rhs = box_op(&t(a, b, c), d)?.sub(&box_op(c, &t(d, a, b))?)?;
    let commutator = bracket.sub(&rhs)?.kernel_norm();

    let k = box_op(a, a)?.kernel().clone();
    let hermitian = (&k - k.adjoint()).norm();
    let min_eigenvalue = box_spectrum(a)?.first().copied().unwrap_or_else(T::zero);

    let na = operator_norm(a);
    let cube = na * na * na;
    let norm = (operator_norm(&t(a, a, a)) - cube).abs() / cube.max(T::one());

    Ok(AxiomReport {
        linearity,
        commutator,
        hermitian,
        min_eigenvalue,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_rows, identity, unit};
    use crate::random::Sampler;

    type M = ComplexMatrix<f64>;

    fn e(i: usize, j: usize) -> M {
        unit(2, 2, i, j)
    }

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    fn i() -> Complex<f64> {
        Complex::new(0.0, 1.0)
    }

    #[test]
    fn triple_product_examples() {
        assert_eq!(
            triple_product(&e(0, 0), &e(0, 0), &e(0, 0)).unwrap(),
            e(0, 0)
        );
        assert_eq!(
            triple_product(&e(0, 1), &e(0, 1), &e(0, 1)).unwrap(),
            e(0, 1)
        );
        let z: M = from_real_rows(2, 2, &[1.0, 2.0, -3.0, 0.5]) * Complex::new(0.2, 0.9);
        assert_eq!(triple_product(&identity(2), &identity(2), &z).unwrap(), z);
        let bad: M = DMatrix::zeros(2, 3);
        assert!(matches!(
            triple_product(&z, &bad, &z),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn triple_product_is_exactly_symmetric() {
        let mut s = Sampler::new(1);
        for _ in 0..20 {
            let (a, b, c): (M, M, M) = (s.ginibre(3, 4), s.ginibre(3, 4), s.ginibre(3, 4));
            assert_eq!(
                triple_product(&a, &b, &c).unwrap(),
                triple_product(&c, &b, &a).unwrap()
            );
        }
    }

    #[test]
    fn box_examples() {
        let b = box_op(&e(0, 0), &e(0, 0)).unwrap();
        assert!((b.apply(&e(0, 1)).unwrap() - e(0, 1) * c(0.5)).norm() < 1e-15);
        assert_eq!(b.apply(&e(1, 1)).unwrap(), DMatrix::zeros(2, 2));
        let mut s = Sampler::new(2);
        let (x, y): (M, M) = (s.ginibre(2, 2), s.ginibre(2, 2));
        assert_eq!(
            box_op(&x, &y)
                .unwrap()
                .apply(&DMatrix::zeros(2, 2))
                .unwrap(),
            DMatrix::zeros(2, 2)
        );
    }

    #[test]
    fn box_kernel_agrees_with_triple_product() {
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let (a, b, z): (M, M, M) = (s.ginibre(3, 2), s.ginibre(3, 2), s.ginibre(3, 2));
            let via_kernel = box_op(&a, &b).unwrap().apply(&z).unwrap();
            assert!((via_kernel - triple_product(&a, &b, &z).unwrap()).norm() < 1e-13);
            let via_quad = quad(&a, &b).unwrap().apply(&z).unwrap();
            assert!((via_quad - triple_product(&a, &z, &b).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn quad_examples() {
        let q = quad(&e(0, 0), &e(0, 0)).unwrap();
        assert_eq!(q.linearity(), Linearity::ConjugateLinear);
        assert_eq!(q.apply(&e(0, 0)).unwrap(), e(0, 0));
        assert!((q.apply(&(e(0, 0) * i())).unwrap() + e(0, 0) * i()).norm() < 1e-15);
        assert_eq!(q.apply(&e(0, 1)).unwrap(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn tripotent_examples() {
        assert!(is_tripotent(&e(0, 0), &tol()));
        assert!(!is_tripotent(&(e(0, 0) * c(2.0)), &tol()));
        let h = (e(0, 1) + e(1, 0)) / Complex::new(2f64.sqrt(), 0.0);
        assert!(!is_tripotent(&h, &tol()));
        let t = Tripotent::new(e(0, 1), &tol()).unwrap();
        assert_eq!(t.rank(), 1);
        assert!(t.is_minimal());
        assert!(matches!(
            Tripotent::new(h, &tol()),
            Err(Error::NotTripotent { .. })
        ));
    }

    #[test]
    fn tripotent_box_spectrum_in_peirce_values() {
        let mut s = Sampler::new(4);
        for (p, q, r) in [(2, 2, 1), (3, 3, 2), (3, 4, 2), (4, 2, 1)] {
            let e: M = s.partial_isometry(p, q, r);
            for ev in box_spectrum(&e).unwrap() {
                let d = [0.0, 0.5, 1.0]
                    .iter()
                    .map(|k| (ev - k).abs())
                    .fold(f64::MAX, f64::min);
                assert!(d < 1e-9, "eigenvalue {ev}");
            }
        }
        let spec = box_spectrum(&e(0, 0)).unwrap();
        assert!((spec[0]).abs() < 1e-15 && (spec[3] - 1.0).abs() < 1e-15);
        assert!((spec[1] - 0.5).abs() < 1e-15 && (spec[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_examples() {
        assert!(are_orthogonal(&e(0, 0), &e(1, 1), &tol()).unwrap());
        assert!(!are_orthogonal(&e(0, 0), &e(0, 1), &tol()).unwrap());
        assert!(are_orthogonal(&e(0, 1), &DMatrix::zeros(2, 2), &tol()).unwrap());
    }

    #[test]
    fn inner_derivation_examples() {
        let u = e(0, 1) + e(1, 0);
        let g = inner_derivation(&e(0, 0), &u).unwrap();
        assert!((g.apply(&e(0, 0)).unwrap() + &u * c(0.5)).norm() < 1e-15);

        let zero = inner_derivation(&e(0, 0), &DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(zero.op.kernel_norm(), 0.0);

        let k = e(0, 1) - e(1, 0);
        let mut s = Sampler::new(5);
        for _ in 0..10 {
            let z: M = s.ginibre(2, 2);
            let want = (&k * &z - &z * &k) * c(0.5);
            assert!((g.apply(&z).unwrap() - want).norm() < 1e-14);
        }
    }

    fn samples(seed: u64, n: usize) -> Vec<M> {
        let mut s = Sampler::new(seed);
        (0..32).map(|_| s.unit_matrix(n, n)).collect()
    }

    #[test]
    fn derivation_checks() {
        let zs = samples(6, 2);
        let g = inner_derivation(&e(0, 0), &(e(0, 1) + e(1, 0))).unwrap();
        let check = is_triple_derivation(&g.op, &zs, &tol()).unwrap();
        assert!(check.holds && check.worst_residual <= 1e-12);

        let id = SuperOperator::identity((2, 2));
        assert!(!is_triple_derivation(&id, &zs, &tol()).unwrap().holds);

        let zero = SuperOperator::<f64>::zero((2, 2), (2, 2));
        assert!(is_triple_derivation(&zero, &zs, &tol()).unwrap().holds);
    }

    #[test]
    fn cstar_derivation_dichotomy_examples() {
        let zs = samples(7, 2);
        let selfadjoint = inner_derivation(&e(0, 0), &(e(0, 1) + e(1, 0))).unwrap();
        assert!(
            is_cstar_derivation(&selfadjoint.op, &zs, &tol())
                .unwrap()
                .holds
        );

        let skew = inner_derivation(&e(0, 0), &((e(0, 1) + e(1, 0)) * i())).unwrap();
        let check = is_cstar_derivation(&skew.op, &zs, &tol()).unwrap();
        assert!(!check.holds && check.worst_residual > 1e-4);

        let zero = SuperOperator::<f64>::zero((2, 2), (2, 2));
        assert!(is_cstar_derivation(&zero, &zs, &tol()).unwrap().holds);
    }

    #[test]
    fn triple_exp_examples() {
        let g = inner_derivation(&e(0, 0), &(e(0, 1) + e(1, 0))).unwrap();
        assert_eq!(
            triple_exp(&g, 0.0).unwrap(),
            SuperOperator::identity((2, 2))
        );
        let rotated = triple_exp(&g, std::f64::consts::PI)
            .unwrap()
            .apply(&e(0, 0))
            .unwrap();
        assert!((rotated - e(1, 1)).norm() < 1e-12);

        let (t, s) = (0.7, -1.9);
        let prod = triple_exp(&g, t)
            .unwrap()
            .compose(&triple_exp(&g, s).unwrap())
            .unwrap();
        let sum = triple_exp(&g, t + s).unwrap();
        assert!(prod.sub(&sum).unwrap().kernel_norm() < 1e-10);

        let back = triple_exp(&g, 1.3)
            .unwrap()
            .compose(&triple_exp(&g, -1.3).unwrap())
            .unwrap();
        assert!(
            back.sub(&SuperOperator::identity((2, 2)))
                .unwrap()
                .kernel_norm()
                < 1e-10
        );
    }

    #[test]
    fn automorphism_examples() {
        let zs = samples(8, 3);
        let id = SuperOperator::identity((3, 3));
        assert!(is_triple_automorphism(&id, &zs, &tol()).unwrap().holds);

        let u: M = Sampler::new(9).haar_unitary(3);
        let conj = SuperOperator::sandwich(&u, &u.adjoint());
        assert!(is_triple_automorphism(&conj, &zs, &tol()).unwrap().holds);

        let twice = id.scale(Complex::new(2.0, 0.0));
        assert!(!is_triple_automorphism(&twice, &zs, &tol()).unwrap().holds);

        let zero = SuperOperator::<f64>::zero((3, 3), (3, 3));
        assert_eq!(
            is_triple_automorphism(&zero, &zs, &tol()),
            Err(Error::Singular)
        );
    }

    #[test]
    fn exponentials_of_derivations_are_automorphisms() {
        let mut s = Sampler::new(10);
        let zs = samples(11, 3);
        for _ in 0..5 {
            let (a, u): (M, M) = (s.ginibre(3, 3), s.ginibre(3, 3));
            let g = inner_derivation(&a, &u).unwrap();
            let scale = 10.0 / (g.op.kernel_norm());
            let h = triple_exp(&g, scale).unwrap();
            let check = is_triple_automorphism(&h, &zs, &tol()).unwrap();
            assert!(check.multiplicative_residual <= 1e-8, "{check:?}");
        }
    }

    #[test]
    fn axioms_hold_on_random_quadruples() {
        let mut s = Sampler::new(12);
        for _ in 0..10 {
            let (a, b, c, d): (M, M, M, M) = (
                s.ginibre(2, 2),
                s.ginibre(2, 2),
                s.ginibre(2, 2),
                s.ginibre(2, 2),
            );
            let r = check_jb_axioms(&a, &b, &c, &d).unwrap();
            assert!(r.passes(1e-9), "{r:?}");
        }
        let z: M = DMatrix::zeros(2, 2);
        let r = check_jb_axioms(&z, &z, &z, &z).unwrap();
        assert_eq!(
            r,
            AxiomReport {
                linearity: 0.0,
                commutator: 0.0,
                hermitian: 0.0,
                min_eigenvalue: 0.0,
                norm: 0.0
            }
        );
    }
}
