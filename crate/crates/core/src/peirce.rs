//! Peirce projections of tripotents and of orthogonal families of tripotents.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_same_shape, orthonormal_range, unvec, ComplexMatrix, SuperOperator, Tolerance,
};
use crate::random::Sampler;
use crate::scalar::{real, Real};
use crate::triple::{are_orthogonal, box_op, quad, triple_unchecked, Tripotent};

/// Rank cut-off used when extracting bases of Peirce spaces.
const BASIS_THRESHOLD: f64 = 1e-8;

/// The eigenvalue `k ∈ {1, ½, 0}` of `e□e` labelling a Peirce space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PeirceIndex {
    One,
    Half,
    Zero,
}

impl PeirceIndex {
    pub const ALL: [PeirceIndex; 3] = [PeirceIndex::One, PeirceIndex::Half, PeirceIndex::Zero];

    fn halves(self) -> i32 {
        match self {
            PeirceIndex::One => 2,
            PeirceIndex::Half => 1,
            PeirceIndex::Zero => 0,
        }
    }

    fn from_halves(h: i32) -> Option<Self> {
        match h {
            2 => Some(PeirceIndex::One),
            1 => Some(PeirceIndex::Half),
            0 => Some(PeirceIndex::Zero),
            _ => None,
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.halves()) / 2.0
    }

    /// The index `i − j + k` of `{Z_i Z_j Z_k}`, or `None` when it is not a Peirce index.
    pub fn product(i: Self, j: Self, k: Self) -> Option<Self> {
        Self::from_halves(i.halves() - j.halves() + k.halves())
    }
}

impl std::fmt::Display for PeirceIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PeirceIndex::One => "1",
            PeirceIndex::Half => "1/2",
            PeirceIndex::Zero => "0",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PeirceDecomposition<T: Real> {
    pub tripotent: Tripotent<T>,
    pub p1: SuperOperator<T>,
    pub p12: SuperOperator<T>,
    pub p0: SuperOperator<T>,
    /// Frobenius-orthonormal bases of `Z_1`, `Z_½`, `Z_0` in that order.
    pub bases: [Vec<ComplexMatrix<T>>; 3],
}

impl<T: Real> PeirceDecomposition<T> {
    pub fn projection(&self, k: PeirceIndex) -> &SuperOperator<T> {
        match k {
            PeirceIndex::One => &self.p1,
            PeirceIndex::Half => &self.p12,
            PeirceIndex::Zero => &self.p0,
        }
    }

    pub fn basis(&self, k: PeirceIndex) -> &[ComplexMatrix<T>] {
        match k {
            PeirceIndex::One => &self.bases[0],
            PeirceIndex::Half => &self.bases[1],
            PeirceIndex::Zero => &self.bases[2],
        }
    }

    pub fn part(&self, z: &ComplexMatrix<T>, k: PeirceIndex) -> Result<ComplexMatrix<T>> {
        self.projection(k).apply(z)
    }

    /// `‖P_k z − z‖ ≤ tol·max(1, ‖z‖)`.
    pub fn contains(
        &self,
        z: &ComplexMatrix<T>,
        k: PeirceIndex,
        tol: &Tolerance<T>,
    ) -> Result<bool> {
        Ok(membership_residual(self.projection(k), z)? <= tol.abs * z.norm().max(T::one()))
    }
}

fn membership_residual<T: Real>(p: &SuperOperator<T>, z: &ComplexMatrix<T>) -> Result<T> {
    Ok((p.apply(z)? - z).norm())
}

/// Columns of a projection kernel's range, reshaped into matrices.
pub(crate) fn range_basis<T: Real>(p: &SuperOperator<T>) -> Vec<ComplexMatrix<T>> {
    let (rows, cols) = p.dim_out();
    let q = orthonormal_range(p.kernel(), T::lit(BASIS_THRESHOLD));
    q.column_iter()
        .map(|c| unvec(&c.into_owned(), rows, cols))
        .collect()
}

/// `P_1 = Q(e)²`, `P_½ = 2(e□e − Q(e)²)`, `P_0 = Id − 2e□e + Q(e)²`.
pub fn peirce_projections<T: Real>(e: &Tripotent<T>) -> Result<PeirceDecomposition<T>> {
    let m = e.matrix();
    let q = quad(m, m)?;
    let q2 = q.compose(&q)?;
    let bx = box_op(m, m)?;
    let two = real(T::lit(2.0));
    let p1 = q2.clone();
    let p12 = bx.sub(&q2)?.scale(two);
    let p0 = SuperOperator::identity(m.shape())
        .sub(&bx.scale(two))?
        .add(&q2)?;
    let bases = [range_basis(&p1), range_basis(&p12), range_basis(&p0)];
    Ok(PeirceDecomposition {
        tripotent: e.clone(),
        p1,
        p12,
        p0,
        bases,
    })
}

/// `P_k(e) z`.
pub fn peirce_part<T: Real>(
    e: &Tripotent<T>,
    z: &ComplexMatrix<T>,
    k: PeirceIndex,
) -> Result<ComplexMatrix<T>> {
    ensure_same_shape(e.matrix(), z)?;
    peirce_projections(e)?.part(z, k)
}

/// Projections onto `Z_{j,k}` for a pairwise orthogonal family `e_1, …, e_n`.
///
/// Keys are `(j, k)` with `0 ≤ j ≤ k ≤ n`; family members are numbered from 1.
#[derive(Debug, Clone)]
pub struct JointPeirceDecomposition<T: Real> {
    pub family: Vec<Tripotent<T>>,
    pub projections: BTreeMap<(usize, usize), SuperOperator<T>>,
}

impl<T: Real> JointPeirceDecomposition<T> {
    pub fn projection(&self, j: usize, k: usize) -> Option<&SuperOperator<T>> {
        self.projections.get(&(j.min(k), j.max(k)))
    }

    pub fn basis(&self, j: usize, k: usize) -> Option<Vec<ComplexMatrix<T>>> {
        self.projection(j, k).map(range_basis)
    }
}

/// `Z_{j,j} = Z_1(e_j)`, `Z_{j,k} = Z_½(e_j) ∩ Z_½(e_k)`,
/// `Z_{0,j} = Z_½(e_j) ∩ ⋂_{k≠j} Z_0(e_k)`, `Z_{0,0} = ⋂_k Z_0(e_k)`.
pub fn joint_peirce<T: Real>(
    family: &[Tripotent<T>],
    tol: &Tolerance<T>,
) -> Result<JointPeirceDecomposition<T>> {
    let Some(first) = family.first() else {
        return Err(Error::ZeroElement);
    };
    let shape = first.shape();
    for e in family {
        ensure_same_shape(first.matrix(), e.matrix())?;
    }
    for j in 0..family.len() {
        for k in j + 1..family.len() {
            if !are_orthogonal(family[j].matrix(), family[k].matrix(), tol)? {
                return Err(Error::NotOrthogonalFamily(j + 1, k + 1));
            }
        }
    }
    let singles: Vec<PeirceDecomposition<T>> = family
        .iter()
        .map(peirce_projections)
        .collect::<Result<_>>()?;
    let n = family.len();
    let mut projections = BTreeMap::new();

    let mut zero_zero = SuperOperator::identity(shape);
    for s in &singles {
        zero_zero = zero_zero.compose(&s.p0)?;
    }
    projections.insert((0, 0), zero_zero);

    for j in 0..n {
        let mut op = singles[j].p12.clone();
        for (k, s) in singles.iter().enumerate() {
            if k != j {
                op = op.compose(&s.p0)?;
            }
        }
        projections.insert((0, j + 1), op);
        projections.insert((j + 1, j + 1), singles[j].p1.clone());
        for k in j + 1..n {
            projections.insert((j + 1, k + 1), singles[j].p12.compose(&singles[k].p12)?);
        }
    }
    Ok(JointPeirceDecomposition {
        family: family.to_vec(),
        projections,
    })
}

/// Worst residuals of the Peirce multiplication rules over random samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PeirceRuleReport<T> {
    /// `((i, j, k), worst residual)` of `{z_i z_j z_k} ∈ Z_{i−j+k}` (or `= 0`).
    pub rules: Vec<((PeirceIndex, PeirceIndex, PeirceIndex), T)>,
    /// Worst kernel norm of `x□y` for `x ∈ Z_1`, `y ∈ Z_0`.
    pub one_box_zero: T,
    pub worst: T,
    pub holds: bool,
}

fn sample_in<T: Real>(p: &SuperOperator<T>, sampler: &mut Sampler) -> Result<ComplexMatrix<T>> {
    let (rows, cols) = p.dim_in();
    let g = sampler.ginibre(rows, cols);
    let z = p.apply(&g)?;
    let norm = z.norm();
    // A trivial Peirce space leaves only rounding noise, which must not be rescaled.
    Ok(if norm > T::lit(1e-8) * g.norm() {
        z / real(norm)
    } else {
        z * real(T::zero())
    })
}

/// Samples unit elements of each Peirce space and checks `{Z_i Z_j Z_k} ⊂ Z_{i−j+k}`.
pub fn verify_peirce_rules<T: Real>(
    e: &Tripotent<T>,
    sampler: &mut Sampler,
    samples: usize,
    tol: &Tolerance<T>,
) -> Result<PeirceRuleReport<T>> {
    let d = peirce_projections(e)?;
    let mut rules = Vec::with_capacity(27);
    let mut worst = T::zero();
    for i in PeirceIndex::ALL {
        for j in PeirceIndex::ALL {
            for k in PeirceIndex::ALL {
                let mut w = T::zero();
                for _ in 0..samples {
                    let zi = sample_in(d.projection(i), sampler)?;
                    let zj = sample_in(d.projection(j), sampler)?;
                    let zk = sample_in(d.projection(k), sampler)?;
                    let t = triple_unchecked(&zi, &zj, &zk);
                    let r = match PeirceIndex::product(i, j, k) {
                        Some(target) => membership_residual(d.projection(target), &t)?,
                        None => t.norm(),
                    };
                    w = w.max(r);
                }
                worst = worst.max(w);
                rules.push(((i, j, k), w));
            }
        }
    }
    let mut one_box_zero = T::zero();
    for _ in 0..samples {
        let x = sample_in(&d.p1, sampler)?;
        let y = sample_in(&d.p0, sampler)?;
        one_box_zero = one_box_zero.max(box_op(&x, &y)?.kernel_norm());
    }
    worst = worst.max(one_box_zero);
    Ok(PeirceRuleReport {
        rules,
        one_box_zero,
        worst,
        holds: worst <= tol.abs,
    })
}

/// `z^# = {e z e}`, the involution of the JB*-algebra `Z_1(e)`.
pub fn sharp<T: Real>(e: &ComplexMatrix<T>, z: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    triple_unchecked(e, z, e)
}

/// Splits `z ∈ Z_1(e)` as `h + ik` with `h, k ∈ A(e) = {x ∈ Z_1(e) : x^# = x}`.
pub fn selfadjoint_split<T: Real>(
    e: &Tripotent<T>,
    z: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    ensure_same_shape(e.matrix(), z)?;
    let d = peirce_projections(e)?;
    let residual = membership_residual(&d.p1, z)?;
    if residual > tol.abs * z.norm().max(T::one()) {
        return Err(Error::NotInPeirceOne {
            residual: residual.as_f64(),
        });
    }
    let zs = sharp(e.matrix(), z);
    let half = real(T::lit(0.5));
    let h = (z + &zs) * half;
    let k = (z - &zs) * Complex::new(T::zero(), -T::lit(0.5));
    Ok((h, k))
}

/// `S_e : z_1 + z_½ + z_0 ↦ z_1 − z_½ + z_0`, i.e. `Id − 2P_½(e)`.
pub fn peirce_reflection<T: Real>(e: &Tripotent<T>) -> Result<SuperOperator<T>> {
    let d = peirce_projections(e)?;
    SuperOperator::identity(e.shape()).sub(&d.p12.scale(real(T::lit(2.0))))
}
