//! Dense complex matrices, normal eigendecomposition, the matrix exponential and
//! linear maps acting on matrix spaces.

mod superop;

pub use superop::{super_apply, super_exp, Linearity, SuperOperator};

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lex_cmp, real, Real};

/// Dense complex matrix; elements of the matrix space `Z`.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;

/// Numerical tolerances used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    /// Step used by every finite-difference approximation.
    pub fd_step: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            abs: T::lit(1e-9),
            rel: T::lit(1e-9),
            fd_step: T::lit(1e-5),
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: T, rel: T, fd_step: T) -> Self {
        assert!(
            abs >= T::zero() && rel >= T::zero() && fd_step >= T::zero(),
            "tolerances must be nonnegative"
        );
        Self { abs, rel, fd_step }
    }

    /// Uniform tolerance with the default finite-difference step.
    pub fn uniform(tol: T) -> Self {
        Self::new(tol, tol, T::lit(1e-5))
    }

    /// Threshold for a quantity whose natural size is `scale`: `max(abs, rel * scale)`.
    pub fn bound(&self, scale: T) -> T {
        self.abs.max(self.rel * scale)
    }

    /// Spectral values closer than this are merged into one.
    pub fn cluster_radius(&self) -> T {
        T::lit(10.0) * self.abs
    }
}

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    DMatrix::identity(n, n)
}

/// Matrix unit `E_ij` (zero-based indices).
pub fn unit<T: Real>(rows: usize, cols: usize, i: usize, j: usize) -> ComplexMatrix<T> {
    let mut m = DMatrix::zeros(rows, cols);
    m[(i, j)] = Complex::new(T::one(), T::zero());
    m
}

pub fn from_real_diagonal<T: Real>(d: &[T]) -> ComplexMatrix<T> {
    let mut m = DMatrix::zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = real(x);
    }
    m
}

pub fn from_diagonal<T: Real>(d: &[Complex<T>]) -> ComplexMatrix<T> {
    let mut m = DMatrix::zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = x;
    }
    m
}

/// Builds a matrix from real row-major data.
pub fn from_real_rows<T: Real>(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix<T> {
    assert_eq!(data.len(), rows * cols);
    DMatrix::from_fn(rows, cols, |i, j| real(T::lit(data[i * cols + j])))
}

pub fn frobenius<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.norm()
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    singular_values(m).first().copied().unwrap_or(T::zero())
}

/// Frobenius inner product `trace(v* u)`, complex-linear in `u`.
pub fn inner<T: Real>(u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> Complex<T> {
    u.iter()
        .zip(v.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + b.conjugate() * *a
        })
}

pub fn is_finite<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_square<T: Real>(m: &ComplexMatrix<T>) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub(crate) fn ensure_same_shape<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: b.shape(),
        })
    }
}

/// Normality residual `‖aa* − a*a‖_F`.
pub fn normality_residual<T: Real>(a: &ComplexMatrix<T>) -> T {
    let ah = a.adjoint();
    (a * &ah - &ah * a).norm()
}

/// Number of singular values above `threshold`.
pub fn numerical_rank<T: Real>(m: &ComplexMatrix<T>, threshold: T) -> usize {
    if m.is_empty() {
        return 0;
    }
    singular_values(m)
        .into_iter()
        .filter(|&s| s > threshold)
        .count()
}

/// Rank threshold for projections and partial isometries, whose singular values sit near 0 and 1.
///
/// Never below `100 ε` per dimension, so single-precision rounding is not counted as rank.
pub(crate) fn projection_rank_threshold<T: Real>(dim: usize) -> T {
    let floor = T::lit(1e-8).max(T::default_epsilon() * T::lit(100.0));
    floor * T::lit(dim.max(1) as f64)
}

/// Orthonormal basis (as columns) of the column space of `m`, from a column-pivoted QR.
///
/// Columns whose `|R_ii|` falls below `threshold` are discarded.
pub fn orthonormal_range<T: Real>(m: &ComplexMatrix<T>, threshold: T) -> ComplexMatrix<T> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return DMatrix::zeros(n, 0);
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let q = qr.q();
    let rank = (0..r.nrows().min(r.ncols()))
        .take_while(|&i| r[(i, i)].modulus() > threshold)
        .count();
    q.columns(0, rank).into_owned()
}

/// Extends the orthonormal columns of `basis` to an orthonormal basis of `C^n`.
///
/// Returns only the added columns. Standard basis vectors are swept in order and
/// orthogonalised twice (modified Gram-Schmidt), so the result is deterministic.
pub fn orthonormal_complement<T: Real>(basis: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = basis.nrows();
    let k = basis.ncols();
    let mut cols: Vec<nalgebra::DVector<Complex<T>>> =
        basis.column_iter().map(|c| c.into_owned()).collect();
    let mut added = Vec::with_capacity(n.saturating_sub(k));
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::<Complex<T>>::zeros(n);
        v[i] = real(T::one());
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > T::lit(0.5) {
            v /= real(norm);
            cols.push(v.clone());
            added.push(v);
        }
    }
    if added.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&added)
    }
}

/// Singular values (descending) with matching left and right singular vectors as columns.
///
/// Vectors belonging to zero singular values are not meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplets<T: Real> {
    pub values: Vec<T>,
    pub left: ComplexMatrix<T>,
    pub right: ComplexMatrix<T>,
}

/// Singular triplets from the hermitian eigenproblem of `[[0, m], [m*, 0]]`, whose eigenvalues are `±σ_k`
/// plus `|p − q|` zeros, with eigenvectors `[u_k; ±v_k] / √2`.
pub fn singular_triplets<T: Real>(m: &ComplexMatrix<T>) -> SingularTriplets<T> {
    let (p, q) = m.shape();
    let k = p.min(q);
    if k == 0 {
        return SingularTriplets {
            values: Vec::new(),
            left: DMatrix::zeros(p, 0),
            right: DMatrix::zeros(q, 0),
        };
    }
    let mut h = DMatrix::zeros(p + q, p + q);
    h.view_mut((0, p), (p, q)).copy_from(m);
    h.view_mut((p, 0), (q, p)).copy_from(&m.adjoint());
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..p + q).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut values = Vec::with_capacity(k);
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for &i in &order[..k] {
        let col = eig.eigenvectors.column(i);
        values.push(eig.eigenvalues[i].max(T::zero()));
        left.push(unit_or_zero(col.rows(0, p).into_owned()));
        right.push(unit_or_zero(col.rows(p, q).into_owned()));
    }
    SingularTriplets {
        values,
        left: DMatrix::from_columns(&left),
        right: DMatrix::from_columns(&right),
    }
}

fn unit_or_zero<T: Real>(v: nalgebra::DVector<Complex<T>>) -> nalgebra::DVector<Complex<T>> {
    let n = v.norm();
    if n > T::zero() {
        v / real(n)
    } else {
        v
    }
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    singular_triplets(m).values
}

/// Orthogonal projections onto the spans of the leading `rank` left and right singular vectors.
///
/// For a matrix of rank `rank` these are the projections onto its range and onto the range of its adjoint.
pub fn range_projectors<T: Real>(
    m: &ComplexMatrix<T>,
    rank: usize,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let (p, q) = m.shape();
    if rank == 0 || p == 0 || q == 0 {
        return (DMatrix::zeros(p, p), DMatrix::zeros(q, q));
    }
    let st = singular_triplets(m);
    let r = rank.min(st.values.len());
    let left = st.left.columns(0, r).into_owned();
    let right = st.right.columns(0, r).into_owned();
    (&left * left.adjoint(), &right * right.adjoint())
}

/// One spectral value of a normal matrix and its spectral projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair<T: Real> {
    pub value: Complex<T>,
    pub projector: ComplexMatrix<T>,
}

/// Eigendecomposition of a normal matrix into spectral values and orthogonal projectors.
///
/// Uses the complex Schur form, which is diagonal for normal input. Eigenvalues within
/// `tol.cluster_radius()` of each other (transitively) are merged: the cluster value is
/// the mean and the projector the sum. Output is sorted by (real, imaginary) part.
pub fn eig_normal<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Vec<Eigenpair<T>>> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    let residual = normality_residual(a);
    let scale = a.norm();
    if residual > tol.bound(scale * scale) {
        return Err(Error::NotNormal {
            residual: residual.as_f64(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // Schur deflation is relative to the diagonal, so keep every shifted eigenvalue away from 0.
    let shift = real(T::lit(2.0) * scale + T::one());
    let shifted = a + identity::<T>(n) * shift;
    let schur = [T::one(), T::lit(1e2), T::lit(1e4)]
        .into_iter()
        .find_map(|k| {
            nalgebra::linalg::Schur::try_new(shifted.clone(), T::default_epsilon() * k, 10_000)
        })
        .ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let eigs: Vec<Complex<T>> = (0..n).map(|i| t[(i, i)] - shift).collect();

    let clusters = cluster_indices(&eigs, tol.cluster_radius());
    let mut out: Vec<Eigenpair<T>> = clusters
        .into_iter()
        .map(|idx| {
            let count = T::lit(idx.len() as f64);
            let sum = idx
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, &i| acc + eigs[i]);
            let cols: Vec<_> = idx.iter().map(|&i| q.column(i).into_owned()).collect();
            let v = DMatrix::from_columns(&cols);
            Eigenpair {
                value: sum / real(count),
                projector: &v * v.adjoint(),
            }
        })
        .collect();
    out.sort_by(|x, y| lex_cmp(&x.value, &y.value));
    Ok(out)
}

/// Single-linkage clustering of complex values within `radius`.
pub(crate) fn cluster_indices<T: Real>(values: &[Complex<T>], radius: T) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).modulus() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of_group.iter().position(|&x| x == r) {
            Some(g) => groups[g].push(i),
            None => {
                root_of_group.push(r);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
///
/// `exp(0)` returns the identity exactly.
pub fn mat_exp<T: Real>(x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(x)?;
    ensure_finite(x)?;
    if n == 0 || x.iter().all(|z| z.re.is_zero() && z.im.is_zero()) {
        return Ok(identity(n));
    }
    Ok(x.exp())
}

/// Column-major vectorisation.
pub fn vec<T: Real>(m: &ComplexMatrix<T>) -> nalgebra::DVector<Complex<T>> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec<T: Real>(
    v: &nalgebra::DVector<Complex<T>>,
    rows: usize,
    cols: usize,
) -> ComplexMatrix<T> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}
