//! Spectral resolutions, supports and component signatures of normal matrices.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_normal, ensure_finite, ensure_square, identity, normality_residual, numerical_rank,
    orthonormal_complement, projection_rank_threshold, ComplexMatrix, Tolerance,
};
use crate::scalar::{lex_cmp, Real};

/// `‖aa* − a*a‖_F ≤ tol.abs · max(1, ‖a‖²)`.
pub fn is_normal<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    ensure_square(a)?;
    let scale = a.norm();
    Ok(normality_residual(a) <= tol.abs * (scale * scale).max(T::one()))
}

/// `p(X) = Π (X − μ)` over the distinct points `μ` of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalPolynomial<T: Real> {
    pub roots: Vec<Complex<T>>,
}

impl<T: Real> MinimalPolynomial<T> {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// `p(a)`.
    pub fn evaluate(&self, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        product_of_shifts(a, &self.roots)
    }
}

fn product_of_shifts<T: Real>(
    a: &ComplexMatrix<T>,
    roots: &[Complex<T>],
) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(a)?;
    let id = identity::<T>(n);
    Ok(roots
        .iter()
        .fold(id.clone(), |acc, mu| acc * (a - &id * *mu)))
}

/// Minimal polynomial of a normal matrix; its roots are simple.
pub fn minimal_polynomial<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<MinimalPolynomial<T>> {
    let roots = eig_normal(a, tol)?.into_iter().map(|p| p.value).collect();
    Ok(MinimalPolynomial { roots })
}

/// `a = Σ λ_k e_k` over the distinct nonzero spectral values.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResolution<T: Real> {
    pub values: Vec<Complex<T>>,
    pub projections: Vec<ComplexMatrix<T>>,
    pub ranks: Vec<usize>,
    pub kernel_rank: usize,
    /// Order of the resolved matrix; fixed by its shape, not by the rank estimates.
    pub order: usize,
}

impl<T: Real> SpectralResolution<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.order
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        self.values
            .iter()
            .zip(&self.projections)
            .fold(DMatrix::zeros(n, n), |acc, (l, e)| acc + e * *l)
    }

    pub fn support(&self) -> Support<T> {
        let n = self.dim();
        Support {
            projection: self
                .projections
                .iter()
                .fold(DMatrix::zeros(n, n), |acc, e| acc + e),
            rank: self.ranks.iter().sum(),
        }
    }

    pub fn signature(&self) -> Result<ComponentSignature<T>> {
        if self.is_empty() {
            return Err(Error::ZeroElement);
        }
        Ok(ComponentSignature::new(
            self.values.clone(),
            self.ranks.clone(),
        ))
    }

    /// `‖a p(a)‖` if `0 ∈ σ(a)`, else `‖p(a)‖`, with `p = Π (X − λ_k)` over nonzero values.
    pub fn algebraic_residual(&self, a: &ComplexMatrix<T>) -> Result<T> {
        let p = product_of_shifts(a, &self.values)?;
        Ok(if self.kernel_rank > 0 {
            (a * p).norm()
        } else {
            p.norm()
        })
    }
}

/// Spectral resolution of a normal matrix; the zero eigenvalue is dropped.
///
/// A value counts as zero when its modulus is within `tol.cluster_radius()`.
pub fn spectral_resolution<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<SpectralResolution<T>> {
    let n = ensure_square(a)?;
    let threshold = projection_rank_threshold::<T>(n);
    let mut values = Vec::new();
    let mut projections = Vec::new();
    let mut ranks = Vec::new();
    let mut kernel_rank = 0;
    for pair in eig_normal(a, tol)? {
        let r = numerical_rank(&pair.projector, threshold);
        if pair.value.modulus() <= tol.cluster_radius() {
            kernel_rank += r;
        } else {
            values.push(pair.value);
            projections.push(pair.projector);
            ranks.push(r);
        }
    }
    Ok(SpectralResolution {
        values,
        projections,
        ranks,
        kernel_rank,
        order: n,
    })
}

/// `supp a = Σ e_k`, the range projection of a normal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Support<T: Real> {
    pub projection: ComplexMatrix<T>,
    pub rank: usize,
}

impl<T: Real> Support<T> {
    /// Rank zero: the support of the zero matrix.
    pub fn is_degenerate(&self) -> bool {
        self.rank == 0
    }
}

pub fn support<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Support<T>> {
    Ok(spectral_resolution(a, tol)?.support())
}

/// The invariant `(n, Λ, R)` of a component, with `(λ_k, r_k)` sorted by `(Re λ, Im λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSignature<T: Real> {
    pub lambda: Vec<Complex<T>>,
    pub ranks: Vec<usize>,
}

impl<T: Real> ComponentSignature<T> {
    pub fn new(lambda: Vec<Complex<T>>, ranks: Vec<usize>) -> Self {
        let mut pairs: Vec<(Complex<T>, usize)> = lambda.into_iter().zip(ranks).collect();
        pairs.sort_by(|x, y| lex_cmp(&x.0, &y.0).then(x.1.cmp(&y.1)));
        let (lambda, ranks) = pairs.into_iter().unzip();
        Self { lambda, ranks }
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Index map `k ↦ j` with `|λ_k − μ_j| ≤ radius` and equal ranks, if the multisets agree.
    ///
    /// Matching is greedy over `self` in canonical order, taking the closest unused partner.
    pub fn matching(&self, other: &Self, radius: T) -> Option<Vec<usize>> {
        if self.n() != other.n() {
            return None;
        }
        let mut used = vec![false; other.n()];
        let mut map = Vec::with_capacity(self.n());
        for (l, r) in self.lambda.iter().zip(&self.ranks) {
            let best = (0..other.n())
                .filter(|&j| !used[j] && other.ranks[j] == *r)
                .map(|j| (j, (other.lambda[j] - l).modulus()))
                .filter(|&(_, d)| d <= radius)
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))?;
            used[best.0] = true;
            map.push(best.0);
        }
        Some(map)
    }

    pub fn matches(&self, other: &Self, radius: T) -> bool {
        self.matching(other, radius).is_some()
    }

    /// `(n, Λ*, R)`.
    pub fn conjugate(&self) -> Self {
        Self::new(
            self.lambda.iter().map(|l| l.conj()).collect(),
            self.ranks.clone(),
        )
    }
}

impl<T: Real> std::fmt::Display for ComponentSignature<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={} Λ=(", self.n())?;
        for (i, l) in self.lambda.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{:+}i", l.re, l.im)?;
        }
        f.write_str(") R=(")?;
        for (i, r) in self.ranks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

pub fn signature<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComponentSignature<T>> {
    spectral_resolution(a, tol)?.signature()
}

/// Recovers the spectral projections from powers of `a` by inverting the Vandermonde system
/// `a^l = Σ_k λ_k^l e_k`, `l = 1..n`.
///
/// Independent of any eigendecomposition: the spectrum is only used to check `values`.
pub fn vandermonde_projections<T: Real>(
    a: &ComplexMatrix<T>,
    values: &[Complex<T>],
    tol: &Tolerance<T>,
) -> Result<Vec<ComplexMatrix<T>>> {
    let dim = ensure_square(a)?;
    ensure_finite(a)?;
    let n = values.len();
    let radius = tol.cluster_radius();
    for (j, x) in values.iter().enumerate() {
        if x.modulus() <= radius || values[..j].iter().any(|y| (x - y).modulus() <= radius) {
            return Err(Error::SingularVandermonde);
        }
    }
    let observed = spectral_resolution(a, tol)?;
    if observed.len() != n
        || !values
            .iter()
            .all(|x| observed.values.iter().any(|y| (x - y).modulus() <= radius))
    {
        return Err(Error::SpectrumMismatch);
    }
    let v = DMatrix::from_fn(n, n, |l, k| values[k].powi(l as i32 + 1));
    let w = v.try_inverse().ok_or(Error::SingularVandermonde)?;
    if !crate::linalg::is_finite(&w) {
        return Err(Error::SingularVandermonde);
    }
    let mut powers = Vec::with_capacity(n);
    let mut p = a.clone();
    for _ in 0..n {
        powers.push(p.clone());
        p = &p * a;
    }
    Ok((0..n)
        .map(|k| {
            powers
                .iter()
                .enumerate()
                .fold(DMatrix::zeros(dim, dim), |acc, (l, al)| {
                    acc + al * w[(k, l)]
                })
        })
        .collect())
}

/// Same component iff the signatures agree as multisets of `(λ, r)` pairs.
pub fn same_component<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<bool> {
    if a.shape() != b.shape() {
        return Ok(false);
    }
    let ra = spectral_resolution(a, tol)?;
    let rb = spectral_resolution(b, tol)?;
    if ra.is_empty() || rb.is_empty() {
        return Ok(ra.is_empty() && rb.is_empty());
    }
    Ok(ra
        .signature()?
        .matches(&rb.signature()?, tol.cluster_radius()))
}

/// A unitary `U` with `U a U* = b`, mapping matched spectral subspaces onto each other.
///
/// Subspace bases come from column-pivoted QR of the projections; kernels are completed
/// deterministically.
pub fn unitary_connect<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(a)?;
    if a.shape() != b.shape() {
        return Err(Error::DifferentComponents);
    }
    let ra = spectral_resolution(a, tol)?;
    let rb = spectral_resolution(b, tol)?;
    let map = match (ra.signature(), rb.signature()) {
        (Ok(sa), Ok(sb)) => {
            // Signatures are stored in canonical order; translate back to resolution order.
            let ia = order_of(&ra);
            let ib = order_of(&rb);
            let m = sa
                .matching(&sb, tol.cluster_radius())
                .ok_or(Error::DifferentComponents)?;
            let mut map = vec![0; ra.len()];
            for (k, j) in m.into_iter().enumerate() {
                map[ia[k]] = ib[j];
            }
            map
        }
        (Err(_), Err(_)) => Vec::new(),
        _ => return Err(Error::DifferentComponents),
    };
    let mut qa = Vec::new();
    let mut qb = Vec::new();
    for (k, &j) in map.iter().enumerate() {
        let ba = projection_range(&ra.projections[k], ra.ranks[k]);
        let bb = projection_range(&rb.projections[j], rb.ranks[j]);
        qa.extend(ba.column_iter().map(|c| c.into_owned()));
        qb.extend(bb.column_iter().map(|c| c.into_owned()));
    }
    let complete = |cols: &mut Vec<nalgebra::DVector<Complex<T>>>| {
        let basis = if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(cols)
        };
        let rest = orthonormal_complement(&basis);
        cols.extend(rest.column_iter().map(|c| c.into_owned()));
    };
    complete(&mut qa);
    complete(&mut qb);
    if qa.len() != n || qb.len() != n {
        return Err(Error::DifferentComponents);
    }
    let qa = DMatrix::from_columns(&qa);
    let qb = DMatrix::from_columns(&qb);
    Ok(qb * qa.adjoint())
}

/// First `rank` columns of the pivoted QR factor of a projection.
fn projection_range<T: Real>(p: &ComplexMatrix<T>, rank: usize) -> ComplexMatrix<T> {
    let q = p.clone().col_piv_qr().q();
    q.columns(0, rank).into_owned()
}

/// Position of each canonical signature entry in the resolution's own order.
fn order_of<T: Real>(r: &SpectralResolution<T>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..r.len()).collect();
    idx.sort_by(|&x, &y| lex_cmp(&r.values[x], &r.values[y]).then(r.ranks[x].cmp(&r.ranks[y])));
    idx
}

/// `a*`, which lies on the component with conjugated spectral values.
pub fn involution_image<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.adjoint()
}
