use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use super::{ensure_finite, mat_exp, unvec, vec, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Whether an operator commutes with complex scalars or conjugates them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linearity {
    Linear,
    ConjugateLinear,
}

impl Linearity {
    fn compose(self, inner: Linearity) -> Linearity {
        if self == inner {
            Linearity::Linear
        } else {
            Linearity::ConjugateLinear
        }
    }
}

/// A real-linear map between matrix spaces, stored as a kernel acting on column-major
/// vectorisations.
///
/// A conjugate-linear operator `S` is applied as `unvec(kernel · vec(conj(z)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator<T: Real> {
    dim_in: (usize, usize),
    dim_out: (usize, usize),
    kernel: ComplexMatrix<T>,
    linearity: Linearity,
}

impl<T: Real> SuperOperator<T> {
    pub fn from_kernel(
        dim_in: (usize, usize),
        dim_out: (usize, usize),
        kernel: ComplexMatrix<T>,
        linearity: Linearity,
    ) -> Result<Self> {
        let expected = (dim_out.0 * dim_out.1, dim_in.0 * dim_in.1);
        if kernel.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: kernel.shape(),
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            kernel,
            linearity,
        })
    }

    /// Builds the kernel by applying `f` to every real matrix unit of the input space.
    ///
    /// `f` must be complex-linear (for `Linear`) or conjugate-linear (for `ConjugateLinear`);
    /// on real inputs both flavours agree with the kernel column.
    pub fn from_fn<F>(
        dim_in: (usize, usize),
        dim_out: (usize, usize),
        linearity: Linearity,
        mut f: F,
    ) -> Self
    where
        F: FnMut(&ComplexMatrix<T>) -> ComplexMatrix<T>,
    {
        let n_in = dim_in.0 * dim_in.1;
        let mut kernel = DMatrix::zeros(dim_out.0 * dim_out.1, n_in);
        let mut basis = DMatrix::zeros(dim_in.0, dim_in.1);
        for j in 0..n_in {
            basis.as_mut_slice()[j] = real(T::one());
            let image = f(&basis);
            assert_eq!(image.shape(), dim_out, "from_fn: image has wrong shape");
            kernel.set_column(j, &vec(&image));
            basis.as_mut_slice()[j] = real(T::zero());
        }
        Self {
            dim_in,
            dim_out,
            kernel,
            linearity,
        }
    }

    pub fn identity(shape: (usize, usize)) -> Self {
        let n = shape.0 * shape.1;
        Self {
            dim_in: shape,
            dim_out: shape,
            kernel: DMatrix::identity(n, n),
            linearity: Linearity::Linear,
        }
    }

    pub fn zero(dim_in: (usize, usize), dim_out: (usize, usize)) -> Self {
        Self {
            dim_in,
            dim_out,
            kernel: DMatrix::zeros(dim_out.0 * dim_out.1, dim_in.0 * dim_in.1),
            linearity: Linearity::Linear,
        }
    }

    /// Entrywise complex conjugation.
    pub fn conjugation(shape: (usize, usize)) -> Self {
        Self {
            linearity: Linearity::ConjugateLinear,
            ..Self::identity(shape)
        }
    }

    /// `z ↦ left · z · right`.
    pub fn sandwich(left: &ComplexMatrix<T>, right: &ComplexMatrix<T>) -> Self {
        Self {
            dim_in: (left.ncols(), right.nrows()),
            dim_out: (left.nrows(), right.ncols()),
            kernel: right.transpose().kronecker(left),
            linearity: Linearity::Linear,
        }
    }

    pub fn dim_in(&self) -> (usize, usize) {
        self.dim_in
    }

    pub fn dim_out(&self) -> (usize, usize) {
        self.dim_out
    }

    pub fn kernel(&self) -> &ComplexMatrix<T> {
        &self.kernel
    }

    pub fn linearity(&self) -> Linearity {
        self.linearity
    }

    pub fn is_linear(&self) -> bool {
        self.linearity == Linearity::Linear
    }

    /// Frobenius norm of the kernel.
    pub fn kernel_norm(&self) -> T {
        self.kernel.norm()
    }

    pub fn apply(&self, z: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if z.shape() != self.dim_in {
            return Err(Error::ShapeMismatch {
                expected: self.dim_in,
                found: z.shape(),
            });
        }
        let v = match self.linearity {
            Linearity::Linear => vec(z),
            Linearity::ConjugateLinear => vec(z).map(|c| c.conjugate()),
        };
        Ok(unvec(&(&self.kernel * v), self.dim_out.0, self.dim_out.1))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.dim_out != self.dim_in {
            return Err(Error::ShapeMismatch {
                expected: self.dim_in,
                found: inner.dim_out,
            });
        }
        let kernel = match self.linearity {
            Linearity::Linear => &self.kernel * &inner.kernel,
            Linearity::ConjugateLinear => &self.kernel * inner.kernel.map(|c| c.conjugate()),
        };
        Ok(Self {
            dim_in: inner.dim_in,
            dim_out: self.dim_out,
            kernel,
            linearity: self.linearity.compose(inner.linearity),
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::ShapeMismatch {
                expected: self.dim_in,
                found: other.dim_in,
            });
        }
        if self.linearity != other.linearity {
            return Err(Error::MixedLinearity);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            kernel: &self.kernel + &other.kernel,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            kernel: &self.kernel - &other.kernel,
            ..self.clone()
        })
    }

    /// `z ↦ c · S(z)`.
    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            kernel: &self.kernel * c,
            ..self.clone()
        }
    }

    /// Exponential of a complex-linear operator on a single matrix space.
    pub fn exp(&self) -> Result<Self> {
        if !self.is_linear() {
            return Err(Error::ConjugateLinearInput);
        }
        if self.dim_in != self.dim_out {
            return Err(Error::ShapeMismatch {
                expected: self.dim_in,
                found: self.dim_out,
            });
        }
        ensure_finite(&self.kernel)?;
        Ok(Self {
            kernel: mat_exp(&self.kernel)?,
            ..self.clone()
        })
    }

    /// Adjoint for the Frobenius inner product (complex-linear operators only).
    pub fn adjoint(&self) -> Result<Self> {
        if !self.is_linear() {
            return Err(Error::ConjugateLinearInput);
        }
        Ok(Self {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            kernel: self.kernel.adjoint(),
            linearity: Linearity::Linear,
        })
    }

    /// Smallest singular value of the kernel; zero means the operator is not injective.
    pub fn min_singular_value(&self) -> T {
        super::singular_values(&self.kernel)
            .last()
            .copied()
            .unwrap_or(T::zero())
    }
}

/// Applies `S` to `z`.
pub fn super_apply<T: Real>(
    s: &SuperOperator<T>,
    z: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    s.apply(z)
}

/// Exponential of a complex-linear superoperator.
pub fn super_exp<T: Real>(s: &SuperOperator<T>) -> Result<SuperOperator<T>> {
    s.exp()
}
