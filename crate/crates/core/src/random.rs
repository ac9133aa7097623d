//! Seeded random sampling of matrices, unitaries and normal algebraic elements.
//!
//! Every generator draws from a ChaCha8 stream seeded with a single `u64`, so a seed
//! reproduces the same matrices on every platform. Haar unitaries come from the QR
//! factorisation of a complex Ginibre matrix with the phases of `diag(R)` divided out.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::scalar::{real, Real};

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for trial `index` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, stream: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(index) << 20);
        Self { rng }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn complex_gaussian<T: Real>(&mut self) -> Complex<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex::new(T::lit(s * self.gaussian()), T::lit(s * self.gaussian()))
    }

    /// Complex Ginibre matrix with unit-variance entries.
    pub fn ginibre<T: Real>(&mut self, rows: usize, cols: usize) -> ComplexMatrix<T> {
        let data: Vec<Complex<T>> = (0..rows * cols).map(|_| self.complex_gaussian()).collect();
        DMatrix::from_column_slice(rows, cols, &data)
    }

    /// Ginibre matrix rescaled to unit Frobenius norm.
    pub fn unit_matrix<T: Real>(&mut self, rows: usize, cols: usize) -> ComplexMatrix<T> {
        let m = self.ginibre::<T>(rows, cols);
        let n = m.norm();
        m / real(n)
    }

    pub fn hermitian<T: Real>(&mut self, n: usize) -> ComplexMatrix<T> {
        let g = self.ginibre::<T>(n, n);
        (&g + g.adjoint()) * real(T::lit(0.5))
    }

    pub fn haar_unitary<T: Real>(&mut self, n: usize) -> ComplexMatrix<T> {
        let qr = self.ginibre::<T>(n, n).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            let m = d.modulus();
            if m > T::zero() {
                let phase = d / real(m);
                let mut col = q.column_mut(j);
                col *= phase;
            }
        }
        q
    }

    /// Orthonormal `n × k` frame (first `k` columns of a Haar unitary).
    pub fn frame<T: Real>(&mut self, n: usize, k: usize) -> ComplexMatrix<T> {
        self.haar_unitary::<T>(n).columns(0, k).into_owned()
    }

    /// Uniformly oriented orthogonal projection of rank `r` in dimension `n`.
    pub fn projection<T: Real>(&mut self, n: usize, r: usize) -> ComplexMatrix<T> {
        let f = self.frame::<T>(n, r);
        &f * f.adjoint()
    }

    /// Random `rows × cols` partial isometry of rank `r`.
    pub fn partial_isometry<T: Real>(
        &mut self,
        rows: usize,
        cols: usize,
        r: usize,
    ) -> ComplexMatrix<T> {
        let left = self.frame::<T>(rows, r);
        let right = self.frame::<T>(cols, r);
        left * right.adjoint()
    }

    /// `U (Σ λ_k D_k) U*` with `D_k` consecutive diagonal blocks of size `r_k`.
    ///
    /// Panics when the ranks do not fit in `dim`.
    pub fn normal_element<T: Real>(
        &mut self,
        dim: usize,
        spectrum: &[(Complex<T>, usize)],
    ) -> ComplexMatrix<T> {
        let total: usize = spectrum.iter().map(|&(_, r)| r).sum();
        assert!(total <= dim, "ranks exceed the dimension");
        let mut d = DMatrix::zeros(dim, dim);
        let mut i = 0;
        for &(lambda, r) in spectrum {
            for _ in 0..r {
                d[(i, i)] = lambda;
                i += 1;
            }
        }
        let u = self.haar_unitary::<T>(dim);
        &u * d * u.adjoint()
    }

    /// `Σ λ_k A_k A'_k*` for Haar frames split into consecutive blocks of size `r_k`.
    ///
    /// Panics when the ranks exceed `min(rows, cols)`.
    pub fn rectangular_element<T: Real>(
        &mut self,
        rows: usize,
        cols: usize,
        spectrum: &[(T, usize)],
    ) -> ComplexMatrix<T> {
        let total: usize = spectrum.iter().map(|&(_, r)| r).sum();
        assert!(total <= rows.min(cols), "ranks exceed the dimension");
        let left = self.frame::<T>(rows, total);
        let right = self.frame::<T>(cols, total);
        let mut d = DMatrix::zeros(total, total);
        let mut i = 0;
        for &(lambda, r) in spectrum {
            for _ in 0..r {
                d[(i, i)] = real(lambda);
                i += 1;
            }
        }
        left * d * right.adjoint()
    }

    /// `n` distinct values in `[0.5, 3]`, sorted increasingly and pairwise at least `0.3` apart.
    pub fn singular_spectrum<T: Real>(&mut self, n: usize) -> Vec<T> {
        let mut out: Vec<f64> = Vec::with_capacity(n);
        while out.len() < n {
            let x = self.uniform(0.5, 3.0);
            if out.iter().all(|w| (w - x).abs() >= 0.3) {
                out.push(x);
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out.into_iter().map(T::lit).collect()
    }

    /// `n` distinct nonzero spectral values, pairwise at least `0.5` apart, with
    /// modulus in `[0.5, 3]`. Real when `complex` is false.
    pub fn spectrum<T: Real>(&mut self, n: usize, complex: bool) -> Vec<Complex<T>> {
        let mut out: Vec<Complex<f64>> = Vec::with_capacity(n);
        while out.len() < n {
            let z = if complex {
                let r = self.uniform(0.5, 3.0);
                let th = self.uniform(0.0, std::f64::consts::TAU);
                Complex::from_polar(r, th)
            } else {
                let r = self.uniform(0.5, 3.0);
                if self.rng.random::<bool>() {
                    Complex::new(r, 0.0)
                } else {
                    Complex::new(-r, 0.0)
                }
            };
            if out.iter().all(|w| (w - z).norm() >= 0.5) {
                out.push(z);
            }
        }
        out.into_iter()
            .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
            .collect()
    }

    /// Random positive rank composition with `n` parts summing to at most `dim`.
    pub fn ranks(&mut self, n: usize, max_total: usize) -> Vec<usize> {
        assert!(n <= max_total);
        let mut r = vec![1usize; n];
        let extra = self.index(max_total - n + 1);
        for _ in 0..extra {
            let k = self.index(n);
            r[k] += 1;
        }
        r
    }
}
