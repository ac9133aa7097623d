//! Real scalar abstraction shared by every module.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real field usable as the component type of complex matrices (`f32` or `f64`).
pub trait Real: RealField + Copy + ToPrimitive {
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Lexicographic order on (real part, imaginary part).
pub(crate) fn lex_cmp<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    a.re.partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}
