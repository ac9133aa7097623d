//! Peirce calculus, spectral resolutions and the invariant geometry of normal algebraic
//! elements in the matrix JB*-triples `M_{p,q}(ℂ)` with `2{abc} = ab*c + cb*a`.
//!
//! Every routine is generic over [`Real`] (`f32`, `f64`); the aliases below fix `f64`.

pub mod error;
pub mod jb;
pub mod linalg;
pub mod manifold;
pub mod peirce;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod triple;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type C64 = Complex<f64>;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Tol = linalg::Tolerance<f64>;
pub type Resolution = spectral::SpectralResolution<f64>;
pub type Signature = spectral::ComponentSignature<f64>;
pub type JbResolution = jb::TripotentResolution<f64>;
pub type Geodesic = manifold::Geodesic<f64>;
pub type BasePoint = manifold::BasePoint<f64>;
