//! Complex-matrix arithmetic and seeded random sampling.

mod matrix;
mod rng;
mod sampling;

pub use matrix::ComplexMatrix;
pub use rng::{stream, Rng};
pub use sampling::{sample_complex_gaussian, sample_nakagami_vector};

pub use num_complex::Complex64;
