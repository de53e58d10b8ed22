use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::{ComplexMatrix, Rng};
use crate::{Error, Result};

/// Circularly-symmetric complex Gaussian matrix with i.i.d. CN(0, variance)
/// entries; the per-element variance splits equally between the real and
/// imaginary parts.
pub fn sample_complex_gaussian(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut Rng,
) -> Result<ComplexMatrix> {
    if variance < 0.0 || !variance.is_finite() {
        return Err(Error::invalid(format!(
            "variance must be finite and >= 0, got {variance}"
        )));
    }
    let s = (variance / 2.0).sqrt();
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect();
    ComplexMatrix::new(rows, cols, data)
}

/// n x 1 vector of Nakagami-m fading coefficients: |entry|^2 is
/// Gamma(shape = m, scale = spread/m) so E|entry|^2 = spread, and the phase
/// is uniform on [0, 2pi).
pub fn sample_nakagami_vector(
    m_shape: f64,
    spread: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<ComplexMatrix> {
    if !(m_shape >= 0.5) {
        return Err(Error::invalid(format!(
            "Nakagami shape must be >= 0.5, got {m_shape}"
        )));
    }
    if !(spread > 0.0) {
        return Err(Error::invalid(format!(
            "Nakagami spread must be > 0, got {spread}"
        )));
    }
    let gamma = Gamma::new(m_shape, spread / m_shape)
        .map_err(|e| Error::invalid(format!("gamma: {e}")))?;
    let data = (0..n)
        .map(|_| {
            let power: f64 = gamma.sample(rng);
            let phase: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(power.sqrt(), phase)
        })
        .collect();
    ComplexMatrix::new(n, 1, data)
}
