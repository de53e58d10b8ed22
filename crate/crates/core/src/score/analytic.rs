use crate::numerics::{sample_complex_gaussian, ComplexMatrix, Rng};
use crate::{Error, Result};

use super::model::ScoreModel;

/// Noise-perturbed sample: returns `(H_tilde, Z)` with `Z ~ CN(0, sigma_t^2 I)`
/// and `H_tilde = H + Z`, so the DSM target `-Z/sigma_t^2` is exact.
pub fn perturb(
    hbar: &ComplexMatrix,
    sigma_t: f64,
    rng: &mut Rng,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(sigma_t > 0.0) {
        return Err(Error::invalid(format!("sigma_t must be > 0, got {sigma_t}")));
    }
    let z = sample_complex_gaussian(hbar.rows(), hbar.cols(), sigma_t * sigma_t, rng)?;
    let h_tilde = hbar.add(&z)?;
    Ok((h_tilde, z))
}

/// Exact score of a per-column Gaussian prior CN(0, r_k I) convolved with
/// CN(0, sigma_t^2 I): column k maps to `-h_k / (r_k + sigma_t^2)`.
pub fn analytic_gaussian_score(
    h_tilde: &ComplexMatrix,
    column_scales: &[f64],
    sigma_t: f64,
) -> Result<ComplexMatrix> {
    if column_scales.len() != h_tilde.cols() {
        return Err(Error::dims(format!(
            "{} prior scales for {} columns",
            column_scales.len(),
            h_tilde.cols()
        )));
    }
    if column_scales.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::invalid("prior scales must be >= 0"));
    }
    let mut out = ComplexMatrix::zeros(h_tilde.rows(), h_tilde.cols());
    for (k, &r) in column_scales.iter().enumerate() {
        let col = h_tilde.column(k).scale_re(-1.0 / (r + sigma_t * sigma_t));
        out.set_column(k, &col);
    }
    Ok(out)
}

/// Empirical-Bayes (Tweedie) mean from an arbitrary score matrix:
/// `Q = score * sigma_t^2 + H_tilde`.
pub fn empirical_bayes_mean(
    score: &ComplexMatrix,
    h_tilde: &ComplexMatrix,
    sigma_t: f64,
) -> Result<ComplexMatrix> {
    score.scale_re(sigma_t * sigma_t).add(h_tilde)
}

/// Denoised channel `Q(H, sigma_t) = s_theta(H_tilde, sigma_t) sigma_t^2 + H_tilde`.
pub fn denoise_empirical_bayes(
    model: &ScoreModel,
    h_tilde: &ComplexMatrix,
    sigma_t: f64,
) -> Result<ComplexMatrix> {
    let score = model.forward(h_tilde, sigma_t)?;
    empirical_bayes_mean(&score, h_tilde, sigma_t)
}
