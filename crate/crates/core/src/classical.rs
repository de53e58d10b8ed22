//! LS and linear-MMSE baseline estimators.
//!
//! Both operate on the decorrelated observation `Y S^H`. The LS estimate
//! inverts the orthogonal pilot structure exactly; the MMSE estimate shrinks
//! each LS column by the scalar Wiener factor `r_k / (r_k + sigma^2/(p_p tau))`
//! for the per-column prior `CN(0, r_k I)`. Cascaded columns are not Gaussian,
//! so there the shrinkage is a moment-matched surrogate, not Bayes-optimal.

use crate::numerics::ComplexMatrix;
use crate::pilot::PilotSet;
use crate::{Error, Result};

/// Per-column prior covariance scales r_k (covariance model R_k = r_k I).
#[derive(Debug, Clone)]
pub struct PriorSpec {
    pub column_scales: Vec<f64>,
}

impl PriorSpec {
    pub fn new(column_scales: Vec<f64>) -> Result<Self> {
        if column_scales.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::invalid("prior scales must be >= 0"));
        }
        Ok(Self { column_scales })
    }
}

/// `Ĥ_LS = Y S^H C^H / (sqrt(p_p) tau)`; unbiased with per-element error
/// variance `sigma^2 / (p_p tau)`.
pub fn ls_estimate(y: &ComplexMatrix, pilots: &PilotSet) -> Result<ComplexMatrix> {
    if y.cols() != pilots.tau {
        return Err(Error::dims(format!(
            "observation has {} columns, pilots have tau = {}",
            y.cols(),
            pilots.tau
        )));
    }
    let decorrelated = y
        .matmul(&pilots.s_diag().hermitian())?
        .matmul(&pilots.c.hermitian())?;
    Ok(decorrelated.scale_re(1.0 / (pilots.p_p.sqrt() * pilots.tau as f64)))
}

/// Per-column Wiener shrinkage of the LS estimate.
pub fn mmse_estimate(
    y: &ComplexMatrix,
    pilots: &PilotSet,
    prior: &PriorSpec,
    sigma2: f64,
) -> Result<ComplexMatrix> {
    let ls = ls_estimate(y, pilots)?;
    if prior.column_scales.len() != ls.cols() {
        return Err(Error::dims(format!(
            "prior has {} scales for {} columns",
            prior.column_scales.len(),
            ls.cols()
        )));
    }
    let noise_scale = sigma2 / (pilots.p_p * pilots.tau as f64);
    let mut out = ls.clone();
    for (k, &r) in prior.column_scales.iter().enumerate() {
        let w = if r == 0.0 { 0.0 } else { r / (r + noise_scale) };
        out.set_column(k, &ls.column(k).scale_re(w));
    }
    Ok(out)
}

/// Moment-matched Gaussian surrogate scale for a cascaded column:
/// the per-element second moment of `sqrt(alpha) f g` under independence.
pub fn cascaded_prior_scale(alpha: f64, var_f: f64, var_g: f64) -> f64 {
    alpha * var_f * var_g
}
