use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Geometric sequence of noise scales, strictly increasing with index:
/// sigma_1 = sigma_min < ... < sigma_T = sigma_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    pub sigmas: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl NoiseSchedule {
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn largest(&self, count: usize) -> &[f64] {
        &self.sigmas[self.sigmas.len().saturating_sub(count)..]
    }
}

/// sigma_t = sigma_min * (sigma_max/sigma_min)^((t-1)/(T-1)), endpoints exact.
pub fn make_schedule(sigma_min: f64, sigma_max: f64, t_scales: usize) -> Result<NoiseSchedule> {
    if !(sigma_min > 0.0 && sigma_max > sigma_min) {
        return Err(Error::invalid(format!(
            "need 0 < sigma_min < sigma_max, got ({sigma_min}, {sigma_max})"
        )));
    }
    if t_scales < 2 {
        return Err(Error::invalid("schedule needs at least 2 scales"));
    }
    let ratio = sigma_max / sigma_min;
    let mut sigmas: Vec<f64> = (0..t_scales)
        .map(|i| sigma_min * ratio.powf(i as f64 / (t_scales - 1) as f64))
        .collect();
    sigmas[0] = sigma_min;
    sigmas[t_scales - 1] = sigma_max;
    Ok(NoiseSchedule {
        sigmas,
        sigma_min,
        sigma_max,
    })
}
