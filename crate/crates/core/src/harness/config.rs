use serde::{Deserialize, Serialize};

use crate::als::AlsConfig;
use crate::channel::FadingConfig;
use crate::classical::{cascaded_prior_scale, PriorSpec};
use crate::pilot::SourcePilot;
use crate::score::{make_schedule, TrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Ls,
    Mmse,
    /// Langevin sampler with the exact Gaussian-prior score (verification arm).
    AlsAnalytic,
    /// Langevin sampler with a trained score network from a checkpoint.
    #[serde(rename = "als", alias = "als_trained")]
    AlsTrained,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Ls => "ls",
            EstimatorKind::Mmse => "mmse",
            EstimatorKind::AlsAnalytic => "als_analytic",
            EstimatorKind::AlsTrained => "als",
        }
    }
}

/// How ground-truth channels are drawn per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Gaussian direct column, product-fading cascaded columns.
    Mixture,
    /// Every column CN(0, r_k I) with the moment-matched scales; here the
    /// closed-form MMSE baseline is exactly Bayes-optimal.
    GaussianColumns,
}

/// Langevin sampler settings; `beta0 = None` selects the built-in heuristic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlsSettings {
    pub beta0: Option<f64>,
    pub zeta: f64,
    pub n_steps: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_scales: usize,
}

/// Step-size heuristic: scale the step to the posterior curvature, which is
/// dominated by the likelihood term `p_p tau / sigma^2` at high SNR and by
/// the widest prior scale at low SNR. Refine with `grid_search_beta` when a
/// few percent matter.
pub fn auto_beta0(p_p: f64, tau: usize, sigma2: f64, sigma_max: f64) -> f64 {
    1.7 / (p_p * tau as f64 / sigma2 + 1.0 / (1.0 + sigma_max * sigma_max))
}

impl AlsSettings {
    pub fn to_als_config(&self, p_p: f64, tau: usize, sigma2: f64) -> Result<AlsConfig> {
        let beta0 = self
            .beta0
            .unwrap_or_else(|| auto_beta0(p_p, tau, sigma2, self.sigma_max));
        Ok(AlsConfig {
            beta0,
            zeta: self.zeta,
            n_steps: self.n_steps,
            schedule: make_schedule(self.sigma_min, self.sigma_max, self.t_scales)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub fading: FadingConfig,
    pub channel_mode: ChannelMode,
    pub tau: usize,
    pub source_pilot: SourcePilot,
    /// SNR grid in dB; pilot power is `p_p = sigma2 * 10^(snr/10)`.
    pub snr_db: Vec<f64>,
    pub sigma2: f64,
    pub estimators: Vec<EstimatorKind>,
    pub trials: usize,
    pub seed: u64,
    pub als: AlsSettings,
    pub train: TrainConfig,
}

impl ExperimentConfig {
    /// Full-scale setup: M = 48 antennas, K = 7 tags, tau = 8, a 2311-scale
    /// schedule up to sigma^2 = 36.77 with beta0 = 3e-9, zeta = 1e-4.
    pub fn fullscale() -> Self {
        Self {
            fading: FadingConfig::rayleigh(48, 7, 0.6),
            channel_mode: ChannelMode::Mixture,
            tau: 8,
            source_pilot: SourcePilot::AllOnes,
            snr_db: vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            sigma2: 1.0,
            estimators: vec![EstimatorKind::Ls, EstimatorKind::Mmse],
            trials: 500,
            seed: 0,
            als: AlsSettings {
                beta0: Some(3e-9),
                zeta: 1e-4,
                n_steps: 6,
                sigma_min: 0.01,
                sigma_max: 36.77f64.sqrt(),
                t_scales: 2311,
            },
            train: TrainConfig::default(),
        }
    }

    /// Down-scaled setup that runs in seconds: M = 8, K = 3, tau = 4, a
    /// 20-scale schedule on [0.3, 2.0] with the beta0 heuristic.
    pub fn desk() -> Self {
        Self {
            fading: FadingConfig::rayleigh(8, 3, 0.6),
            channel_mode: ChannelMode::Mixture,
            tau: 4,
            source_pilot: SourcePilot::AllOnes,
            snr_db: vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            sigma2: 1.0,
            estimators: vec![EstimatorKind::Ls, EstimatorKind::Mmse],
            trials: 400,
            seed: 0,
            als: AlsSettings {
                beta0: None,
                zeta: 1e-4,
                n_steps: 6,
                sigma_min: 0.3,
                sigma_max: 2.0,
                t_scales: 20,
            },
            train: TrainConfig {
                dataset_size: 10_000,
                ..TrainConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fading.validate()?;
        if self.snr_db.is_empty() {
            return Err(Error::Config("snr_db grid is empty".into()));
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "snr_db must be strictly increasing".into(),
            ));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::Config("sigma2 must be > 0".into()));
        }
        Ok(())
    }

    pub fn p_p(&self, snr_db: f64) -> f64 {
        self.sigma2 * 10f64.powf(snr_db / 10.0)
    }

    /// Per-column prior scales: direct variance, then the moment-matched
    /// cascaded second moments `alpha_k * var_f * var_g`.
    pub fn prior_spec(&self) -> Result<PriorSpec> {
        let v = self.fading.per_element_variance;
        PriorSpec::new(
            std::iter::once(v)
                .chain(
                    self.fading
                        .alpha
                        .iter()
                        .map(|&a| cascaded_prior_scale(a, v, v)),
                )
                .collect(),
        )
    }

    pub fn needs_checkpoint(&self) -> bool {
        self.estimators.contains(&EstimatorKind::AlsTrained)
    }

    pub fn from_toml_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            what: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }
}
