//! Step-size grid search for the Langevin sampler.

use crate::score::Checkpoint;
use crate::{Error, Result};

use super::config::ExperimentConfig;
use super::sweep::run_sweep;

#[derive(Debug, Clone)]
pub struct GridCell {
    pub beta0: f64,
    /// Mean NMSE over all reported links, or None when every trial diverged.
    pub nmse: Option<f64>,
    pub diverged_trials: usize,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub snr_db: f64,
    pub cells: Vec<GridCell>,
    /// (beta0, nmse) of the best non-divergent cell.
    pub best: Option<(f64, f64)>,
}

/// Evaluates the sampler at one SNR point for each candidate beta0 and
/// returns the argmin. Divergent cells are kept in the table, flagged, and
/// excluded from the argmin.
pub fn grid_search_beta(
    config: &ExperimentConfig,
    snr_db: f64,
    betas: &[f64],
    checkpoint: Option<&Checkpoint>,
) -> Result<GridResult> {
    if betas.is_empty() {
        return Err(Error::invalid("empty beta0 grid"));
    }
    if betas.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::invalid("beta0 candidates must be > 0"));
    }
    let mut point = config.clone();
    point.snr_db = vec![snr_db];
    point.validate()?;

    let mut cells = Vec::with_capacity(betas.len());
    for &beta in betas {
        point.als.beta0 = Some(beta);
        match run_sweep(&point, checkpoint) {
            Ok(report) => {
                let mean = report.rows.iter().map(|r| r.nmse_mean).sum::<f64>()
                    / report.rows.len() as f64;
                let diverged = report.diverged.iter().map(|d| d.2).sum();
                cells.push(GridCell {
                    beta0: beta,
                    nmse: Some(mean),
                    diverged_trials: diverged,
                });
            }
            // A cell where every trial blows up is a data point, not a
            // failure of the search.
            Err(Error::SamplingDiverged { .. }) | Err(Error::InvalidArgument(_)) => {
                cells.push(GridCell {
                    beta0: beta,
                    nmse: None,
                    diverged_trials: point.trials,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let best = cells
        .iter()
        .filter_map(|c| c.nmse.map(|v| (c.beta0, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(GridResult {
        snr_db,
        cells,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingConfig;
    use crate::harness::config::{AlsSettings, ChannelMode, EstimatorKind};
    use crate::pilot::SourcePilot;
    use crate::score::TrainConfig;

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            fading: FadingConfig::rayleigh(4, 1, 0.6),
            channel_mode: ChannelMode::GaussianColumns,
            tau: 2,
            source_pilot: SourcePilot::AllOnes,
            snr_db: vec![0.0],
            sigma2: 1.0,
            estimators: vec![EstimatorKind::AlsAnalytic],
            trials: 40,
            seed: 5,
            als: AlsSettings {
                beta0: None,
                zeta: 1e-4,
                n_steps: 4,
                sigma_min: 0.3,
                sigma_max: 2.0,
                t_scales: 10,
            },
            train: TrainConfig::default(),
        }
    }

    #[test]
    fn finds_finite_best_and_flags_divergent_cells() {
        let cfg = config();
        let betas = [0.05, 0.2, 1e14];
        let res = grid_search_beta(&cfg, 0.0, &betas, None).unwrap();
        assert_eq!(res.cells.len(), 3);
        assert!(res.cells[2].nmse.is_none(), "huge step must diverge");
        assert!(res.cells[2].diverged_trials > 0);
        let (best_beta, best_nmse) = res.best.unwrap();
        assert!(best_beta < 1.0);
        assert!(best_nmse.is_finite() && best_nmse > 0.0);
    }

    #[test]
    fn empty_and_invalid_grids_rejected() {
        let cfg = config();
        assert!(grid_search_beta(&cfg, 0.0, &[], None).is_err());
        assert!(grid_search_beta(&cfg, 0.0, &[0.0], None).is_err());
    }
}
