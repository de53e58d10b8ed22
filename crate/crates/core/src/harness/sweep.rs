//! Monte-Carlo NMSE sweeps over an SNR grid.
//!
//! Trials are independent and data-parallel; every trial derives its own RNG
//! streams from the experiment seed, so results are identical regardless of
//! thread count, and byte-identical across reruns.

use crate::als::{als_estimate, ScoreSource};
use crate::channel::{assemble_hbar, sample_channel_set, sample_gaussian_hbar};
use crate::classical::{ls_estimate, mmse_estimate};
use crate::exec::map_indexed;
use crate::numerics::{stream, ComplexMatrix, Rng};
use crate::pilot::{build_pilots, simulate_observation};
use crate::score::Checkpoint;
use crate::{Error, Result};

use super::config::{ChannelMode, EstimatorKind, ExperimentConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub estimator: String,
    pub snr_db: f64,
    pub link: String,
    pub nmse_mean: f64,
    pub nmse_ci95: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// (estimator label, snr_db, diverged trial count); only nonzero entries.
    pub diverged: Vec<(String, f64, usize)>,
}

/// Per-trial NMSE of one estimate: direct link, then the average over
/// cascaded links. Ratios are scale-invariant, so the `sqrt(alpha_k)` factor
/// common to estimate and truth cancels.
fn link_nmse(est: &ComplexMatrix, hbar: &ComplexMatrix) -> Result<(f64, Option<f64>)> {
    let k = hbar.cols() - 1;
    let ratio = |col: usize| -> Result<f64> {
        let truth = hbar.column(col);
        let denom = truth.frob_norm_sq();
        if denom == 0.0 {
            return Err(Error::invalid(format!(
                "zero ground-truth channel in column {col}"
            )));
        }
        Ok(est.column(col).sub(&truth)?.frob_norm_sq() / denom)
    };
    let direct = ratio(0)?;
    let cascaded = if k == 0 {
        None
    } else {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += ratio(j)?;
        }
        Some(acc / k as f64)
    };
    Ok((direct, cascaded))
}

fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

/// Runs the full sweep. Langevin divergences are counted per estimator and
/// SNR point and excluded from the aggregates; all other errors abort.
pub fn run_sweep(
    config: &ExperimentConfig,
    checkpoint: Option<&Checkpoint>,
) -> Result<SweepReport> {
    config.validate()?;
    if config.needs_checkpoint() && checkpoint.is_none() {
        return Err(Error::Config(
            "estimator list includes the trained sampler but no checkpoint was given".into(),
        ));
    }
    let prior = config.prior_spec()?;
    let root = Rng::new(config.seed);
    let k = config.fading.k_tags;
    let m = config.fading.m_antennas;

    let sources: Vec<Option<ScoreSource>> = config
        .estimators
        .iter()
        .map(|e| match e {
            EstimatorKind::Ls | EstimatorKind::Mmse => None,
            EstimatorKind::AlsAnalytic => Some(ScoreSource::AnalyticGaussian {
                column_scales: prior.column_scales.clone(),
            }),
            EstimatorKind::AlsTrained => {
                Some(ScoreSource::Trained(&checkpoint.unwrap().score))
            }
        })
        .collect();

    let mut rows = Vec::new();
    let mut diverged = Vec::new();
    for (si, &snr_db) in config.snr_db.iter().enumerate() {
        let p_p = config.p_p(snr_db);
        let pilots = build_pilots(
            k,
            config.tau,
            p_p,
            config.source_pilot,
            &mut root.derive2(stream::PILOT, si as u64),
        )?;
        let als_cfg = config.als.to_als_config(p_p, config.tau, config.sigma2)?;

        // One entry per estimator: Some((direct, cascaded)) or None when the
        // sampler diverged in that trial.
        type TrialOut = Vec<Option<(f64, Option<f64>)>>;
        let trial = |t: usize| -> Result<TrialOut> {
            let idx = (si * config.trials + t) as u64;
            let hbar = match config.channel_mode {
                ChannelMode::Mixture => assemble_hbar(&sample_channel_set(
                    &config.fading,
                    &mut root.derive2(stream::CHANNEL, idx),
                )?),
                ChannelMode::GaussianColumns => sample_gaussian_hbar(
                    m,
                    &prior.column_scales,
                    &mut root.derive2(stream::CHANNEL, idx),
                )?,
            };
            let y = simulate_observation(
                &hbar,
                &pilots,
                config.sigma2,
                &mut root.derive2(stream::NOISE, idx),
            )?;
            let mut out = Vec::with_capacity(config.estimators.len());
            for (ei, est) in config.estimators.iter().enumerate() {
                let estimate = match est {
                    EstimatorKind::Ls => Ok(ls_estimate(&y, &pilots)?),
                    EstimatorKind::Mmse => {
                        Ok(mmse_estimate(&y, &pilots, &prior, config.sigma2)?)
                    }
                    EstimatorKind::AlsAnalytic | EstimatorKind::AlsTrained => als_estimate(
                        &y,
                        &pilots,
                        config.sigma2,
                        &als_cfg,
                        sources[ei].as_ref().expect("sampler has a score source"),
                        &mut root.derive2(stream::LANGEVIN, idx).derive(ei as u64),
                    ),
                };
                match estimate {
                    Ok(h) => out.push(Some(link_nmse(&h, &hbar)?)),
                    Err(Error::SamplingDiverged { .. }) => out.push(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        };

        let results = map_indexed(config.trials, trial);
        let mut per_est: Vec<(Vec<f64>, Vec<f64>, usize)> =
            vec![(Vec::new(), Vec::new(), 0); config.estimators.len()];
        for r in results {
            let outs = r?;
            for (ei, o) in outs.into_iter().enumerate() {
                match o {
                    Some((d, c)) => {
                        per_est[ei].0.push(d);
                        if let Some(c) = c {
                            per_est[ei].1.push(c);
                        }
                    }
                    None => per_est[ei].2 += 1,
                }
            }
        }

        for (ei, est) in config.estimators.iter().enumerate() {
            let (direct, cascaded, failed) = &per_est[ei];
            if *failed > 0 {
                diverged.push((est.label().to_string(), snr_db, *failed));
            }
            if direct.is_empty() {
                return Err(Error::invalid(format!(
                    "all {} trials diverged for {} at {} dB; try a smaller beta0",
                    config.trials,
                    est.label(),
                    snr_db
                )));
            }
            let (mean, ci) = mean_ci95(direct);
            rows.push(SweepRow {
                estimator: est.label().to_string(),
                snr_db,
                link: "direct".to_string(),
                nmse_mean: mean,
                nmse_ci95: ci,
                trials: direct.len(),
            });
            if !cascaded.is_empty() {
                let (mean, ci) = mean_ci95(cascaded);
                rows.push(SweepRow {
                    estimator: est.label().to_string(),
                    snr_db,
                    link: "cascaded_avg".to_string(),
                    nmse_mean: mean,
                    nmse_ci95: ci,
                    trials: cascaded.len(),
                });
            }
        }
    }
    Ok(SweepReport { rows, diverged })
}

pub fn sweep_csv_string(rows: &[SweepRow]) -> String {
    let mut out = String::from("estimator,snr_db,link,nmse_mean,nmse_ci95,trials\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.10e},{:.10e},{}\n",
            r.estimator, r.snr_db, r.link, r.nmse_mean, r.nmse_ci95, r.trials
        ));
    }
    out
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &std::path::Path) -> Result<()> {
    use std::io::Write;
    let mut f = std::fs::File::create(path)?;
    f.write_all(sweep_csv_string(rows).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::AlsSettings;
    use crate::pilot::SourcePilot;
    use crate::score::TrainConfig;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            fading: crate::channel::FadingConfig::rayleigh(8, 3, 0.6),
            channel_mode: ChannelMode::GaussianColumns,
            tau: 4,
            source_pilot: SourcePilot::AllOnes,
            snr_db: vec![0.0, 10.0],
            sigma2: 1.0,
            estimators: vec![
                EstimatorKind::Ls,
                EstimatorKind::Mmse,
                EstimatorKind::AlsAnalytic,
            ],
            trials: 60,
            seed: 3,
            als: AlsSettings {
                beta0: None,
                zeta: 1e-4,
                n_steps: 6,
                sigma_min: 0.3,
                sigma_max: 2.0,
                t_scales: 12,
            },
            train: TrainConfig::default(),
        }
    }

    #[test]
    fn deterministic_and_csv_schema() {
        let cfg = small_config();
        let a = run_sweep(&cfg, None).unwrap();
        let b = run_sweep(&cfg, None).unwrap();
        assert_eq!(a.rows, b.rows);
        let csv = sweep_csv_string(&a.rows);
        assert!(csv.starts_with("estimator,snr_db,link,nmse_mean,nmse_ci95,trials\n"));
        // 2 SNR points x 3 estimators x 2 links.
        assert_eq!(csv.lines().count(), 1 + 12);
        assert_eq!(csv, sweep_csv_string(&b.rows));
    }

    #[test]
    fn mmse_beats_ls_on_direct_link() {
        let mut cfg = small_config();
        cfg.trials = 300;
        cfg.snr_db = vec![0.0];
        cfg.estimators = vec![EstimatorKind::Ls, EstimatorKind::Mmse];
        let rep = run_sweep(&cfg, None).unwrap();
        let get = |est: &str| {
            rep.rows
                .iter()
                .find(|r| r.estimator == est && r.link == "direct")
                .unwrap()
                .nmse_mean
        };
        assert!(get("mmse") < get("ls"), "mmse {} ls {}", get("mmse"), get("ls"));
    }

    #[test]
    fn trained_sampler_without_checkpoint_rejected() {
        let mut cfg = small_config();
        cfg.estimators = vec![EstimatorKind::AlsTrained];
        assert!(matches!(run_sweep(&cfg, None), Err(Error::Config(_))));
    }

    #[test]
    fn divergence_is_reported_not_silent() {
        let mut cfg = small_config();
        cfg.snr_db = vec![0.0];
        cfg.trials = 5;
        cfg.estimators = vec![EstimatorKind::Ls, EstimatorKind::AlsAnalytic];
        cfg.als.beta0 = Some(1e15);
        let err = run_sweep(&cfg, None).unwrap_err();
        assert!(err.to_string().contains("diverged"), "{err}");
    }

    #[test]
    fn zero_truth_channel_rejected() {
        let est = ComplexMatrix::zeros(2, 2);
        let hbar = ComplexMatrix::zeros(2, 2);
        assert!(link_nmse(&est, &hbar).is_err());
    }

    #[test]
    fn ci_of_constant_series_is_zero() {
        let (m, c) = mean_ci95(&[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(m, 2.0);
        assert_eq!(c, 0.0);
        let (m1, c1) = mean_ci95(&[5.0]);
        assert_eq!(m1, 5.0);
        assert_eq!(c1, 0.0);
    }
}
