use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channel::{assemble_hbar, sample_channel_set, FadingConfig};
use crate::numerics::{sample_complex_gaussian, Rng};
use crate::{Error, Result};

use super::loss::{disc_loss_grad, dsm_loss_grad, gen_loss_grad, DsmBatch};
use super::model::{DiscModel, ScoreModel};
use super::nn::Adam;
use super::schedule::NoiseSchedule;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// DSM-vs-adversarial weight.
    pub lambda: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub lr_score: f64,
    pub lr_disc: f64,
    /// Multiplicative per-epoch learning-rate decay in (0, 1]. The DSM
    /// target is very noisy, so a constant step leaves Adam orbiting a
    /// gradient-noise ball; decay shrinks the ball.
    #[serde(default = "default_lr_decay")]
    pub lr_decay: f64,
    pub dataset_size: usize,
    pub seed: u64,
    pub hidden_layers: usize,
    pub width: usize,
    pub disc_hidden_layers: usize,
    pub disc_width: usize,
    /// When false the discriminator is left untouched and training is pure
    /// denoising score matching.
    pub adversarial: bool,
}

fn default_lr_decay() -> f64 {
    1.0
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            batch_size: 32,
            epochs: 40,
            lr_score: 1e-3,
            lr_disc: 1e-4,
            lr_decay: 1.0,
            dataset_size: 10_000,
            seed: 0,
            hidden_layers: 4,
            width: 256,
            disc_hidden_layers: 3,
            disc_width: 128,
            adversarial: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::invalid("lambda must be > 0"));
        }
        for (name, v) in [
            ("batch_size", self.batch_size),
            ("dataset_size", self.dataset_size),
            ("width", self.width),
            ("hidden_layers", self.hidden_layers),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if !(self.lr_score > 0.0 && self.lr_disc > 0.0) {
            return Err(Error::invalid("learning rates must be > 0"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::invalid("lr_decay must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub dsm_loss: f64,
    pub disc_loss: f64,
    pub gen_adv_loss: f64,
}

/// Dataset of stacked channel realizations drawn from the AmBC mixture
/// (Gaussian direct column, product-fading cascaded columns).
pub fn generate_mixture_dataset(
    config: &FadingConfig,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .map(|_| Ok(assemble_hbar(&sample_channel_set(config, rng)?).to_real_stack()))
        .collect()
}

/// Dataset of stacked CN(0, variance) matrices.
pub fn generate_gaussian_dataset(
    m_antennas: usize,
    columns: usize,
    variance: f64,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .map(|_| {
            Ok(sample_complex_gaussian(m_antennas, columns, variance, rng)?.to_real_stack())
        })
        .collect()
}

/// Alternating adversarial training: one discriminator update (theta frozen)
/// then one generator update (phi frozen) per batch. Deterministic under a
/// fixed config seed.
pub fn train_adversarial(
    config: &TrainConfig,
    dataset: &[Vec<f64>],
    schedule: &NoiseSchedule,
    m_antennas: usize,
    columns: usize,
) -> Result<(ScoreModel, DiscModel, Vec<EpochLog>)> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    let d = 2 * m_antennas * columns;
    if dataset.iter().any(|s| s.len() != d) {
        return Err(Error::dims(format!(
            "dataset samples must have stacked length {d}"
        )));
    }
    let root = Rng::new(config.seed);
    let mut init_rng = root.derive(1);
    let mut model = ScoreModel::new(
        m_antennas,
        columns,
        config.hidden_layers,
        config.width,
        &mut init_rng,
    )?;
    let mut disc = DiscModel::new(
        m_antennas,
        columns,
        config.disc_hidden_layers,
        config.disc_width,
        &mut init_rng,
    )?;
    let mut adam_theta = Adam::new(config.lr_score, model.net.num_params());
    let mut adam_phi = Adam::new(config.lr_disc, disc.net.num_params());
    let mut shuffle_rng = root.derive(2);
    let mut batch_rng = root.derive(3);

    let mut log = Vec::with_capacity(config.epochs);
    let mut indices: Vec<usize> = (0..dataset.len()).collect();
    for epoch in 0..config.epochs {
        let decay = config.lr_decay.powi(epoch as i32);
        adam_theta.lr = config.lr_score * decay;
        adam_phi.lr = config.lr_disc * decay;
        indices.shuffle(&mut shuffle_rng);
        let mut dsm_acc = 0.0;
        let mut disc_acc = 0.0;
        let mut adv_acc = 0.0;
        let mut batches = 0usize;
        for (bi, chunk) in indices.chunks(config.batch_size).enumerate() {
            let samples: Vec<&[f64]> = chunk.iter().map(|&i| dataset[i].as_slice()).collect();
            let batch = DsmBatch::build(&samples, schedule, &mut batch_rng)?;

            if config.adversarial {
                let (dl, dgrads) = disc_loss_grad(&disc, &model, &batch)?;
                adam_phi.step(disc.net.params_mut(), &dgrads);
                disc_acc += dl;
                let (gl, ggrads, (adv, dsm)) =
                    gen_loss_grad(&model, &disc, &batch, config.lambda)?;
                adam_theta.step(model.net.params_mut(), &ggrads);
                adv_acc += adv;
                dsm_acc += dsm;
                if !gl.is_finite() {
                    return Err(Error::TrainingDiverged {
                        epoch,
                        batch: bi,
                        what: "non-finite generator loss".into(),
                    });
                }
            } else {
                let (dl, grads) = dsm_loss_grad(&model, &batch, config.lambda)?;
                adam_theta.step(model.net.params_mut(), &grads);
                dsm_acc += dl;
                if !dl.is_finite() {
                    return Err(Error::TrainingDiverged {
                        epoch,
                        batch: bi,
                        what: "non-finite DSM loss".into(),
                    });
                }
            }
            if !model.net.params_finite() || !disc.net.params_finite() {
                return Err(Error::TrainingDiverged {
                    epoch,
                    batch: bi,
                    what: "non-finite parameters after update".into(),
                });
            }
            batches += 1;
        }
        let b = batches.max(1) as f64;
        log.push(EpochLog {
            epoch,
            dsm_loss: dsm_acc / b,
            disc_loss: disc_acc / b,
            gen_adv_loss: adv_acc / b,
        });
    }
    Ok((model, disc, log))
}

/// Writes the per-epoch training log as CSV.
pub fn write_training_log(log: &[EpochLog], path: &std::path::Path) -> Result<()> {
    use std::io::Write;
    let mut out = String::from("epoch,dsm_loss,disc_loss,gen_adv_loss\n");
    for e in log {
        out.push_str(&format!(
            "{},{:.10e},{:.10e},{:.10e}\n",
            e.epoch, e.dsm_loss, e.disc_loss, e.gen_adv_loss
        ));
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
