use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::numerics::Rng;
use crate::{Error, Result};

use super::model::{DiscModel, ScoreModel};
use super::schedule::NoiseSchedule;

/// A training batch of perturbed channels in stacked form. Noise scales are
/// drawn uniformly from the schedule, one per sample; `target` holds the
/// exact conditional score `-Z_t / sigma_t^2`.
pub struct DsmBatch {
    pub d: usize,
    pub n: usize,
    /// Clean channels (the LSGAN "real" side), flat n x d.
    pub clean: Vec<f64>,
    /// Perturbed channels, flat n x d.
    pub h_tilde: Vec<f64>,
    /// DSM targets, flat n x d.
    pub target: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl DsmBatch {
    /// `samples` are stacked clean channels of equal length.
    pub fn build(samples: &[&[f64]], schedule: &NoiseSchedule, rng: &mut Rng) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empty batch"));
        }
        let d = samples[0].len();
        let n = samples.len();
        let mut clean = Vec::with_capacity(n * d);
        let mut h_tilde = Vec::with_capacity(n * d);
        let mut target = Vec::with_capacity(n * d);
        let mut sigmas = Vec::with_capacity(n);
        for s in samples {
            if s.len() != d {
                return Err(Error::dims("ragged batch"));
            }
            let sigma = schedule.sigmas[rng.gen_range(0..schedule.len())];
            sigmas.push(sigma);
            clean.extend_from_slice(s);
            // Stacked components of CN(0, sigma^2) noise are N(0, sigma^2/2).
            let comp = (sigma * sigma / 2.0).sqrt();
            for &v in *s {
                let z: f64 = rng.sample(StandardNormal);
                let z = comp * z;
                h_tilde.push(v + z);
                target.push(-z / (sigma * sigma));
            }
        }
        Ok(Self {
            d,
            n,
            clean,
            h_tilde,
            target,
            sigmas,
        })
    }

    fn check(&self, model: &ScoreModel) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("empty batch"));
        }
        if self.d != model.channel_dim() {
            return Err(Error::dims(format!(
                "batch dim {} vs model dim {}",
                self.d,
                model.channel_dim()
            )));
        }
        Ok(())
    }
}

fn dsm_from_scores(scores: &[f64], batch: &DsmBatch, lambda: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..batch.n {
        let s2 = batch.sigmas[i] * batch.sigmas[i];
        let mut sq = 0.0;
        for j in i * batch.d..(i + 1) * batch.d {
            let e = scores[j] - batch.target[j];
            sq += e * e;
        }
        total += 0.5 * lambda * s2 * sq;
    }
    total / batch.n as f64
}

/// Weighted denoising score matching loss:
/// mean over the batch of `(lambda/2) sigma_t^2 || s_theta + Z/sigma_t^2 ||_F^2`.
pub fn dsm_loss(model: &ScoreModel, batch: &DsmBatch, lambda: f64) -> Result<f64> {
    batch.check(model)?;
    let (scores, _) = model.forward_stack(&batch.h_tilde, &batch.sigmas, batch.n);
    Ok(dsm_from_scores(&scores, batch, lambda))
}

/// DSM loss plus its gradient with respect to the score parameters.
pub fn dsm_loss_grad(model: &ScoreModel, batch: &DsmBatch, lambda: f64) -> Result<(f64, Vec<f64>)> {
    batch.check(model)?;
    let (scores, cache) = model.forward_stack(&batch.h_tilde, &batch.sigmas, batch.n);
    let loss = dsm_from_scores(&scores, batch, lambda);
    let mut grad_s = vec![0.0; scores.len()];
    for i in 0..batch.n {
        let w = lambda * batch.sigmas[i] * batch.sigmas[i] / batch.n as f64;
        for j in i * batch.d..(i + 1) * batch.d {
            grad_s[j] = w * (scores[j] - batch.target[j]);
        }
    }
    let mut grads = vec![0.0; model.net.num_params()];
    model.backward_stack(&cache, &grad_s, &mut grads);
    Ok((loss, grads))
}

/// Denoised batch `Q = H_tilde + sigma^2 s_theta`, flat n x d.
fn denoised(model: &ScoreModel, batch: &DsmBatch) -> (Vec<f64>, Vec<f64>, super::model::ScoreCache) {
    let (scores, cache) = model.forward_stack(&batch.h_tilde, &batch.sigmas, batch.n);
    let mut q = batch.h_tilde.clone();
    for i in 0..batch.n {
        let s2 = batch.sigmas[i] * batch.sigmas[i];
        for j in i * batch.d..(i + 1) * batch.d {
            q[j] += s2 * scores[j];
        }
    }
    (q, scores, cache)
}

/// LSGAN discriminator objective (sign-flipped to a minimization):
/// `mean (D(H) - 1)^2 + mean (D(Q) + 1)^2`.
pub fn disc_loss(disc: &DiscModel, model: &ScoreModel, batch: &DsmBatch) -> Result<f64> {
    batch.check(model)?;
    let (q, _, _) = denoised(model, batch);
    let (d_real, _) = disc.forward_stack(&batch.clean, batch.n);
    let (d_fake, _) = disc.forward_stack(&q, batch.n);
    let n = batch.n as f64;
    let real: f64 = d_real.iter().map(|&v| (v - 1.0) * (v - 1.0)).sum::<f64>() / n;
    let fake: f64 = d_fake.iter().map(|&v| (v + 1.0) * (v + 1.0)).sum::<f64>() / n;
    Ok(real + fake)
}

/// Discriminator loss and gradient with respect to phi (theta frozen).
pub fn disc_loss_grad(
    disc: &DiscModel,
    model: &ScoreModel,
    batch: &DsmBatch,
) -> Result<(f64, Vec<f64>)> {
    batch.check(model)?;
    let (q, _, _) = denoised(model, batch);
    let (d_real, cache_real) = disc.forward_stack(&batch.clean, batch.n);
    let (d_fake, cache_fake) = disc.forward_stack(&q, batch.n);
    let n = batch.n as f64;
    let real: f64 = d_real.iter().map(|&v| (v - 1.0) * (v - 1.0)).sum::<f64>() / n;
    let fake: f64 = d_fake.iter().map(|&v| (v + 1.0) * (v + 1.0)).sum::<f64>() / n;
    let g_real: Vec<f64> = d_real.iter().map(|&v| 2.0 * (v - 1.0) / n).collect();
    let g_fake: Vec<f64> = d_fake.iter().map(|&v| 2.0 * (v + 1.0) / n).collect();
    let mut grads = vec![0.0; disc.net.num_params()];
    disc.net.backward(&cache_real, &g_real, &mut grads);
    disc.net.backward(&cache_fake, &g_fake, &mut grads);
    Ok((real + fake, grads))
}

/// Generator objective: `mean (D(Q) - 1)^2` plus the weighted DSM term.
pub fn gen_loss(
    model: &ScoreModel,
    disc: &DiscModel,
    batch: &DsmBatch,
    lambda: f64,
) -> Result<f64> {
    batch.check(model)?;
    let (q, scores, _) = denoised(model, batch);
    let (d_fake, _) = disc.forward_stack(&q, batch.n);
    let n = batch.n as f64;
    let adv: f64 = d_fake.iter().map(|&v| (v - 1.0) * (v - 1.0)).sum::<f64>() / n;
    Ok(adv + dsm_from_scores(&scores, batch, lambda))
}

/// Generator loss, its gradient with respect to theta (phi frozen), and the
/// (adversarial, dsm) decomposition.
pub fn gen_loss_grad(
    model: &ScoreModel,
    disc: &DiscModel,
    batch: &DsmBatch,
    lambda: f64,
) -> Result<(f64, Vec<f64>, (f64, f64))> {
    batch.check(model)?;
    let (q, scores, cache) = denoised(model, batch);
    let (d_fake, cache_fake) = disc.forward_stack(&q, batch.n);
    let n = batch.n as f64;
    let adv: f64 = d_fake.iter().map(|&v| (v - 1.0) * (v - 1.0)).sum::<f64>() / n;
    let dsm = dsm_from_scores(&scores, batch, lambda);

    // Adversarial path: dL/dQ via the frozen discriminator, then
    // dL/ds = sigma^2 dL/dQ.
    let g_logit: Vec<f64> = d_fake.iter().map(|&v| 2.0 * (v - 1.0) / n).collect();
    let mut phi_sink = vec![0.0; disc.net.num_params()];
    let g_q = disc.net.backward(&cache_fake, &g_logit, &mut phi_sink);

    let mut grad_s = vec![0.0; scores.len()];
    for i in 0..batch.n {
        let s2 = batch.sigmas[i] * batch.sigmas[i];
        let w_dsm = lambda * s2 / n;
        for j in i * batch.d..(i + 1) * batch.d {
            grad_s[j] = s2 * g_q[j] + w_dsm * (scores[j] - batch.target[j]);
        }
    }
    let mut grads = vec![0.0; model.net.num_params()];
    model.backward_stack(&cache, &grad_s, &mut grads);
    Ok((adv + dsm, grads, (adv, dsm)))
}
