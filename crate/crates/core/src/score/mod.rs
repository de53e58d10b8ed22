//! Noise-conditional score network, discriminator, and their training.
//!
//! The score network learns the gradient of the log-density of the channel
//! distribution at every perturbation level of a geometric noise schedule.
//! Training alternates a least-squares GAN discriminator step against a
//! generator step whose loss is the adversarial term plus a weighted
//! denoising score matching term with target `-Z_t / sigma_t^2`.
//!
//! All complex quantities enter the networks as stacked real/imag vectors;
//! "gradient with respect to a complex matrix" means the complex-convention
//! direction (half the real-stacking gradient; step sizes absorb the
//! constant, and likelihood and prior terms use the same convention).

mod analytic;
mod checkpoint;
mod gradcheck;
mod loss;
mod model;
mod nn;
mod schedule;
mod train;

pub use analytic::{
    analytic_gaussian_score, denoise_empirical_bayes, empirical_bayes_mean, perturb,
};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use gradcheck::grad_check;
pub use loss::{disc_loss, disc_loss_grad, dsm_loss, dsm_loss_grad, gen_loss, gen_loss_grad, DsmBatch};
pub use model::{DiscModel, ScoreModel};
pub use nn::{Adam, Mlp};
pub use schedule::{make_schedule, NoiseSchedule};
pub use train::{
    generate_gaussian_dataset, generate_mixture_dataset, train_adversarial, write_training_log,
    EpochLog, TrainConfig,
};
