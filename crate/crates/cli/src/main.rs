//! Command-line front end: train a score network, run NMSE sweeps, and grid
//! search the Langevin step size.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bscatter_core::harness::{
    grid_search_beta, run_sweep, sweep_csv_string, write_sweep_csv, ExperimentConfig,
};
use bscatter_core::numerics::{stream, Rng};
use bscatter_core::score::{
    generate_mixture_dataset, load_checkpoint, make_schedule, save_checkpoint, train_adversarial,
    write_training_log, Checkpoint,
};

#[derive(Parser)]
#[command(name = "bscatter", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Full-scale setup (48 antennas, 7 tags, 2311 noise scales).
    Fullscale,
    /// Down-scaled setup that runs in seconds.
    Desk,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML experiment config; overrides --preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in starting point when no config file is given.
    #[arg(long, value_enum, default_value = "desk")]
    preset: Preset,
    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_toml_path(path)
                .with_context(|| format!("loading {}", path.display()))?,
            None => match self.preset {
                Preset::Fullscale => ExperimentConfig::fullscale(),
                Preset::Desk => ExperimentConfig::desk(),
            },
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
            cfg.train.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the adversarial score network and save a checkpoint.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// Where to write the checkpoint.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Optional per-epoch training-log CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte-Carlo NMSE sweep and emit CSV.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Checkpoint with a trained score network (needed for the `als`
        /// estimator).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the sampler over a beta0 grid at one SNR point.
    GridSearch {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// SNR point in dB.
        #[arg(long)]
        snr_db: f64,
        /// Comma-separated beta0 candidates.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
    },
}

fn train(config: &ExperimentConfig, checkpoint: &PathBuf, out: Option<&PathBuf>) -> Result<()> {
    config.validate()?;
    let mut data_rng = Rng::new(config.seed).derive(stream::TRAINING);
    let dataset =
        generate_mixture_dataset(&config.fading, config.train.dataset_size, &mut data_rng)?;
    let schedule = make_schedule(
        config.als.sigma_min,
        config.als.sigma_max,
        config.als.t_scales,
    )?;
    let columns = config.fading.k_tags + 1;
    eprintln!(
        "training on {} samples, {} noise scales, {} epochs",
        dataset.len(),
        schedule.len(),
        config.train.epochs
    );
    let (score, disc, log) = train_adversarial(
        &config.train,
        &dataset,
        &schedule,
        config.fading.m_antennas,
        columns,
    )?;
    if let Some(last) = log.last() {
        eprintln!(
            "final epoch: dsm {:.4e}, disc {:.4e}, adv {:.4e}",
            last.dsm_loss, last.disc_loss, last.gen_adv_loss
        );
    }
    save_checkpoint(
        &Checkpoint {
            score,
            disc: Some(disc),
            schedule,
        },
        checkpoint,
    )?;
    eprintln!("checkpoint written to {}", checkpoint.display());
    if let Some(path) = out {
        write_training_log(&log, path)?;
        eprintln!("training log written to {}", path.display());
    }
    Ok(())
}

fn load_optional_checkpoint(
    config: &ExperimentConfig,
    path: Option<&PathBuf>,
) -> Result<Option<Checkpoint>> {
    match path {
        Some(p) => {
            let ckpt =
                load_checkpoint(p).with_context(|| format!("loading {}", p.display()))?;
            if ckpt.score.m_antennas != config.fading.m_antennas
                || ckpt.score.columns != config.fading.k_tags + 1
            {
                bail!(
                    "checkpoint was trained for {}x{} channels, config wants {}x{}",
                    ckpt.score.m_antennas,
                    ckpt.score.columns,
                    config.fading.m_antennas,
                    config.fading.k_tags + 1
                );
            }
            Ok(Some(ckpt))
        }
        None => {
            if config.needs_checkpoint() {
                bail!("the `als` estimator needs --checkpoint");
            }
            Ok(None)
        }
    }
}

fn sweep(
    config: &ExperimentConfig,
    checkpoint: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<()> {
    let ckpt = load_optional_checkpoint(config, checkpoint)?;
    let report = run_sweep(config, ckpt.as_ref())?;
    for (est, snr, n) in &report.diverged {
        eprintln!("warning: {est} diverged in {n} trials at {snr} dB (excluded from aggregates)");
    }
    match out {
        Some(path) => {
            write_sweep_csv(&report.rows, path)?;
            eprintln!("{} rows written to {}", report.rows.len(), path.display());
        }
        None => print!("{}", sweep_csv_string(&report.rows)),
    }
    Ok(())
}

fn grid_search(
    config: &ExperimentConfig,
    checkpoint: Option<&PathBuf>,
    snr_db: f64,
    betas: &[f64],
) -> Result<()> {
    let ckpt = load_optional_checkpoint(config, checkpoint)?;
    let result = grid_search_beta(config, snr_db, betas, ckpt.as_ref())?;
    println!("beta0,nmse,diverged_trials");
    for cell in &result.cells {
        match cell.nmse {
            Some(v) => println!("{:e},{:.10e},{}", cell.beta0, v, cell.diverged_trials),
            None => println!("{:e},diverged,{}", cell.beta0, cell.diverged_trials),
        }
    }
    match result.best {
        Some((beta, nmse)) => eprintln!("best: beta0 = {beta:e} (nmse {nmse:.6e})"),
        None => eprintln!("no candidate survived; try smaller beta0 values"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Train {
            config,
            checkpoint,
            out,
        } => train(&config.load()?, checkpoint, out.as_ref()),
        Command::Sweep {
            config,
            checkpoint,
            out,
        } => sweep(&config.load()?, checkpoint.as_ref(), out.as_ref()),
        Command::GridSearch {
            config,
            checkpoint,
            snr_db,
            betas,
        } => grid_search(&config.load()?, checkpoint.as_ref(), *snr_db, betas),
    }
}
