//! End-to-end checks of the binary: train -> checkpoint -> sweep round trip,
//! determinism of emitted CSV, and config/checkpoint error paths.

use std::path::Path;
use std::process::Command;

fn bscatter() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bscatter"))
}

fn write_tiny_config(dir: &Path) -> std::path::PathBuf {
    // Small enough to train and sweep in a few seconds.
    let text = r#"
channel_mode = "mixture"
tau = 4
source_pilot = "AllOnes"
snr_db = [0.0, 10.0]
sigma2 = 1.0
estimators = ["ls", "mmse", "als"]
trials = 40
seed = 9

[fading]
distribution = "Rayleigh"
m_shape = 1.0
per_element_variance = 1.0
m_antennas = 4
k_tags = 1
alpha = [0.6]

[als]
zeta = 1e-4
n_steps = 4
sigma_min = 0.3
sigma_max = 2.0
t_scales = 8

[train]
lambda = 1.0
batch_size = 32
epochs = 3
lr_score = 1e-3
lr_disc = 1e-4
dataset_size = 256
seed = 9
hidden_layers = 2
width = 24
disc_hidden_layers = 2
disc_width = 12
adversarial = true
"#;
    let path = dir.join("tiny.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn train_then_sweep_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny_config(dir.path());
    let ckpt = dir.path().join("model.ckpt");
    let log = dir.path().join("train.csv");

    let out = bscatter()
        .args(["train", "--config"])
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(&ckpt)
        .arg("--out")
        .arg(&log)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(ckpt.exists());
    let log_text = std::fs::read_to_string(&log).unwrap();
    assert!(log_text.starts_with("epoch,dsm_loss,disc_loss,gen_adv_loss\n"));
    assert_eq!(log_text.lines().count(), 1 + 3);

    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    for out_path in [&csv_a, &csv_b] {
        let out = bscatter()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--checkpoint")
            .arg(&ckpt)
            .arg("--out")
            .arg(out_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(&csv_a).unwrap();
    let b = std::fs::read_to_string(&csv_b).unwrap();
    assert_eq!(a, b, "sweep must be byte-identical across reruns");
    assert!(a.starts_with("estimator,snr_db,link,nmse_mean,nmse_ci95,trials\n"));
    // 2 SNR points x 3 estimators x 2 links.
    assert_eq!(a.lines().count(), 1 + 12);
    assert!(a.contains("\nals,"));
}

#[test]
fn sweep_with_als_but_no_checkpoint_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny_config(dir.path());
    let out = bscatter()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--checkpoint"));
}

#[test]
fn mismatched_checkpoint_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny_config(dir.path());
    let ckpt = dir.path().join("junk.ckpt");
    std::fs::write(&ckpt, b"definitely not a checkpoint").unwrap();
    let out = bscatter()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(&ckpt)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn sweep_preset_ls_only_to_stdout() {
    let out = bscatter()
        .args(["sweep", "--preset", "desk", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("estimator,snr_db,link,nmse_mean,nmse_ci95,trials\n"));
    assert!(text.contains("\nmmse,"));
}

#[test]
fn grid_search_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_tiny_config(dir.path());
    // Analytic-score sampler needs no checkpoint.
    let text = std::fs::read_to_string(&cfg_path)
        .unwrap()
        .replace(r#"estimators = ["ls", "mmse", "als"]"#, r#"estimators = ["als_analytic"]"#);
    std::fs::write(&cfg_path, text).unwrap();
    let out = bscatter()
        .args(["grid-search", "--config"])
        .arg(&cfg_path)
        .args(["--snr-db", "0", "--betas", "0.05,0.2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("beta0,nmse,diverged_trials\n"));
    assert_eq!(stdout.lines().count(), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("best:"));
}

#[test]
fn bad_config_reports_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "tau = \"eight\"").unwrap();
    let out = bscatter()
        .args(["sweep", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.toml"));
}
