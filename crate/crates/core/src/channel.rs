//! Ground-truth direct and cascaded channel generation.
//!
//! The direct link `h0` is a conventional one-way fading vector. Each
//! cascaded link is the product `f_k * g_k` of the source-to-tag scalar and
//! the tag-to-reader vector, scaled by the tag's power-reflection factor
//! `sqrt(alpha_k)` when assembled into the effective matrix `H̄`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{sample_complex_gaussian, sample_nakagami_vector, ComplexMatrix, Rng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FadingDistribution {
    Rayleigh,
    Nakagami,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FadingConfig {
    pub distribution: FadingDistribution,
    /// Nakagami shape; ignored for Rayleigh.
    pub m_shape: f64,
    /// Per-coefficient second moment for every link (sigma^2 = 1 by default).
    pub per_element_variance: f64,
    /// Reader antennas.
    pub m_antennas: usize,
    /// Tag count.
    pub k_tags: usize,
    /// Per-tag power-reflection factors, each in (0, 1].
    pub alpha: Vec<f64>,
}

impl FadingConfig {
    pub fn rayleigh(m_antennas: usize, k_tags: usize, alpha: f64) -> Self {
        Self {
            distribution: FadingDistribution::Rayleigh,
            m_shape: 1.0,
            per_element_variance: 1.0,
            m_antennas,
            k_tags,
            alpha: vec![alpha; k_tags],
        }
    }

    pub fn nakagami(m_antennas: usize, k_tags: usize, alpha: f64, m_shape: f64) -> Self {
        Self {
            distribution: FadingDistribution::Nakagami,
            m_shape,
            ..Self::rayleigh(m_antennas, k_tags, alpha)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_antennas < 1 {
            return Err(Error::invalid("need at least one reader antenna"));
        }
        if self.alpha.len() != self.k_tags {
            return Err(Error::invalid(format!(
                "alpha has {} entries for {} tags",
                self.alpha.len(),
                self.k_tags
            )));
        }
        if self.alpha.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::invalid("alpha_k must lie in (0, 1]"));
        }
        if !(self.per_element_variance > 0.0) {
            return Err(Error::invalid("per_element_variance must be > 0"));
        }
        if self.distribution == FadingDistribution::Nakagami && self.m_shape < 0.5 {
            return Err(Error::invalid("Nakagami shape must be >= 0.5"));
        }
        Ok(())
    }
}

/// One realization of all ground-truth links.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Direct channel, M x 1.
    pub h0: ComplexMatrix,
    /// Forward links, one scalar per tag.
    pub f: Vec<Complex64>,
    /// Backscatter links, M x K.
    pub g: ComplexMatrix,
    /// Power-reflection factors, one per tag.
    pub alpha: Vec<f64>,
}

impl ChannelSet {
    /// Cascaded channel `h_k = f_k * g_k` (unscaled by alpha), M x 1.
    pub fn cascaded(&self, k: usize) -> ComplexMatrix {
        self.g.column(k).scale(self.f[k])
    }
}

fn sample_link(config: &FadingConfig, n: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    match config.distribution {
        FadingDistribution::Rayleigh => {
            sample_complex_gaussian(n, 1, config.per_element_variance, rng)
        }
        FadingDistribution::Nakagami => {
            sample_nakagami_vector(config.m_shape, config.per_element_variance, n, rng)
        }
    }
}

/// Draws h0, {f_k} and {g_k} i.i.d. from the configured fading law, all
/// mutually independent.
pub fn sample_channel_set(config: &FadingConfig, rng: &mut Rng) -> Result<ChannelSet> {
    config.validate()?;
    let m = config.m_antennas;
    let k = config.k_tags;
    let h0 = sample_link(config, m, rng)?;
    let f: Vec<Complex64> = if k > 0 {
        sample_link(config, k, rng)?.entries().to_vec()
    } else {
        Vec::new()
    };
    let mut g = ComplexMatrix::zeros(m, k);
    for j in 0..k {
        g.set_column(j, &sample_link(config, m, rng)?);
    }
    Ok(ChannelSet {
        h0,
        f,
        g,
        alpha: config.alpha.clone(),
    })
}

/// Assembles the effective channel `H̄ = [h0, sqrt(a1) f1 g1, ..., sqrt(aK) fK gK]`.
pub fn assemble_hbar(ch: &ChannelSet) -> ComplexMatrix {
    let m = ch.h0.rows();
    let k = ch.f.len();
    let mut hbar = ComplexMatrix::zeros(m, k + 1);
    hbar.set_column(0, &ch.h0);
    for j in 0..k {
        let col = ch.cascaded(j).scale_re(ch.alpha[j].sqrt());
        hbar.set_column(j + 1, &col);
    }
    hbar
}

/// Draws `H̄` with independent CN(0, r_k) entries per column. This is the
/// matched-Gaussian-prior arm used to verify the Langevin estimator against
/// the closed-form MMSE baseline.
pub fn sample_gaussian_hbar(
    m_antennas: usize,
    column_variances: &[f64],
    rng: &mut Rng,
) -> Result<ComplexMatrix> {
    let mut hbar = ComplexMatrix::zeros(m_antennas, column_variances.len());
    for (j, &r) in column_variances.iter().enumerate() {
        hbar.set_column(j, &sample_complex_gaussian(m_antennas, 1, r, rng)?);
    }
    Ok(hbar)
}
