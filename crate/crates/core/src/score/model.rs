use crate::numerics::{ComplexMatrix, Rng};
use crate::{Error, Result};

use super::nn::{ForwardCache, Mlp};

/// Noise-conditional score network s_theta(H, sigma_t).
///
/// The channel enters as a stacked real/imag vector of length
/// `2 * M * (K+1)`; the noise level enters as an extra `ln(sigma)` input
/// feature, and the raw network output is scaled by `1/sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreModel {
    pub m_antennas: usize,
    /// K + 1 channel columns.
    pub columns: usize,
    pub net: Mlp,
}

pub struct ScoreCache {
    cache: ForwardCache,
    sigmas: Vec<f64>,
    n: usize,
}

impl ScoreModel {
    pub fn new(
        m_antennas: usize,
        columns: usize,
        hidden_layers: usize,
        width: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        let d = 2 * m_antennas * columns;
        let mut dims = vec![d + 1];
        dims.extend(std::iter::repeat(width).take(hidden_layers));
        dims.push(d);
        Ok(Self {
            m_antennas,
            columns,
            net: Mlp::new(dims, rng)?,
        })
    }

    pub fn channel_dim(&self) -> usize {
        2 * self.m_antennas * self.columns
    }

    /// Batch forward on stacked channels. `x` is flat n x channel_dim, one
    /// sigma per sample. Returns flat scores in the same layout.
    pub fn forward_stack(&self, x: &[f64], sigmas: &[f64], n: usize) -> (Vec<f64>, ScoreCache) {
        let d = self.channel_dim();
        debug_assert_eq!(x.len(), n * d);
        debug_assert_eq!(sigmas.len(), n);
        let mut input = Vec::with_capacity(n * (d + 1));
        for i in 0..n {
            input.extend_from_slice(&x[i * d..(i + 1) * d]);
            input.push(sigmas[i].ln());
        }
        let (mut out, cache) = self.net.forward(&input, n);
        for i in 0..n {
            let inv = 1.0 / sigmas[i];
            for v in &mut out[i * d..(i + 1) * d] {
                *v *= inv;
            }
        }
        (
            out,
            ScoreCache {
                cache,
                sigmas: sigmas.to_vec(),
                n,
            },
        )
    }

    /// Accumulates dL/d(theta) for a given dL/d(score).
    pub fn backward_stack(&self, cache: &ScoreCache, grad_score: &[f64], grads: &mut [f64]) {
        let d = self.channel_dim();
        let mut g = grad_score.to_vec();
        for i in 0..cache.n {
            let inv = 1.0 / cache.sigmas[i];
            for v in &mut g[i * d..(i + 1) * d] {
                *v *= inv;
            }
        }
        self.net.backward(&cache.cache, &g, grads);
    }

    /// Single-matrix convenience wrapper: s_theta(H_tilde, sigma_t).
    pub fn forward(&self, h_tilde: &ComplexMatrix, sigma_t: f64) -> Result<ComplexMatrix> {
        if h_tilde.rows() != self.m_antennas || h_tilde.cols() != self.columns {
            return Err(Error::dims(format!(
                "score input is {}x{}, model expects {}x{}",
                h_tilde.rows(),
                h_tilde.cols(),
                self.m_antennas,
                self.columns
            )));
        }
        if !(sigma_t > 0.0) {
            return Err(Error::invalid(format!("sigma_t must be > 0, got {sigma_t}")));
        }
        let x = h_tilde.to_real_stack();
        let (s, _) = self.forward_stack(&x, &[sigma_t], 1);
        ComplexMatrix::from_real_stack(self.m_antennas, self.columns, &s)
    }
}

/// LSGAN discriminator mapping a stacked channel to one real logit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscModel {
    pub m_antennas: usize,
    pub columns: usize,
    pub net: Mlp,
}

impl DiscModel {
    pub fn new(
        m_antennas: usize,
        columns: usize,
        hidden_layers: usize,
        width: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        let d = 2 * m_antennas * columns;
        let mut dims = vec![d];
        dims.extend(std::iter::repeat(width).take(hidden_layers));
        dims.push(1);
        Ok(Self {
            m_antennas,
            columns,
            net: Mlp::new(dims, rng)?,
        })
    }

    pub fn channel_dim(&self) -> usize {
        2 * self.m_antennas * self.columns
    }

    /// Batch of logits, one per stacked channel.
    pub fn forward_stack(&self, x: &[f64], n: usize) -> (Vec<f64>, ForwardCache) {
        self.net.forward(x, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sample_complex_gaussian;

    #[test]
    fn fresh_model_zero_score() {
        let mut rng = Rng::new(1);
        let model = ScoreModel::new(2, 3, 3, 16, &mut rng).unwrap();
        let h = sample_complex_gaussian(2, 3, 1.0, &mut rng).unwrap();
        let s = model.forward(&h, 0.5).unwrap();
        assert_eq!(s.frob_norm_sq(), 0.0);
    }

    #[test]
    fn shape_contract() {
        let mut rng = Rng::new(2);
        for (m, c) in [(2, 2), (4, 3), (8, 8)] {
            let model = ScoreModel::new(m, c, 2, 8, &mut rng).unwrap();
            let h = sample_complex_gaussian(m, c, 1.0, &mut rng).unwrap();
            let s = model.forward(&h, 1.0).unwrap();
            assert_eq!((s.rows(), s.cols()), (m, c));
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut rng = Rng::new(3);
        let model = ScoreModel::new(2, 2, 2, 8, &mut rng).unwrap();
        let h = sample_complex_gaussian(3, 2, 1.0, &mut rng).unwrap();
        assert!(model.forward(&h, 1.0).is_err());
    }
}
