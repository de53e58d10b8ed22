//! Minimal fully-connected network with hand-written backpropagation.
//!
//! Parameters live in one flat `Vec<f64>` (per-layer weight then bias), which
//! keeps the optimizer, finite-difference checking and checkpointing trivial.
//! Hidden layers of equal width are residual: `h <- h + silu(W h + b)`.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::numerics::Rng;
use crate::{Error, Result};

fn silu(x: f64) -> f64 {
    x / (1.0 + (-x).exp())
}

fn silu_prime(x: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x).exp());
    s * (1.0 + x * (1.0 - s))
}

/// Batch forward cache: per layer, the layer input and the preactivation.
pub struct ForwardCache {
    xs: Vec<Vec<f64>>,
    zs: Vec<Vec<f64>>,
    n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// [input, width, ..., width, output]; all interior dims equal.
    dims: Vec<usize>,
    params: Vec<f64>,
}

impl Mlp {
    /// Random He-style init; the final layer starts at zero so a fresh
    /// network is the zero function.
    pub fn new(dims: Vec<usize>, rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::invalid("network needs at least one layer"));
        }
        if dims[1..dims.len() - 1].windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::invalid(
                "hidden widths must be equal for residual blocks",
            ));
        }
        let mut params = Vec::new();
        let layers = dims.len() - 1;
        for l in 0..layers {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let scale = if l == layers - 1 {
                0.0
            } else {
                (1.0 / fan_in as f64).sqrt()
            };
            for _ in 0..fan_in * fan_out {
                let g: f64 = rng.sample(StandardNormal);
                params.push(scale * g);
            }
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Ok(Self { dims, params })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn from_params(dims: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        let expected: usize = dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        if params.len() != expected {
            return Err(Error::invalid(format!(
                "expected {} parameters for dims {:?}, got {}",
                expected,
                dims,
                params.len()
            )));
        }
        Ok(Self { dims, params })
    }

    fn weight_offset(&self, layer: usize) -> usize {
        self.dims
            .windows(2)
            .take(layer)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    fn bias_offset(&self, layer: usize) -> usize {
        self.weight_offset(layer) + self.dims[layer] * self.dims[layer + 1]
    }

    fn is_residual(&self, layer: usize) -> bool {
        layer >= 1 && layer < self.num_layers() - 1
    }

    /// Forward pass on a flat row-major batch (n x input_dim).
    pub fn forward(&self, x: &[f64], n: usize) -> (Vec<f64>, ForwardCache) {
        debug_assert_eq!(x.len(), n * self.input_dim());
        let layers = self.num_layers();
        let mut xs = Vec::with_capacity(layers);
        let mut zs = Vec::with_capacity(layers);
        xs.push(x.to_vec());
        let mut out = Vec::new();
        for l in 0..layers {
            let (din, dout) = (self.dims[l], self.dims[l + 1]);
            let w = &self.params[self.weight_offset(l)..self.bias_offset(l)];
            let b = &self.params[self.bias_offset(l)..self.bias_offset(l) + dout];
            let input = xs.last().unwrap();
            let mut z = vec![0.0; n * dout];
            for i in 0..n {
                let xi = &input[i * din..(i + 1) * din];
                let zi = &mut z[i * dout..(i + 1) * dout];
                zi.copy_from_slice(b);
                for (j, zij) in zi.iter_mut().enumerate() {
                    let wrow = &w[j * din..(j + 1) * din];
                    let mut acc = 0.0;
                    for (wv, xv) in wrow.iter().zip(xi) {
                        acc += wv * xv;
                    }
                    *zij += acc;
                }
            }
            if l == layers - 1 {
                out = z.clone();
                zs.push(z);
            } else {
                let mut h: Vec<f64> = z.iter().map(|&v| silu(v)).collect();
                if self.is_residual(l) {
                    for (hv, xv) in h.iter_mut().zip(input.iter()) {
                        *hv += xv;
                    }
                }
                zs.push(z);
                xs.push(h);
            }
        }
        (out, ForwardCache { xs, zs, n })
    }

    /// Backward pass. `grad_out` is dL/d(output), flat (n x output_dim).
    /// Accumulates parameter gradients into `grads` (same layout as params)
    /// and returns dL/d(input).
    pub fn backward(&self, cache: &ForwardCache, grad_out: &[f64], grads: &mut [f64]) -> Vec<f64> {
        debug_assert_eq!(grads.len(), self.params.len());
        let layers = self.num_layers();
        let n = cache.n;
        let mut g = grad_out.to_vec();
        for l in (0..layers).rev() {
            let (din, dout) = (self.dims[l], self.dims[l + 1]);
            let w = &self.params[self.weight_offset(l)..self.bias_offset(l)];
            let x_in = &cache.xs[l];
            let z = &cache.zs[l];
            // dL/dz
            let gz: Vec<f64> = if l == layers - 1 {
                g.clone()
            } else {
                g.iter()
                    .zip(z.iter())
                    .map(|(&gv, &zv)| gv * silu_prime(zv))
                    .collect()
            };
            {
                let woff = self.weight_offset(l);
                let boff = self.bias_offset(l);
                for i in 0..n {
                    let gzi = &gz[i * dout..(i + 1) * dout];
                    let xi = &x_in[i * din..(i + 1) * din];
                    for (j, &gj) in gzi.iter().enumerate() {
                        if gj == 0.0 {
                            continue;
                        }
                        let grow = &mut grads[woff + j * din..woff + (j + 1) * din];
                        for (gw, &xv) in grow.iter_mut().zip(xi) {
                            *gw += gj * xv;
                        }
                    }
                    for (j, &gj) in gzi.iter().enumerate() {
                        grads[boff + j] += gj;
                    }
                }
            }
            // dL/d(input of layer l)
            let mut g_in = vec![0.0; n * din];
            for i in 0..n {
                let gzi = &gz[i * dout..(i + 1) * dout];
                let gi = &mut g_in[i * din..(i + 1) * din];
                for (j, &gj) in gzi.iter().enumerate() {
                    if gj == 0.0 {
                        continue;
                    }
                    let wrow = &w[j * din..(j + 1) * din];
                    for (gv, &wv) in gi.iter_mut().zip(wrow) {
                        *gv += gj * wv;
                    }
                }
            }
            if self.is_residual(l) {
                for (gv, &sk) in g_in.iter_mut().zip(g.iter()) {
                    *gv += sk;
                }
            }
            g = g_in;
        }
        g
    }

    pub fn params_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }
}

/// Adam with bias correction; state is tied to one parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, num_params: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let mhat = *m / bc1;
            let vhat = *v / bc2;
            *p -= self.lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}
