//! Ambient-backscatter channel estimation workbench.
//!
//! A reader with `M` antennas observes pilots reflected by `K` passive tags
//! plus the direct link from the RF source. The effective channel matrix
//! `H̄ = [h0, √α1·f1·g1, …, √αK·fK·gK]` is estimated from the observation
//! `Y = √p_p · H̄ · C · S + N`, where `C` holds orthogonal Hadamard tag
//! pilots and `S = diag(s)` the unit-modulus source pilot.
//!
//! The crate provides:
//! - complex-matrix numerics with seeded, stream-derived RNG ([`numerics`])
//! - Rayleigh / Nakagami-m channel generation ([`channel`])
//! - pilot construction and observation synthesis ([`pilot`])
//! - LS and linear-MMSE baselines ([`classical`])
//! - a noise-conditional score network trained with alternating LSGAN and
//!   denoising score matching objectives ([`score`])
//! - posterior channel estimation via annealed Langevin sampling ([`als`])
//! - a Monte-Carlo NMSE sweep harness with CSV output ([`harness`])
//!
//! Monte-Carlo trials run on a rayon pool when the default `parallel`
//! feature is enabled; disabling it falls back to a sequential loop with
//! identical results.

pub mod als;
pub mod channel;
pub mod classical;
pub mod error;
pub mod exec;
pub mod harness;
pub mod numerics;
pub mod pilot;
pub mod score;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
