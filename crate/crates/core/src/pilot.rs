//! Hadamard tag pilots, the RF-source pilot, and observation synthesis.
//!
//! The RF source is treated as an imaginary tag carrying the all-ones pilot
//! (row 0 of C); the K real tags use the next rows of a Sylvester Hadamard
//! matrix, so `C C^H = tau I` holds in exact integer arithmetic.

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::numerics::{sample_complex_gaussian, ComplexMatrix, Rng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourcePilot {
    /// s = all ones, S = I. The default BPSK/Hadamard setup.
    AllOnes,
    /// i.i.d. unit-modulus random phases; exercises the S^H algebra.
    RandomPhase,
}

#[derive(Debug, Clone)]
pub struct PilotSet {
    /// Tag pilot matrix, (K+1) x tau, entries in {+1, -1}.
    pub c: ComplexMatrix,
    /// Source pilot, 1 x tau, unit-modulus entries.
    pub s: ComplexMatrix,
    pub tau: usize,
    /// Pilot transmit power.
    pub p_p: f64,
}

impl PilotSet {
    pub fn k_tags(&self) -> usize {
        self.c.rows() - 1
    }

    /// S = diag(s).
    pub fn s_diag(&self) -> ComplexMatrix {
        ComplexMatrix::diag(&self.s).expect("s is a vector")
    }
}

/// Sylvester Hadamard matrix of the given power-of-two order.
pub fn hadamard(order: usize) -> Result<ComplexMatrix> {
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::invalid(format!(
            "Hadamard order must be a power of two >= 1, got {order}"
        )));
    }
    let mut h = ComplexMatrix::new(1, 1, vec![Complex64::new(1.0, 0.0)])?;
    let mut n = 1;
    while n < order {
        let next = ComplexMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let v = h.get(r % n, c % n);
            if r >= n && c >= n {
                -v
            } else {
                v
            }
        });
        h = next;
        n *= 2;
    }
    Ok(h)
}

/// First K+1 Hadamard rows as tag pilots plus the source pilot.
pub fn build_pilots(
    k_tags: usize,
    tau: usize,
    p_p: f64,
    source_pilot: SourcePilot,
    rng: &mut Rng,
) -> Result<PilotSet> {
    if !tau.is_power_of_two() || tau < k_tags + 1 {
        return Err(Error::invalid(format!(
            "tau must be a power of two with tau >= K+1, got tau={tau}, K={k_tags}"
        )));
    }
    if !(p_p > 0.0) {
        return Err(Error::invalid(format!("p_p must be > 0, got {p_p}")));
    }
    let h = hadamard(tau)?;
    let c = ComplexMatrix::from_fn(k_tags + 1, tau, |r, j| h.get(r, j));
    let s = match source_pilot {
        SourcePilot::AllOnes => {
            ComplexMatrix::from_fn(1, tau, |_, _| Complex64::new(1.0, 0.0))
        }
        SourcePilot::RandomPhase => ComplexMatrix::from_fn(1, tau, |_, _| {
            Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
        }),
    };
    Ok(PilotSet { c, s, tau, p_p })
}

/// Synthesizes the reader observation `Y = sqrt(p_p) H̄ C S + N` with
/// N ~ CN(0, sigma2 I) elementwise.
pub fn simulate_observation(
    hbar: &ComplexMatrix,
    pilots: &PilotSet,
    sigma2: f64,
    rng: &mut Rng,
) -> Result<ComplexMatrix> {
    if hbar.cols() != pilots.c.rows() {
        return Err(Error::dims(format!(
            "hbar has {} columns but pilots carry K+1 = {} rows",
            hbar.cols(),
            pilots.c.rows()
        )));
    }
    let clean = hbar
        .matmul(&pilots.c)?
        .matmul(&pilots.s_diag())?
        .scale_re(pilots.p_p.sqrt());
    let noise = sample_complex_gaussian(hbar.rows(), pilots.tau, sigma2, rng)?;
    clean.add(&noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stream;

    fn orthogonality_defect(c: &ComplexMatrix, tau: usize) -> f64 {
        let gram = c.matmul(&c.hermitian()).unwrap();
        let target = ComplexMatrix::identity(c.rows()).scale_re(tau as f64);
        gram.sub(&target)
            .unwrap()
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn hadamard_base_and_step() {
        let h1 = hadamard(1).unwrap();
        assert_eq!(h1.get(0, 0), Complex64::new(1.0, 0.0));
        let h2 = hadamard(2).unwrap();
        assert_eq!(h2.get(0, 0).re, 1.0);
        assert_eq!(h2.get(0, 1).re, 1.0);
        assert_eq!(h2.get(1, 0).re, 1.0);
        assert_eq!(h2.get(1, 1).re, -1.0);
    }

    #[test]
    fn hadamard_identity_order_8() {
        let h = hadamard(8).unwrap();
        assert_eq!(orthogonality_defect(&h, 8), 0.0);
    }

    #[test]
    fn hadamard_rejects_non_power_of_two() {
        assert!(hadamard(0).is_err());
        assert!(hadamard(6).is_err());
    }

    #[test]
    fn full_hadamard_when_k7_tau8() {
        let mut rng = Rng::new(1);
        let p = build_pilots(7, 8, 1.0, SourcePilot::AllOnes, &mut rng).unwrap();
        assert_eq!(p.c.rows(), 8);
        assert_eq!(orthogonality_defect(&p.c, 8), 0.0);
    }

    #[test]
    fn smallest_multi_tag_case() {
        let mut rng = Rng::new(1);
        let p = build_pilots(1, 2, 1.0, SourcePilot::AllOnes, &mut rng).unwrap();
        assert_eq!(p.c, hadamard(2).unwrap());
    }

    #[test]
    fn row0_all_ones_and_orthogonal() {
        let mut rng = Rng::new(1);
        let p = build_pilots(2, 4, 1.0, SourcePilot::AllOnes, &mut rng).unwrap();
        for j in 0..4 {
            assert_eq!(p.c.get(0, j), Complex64::new(1.0, 0.0));
        }
        assert_eq!(orthogonality_defect(&p.c, 4), 0.0);
    }

    #[test]
    fn invalid_tau_rejected() {
        let mut rng = Rng::new(1);
        assert!(build_pilots(3, 2, 1.0, SourcePilot::AllOnes, &mut rng).is_err());
        assert!(build_pilots(1, 3, 1.0, SourcePilot::AllOnes, &mut rng).is_err());
    }

    #[test]
    fn random_phase_unit_modulus() {
        let mut rng = Rng::new(2);
        let p = build_pilots(3, 8, 1.0, SourcePilot::RandomPhase, &mut rng).unwrap();
        for z in p.s.entries() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_observation_direct_arithmetic() {
        // M=1, K=1, tau=2, hbar = [2, i], C = [[1,1],[1,-1]] -> Y = [2+i, 2-i].
        let mut rng = Rng::new(1);
        let p = build_pilots(1, 2, 1.0, SourcePilot::AllOnes, &mut rng).unwrap();
        let hbar =
            ComplexMatrix::new(1, 2, vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)])
                .unwrap();
        let y = simulate_observation(&hbar, &p, 0.0, &mut rng).unwrap();
        assert!((y.get(0, 0) - Complex64::new(2.0, 1.0)).norm() < 1e-15);
        assert!((y.get(0, 1) - Complex64::new(2.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn noiseless_round_trip_both_pilot_kinds() {
        for kind in [SourcePilot::AllOnes, SourcePilot::RandomPhase] {
            let root = Rng::new(7);
            let mut prng = root.derive(stream::PILOT);
            let p = build_pilots(3, 8, 2.0, kind, &mut prng).unwrap();
            let hbar = crate::numerics::sample_complex_gaussian(
                4,
                4,
                1.0,
                &mut root.derive(stream::CHANNEL),
            )
            .unwrap();
            let y = simulate_observation(&hbar, &p, 0.0, &mut root.derive(stream::NOISE)).unwrap();
            let recon = y
                .matmul(&p.s_diag().hermitian())
                .unwrap()
                .matmul(&p.c.hermitian())
                .unwrap()
                .scale_re(1.0 / (p.p_p.sqrt() * p.tau as f64));
            let rel = recon.sub(&hbar).unwrap().frob_norm_sq().sqrt()
                / hbar.frob_norm_sq().sqrt();
            assert!(rel < 1e-12, "round trip error {rel}");
        }
    }

    #[test]
    fn pure_noise_variance() {
        let hbar = ComplexMatrix::zeros(16, 2);
        let mut rng = Rng::new(9).derive(stream::NOISE);
        let p = build_pilots(1, 2, 1.0, SourcePilot::AllOnes, &mut Rng::new(1)).unwrap();
        let trials = 2000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let y = simulate_observation(&hbar, &p, 1.5, &mut rng).unwrap();
            acc += y.frob_norm_sq() / (16.0 * 2.0);
        }
        let var = acc / trials as f64;
        assert!((var - 1.5).abs() < 0.03 * 1.5, "noise variance {var}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut rng = Rng::new(1);
        let p = build_pilots(1, 2, 1.0, SourcePilot::AllOnes, &mut rng).unwrap();
        let hbar = ComplexMatrix::zeros(2, 3);
        assert!(simulate_observation(&hbar, &p, 1.0, &mut rng).is_err());
    }
}
