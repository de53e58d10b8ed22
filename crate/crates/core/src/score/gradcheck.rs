use rand::seq::SliceRandom;

use crate::numerics::Rng;
use crate::{Error, Result};

use super::model::ScoreModel;

/// Central-finite-difference check of analytic score-parameter gradients.
///
/// `eval` returns (loss, dLoss/dTheta) for the current parameters; a random
/// subset of `probes` parameters is perturbed by +/- epsilon. Returns the
/// maximum relative error over the probed set.
pub fn grad_check(
    model: &mut ScoreModel,
    eval: impl Fn(&ScoreModel) -> Result<(f64, Vec<f64>)>,
    epsilon: f64,
    probes: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::invalid(format!(
            "epsilon must lie in [1e-7, 1e-3], got {epsilon}"
        )));
    }
    let (_, grads) = eval(model)?;
    let mut indices: Vec<usize> = (0..model.net.num_params()).collect();
    indices.shuffle(rng);
    indices.truncate(probes);

    let mut max_rel: f64 = 0.0;
    for &i in &indices {
        let orig = model.net.params()[i];
        model.net.params_mut()[i] = orig + epsilon;
        let (lp, _) = eval(model)?;
        model.net.params_mut()[i] = orig - epsilon;
        let (lm, _) = eval(model)?;
        model.net.params_mut()[i] = orig;
        let fd = (lp - lm) / (2.0 * epsilon);
        let denom = fd.abs().max(grads[i].abs()).max(1e-6);
        max_rel = max_rel.max((fd - grads[i]).abs() / denom);
    }
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sample_complex_gaussian;
    use crate::score::{dsm_loss_grad, make_schedule, DsmBatch};

    #[test]
    fn linear_model_quadratic_loss_exact() {
        // A single linear layer under the DSM quadratic loss has an exact
        // analytic gradient; finite differences agree to near machine
        // precision.
        let mut rng = Rng::new(1);
        let mut model = ScoreModel::new(2, 2, 0, 0, &mut rng).unwrap();
        {
            use rand::Rng as _;
            for p in model.net.params_mut() {
                *p = 0.1 * (rng.gen::<f64>() - 0.5);
            }
        }
        let schedule = make_schedule(0.5, 2.0, 4).unwrap();
        let samples: Vec<Vec<f64>> = (0..8)
            .map(|_| {
                sample_complex_gaussian(2, 2, 1.0, &mut rng)
                    .unwrap()
                    .to_real_stack()
            })
            .collect();
        let refs: Vec<&[f64]> = samples.iter().map(|s| s.as_slice()).collect();
        let batch = DsmBatch::build(&refs, &schedule, &mut rng).unwrap();
        let max_rel = grad_check(
            &mut model,
            |m| dsm_loss_grad(m, &batch, 1.0),
            1e-5,
            30,
            &mut rng,
        )
        .unwrap();
        assert!(max_rel < 1e-7, "max rel error {max_rel}");
    }

    #[test]
    fn epsilon_bounds_enforced() {
        let mut rng = Rng::new(2);
        let mut model = ScoreModel::new(2, 2, 2, 8, &mut rng).unwrap();
        let schedule = make_schedule(0.5, 2.0, 4).unwrap();
        let s = sample_complex_gaussian(2, 2, 1.0, &mut rng)
            .unwrap()
            .to_real_stack();
        let batch = DsmBatch::build(&[&s], &schedule, &mut rng).unwrap();
        let r = grad_check(
            &mut model,
            |m| dsm_loss_grad(m, &batch, 1.0),
            1e-2,
            5,
            &mut rng,
        );
        assert!(r.is_err());
    }
}
