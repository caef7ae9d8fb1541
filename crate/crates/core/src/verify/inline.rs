use crate::engine::{LargeJumpRecord, PathRecord, SolveProblem};
use crate::error::{Error, Result};
use crate::lift::LocalCoefficients;
use crate::noise::NoiseRealization;

/// A second integrator for the full equation, written independently of
/// the engine: trapezoidal predictor-corrector in the compensated drift,
/// left-point diffusion and small jumps, and large jumps applied inline at
/// the end of the step that contains them.
///
/// For a constant drift and no noise it reproduces the Euler path exactly.
pub fn inline_solve(prob: &SolveProblem, noise: &NoiseRealization) -> Result<PathRecord> {
    let field = prob.field();
    let d = prob.dim();
    if noise.dim() != d || noise.steps() != prob.steps() || noise.horizon() != prob.horizon() {
        return Err(Error::InvalidArgument("noise does not match the problem grid".into()));
    }
    let lambdas: Vec<f64> = prob.model().small_atoms().iter().map(|a| a.intensity).collect();
    let compensated = |c: &LocalCoefficients, out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            let comp: f64 = lambdas.iter().enumerate().map(|(a, l)| l * c.small[a * d + i]).sum();
            *o = c.drift[i] - comp;
        }
    };

    let times = noise.times();
    let mut path = PathRecord::constant(times, prob.kappa());
    let mut y = prob.kappa().to_vec();
    let mut here = LocalCoefficients::for_field(field);
    let mut ahead = LocalCoefficients::for_field(field);
    let (mut a0, mut a1) = (vec![0.0; d], vec![0.0; d]);
    let mut shock = vec![0.0; d];
    let mut pred = vec![0.0; d];
    let mut g = vec![0.0; d];
    for k in 0..noise.steps() {
        let dt = times[k + 1] - times[k];
        field.evaluate(&y, &mut here);
        compensated(&here, &mut a0);
        let db = noise.increment(k);
        for i in 0..d {
            shock[i] = (0..d).map(|j| here.diffusion[i * d + j] * db[j]).sum::<f64>();
        }
        for ev in noise.small_in_step(k) {
            for i in 0..d {
                shock[i] += here.small[ev.atom * d + i];
            }
        }
        for i in 0..d {
            pred[i] = y[i] + a0[i] * dt + shock[i];
        }
        field.evaluate(&pred, &mut ahead);
        compensated(&ahead, &mut a1);
        for i in 0..d {
            y[i] += 0.5 * (a0[i] + a1[i]) * dt + shock[i];
        }
        for ev in noise.large_in_step(k) {
            let pre = y.clone();
            field.large_jump(&y, &ev.mark, &mut g);
            for (v, gi) in y.iter_mut().zip(&g) {
                *v += gi;
            }
            path.push_jump(LargeJumpRecord {
                time: ev.time,
                grid_index: k + 1,
                mark: ev.mark.clone(),
                pre,
                post: y.clone(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowUp { time: times[k + 1], step: k });
        }
        path.set(k + 1, &y);
    }
    Ok(path)
}
