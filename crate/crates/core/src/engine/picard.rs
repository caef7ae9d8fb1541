use serde::{Deserialize, Serialize};

use super::euler::Stepper;
use super::path::PathRecord;
use super::problem::SolveProblem;
use crate::error::Result;
use crate::noise::NoiseRealization;

pub const DEFAULT_PICARD_TOL: f64 = 1e-10;
pub const DEFAULT_PICARD_MAX_ITER: usize = 50;

/// `e_k = sup_j |U^{(k+1)}_{t_j} - U^{(k)}_{t_j}|` for each iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    pub iterations: usize,
    pub distances: Vec<f64>,
    pub converged: bool,
}

/// Picard iteration of the reduced equation on frozen noise.
///
/// `U^{(0)} = κ`, and `U^{(k+1)}` integrates the coefficients along
/// `U^{(k)}` through the same discrete integrals as
/// [`solve_reduced_euler`](super::solve_reduced_euler), so the fixed point
/// is the Euler path. Stops once `e_k <= tol` or after `k_max` iterations;
/// an iterate that overflows ends the iteration unconverged with the
/// previous iterate returned.
pub fn picard_solve(prob: &SolveProblem, noise: &NoiseRealization, k_max: usize, tol: f64) -> Result<(PathRecord, PicardTrace)> {
    prob.check_noise(noise)?;
    let d = prob.dim();
    let mut stepper = Stepper::for_problem(prob.field(), prob);
    let mut current = PathRecord::constant(noise.times(), prob.kappa());
    let mut next = current.clone();
    let mut inc = vec![0.0; d];
    let mut state = vec![0.0; d];
    let mut distances = Vec::new();
    let mut converged = false;
    for _ in 0..k_max.max(1) {
        state.copy_from_slice(prob.kappa());
        let mut finite = true;
        for k in 0..noise.steps() {
            let left = current.value(k);
            stepper.increment(left, noise.times()[k + 1] - noise.times()[k], noise.increment(k), noise.small_in_step(k), &mut inc);
            for (s, v) in state.iter_mut().zip(&inc) {
                *s += *v;
            }
            if !state.iter().all(|v| v.is_finite()) {
                finite = false;
                break;
            }
            next.set(k + 1, &state);
        }
        if !finite {
            break;
        }
        let e = next.sup_distance(&current);
        distances.push(e);
        std::mem::swap(&mut current, &mut next);
        if e <= tol {
            converged = true;
            break;
        }
    }
    let trace = PicardTrace {
        iterations: distances.len(),
        distances,
        converged,
    };
    Ok((current, trace))
}
