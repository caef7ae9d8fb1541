use std::ops::Range;

use super::path::{LargeJumpRecord, PathRecord};
use super::problem::SolveProblem;
use crate::error::{Error, Result};
use crate::lift::{CoefficientField, LocalCoefficients};
use crate::noise::{NoiseRealization, NoiseView, SmallEvent};

/// One explicit step of the reduced equation. Shared by Euler, interlacing
/// and Picard so that their arithmetic is identical.
pub(crate) struct Stepper<'a> {
    field: &'a dyn CoefficientField,
    intensities: Vec<f64>,
    local: LocalCoefficients,
    comp: Vec<f64>,
    jump: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(field: &'a dyn CoefficientField, intensities: Vec<f64>) -> Self {
        let d = field.dim();
        Stepper {
            field,
            intensities,
            local: LocalCoefficients::for_field(field),
            comp: vec![0.0; d],
            jump: vec![0.0; d],
        }
    }

    pub(crate) fn for_problem(field: &'a dyn CoefficientField, prob: &SolveProblem) -> Self {
        Self::new(field, prob.model().small_atoms().iter().map(|a| a.intensity).collect())
    }

    /// `b̄(z) dt + σ̄(z) ΔB + sum_events F̄(z, x) - dt ∫ F̄(z, x) ν(dx)`.
    pub(crate) fn increment(&mut self, z: &[f64], dt: f64, db: &[f64], small: &[SmallEvent], out: &mut [f64]) {
        let d = z.len();
        self.field.evaluate(z, &mut self.local);
        let loc = &self.local;
        for i in 0..d {
            let mut c = 0.0;
            for (a, lambda) in self.intensities.iter().enumerate() {
                c += lambda * loc.small[a * d + i];
            }
            self.comp[i] = c;
        }
        for i in 0..d {
            let mut diffusion = 0.0;
            for (j, dbj) in db.iter().enumerate() {
                diffusion += loc.diffusion[i * d + j] * dbj;
            }
            let mut jumps = 0.0;
            for ev in small {
                jumps += loc.small[ev.atom * d + i];
            }
            out[i] = loc.drift[i] * dt + diffusion + jumps - self.comp[i] * dt;
        }
    }

    /// `z + Ḡ(z, mark)` into `z`.
    pub(crate) fn apply_large(&mut self, z: &mut [f64], mark: &[f64]) {
        self.field.large_jump(z, mark, &mut self.jump);
        for (v, g) in z.iter_mut().zip(&self.jump) {
            *v += g;
        }
    }
}

fn ensure_finite(state: &[f64], time: f64, step: usize) -> Result<()> {
    if state.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalBlowUp { time, step })
    }
}

/// Reduced steps `range` (view-local) from `state`, writing each new state
/// into `path` at its parent grid index.
fn reduced_segment(
    stepper: &mut Stepper<'_>,
    view: &NoiseView<'_>,
    range: Range<usize>,
    state: &mut [f64],
    path: &mut PathRecord,
) -> Result<()> {
    let mut inc = vec![0.0; state.len()];
    for k in range {
        stepper.increment(state, view.dt(k), view.increment(k), view.small_in_step(k), &mut inc);
        for (s, v) in state.iter_mut().zip(&inc) {
            *s += *v;
        }
        let index = view.start_index() + k + 1;
        ensure_finite(state, view.parent().times()[index], index - 1)?;
        path.set(index, state);
    }
    Ok(())
}

/// Explicit left-point scheme for the reduced equation; large events are
/// ignored.
pub fn solve_reduced_euler(prob: &SolveProblem, noise: &NoiseRealization) -> Result<PathRecord> {
    solve_reduced_with(prob.field(), prob, noise)
}

pub(crate) fn solve_reduced_with(
    field: &dyn CoefficientField,
    prob: &SolveProblem,
    noise: &NoiseRealization,
) -> Result<PathRecord> {
    prob.check_noise(noise)?;
    let mut stepper = Stepper::for_problem(field, prob);
    let mut path = PathRecord::constant(noise.times(), prob.kappa());
    let mut state = prob.kappa().to_vec();
    let view = noise.full_view();
    reduced_segment(&mut stepper, &view, 0..view.steps(), &mut state, &mut path)?;
    Ok(path)
}

/// The full equation by interlacing: reduced dynamics on the noise after
/// each large arrival, and `U = U_- + Ḡ(U_-, x)` at the arrival.
///
/// A large event in step `(t_k, t_{k+1}]` acts after that step's
/// continuous part and small jumps, and its post-jump state is the value at
/// `t_{k+1}`. Several large events in one step act in arrival order.
pub fn interlace_solve(prob: &SolveProblem, noise: &NoiseRealization) -> Result<PathRecord> {
    interlace_with(prob.field(), prob, noise)
}

pub(crate) fn interlace_with(
    field: &dyn CoefficientField,
    prob: &SolveProblem,
    noise: &NoiseRealization,
) -> Result<PathRecord> {
    prob.check_noise(noise)?;
    let mut stepper = Stepper::for_problem(field, prob);
    let mut path = PathRecord::constant(noise.times(), prob.kappa());
    let mut state = prob.kappa().to_vec();
    let mut view = noise.full_view();
    let mut done = 0;
    for event in noise.large_events() {
        let step = noise.step_of(event.time);
        if step + 1 > done {
            let from = done - view.start_index();
            let to = step + 1 - view.start_index();
            reduced_segment(&mut stepper, &view, from..to, &mut state, &mut path)?;
            done = step + 1;
        }
        let pre = state.clone();
        stepper.apply_large(&mut state, &event.mark);
        ensure_finite(&state, noise.times()[done], step)?;
        path.set(done, &state);
        path.push_jump(LargeJumpRecord {
            time: event.time,
            grid_index: done,
            mark: event.mark.clone(),
            pre,
            post: state.clone(),
        });
        view = noise.shift_view(event.time)?;
    }
    let from = done - view.start_index();
    reduced_segment(&mut stepper, &view, from..view.steps(), &mut state, &mut path)?;
    Ok(path)
}
