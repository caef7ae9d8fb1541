use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::inline::inline_solve;
use super::{problem_fingerprint, CheckReport};
use crate::engine::{
    interlace_solve, picard_solve, solve_reduced_euler, truncate_coeffs, PathRecord, PicardTrace, SolveProblem,
};
use crate::engine::{DEFAULT_PICARD_MAX_ITER, DEFAULT_PICARD_TOL};
use crate::error::{Error, Result};
use crate::lift::{
    empirical_lipschitz, growth_functional, sample_ball, verify_hypotheses, CoefficientField, HypothesisOptions,
    HypothesisReport, LocalCoefficients, SyntheticDrift,
};
use crate::engine::CoefficientSource;
use crate::noise::{norm, stream_rng, Stream};

/// Synthetic fields whose drift grows faster than linearly violate the
/// growth condition by construction; checks on them are negative controls.
pub fn is_negative_control(prob: &SolveProblem) -> bool {
    match prob.source() {
        CoefficientSource::Synthetic { spec } => match &spec.drift {
            SyntheticDrift::Polynomial { coefficients } => coefficients.iter().skip(2).any(|&c| c != 0.0),
            _ => false,
        },
        CoefficientSource::Lifted { .. } => false,
    }
}

/// Sup-distance between two solvers, infinite when either overflows.
fn distance_or_blow_up(a: Result<PathRecord>, b: Result<PathRecord>) -> Result<f64> {
    match (a, b) {
        (Ok(a), Ok(b)) => Ok(a.sup_distance(&b)),
        (Err(Error::NumericalBlowUp { .. }), _) | (_, Err(Error::NumericalBlowUp { .. })) => Ok(f64::INFINITY),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

fn intensities(prob: &SolveProblem) -> Vec<f64> {
    prob.model().small_atoms().iter().map(|a| a.intensity).collect()
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len().max(1) as f64
}

/// Run [`verify_hypotheses`] on a lifted problem with `K = {ξ}`.
pub fn check_hypotheses(
    prob: &SolveProblem,
    radii: &[f64],
    options: &HypothesisOptions,
) -> Result<(HypothesisReport, CheckReport)> {
    let CoefficientSource::Lifted {
        coefficients,
        small,
        large,
        xi,
    } = prob.source()
    else {
        return Err(Error::InvalidArgument("hypotheses are stated for lifted coefficients".into()));
    };
    let report = verify_hypotheses(coefficients, small, large, prob.model(), std::slice::from_ref(xi), radii, options)?;
    let inputs = format!("{}|{:?}|{}", problem_fingerprint(prob), radii, serde_json::to_string(options).unwrap_or_default());
    let mut check = CheckReport::new("hypotheses", &inputs, 0.0);
    check
        .scalar("beta", report.beta)
        .scalar("beta_required", report.beta_required)
        .scalar("alpha_k", report.alpha_k)
        .scalar("c_k", report.lipschitz_global)
        .scalar("c_k_bound", report.lipschitz_global_bound)
        .scalar("theta_global", report.theta_global)
        .scalar("growth_bound", report.growth_bound)
        .scalar("f1_violations", report.f1_violations as f64)
        .series("c_k_n", report.local.iter().map(|l| l.empirical).collect())
        .series("c_k_n_bound", report.local.iter().map(|l| l.bound).collect())
        .series("radii", radii.to_vec());
    check.pass = report.pass;
    Ok((report, check))
}

/// `C̃ = 3 C(K) (T + 8)` from the empirical global constant.
pub fn picard_constant(report: &HypothesisReport, horizon: f64) -> f64 {
    3.0 * report.lipschitz_global * (horizon + 8.0)
}

/// Picard traces for replications `0..replications`, in order.
pub fn picard_traces(
    prob: &SolveProblem,
    seed: u64,
    replications: u64,
    k_max: usize,
    tol: f64,
) -> Result<Vec<PicardTrace>> {
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let noise = prob.sample_noise(seed, r)?;
            Ok(picard_solve(prob, &noise, k_max, tol)?.1)
        })
        .collect()
}

/// Replication mean of `e_k^2` against `A (C̃T)^{k+1}/(k+1)!`, with `A`
/// fitted at `k = 1`. A single trace is report-only: the envelope bounds a
/// mean, and one path may exceed it.
pub fn check_picard_decay(traces: &[PicardTrace], horizon: f64, c_tilde: f64) -> CheckReport {
    let len = traces.iter().map(|t| t.distances.len()).max().unwrap_or(0);
    let mean_sq: Vec<f64> = (0..len)
        .map(|k| {
            let total: f64 = traces.iter().map(|t| t.distances.get(k).map_or(0.0, |e| e * e)).sum();
            total / traces.len().max(1) as f64
        })
        .collect();
    let ct = c_tilde * horizon;
    let mut powers = Vec::with_capacity(len);
    let mut term = ct;
    for k in 0..len {
        if k > 0 {
            term *= ct / (k + 1) as f64;
        }
        powers.push(term);
    }
    let a = match (mean_sq.get(1), powers.get(1)) {
        (Some(&e1), Some(&p1)) if p1 > 0.0 => e1 / p1,
        _ => 0.0,
    };
    let envelope: Vec<f64> = powers.iter().map(|p| a * p).collect();
    let within = (1..len).all(|k| mean_sq[k] <= envelope[k] * (1.0 + 1e-12));
    let first_below = (0..len)
        .find(|&k| traces.iter().all(|t| t.distances.get(k).is_none_or(|&e| e <= DEFAULT_PICARD_TOL)))
        .map_or(f64::NAN, |k| k as f64);

    let inputs = serde_json::to_string(&(traces, horizon, c_tilde)).unwrap_or_default();
    let mut check = CheckReport::new("picard_decay", &inputs, 1e-12);
    check
        .scalar("c_tilde", c_tilde)
        .scalar("horizon", horizon)
        .scalar("a_fitted", a)
        .scalar("replications", traces.len() as f64)
        .scalar("first_k_below_tol", first_below)
        .series("mean_e_sq", mean_sq.clone())
        .series("envelope", envelope);
    check.pass = within && mean_sq.iter().all(|v| v.is_finite());
    check.report_only = traces.len() == 1;
    check
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthOptions {
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    /// Mark the check as a negative control even if the problem is not a
    /// known superlinear double.
    pub negative_control: bool,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            radius: 8.0,
            samples: 2048,
            seed: 0,
            negative_control: false,
        }
    }
}

/// Smallest `D` with `|b̄|^2 + |σ̄|^2 + ∫|F̄|^2 dν <= D (1 + |z|^2)` on the
/// samples. Passes when `D` is finite and moves by less than 20% when the
/// sample count doubles and when the radius doubles.
pub fn check_growth_bound(prob: &SolveProblem, options: &GrowthOptions) -> Result<CheckReport> {
    if !(options.radius > 0.0) || options.samples == 0 {
        return Err(Error::InvalidArgument("growth check needs a positive radius and samples".into()));
    }
    let field = prob.field();
    let lambdas = intensities(prob);
    let fit = |radius: f64, samples: usize| {
        let mut rng = stream_rng(options.seed, 0, Stream::Auxiliary);
        let mut out = LocalCoefficients::for_field(field);
        let origin = vec![0.0; field.dim()];
        let mut best = growth_functional(field, &lambdas, &origin, &mut out);
        for _ in 0..samples {
            let z = sample_ball(field.dim(), radius, &mut rng);
            let s = growth_functional(field, &lambdas, &z, &mut out);
            best = best.max(s / (1.0 + z.iter().map(|v| v * v).sum::<f64>()));
        }
        best
    };
    let base = fit(options.radius, options.samples);
    let denser = fit(options.radius, 2 * options.samples);
    let wider = fit(2.0 * options.radius, 2 * options.samples);
    let sample_change = relative_change(base, denser);
    let radius_change = relative_change(base, wider);

    let inputs = format!("{}|{}", problem_fingerprint(prob), serde_json::to_string(options).unwrap_or_default());
    let mut check = CheckReport::new("growth", &inputs, 0.2);
    check
        .scalar("d", base)
        .scalar("d_double_samples", denser)
        .scalar("d_double_radius", wider)
        .scalar("sample_change", sample_change)
        .scalar("radius_change", radius_change);
    check.pass = [base, denser, wider].iter().all(|v| v.is_finite()) && sample_change < 0.2 && radius_change < 0.2;
    check.negative_control = options.negative_control || is_negative_control(prob);
    Ok(check)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UniquenessOptions {
    pub seed: u64,
    /// Seed for the inline integrator's noise. Anything other than `seed`
    /// makes the check a negative control.
    pub inline_seed: Option<u64>,
    pub replications: u64,
    pub steps: Vec<usize>,
    pub tolerance: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
}

impl Default for UniquenessOptions {
    fn default() -> Self {
        UniquenessOptions {
            seed: 0,
            inline_seed: None,
            replications: 100,
            steps: vec![1 << 6, 1 << 8, 1 << 10, 1 << 12],
            tolerance: 1e-3,
            picard_tol: DEFAULT_PICARD_TOL,
            picard_max_iter: DEFAULT_PICARD_MAX_ITER,
        }
    }
}

/// Picard against the inline integrator on identical noise for each grid
/// size. Passes when the replication-mean sup-distance never increases with
/// the grid size and ends at or below the tolerance.
pub fn check_uniqueness(prob: &SolveProblem, options: &UniquenessOptions) -> Result<CheckReport> {
    if options.steps.is_empty() || options.replications == 0 {
        return Err(Error::InvalidArgument("uniqueness check needs grid sizes and replications".into()));
    }
    let inline_seed = options.inline_seed.unwrap_or(options.seed);
    let mut means = Vec::with_capacity(options.steps.len());
    let mut worst = Vec::with_capacity(options.steps.len());
    for &steps in &options.steps {
        let p = prob.with_steps(steps)?;
        let distances: Vec<f64> = (0..options.replications)
            .into_par_iter()
            .map(|r| {
                let noise = p.sample_noise(options.seed, r)?;
                let picard = picard_solve(&p, &noise, options.picard_max_iter, options.picard_tol).map(|(path, _)| path);
                let other = if inline_seed == options.seed {
                    inline_solve(&p, &noise)
                } else {
                    inline_solve(&p, &p.sample_noise(inline_seed, r)?)
                };
                distance_or_blow_up(picard, other)
            })
            .collect::<Result<_>>()?;
        means.push(mean(&distances));
        worst.push(distances.iter().copied().fold(0.0, f64::max));
    }
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    let last = *means.last().expect("non-empty");

    let inputs = format!("{}|{}", problem_fingerprint(prob), serde_json::to_string(options).unwrap_or_default());
    let mut check = CheckReport::new("uniqueness", &inputs, options.tolerance);
    check
        .scalar("final_mean_distance", last)
        .scalar("monotone", if monotone { 1.0 } else { 0.0 })
        .series("steps", options.steps.iter().map(|&m| m as f64).collect())
        .series("mean_sup_distance", means.clone())
        .series("max_sup_distance", worst);
    check.pass = means.iter().all(|v| v.is_finite()) && monotone && last <= options.tolerance;
    check.negative_control = inline_seed != options.seed || is_negative_control(prob);
    Ok(check)
}

/// `sup_k |b̄(U_k) - ∫F̄(U_k, x) ν(dx)|` along a path.
fn drift_speed(field: &dyn CoefficientField, lambdas: &[f64], path: &crate::engine::PathRecord) -> f64 {
    let d = field.dim();
    let mut out = LocalCoefficients::for_field(field);
    let mut best: f64 = 0.0;
    for k in 0..path.len() {
        field.evaluate(path.value(k), &mut out);
        let a: Vec<f64> = (0..d)
            .map(|i| out.drift[i] - lambdas.iter().enumerate().map(|(j, l)| l * out.small[j * d + i]).sum::<f64>())
            .collect();
        best = best.max(norm(&a));
    }
    best
}

/// Interlacing against the inline integrator. Per replication the
/// sup-distance must stay within `tolerance · Δt · L`, `L` the largest
/// compensated drift along the path; post-jump states must match the
/// directly applied jump to `1e-12`; and with large events removed the
/// interlaced path must equal the reduced Euler path bit for bit.
pub fn check_interlace(prob: &SolveProblem, seed: u64, replications: u64, tolerance: f64) -> Result<CheckReport> {
    let field = prob.field();
    let lambdas = intensities(prob);
    let dt = prob.dt();
    let rows: Vec<(f64, f64, f64, bool, usize)> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let noise = prob.sample_noise(seed, r)?;
            let interlaced = interlace_solve(prob, &noise)?;
            let inline = inline_solve(prob, &noise)?;
            let distance = interlaced.sup_distance(&inline);
            let speed = drift_speed(field, &lambdas, &interlaced);
            let mut jump_gap: f64 = 0.0;
            let mut g = vec![0.0; prob.dim()];
            for jump in interlaced.large_jumps() {
                field.large_jump(&jump.pre, &jump.mark, &mut g);
                for ((pre, gi), post) in jump.pre.iter().zip(&g).zip(&jump.post) {
                    jump_gap = jump_gap.max((pre + gi - post).abs());
                }
            }
            let reduced = noise.without_large_events();
            let exact = interlace_solve(prob, &reduced)?.values() == solve_reduced_euler(prob, &reduced)?.values();
            Ok((distance, speed, jump_gap, exact, interlaced.large_jumps().len()))
        })
        .collect::<Result<_>>()?;

    let ratios: Vec<f64> = rows
        .iter()
        .map(|&(dist, speed, ..)| if dist == 0.0 { 0.0 } else { dist / (dt * speed) })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let jump_gap = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let all_exact = rows.iter().all(|r| r.3);

    let inputs = format!("{}|{seed}|{replications}|{tolerance}", problem_fingerprint(prob));
    let mut check = CheckReport::new("interlace", &inputs, tolerance);
    check
        .scalar("max_ratio", max_ratio)
        .scalar("max_jump_gap", jump_gap)
        .scalar("reduced_bit_exact", if all_exact { 1.0 } else { 0.0 })
        .scalar("large_jumps", rows.iter().map(|r| r.4 as f64).sum())
        .series("sup_distance", rows.iter().map(|r| r.0).collect())
        .series("path_lipschitz", rows.iter().map(|r| r.1).collect());
    check.pass = max_ratio.is_finite() && max_ratio <= tolerance && jump_gap <= 1e-12 && all_exact;
    Ok(check)
}

/// `C(K, R)` and `α(K)` for the truncation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationConstants {
    pub c_k_r: f64,
    pub alpha_k: f64,
}

impl TruncationConstants {
    /// Empirical `C(K, R)` at `radius` and `α(K)` from a hypothesis report.
    pub fn from_report(report: &HypothesisReport, radius: f64) -> Result<Self> {
        let local = report
            .local
            .iter()
            .find(|l| l.radius == radius)
            .ok_or_else(|| Error::InvalidArgument(format!("hypothesis report has no constant at radius {radius}")))?;
        Ok(TruncationConstants {
            c_k_r: local.empirical,
            alpha_k: report.alpha_k,
        })
    }

    /// `6 C(K, R) + 4 α(K) / R^2`.
    pub fn bound(&self, radius: f64) -> f64 {
        6.0 * self.c_k_r + 4.0 * self.alpha_k / (radius * radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TruncationOptions {
    pub radius: f64,
    /// Pairs for the two geometric inequalities.
    pub pairs: usize,
    /// Points and pairs for the coefficient comparisons.
    pub samples: usize,
    pub seed: u64,
}

impl Default for TruncationOptions {
    fn default() -> Self {
        TruncationOptions {
            radius: 2.0,
            pairs: 100_000,
            samples: 4096,
            seed: 0,
        }
    }
}

fn annulus_point<R: Rng>(dim: usize, inner: f64, outer: f64, rng: &mut R) -> Vec<f64> {
    let dir = loop {
        let v = sample_ball(dim, 1.0, rng);
        let n = norm(&v);
        if n > 0.0 {
            break v.iter().map(|x| x / n).collect::<Vec<_>>();
        }
    };
    let r = rng.random_range(inner..=outer);
    dir.iter().map(|x| x * r).collect()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The radial cutoff at `R`: both geometric inequalities on random pairs
/// with `|z_1| <= R <= |z_2| <= 2R`, bit-exact agreement inside the ball,
/// and the empirical constant of `F̄^R` against `6 C(K, R) + 4 α(K)/R^2`.
pub fn check_truncation(
    prob: &SolveProblem,
    constants: &TruncationConstants,
    options: &TruncationOptions,
) -> Result<CheckReport> {
    let field = prob.field();
    let dim = field.dim();
    let r = options.radius;
    let truncated = truncate_coeffs(field, r)?;
    let mut rng = stream_rng(options.seed, 0, Stream::Auxiliary);

    let (mut first, mut second) = (0usize, 0usize);
    for _ in 0..options.pairs {
        let z1 = sample_ball(dim, r, &mut rng);
        let z2 = annulus_point(dim, r, 2.0 * r, &mut rng);
        let n2 = norm(&z2);
        let projected: Vec<f64> = z2.iter().map(|v| r * v / n2).collect();
        let gap = dist_sq(&z1, &z2);
        if dist_sq(&z1, &projected) > gap {
            first += 1;
        }
        if (n2 - r).powi(2) > gap {
            second += 1;
        }
    }

    let mut a = LocalCoefficients::for_field(field);
    let mut b = LocalCoefficients::for_field(field);
    let mut mismatches = 0usize;
    for _ in 0..options.samples {
        let z = sample_ball(dim, r, &mut rng);
        field.evaluate(&z, &mut a);
        truncated.evaluate(&z, &mut b);
        if a != b {
            mismatches += 1;
        }
    }

    let lambdas = intensities(prob);
    let jump_part = |z1: &[f64], z2: &[f64], a: &mut LocalCoefficients, b: &mut LocalCoefficients| {
        truncated.evaluate(z1, a);
        truncated.evaluate(z2, b);
        lambdas
            .iter()
            .enumerate()
            .map(|(k, l)| l * dist_sq(&a.small[k * dim..(k + 1) * dim], &b.small[k * dim..(k + 1) * dim]))
            .sum::<f64>()
    };
    let mut f_lipschitz: f64 = 0.0;
    for s in 0..options.samples {
        let (z1, z2) = match s % 3 {
            0 => (sample_ball(dim, r, &mut rng), annulus_point(dim, r, 2.0 * r, &mut rng)),
            1 => {
                let z1 = sample_ball(dim, 2.5 * r, &mut rng);
                let step = sample_ball(dim, 1e-3 * r.max(1.0), &mut rng);
                let z2 = z1.iter().zip(&step).map(|(x, y)| x + y).collect();
                (z1, z2)
            }
            _ => (sample_ball(dim, 2.5 * r, &mut rng), sample_ball(dim, 2.5 * r, &mut rng)),
        };
        let gap = dist_sq(&z1, &z2);
        if gap > 0.0 {
            f_lipschitz = f_lipschitz.max(jump_part(&z1, &z2, &mut a, &mut b) / gap);
        }
    }
    let full_lipschitz = empirical_lipschitz(&truncated, &lambdas, 2.5 * r, options.samples, &mut rng);
    let bound = constants.bound(r);

    let inputs = format!(
        "{}|{}|{}",
        problem_fingerprint(prob),
        serde_json::to_string(constants).unwrap_or_default(),
        serde_json::to_string(options).unwrap_or_default()
    );
    let mut check = CheckReport::new("truncation", &inputs, bound);
    check
        .scalar("radius", r)
        .scalar("projection_violations", first as f64)
        .scalar("radial_violations", second as f64)
        .scalar("inside_mismatches", mismatches as f64)
        .scalar("f_lipschitz", f_lipschitz)
        .scalar("f_lipschitz_bound", bound)
        .scalar("truncated_lipschitz", full_lipschitz)
        .scalar("c_k_r", constants.c_k_r)
        .scalar("alpha_k", constants.alpha_k);
    check.pass = first == 0 && second == 0 && mismatches == 0 && f_lipschitz.is_finite() && f_lipschitz <= bound;
    Ok(check)
}
