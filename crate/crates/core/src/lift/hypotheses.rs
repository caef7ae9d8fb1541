use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::coefficients::DistributionCoefficientSet;
use super::families::{LargeJumpFamily, SmallJumpFamily};
use super::field::{CoefficientField, LiftedField, LocalCoefficients};
use crate::error::{Error, Result};
use crate::hermite::{tau_opnorm, ExpansionVector, QuadratureRule};
use crate::noise::{norm, stream_rng, LevyModel, Stream};

/// Sampling controls for [`verify_hypotheses`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HypothesisOptions {
    /// Pairs `(z_1, z_2)` per Lipschitz estimate and per element of `K`.
    pub samples: usize,
    pub seed: u64,
    /// Radius for the global constant. `None` uses twice the quadrature
    /// halfwidth, beyond which every lifted coefficient vanishes.
    pub global_radius: Option<f64>,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        HypothesisOptions {
            samples: 256,
            seed: 0,
            global_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalLipschitz {
    pub radius: f64,
    /// `sup_{|w| <= radius} ||τ_w||` on `S_{-p}`, one order above the cutoff.
    pub theta: f64,
    pub empirical: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub sigma_b: bool,
    pub f1: bool,
    pub f2: bool,
    pub f3: bool,
    pub g1: bool,
    pub lipschitz_within_bound: bool,
    pub finite: bool,
}

/// Numerical evidence for the standing hypotheses and the constants the
/// existence proofs rely on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub regularity: f64,
    pub cutoff: usize,
    pub beta: f64,
    pub beta_required: f64,
    /// `max_a C_{x_a}` over the atoms of `ν`.
    pub sup_cx: f64,
    /// `sup_{|x| < 1} C_x` for the family.
    pub sup_cx_ball: f64,
    pub integral_cx2: f64,
    pub sup_f0: f64,
    pub integral_f02: f64,
    /// `α(K) = sup_{y ∈ K} ∫ |F(y, x)|^2 ν(dx)`.
    pub alpha_k: f64,
    pub fourth_moment_k: f64,
    pub k_norm_max: f64,
    /// `max_{y ∈ K} sum_i ||∂_i y||_{-p}^2`.
    pub derivative_norm_sq: f64,
    pub global_radius: f64,
    pub theta_global: f64,
    /// Empirical `C(K)`.
    pub lipschitz_global: f64,
    pub lipschitz_global_bound: f64,
    /// Empirical `C(K, n)` for each requested radius.
    pub local: Vec<LocalLipschitz>,
    /// Bound on `|b̄(0)|^2 + |σ̄(0)|^2 + ∫|F̄(0, x)|^2 ν(dx)` over `K`.
    pub growth_at_zero_bound: f64,
    /// Analytic `D` with `|b̄|^2 + |σ̄|^2 + ∫|F̄|^2 dν <= D (1 + |z|^2)`.
    pub growth_bound: f64,
    pub f1_violations: usize,
    pub samples: usize,
    pub flags: HypothesisFlags,
    pub pass: bool,
}

/// `|b̄(z_1) - b̄(z_2)|^2 + |σ̄(z_1) - σ̄(z_2)|^2 + sum_a λ_a |F̄(z_1, x_a) - F̄(z_2, x_a)|^2`.
pub fn lipschitz_functional(
    field: &dyn CoefficientField,
    intensities: &[f64],
    z1: &[f64],
    z2: &[f64],
    a: &mut LocalCoefficients,
    b: &mut LocalCoefficients,
) -> f64 {
    field.evaluate(z1, a);
    field.evaluate(z2, b);
    let sq = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let d = field.dim();
    let mut total = sq(&a.drift, &b.drift) + sq(&a.diffusion, &b.diffusion);
    for (k, lambda) in intensities.iter().enumerate() {
        total += lambda * sq(&a.small[k * d..(k + 1) * d], &b.small[k * d..(k + 1) * d]);
    }
    total
}

/// `|b̄(z)|^2 + |σ̄(z)|^2 + sum_a λ_a |F̄(z, x_a)|^2`.
pub fn growth_functional(field: &dyn CoefficientField, intensities: &[f64], z: &[f64], out: &mut LocalCoefficients) -> f64 {
    field.evaluate(z, out);
    let sq = |u: &[f64]| u.iter().map(|x| x * x).sum::<f64>();
    let d = field.dim();
    let mut total = sq(&out.drift) + sq(&out.diffusion);
    for (k, lambda) in intensities.iter().enumerate() {
        total += lambda * sq(&out.small[k * d..(k + 1) * d]);
    }
    total
}

/// Uniform point in the closed ball of radius `r`.
pub(crate) fn sample_ball<R: Rng>(dim: usize, r: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&v);
        if len > 0.0 {
            let radius = r * rng.random::<f64>().powf(1.0 / dim as f64);
            return v.iter().map(|x| x / len * radius).collect();
        }
    }
}

/// Largest `lipschitz_functional / |z_1 - z_2|^2` over sampled pairs in the
/// ball of radius `radius`. Half the pairs are close together, so the
/// estimate tracks the largest local slope.
pub fn empirical_lipschitz<R: Rng>(
    field: &dyn CoefficientField,
    intensities: &[f64],
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let d = field.dim();
    let mut a = LocalCoefficients::for_field(field);
    let mut b = LocalCoefficients::for_field(field);
    let mut best: f64 = 0.0;
    for s in 0..samples {
        let z1 = sample_ball(d, radius, rng);
        let mut z2 = if s % 2 == 0 {
            let h = 1e-3 * radius.max(1.0);
            let step = sample_ball(d, h, rng);
            z1.iter().zip(&step).map(|(x, y)| x + y).collect()
        } else {
            sample_ball(d, radius, rng)
        };
        let r2 = norm(&z2);
        if r2 > radius {
            z2.iter_mut().for_each(|v| *v *= radius / r2);
        }
        let gap: f64 = z1.iter().zip(&z2).map(|(x, y)| (x - y) * (x - y)).sum();
        if gap == 0.0 {
            continue;
        }
        best = best.max(lipschitz_functional(field, intensities, &z1, &z2, &mut a, &mut b) / gap);
    }
    best
}

/// `sup_{|w| <= radius} ||τ_w||_{-p -> -p}` at the given cutoff, sampled on
/// radial steps of 1/4 and (for `d > 1`) along coordinate axes and
/// diagonals.
pub fn translation_sup(dim: usize, p: f64, cutoff: usize, radius: f64) -> Result<f64> {
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        directions.push(e.clone());
        e[i] = -1.0;
        directions.push(e);
    }
    if dim > 1 {
        let s = 1.0 / (dim as f64).sqrt();
        directions.push(vec![s; dim]);
        directions.push(vec![-s; dim]);
        let mut alt: Vec<f64> = (0..dim).map(|i| if i % 2 == 0 { s } else { -s }).collect();
        directions.push(alt.clone());
        alt.iter_mut().for_each(|v| *v = -*v);
        directions.push(alt);
    }
    let steps = (radius / 0.25).ceil() as usize;
    let mut best: f64 = 1.0;
    for k in 1..=steps {
        let r = (k as f64 * 0.25).min(radius);
        for dir in &directions {
            let w: Vec<f64> = dir.iter().map(|v| v * r).collect();
            best = best.max(tau_opnorm(dim, -p, cutoff, &w)?);
        }
    }
    Ok(best)
}

/// Check (σb), F1–F3 and G1 and estimate the constants `α(K)`, `C(K)` and
/// `C(K, n)` for the lifted coefficients.
pub fn verify_hypotheses(
    coeffs: &DistributionCoefficientSet,
    small: &SmallJumpFamily,
    large: &LargeJumpFamily,
    model: &LevyModel,
    k_set: &[ExpansionVector],
    radii: &[f64],
    options: &HypothesisOptions,
) -> Result<HypothesisReport> {
    if k_set.is_empty() {
        return Err(Error::InvalidArgument("the bounded set K must be non-empty".into()));
    }
    let dim = coeffs.dim();
    let p = coeffs.regularity();
    small.validate(dim)?;
    large.validate(dim)?;
    let atoms = model.small_atoms();
    let intensities: Vec<f64> = atoms.iter().map(|a| a.intensity).collect();

    let beta_required = coeffs
        .sigma_entries()
        .iter()
        .chain(coeffs.b_entries())
        .map(|e| e.norm(p))
        .fold(0.0, f64::max);

    let cx: Vec<f64> = atoms.iter().map(|a| small.lipschitz_profile(&a.mark, p)).collect();
    let f0: Vec<f64> = atoms.iter().map(|a| norm(&small.at_zero(&a.mark))).collect();
    let sup_cx = cx.iter().copied().fold(0.0, f64::max);
    let integral_cx2 = model.compensator_integral(|x| small.lipschitz_profile(x, p).powi(2));
    let sup_f0 = f0.iter().copied().fold(0.0, f64::max);
    let integral_f02 = model.compensator_integral(|x| norm(&small.at_zero(x)).powi(2));

    let mut alpha_k: f64 = 0.0;
    let mut fourth: f64 = 0.0;
    let mut k_norm_max: f64 = 0.0;
    let mut derivative_norm_sq: f64 = 0.0;
    let mut cutoff = coeffs.cutoff();
    for phi in small.probe().into_iter().chain(large.probe()) {
        cutoff = cutoff.max(phi.cutoff());
    }
    for y in k_set {
        crate::error::ensure_dim(dim, y.dim())?;
        cutoff = cutoff.max(y.cutoff());
    }
    for y in k_set {
        let mut a2 = 0.0;
        let mut a4 = 0.0;
        for atom in atoms {
            let v = norm(&small.evaluate(y, &atom.mark)?);
            a2 += atom.intensity * v * v;
            a4 += atom.intensity * v.powi(4);
        }
        alpha_k = alpha_k.max(a2);
        fourth = fourth.max(a4);
        k_norm_max = k_norm_max.max(y.norm(-p));
        let padded = y.with_cutoff(cutoff);
        let mut g2 = 0.0;
        for axis in 0..dim {
            g2 += padded.partial(axis)?.norm(-p).powi(2);
        }
        derivative_norm_sq = derivative_norm_sq.max(g2);
    }

    let mut rng = stream_rng(options.seed, 0, Stream::Hypothesis);

    // F1 on pairs drawn around K
    let mut f1_violations = 0;
    for y in k_set {
        for _ in 0..options.samples.max(1) {
            let scale = y.norm(-p).max(1.0);
            let v: Vec<f64> = (0..y.coeffs().len()).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
            let other = y.combine(1.0, &ExpansionVector::from_coeffs(dim, y.cutoff(), -p, v)?, 1.0)?;
            let gap = y.combine(1.0, &other, -1.0)?.norm(-p - 0.5);
            for atom in atoms {
                let lhs = norm(
                    &small
                        .evaluate(y, &atom.mark)?
                        .iter()
                        .zip(small.evaluate(&other, &atom.mark)?)
                        .map(|(u, w)| u - w)
                        .collect::<Vec<_>>(),
                );
                if lhs > small.lipschitz_profile(&atom.mark, p) * gap * (1.0 + 1e-12) + 1e-15 {
                    f1_violations += 1;
                }
            }
        }
    }

    // G1: shrinking perturbations in y give shrinking changes in G
    let mut g1 = true;
    let mark = match model.large_sampler() {
        crate::noise::LargeJumpSampler::Fixed { mark } => mark.clone(),
        crate::noise::LargeJumpSampler::Atoms { marks, .. } => marks[0].clone(),
        crate::noise::LargeJumpSampler::RadialUniform { min_radius, .. } => {
            let mut m = vec![0.0; dim];
            m[0] = *min_radius;
            m
        }
    };
    for y in k_set {
        let v: Vec<f64> = (0..y.coeffs().len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = ExpansionVector::from_coeffs(dim, y.cutoff(), -p, v)?;
        let base = large.evaluate(y, &mark)?;
        let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|eps| -> Result<f64> {
                let moved = large.evaluate(&y.combine(1.0, &v, *eps)?, &mark)?;
                Ok(norm(&moved.iter().zip(&base).map(|(a, b)| a - b).collect::<Vec<_>>()))
            })
            .collect::<Result<_>>()?;
        if !(gaps[1] <= gaps[0] && gaps[2] <= gaps[1] && gaps[2] <= 0.05 * gaps[0] + 1e-12) {
            g1 = false;
        }
    }

    let global_radius = options
        .global_radius
        .unwrap_or_else(|| 2.0 * QuadratureRule::for_cutoff(cutoff).halfwidth());
    let theta_global = translation_sup(dim, p, cutoff + 1, global_radius)?;
    let d = dim as f64;
    let chain = |theta: f64| {
        theta * theta * derivative_norm_sq * (d * coeffs.beta().powi(2) + d * d * coeffs.beta().powi(2) + integral_cx2)
    };

    let fields: Vec<LiftedField> = k_set
        .iter()
        .map(|y| LiftedField::new(coeffs, small, large, y, model))
        .collect::<Result<_>>()?;
    let lipschitz_over_k = |radius: f64, rng: &mut rand_chacha::ChaCha20Rng| {
        fields
            .iter()
            .map(|f| empirical_lipschitz(f, &intensities, radius, options.samples, rng))
            .fold(0.0, f64::max)
    };
    let lipschitz_global = lipschitz_over_k(global_radius, &mut rng);
    let lipschitz_global_bound = chain(theta_global);
    let mut local = Vec::with_capacity(radii.len());
    for &radius in radii {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        let theta = translation_sup(dim, p, cutoff + 1, radius)?;
        local.push(LocalLipschitz {
            radius,
            theta,
            empirical: lipschitz_over_k(radius, &mut rng),
            bound: chain(theta),
        });
    }

    let beta2 = coeffs.beta().powi(2);
    let growth_at_zero_bound = k_set
        .iter()
        .map(|y| {
            let n = y.norm(-p);
            let jumps: f64 = atoms
                .iter()
                .zip(cx.iter().zip(&f0))
                .map(|(a, (c, f))| a.intensity * (c * n + f).powi(2))
                .sum();
            d * beta2 * n * n + d * d * beta2 * n * n + jumps
        })
        .fold(0.0, f64::max);
    let growth_bound = (2.0 * lipschitz_global_bound).max(2.0 * growth_at_zero_bound);

    let scalars = [
        sup_cx,
        integral_cx2,
        sup_f0,
        integral_f02,
        alpha_k,
        fourth,
        lipschitz_global,
        lipschitz_global_bound,
        growth_bound,
    ];
    let finite = scalars.iter().all(|v| v.is_finite()) && local.iter().all(|l| l.empirical.is_finite() && l.bound.is_finite());
    let within = lipschitz_global <= lipschitz_global_bound * (1.0 + 1e-9)
        && local.iter().all(|l| l.empirical <= l.bound * (1.0 + 1e-9));
    let flags = HypothesisFlags {
        sigma_b: coeffs.beta() >= beta_required,
        f1: f1_violations == 0,
        f2: sup_cx.is_finite() && integral_cx2.is_finite() && small.lipschitz_sup(p).is_finite(),
        f3: sup_f0.is_finite() && integral_f02.is_finite(),
        g1,
        lipschitz_within_bound: within,
        finite,
    };
    let pass = flags.sigma_b && flags.f1 && flags.f2 && flags.f3 && flags.g1 && flags.lipschitz_within_bound && flags.finite;
    Ok(HypothesisReport {
        regularity: p,
        cutoff,
        beta: coeffs.beta(),
        beta_required,
        sup_cx,
        sup_cx_ball: small.lipschitz_sup(p),
        integral_cx2,
        sup_f0,
        integral_f02,
        alpha_k,
        fourth_moment_k: fourth,
        k_norm_max,
        derivative_norm_sq,
        global_radius,
        theta_global,
        lipschitz_global,
        lipschitz_global_bound,
        local,
        growth_at_zero_bound,
        growth_bound,
        f1_violations,
        samples: options.samples,
        flags,
        pass,
    })
}
