use super::euler::interlace_with;
use super::path::{ExplosionInfo, PathRecord};
use super::problem::SolveProblem;
use crate::error::{Error, Result};
use crate::lift::{CoefficientField, LocalCoefficients};
use crate::noise::NoiseRealization;

/// Radial cutoff of a coefficient field:
/// `h^R(z) = h(z)` for `|z| <= R`, `(2R - |z|)/R h(Rz/|z|)` for
/// `R < |z| < 2R` and `0` beyond. Applies to `b̄`, `σ̄` and `F̄`; `Ḡ` passes
/// through untouched.
pub struct Truncated<'a> {
    inner: &'a dyn CoefficientField,
    radius: f64,
}

/// Wrap `field` in the radial cutoff at radius `radius > 0`.
pub fn truncate_coeffs(field: &dyn CoefficientField, radius: f64) -> Result<Truncated<'_>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation radius must be positive, got {radius}")));
    }
    Ok(Truncated { inner: field, radius })
}

impl Truncated<'_> {
    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl CoefficientField for Truncated<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn atom_count(&self) -> usize {
        self.inner.atom_count()
    }

    fn evaluate(&self, z: &[f64], out: &mut LocalCoefficients) {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let big_r = self.radius;
        if r <= big_r {
            self.inner.evaluate(z, out);
        } else if r < 2.0 * big_r {
            let pulled: Vec<f64> = z.iter().map(|v| big_r * v / r).collect();
            self.inner.evaluate(&pulled, out);
            out.scale((2.0 * big_r - r) / big_r);
        } else {
            out.clear();
        }
    }

    fn large_jump(&self, z: &[f64], mark: &[f64], out: &mut [f64]) {
        self.inner.large_jump(z, mark, out);
    }

    fn is_synthetic(&self) -> bool {
        self.inner.is_synthetic()
    }

    fn describe(&self) -> String {
        format!("{} truncated at R = {}", self.inner.describe(), self.radius)
    }
}

/// First grid time at which `|X| >= level`, counting pre-jump states at
/// large-jump times.
fn exit_time(path: &PathRecord, level: f64) -> Option<(usize, f64)> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (0..path.len()).find_map(|k| {
        let pre_exits = path
            .large_jumps()
            .iter()
            .any(|j| j.grid_index == k && norm(&j.pre) >= level);
        (pre_exits || path.norm_at(k) >= level).then(|| (k, path.times()[k]))
    })
}

/// Aitken's Δ² limit of three terms; the last term if the differences do
/// not shrink geometrically.
pub fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom == 0.0 || !denom.is_finite() {
        c
    } else {
        c - d2 * d2 / denom
    }
}

/// Solutions of the locally Lipschitz problem by truncation at each radius
/// in `m_levels`, with exit times `θ_m` and explosion detection.
///
/// Each level runs [`interlace_solve`](super::interlace_solve) on the
/// truncated field. Consecutive levels must coincide exactly before the
/// lower level's exit time; a mismatch is an error. The returned path is
/// the top level's, sent to the point at infinity after `θ_{m_max}` when
/// the exit times show explosion.
///
/// The explosion flag requires at least three finite exit times, strictly
/// increasing, whose last two increments contract by at least half, the
/// last of them below `T - 2Δt` and an Aitken limit below `T`.
pub fn solve_local(prob: &SolveProblem, noise: &NoiseRealization, m_levels: &[f64]) -> Result<PathRecord> {
    if m_levels.is_empty() {
        return Err(Error::InvalidArgument("m_levels must not be empty".into()));
    }
    if m_levels.windows(2).any(|w| !(w[0] < w[1])) || !(m_levels[0] > 0.0) {
        return Err(Error::InvalidArgument("m_levels must be positive and strictly increasing".into()));
    }
    let mut paths = Vec::with_capacity(m_levels.len());
    let mut exits = Vec::with_capacity(m_levels.len());
    for &m in m_levels {
        let truncated = truncate_coeffs(prob.field(), m)?;
        let path = interlace_with(&truncated, prob, noise)?;
        exits.push(exit_time(&path, m));
        paths.push(path);
    }
    for (i, w) in paths.windows(2).enumerate() {
        let limit = exits[i].map_or(w[0].len(), |(k, _)| k);
        if let Some(k) = (0..limit).find(|&k| w[0].value(k) != w[1].value(k)) {
            return Err(Error::LevelInconsistency {
                lower: m_levels[i],
                upper: m_levels[i + 1],
                time: w[0].times()[k],
            });
        }
    }

    let theta: Vec<Option<f64>> = exits.iter().map(|e| e.map(|(_, t)| t)).collect();
    let dt = prob.dt();
    let horizon = prob.horizon();
    let eta_last = *theta.last().expect("non-empty");
    let finite: Vec<f64> = theta.iter().flatten().copied().collect();
    let eta_extrapolated = if finite.len() >= 3 {
        let n = finite.len();
        Some(aitken(finite[n - 3], finite[n - 2], finite[n - 1]))
    } else {
        eta_last
    };
    let exploded = match (theta.iter().all(Option::is_some), finite.len()) {
        (true, n) if n >= 3 => {
            let (a, b, c) = (finite[n - 3], finite[n - 2], finite[n - 1]);
            let increasing = finite.windows(2).all(|w| w[0] < w[1]);
            increasing
                && c < horizon - 2.0 * dt
                && (c - b) <= 0.5 * (b - a)
                && eta_extrapolated.is_some_and(|e| e < horizon)
        }
        _ => false,
    };

    let mut path = paths.pop().expect("non-empty");
    let top_exit = exits.last().copied().flatten();
    if exploded {
        let (k, _) = top_exit.expect("exploded implies an exit");
        path.set_infinite_from(k + 1);
    } else if let Some((_, t)) = top_exit {
        path.resolved_until = Some(t);
    }
    path.explosion = Some(ExplosionInfo {
        levels: m_levels.to_vec(),
        theta,
        eta_last,
        eta_extrapolated,
        exploded,
    });
    Ok(path)
}
