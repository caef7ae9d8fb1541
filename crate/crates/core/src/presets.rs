//! Built-in problems shared by the acceptance suite, the CLI and the guide.

use crate::engine::SolveProblem;
use crate::error::Result;
use crate::hermite::ExpansionVector;
use crate::lift::{DistributionCoefficientSet, LargeJumpFamily, SmallJumpFamily, SyntheticDrift, SyntheticSpec};
use crate::noise::{LargeJumpSampler, LevyModel};

/// Cutoff of the built-in lifted problem.
pub const PRESET_CUTOFF: usize = 16;
/// Regularity of the built-in lifted problem.
pub const PRESET_P: f64 = 1.0;

/// The test function `φ` used by the built-in jump families.
pub fn preset_phi() -> ExpansionVector {
    ExpansionVector::from_coeffs(1, 4, PRESET_P, vec![0.5, 0.1, -0.2, 0.0, 0.05]).expect("valid preset")
}

/// `F(y, x) = x clamp(0.8 <φ, y> + 0.2, ±1)`.
pub fn preset_small_family() -> SmallJumpFamily {
    SmallJumpFamily::ClampedLinear {
        phi: preset_phi(),
        slope: 0.8,
        intercept: 0.2,
        clamp: 1.0,
    }
}

/// `G(y, x) = x (1 + tanh <φ, y>)`.
pub fn preset_large_family() -> LargeJumpFamily {
    LargeJumpFamily::TanhModulated { phi: preset_phi() }
}

/// Atoms `{(±1/2, 1)}` and large jumps of rate `large_rate` with radius
/// uniform on `[1, 2]`.
pub fn preset_model(large_rate: f64) -> Result<LevyModel> {
    LevyModel::new(
        1,
        LevyModel::symmetric_atoms_1d(0.5, 1.0),
        large_rate,
        LargeJumpSampler::RadialUniform {
            min_radius: 1.0,
            max_radius: 2.0,
        },
    )
}

/// `b = h_0`, `σ = 0.3 h_0`, `ξ = δ_0` truncated at the preset cutoff,
/// `κ = 0.3`, `T = 1`.
pub fn lifted_preset(large_rate: f64, steps: usize) -> Result<SolveProblem> {
    SolveProblem::lifted(
        DistributionCoefficientSet::gaussian_bump(1, PRESET_CUTOFF, PRESET_P, 1.0, 0.3),
        preset_small_family(),
        preset_large_family(),
        ExpansionVector::delta0(1, PRESET_CUTOFF, -PRESET_P),
        vec![0.3],
        preset_model(large_rate)?,
        1.0,
        steps,
    )
}

/// `u' = u^3`, `u(0) = 1`, no noise; the solution `(1 - 2t)^{-1/2}`
/// explodes at `t = 1/2`.
pub fn cubic_preset(steps: usize) -> Result<SolveProblem> {
    let spec = SyntheticSpec {
        dim: 1,
        drift: SyntheticDrift::Polynomial {
            coefficients: vec![0.0, 0.0, 0.0, 1.0],
        },
        diffusion_scale: 0.0,
        small_scale: 0.0,
        large_scale: 0.0,
    };
    SolveProblem::synthetic(spec, vec![1.0], LevyModel::brownian(1)?, 1.0, steps)
}
