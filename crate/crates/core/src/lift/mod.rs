//! Lifting distribution-valued coefficients to state-dependent SDE
//! coefficients through translation and duality.

mod coefficients;
mod families;
mod field;
mod hypotheses;

pub use coefficients::{CoefficientDocument, DistributionCoefficientSet};
pub use families::{LargeJumpFamily, SmallJumpFamily};
pub use field::{CoefficientField, LiftedField, LocalCoefficients, SyntheticDrift, SyntheticField, SyntheticSpec};
pub use hypotheses::{
    empirical_lipschitz, growth_functional, lipschitz_functional, translation_sup, verify_hypotheses,
    HypothesisFlags, HypothesisOptions, HypothesisReport, LocalLipschitz,
};
pub(crate) use hypotheses::sample_ball;

use crate::error::{ensure_dim, Error, Result};
use crate::hermite::{dual_pair, translate, ExpansionVector};
use crate::noise::norm;

/// `b̄(z; ξ)_i = <b_i, τ_z ξ>`.
pub fn lift_drift(coeffs: &DistributionCoefficientSet, z: &[f64], xi: &ExpansionVector) -> Result<Vec<f64>> {
    ensure_dim(coeffs.dim(), xi.dim())?;
    let moved = translate(xi, z)?;
    coeffs.b_entries().iter().map(|b| dual_pair(b, &moved)).collect()
}

/// `σ̄(z; ξ)_ij = <σ_ij, τ_z ξ>`, as rows.
pub fn lift_diffusion(coeffs: &DistributionCoefficientSet, z: &[f64], xi: &ExpansionVector) -> Result<Vec<Vec<f64>>> {
    ensure_dim(coeffs.dim(), xi.dim())?;
    let moved = translate(xi, z)?;
    let d = coeffs.dim();
    (0..d)
        .map(|i| (0..d).map(|j| dual_pair(coeffs.sigma(i, j), &moved)).collect())
        .collect()
}

/// `F̄(z, x; ξ) = F(τ_z ξ, x)` for `0 < |x| < 1`.
pub fn lift_small_jump(fam: &SmallJumpFamily, z: &[f64], x: &[f64], xi: &ExpansionVector) -> Result<Vec<f64>> {
    let r = norm(x);
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::SmallMarkOutOfRange(r));
    }
    fam.evaluate(&translate(xi, z)?, x)
}

/// `Ḡ(z, x; ξ) = G(τ_z ξ, x)` for `|x| >= 1`.
pub fn lift_large_jump(fam: &LargeJumpFamily, z: &[f64], x: &[f64], xi: &ExpansionVector) -> Result<Vec<f64>> {
    let r = norm(x);
    if !(r >= 1.0) {
        return Err(Error::LargeMarkOutOfRange(r));
    }
    fam.evaluate(&translate(xi, z)?, x)
}

#[cfg(test)]
mod tests;
