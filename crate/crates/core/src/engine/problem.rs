use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::hermite::ExpansionVector;
use crate::lift::{
    CoefficientField, DistributionCoefficientSet, LargeJumpFamily, LiftedField, SmallJumpFamily, SyntheticField,
    SyntheticSpec,
};
use crate::noise::{sample_noise, LevyModel, NoiseRealization};

/// Where the coefficients of a problem come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSource {
    Lifted {
        coefficients: DistributionCoefficientSet,
        small: SmallJumpFamily,
        large: LargeJumpFamily,
        xi: ExpansionVector,
    },
    Synthetic { spec: SyntheticSpec },
}

/// Everything a solver needs except the noise: coefficients at a fixed
/// `ξ`, the initial value `κ`, the Lévy model and the grid.
///
/// `ξ` and `κ` are part of the problem, so they are fixed before any noise
/// is drawn.
#[derive(Clone)]
pub struct SolveProblem {
    source: CoefficientSource,
    field: Arc<dyn CoefficientField>,
    kappa: Vec<f64>,
    model: LevyModel,
    horizon: f64,
    steps: usize,
    truncation: Option<f64>,
}

impl std::fmt::Debug for SolveProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolveProblem")
            .field("field", &self.field.describe())
            .field("kappa", &self.kappa)
            .field("horizon", &self.horizon)
            .field("steps", &self.steps)
            .field("truncation", &self.truncation)
            .finish()
    }
}

impl SolveProblem {
    pub fn new(source: CoefficientSource, kappa: Vec<f64>, model: LevyModel, horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        if kappa.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("kappa must be finite".into()));
        }
        let field: Arc<dyn CoefficientField> = match &source {
            CoefficientSource::Lifted {
                coefficients,
                small,
                large,
                xi,
            } => Arc::new(LiftedField::new(coefficients, small, large, xi, &model)?),
            CoefficientSource::Synthetic { spec } => Arc::new(SyntheticField::new(spec.clone(), &model)?),
        };
        ensure_dim(field.dim(), kappa.len())?;
        Ok(SolveProblem {
            source,
            field,
            kappa,
            model,
            horizon,
            steps,
            truncation: None,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn lifted(
        coefficients: DistributionCoefficientSet,
        small: SmallJumpFamily,
        large: LargeJumpFamily,
        xi: ExpansionVector,
        kappa: Vec<f64>,
        model: LevyModel,
        horizon: f64,
        steps: usize,
    ) -> Result<Self> {
        Self::new(
            CoefficientSource::Lifted {
                coefficients,
                small,
                large,
                xi,
            },
            kappa,
            model,
            horizon,
            steps,
        )
    }

    pub fn synthetic(spec: SyntheticSpec, kappa: Vec<f64>, model: LevyModel, horizon: f64, steps: usize) -> Result<Self> {
        Self::new(CoefficientSource::Synthetic { spec }, kappa, model, horizon, steps)
    }

    pub fn source(&self) -> &CoefficientSource {
        &self.source
    }

    pub fn field(&self) -> &dyn CoefficientField {
        self.field.as_ref()
    }

    pub fn shared_field(&self) -> Arc<dyn CoefficientField> {
        self.field.clone()
    }

    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// The same problem on a grid with `steps` steps.
    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        Ok(SolveProblem { steps, ..self.clone() })
    }

    pub fn with_kappa(&self, kappa: Vec<f64>) -> Result<Self> {
        ensure_dim(self.dim(), kappa.len())?;
        Ok(SolveProblem { kappa, ..self.clone() })
    }

    pub fn with_model(&self, model: LevyModel) -> Result<Self> {
        Self::new(self.source.clone(), self.kappa.clone(), model, self.horizon, self.steps)?.retruncate(self.truncation)
    }

    /// The problem with `b̄`, `σ̄` and `F̄` replaced by their radial cutoffs
    /// at `radius`; see [`truncate_coeffs`](super::truncate_coeffs).
    /// Truncating twice wraps twice.
    pub fn truncated(&self, radius: f64) -> Result<Self> {
        super::truncate_coeffs(self.field(), radius)?;
        Ok(SolveProblem {
            field: Arc::new(OwnedTruncation {
                inner: self.field.clone(),
                radius,
            }),
            truncation: Some(radius),
            ..self.clone()
        })
    }

    /// Radius of the outermost cutoff, if any.
    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    fn retruncate(self, radius: Option<f64>) -> Result<Self> {
        match radius {
            Some(r) => self.truncated(r),
            None => Ok(self),
        }
    }

    /// The problem with `ξ` replaced (lifted problems only).
    pub fn with_xi(&self, xi: ExpansionVector) -> Result<Self> {
        match &self.source {
            CoefficientSource::Lifted {
                coefficients,
                small,
                large,
                ..
            } => Self::lifted(
                coefficients.clone(),
                small.clone(),
                large.clone(),
                xi,
                self.kappa.clone(),
                self.model.clone(),
                self.horizon,
                self.steps,
            )?
            .retruncate(self.truncation),
            CoefficientSource::Synthetic { .. } => {
                Err(Error::InvalidArgument("synthetic problems have no ξ".into()))
            }
        }
    }

    pub fn sample_noise(&self, seed: u64, replication: u64) -> Result<NoiseRealization> {
        sample_noise(&self.model, self.horizon, self.steps, seed, replication)
    }

    pub(crate) fn check_noise(&self, noise: &NoiseRealization) -> Result<()> {
        ensure_dim(self.dim(), noise.dim())?;
        if noise.steps() != self.steps || noise.horizon() != self.horizon {
            return Err(Error::InvalidArgument(format!(
                "noise grid ({} steps on [0, {}]) does not match the problem ({} steps on [0, {}])",
                noise.steps(),
                noise.horizon(),
                self.steps,
                self.horizon
            )));
        }
        if self.field.atom_count() != self.model.small_atoms().len() {
            return Err(Error::InvalidArgument("coefficient field was built for a different Lévy model".into()));
        }
        Ok(())
    }
}

/// `ξ` if `||ξ|| <= k` in the space `ξ` is tagged with, else `0`.
pub fn localize_xi(xi: &ExpansionVector, k: f64) -> ExpansionVector {
    if xi.norm(xi.regularity()) <= k {
        xi.clone()
    } else {
        ExpansionVector::zeros(xi.dim(), xi.cutoff(), xi.regularity())
    }
}

/// `κ` if `|κ| <= level`, else `0`.
pub fn localize_kappa(kappa: &[f64], level: f64) -> Vec<f64> {
    if kappa.iter().map(|v| v * v).sum::<f64>().sqrt() <= level {
        kappa.to_vec()
    } else {
        vec![0.0; kappa.len()]
    }
}

/// [`Truncated`](super::Truncated) holding its field rather than borrowing it.
struct OwnedTruncation {
    inner: Arc<dyn CoefficientField>,
    radius: f64,
}

impl OwnedTruncation {
    fn view(&self) -> super::Truncated<'_> {
        super::truncate_coeffs(self.inner.as_ref(), self.radius).expect("radius checked on construction")
    }
}

impl CoefficientField for OwnedTruncation {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn atom_count(&self) -> usize {
        self.inner.atom_count()
    }

    fn evaluate(&self, z: &[f64], out: &mut crate::lift::LocalCoefficients) {
        self.view().evaluate(z, out)
    }

    fn large_jump(&self, z: &[f64], mark: &[f64], out: &mut [f64]) {
        self.inner.large_jump(z, mark, out)
    }

    fn is_synthetic(&self) -> bool {
        self.inner.is_synthetic()
    }

    fn describe(&self) -> String {
        self.view().describe()
    }
}
