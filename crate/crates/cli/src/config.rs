//! Run configuration. See `configs/README.md` for the grammar.

use serde::{Deserialize, Serialize};

use lifted_sde::engine::SolveProblem;
use lifted_sde::hermite::{ExpansionTerm, ExpansionVector};
use lifted_sde::lift::{DistributionCoefficientSet, LargeJumpFamily, SmallJumpFamily, SyntheticDrift, SyntheticSpec};
use lifted_sde::noise::{LargeJumpSampler, LevyModel, SmallAtom};
use lifted_sde::presets;
use lifted_sde::verify::{GrowthOptions, TruncationOptions, UniquenessOptions};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// The built-in lifted problem.
    Lifted,
    /// `u' = u^3`, `u(0) = 1`.
    Cubic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Euler,
    Picard,
    #[default]
    Interlace,
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Hypotheses,
    Growth,
    Uniqueness,
    /// Uniqueness with the inline integrator on a different seed; expected
    /// to fail.
    UniquenessControl,
    PicardDecay,
    Interlace,
    Truncation,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Hypotheses => "hypotheses",
            CheckKind::Growth => "growth",
            CheckKind::Uniqueness => "uniqueness",
            CheckKind::UniquenessControl => "uniqueness_control",
            CheckKind::PicardDecay => "picard_decay",
            CheckKind::Interlace => "interlace",
            CheckKind::Truncation => "truncation",
        }
    }
}

/// Expansion coefficients by multi-index; dimension, cutoff and regularity
/// come from the enclosing run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionBlock {
    pub terms: Vec<ExpansionTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientBlock {
    Lifted {
        b: Vec<ExpansionBlock>,
        sigma: Vec<Vec<ExpansionBlock>>,
        beta: Option<f64>,
    },
    /// `b_i = b_scale h_0`, `σ = sigma_scale h_0 I`.
    GaussianBump { b_scale: f64, sigma_scale: f64 },
    Synthetic {
        drift: SyntheticDrift,
        #[serde(default)]
        diffusion_scale: f64,
        #[serde(default)]
        small_scale: f64,
        #[serde(default)]
        large_scale: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SmallJumpBlock {
    Zero,
    ClampedLinear {
        phi: ExpansionBlock,
        slope: f64,
        intercept: f64,
        clamp: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LargeJumpBlock {
    Zero,
    Additive,
    TanhModulated { phi: ExpansionBlock },
    LinearPairing { phi: ExpansionBlock },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyBlock {
    #[serde(default)]
    pub small_atoms: Vec<SmallAtom>,
    #[serde(default)]
    pub large_rate: f64,
    pub large_sampler: Option<LargeJumpSampler>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiBlock {
    /// `"delta0"`.
    pub preset: Option<String>,
    pub terms: Option<Vec<ExpansionTerm>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub k_max: usize,
    pub tol: f64,
    /// Solve with the coefficients cut off radially at this radius.
    pub radius: Option<f64>,
    pub m_levels: Vec<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            k_max: lifted_sde::engine::DEFAULT_PICARD_MAX_ITER,
            tol: lifted_sde::engine::DEFAULT_PICARD_TOL,
            radius: None,
            m_levels: vec![2.0, 4.0, 8.0, 16.0, 32.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypothesisBlock {
    pub samples: usize,
    pub radii: Vec<f64>,
}

impl Default for HypothesisBlock {
    fn default() -> Self {
        HypothesisBlock {
            samples: 256,
            radii: vec![2.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardBlock {
    pub replications: u64,
    pub k_max: usize,
}

impl Default for PicardBlock {
    fn default() -> Self {
        PicardBlock {
            replications: 100,
            k_max: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterlaceBlock {
    pub replications: u64,
    pub tolerance: f64,
}

impl Default for InterlaceBlock {
    fn default() -> Self {
        InterlaceBlock {
            replications: 100,
            tolerance: 5.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckOptions {
    pub hypotheses: HypothesisBlock,
    pub growth: GrowthOptions,
    pub uniqueness: UniquenessOptions,
    pub picard_decay: PicardBlock,
    pub interlace: InterlaceBlock,
    pub truncation: TruncationOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub dimension: Option<usize>,
    pub p: Option<f64>,
    pub cutoff: Option<usize>,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replications: u64,
    pub kappa: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: Solver,
    pub coefficients: Option<CoefficientBlock>,
    pub small_jump: Option<SmallJumpBlock>,
    pub large_jump: Option<LargeJumpBlock>,
    pub levy: Option<LevyBlock>,
    pub xi: Option<XiBlock>,
    #[serde(default)]
    pub solver_options: SolverOptions,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub check_options: CheckOptions,
}

fn one() -> u64 {
    1
}

fn invalid(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn at<T>(field: &str, result: lifted_sde::Result<T>) -> Result<T, CliError> {
    result.map_err(|e| invalid(field, e))
}

fn require<T: Clone>(field: &str, value: &Option<T>) -> Result<T, CliError> {
    value.clone().ok_or_else(|| invalid(field, "missing"))
}

impl RunConfig {
    /// Parse TOML, reporting the path of the offending field.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Parse(e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(&path, e.into_inner().message())
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Validate and assemble the problem. Nothing is sampled here.
    pub fn problem(&self) -> Result<SolveProblem, CliError> {
        if self.replications == 0 {
            return Err(invalid("replications", "must be at least 1"));
        }
        if self.solver_options.m_levels.is_empty() {
            return Err(invalid("solver_options.m_levels", "must not be empty"));
        }
        let mut problem = match self.preset {
            Some(preset) => self.build_preset(preset)?,
            None => self.build_blocks()?,
        };
        if let Some(kappa) = &self.kappa {
            problem = at("kappa", problem.with_kappa(kappa.clone()))?;
        }
        if let Some(radius) = self.solver_options.radius {
            problem = at("solver_options.radius", problem.truncated(radius))?;
        }
        Ok(problem)
    }

    fn build_preset(&self, preset: Preset) -> Result<SolveProblem, CliError> {
        for (field, given) in [
            ("coefficients", self.coefficients.is_some()),
            ("small_jump", self.small_jump.is_some()),
            ("large_jump", self.large_jump.is_some()),
            ("xi", self.xi.is_some()),
            ("dimension", self.dimension.is_some()),
            ("p", self.p.is_some()),
            ("cutoff", self.cutoff.is_some()),
        ] {
            if given {
                return Err(invalid(field, "cannot be combined with a preset"));
            }
        }
        let steps = self.steps.unwrap_or(1024);
        if steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        let mut problem = match preset {
            Preset::Lifted => {
                let rate = self.levy.as_ref().map_or(0.0, |l| l.large_rate);
                at("preset", presets::lifted_preset(rate, steps))?
            }
            Preset::Cubic => at("preset", presets::cubic_preset(steps))?,
        };
        if let Some(levy) = &self.levy {
            if preset == Preset::Cubic || !levy.small_atoms.is_empty() || levy.large_sampler.is_some() {
                problem = at("levy", problem.with_model(self.model(levy, 1)?))?;
            }
        }
        if let Some(horizon) = self.horizon {
            problem = at(
                "horizon",
                SolveProblem::new(
                    problem.source().clone(),
                    problem.kappa().to_vec(),
                    problem.model().clone(),
                    horizon,
                    steps,
                ),
            )?;
        }
        Ok(problem)
    }

    fn model(&self, levy: &LevyBlock, dim: usize) -> Result<LevyModel, CliError> {
        let sampler = levy.large_sampler.clone().unwrap_or_else(|| {
            let mut mark = vec![0.0; dim];
            mark[0] = 1.0;
            LargeJumpSampler::Fixed { mark }
        });
        at("levy", LevyModel::new(dim, levy.small_atoms.clone(), levy.large_rate, sampler))
    }

    fn expansion(&self, field: &str, block: &ExpansionBlock, regularity: f64) -> Result<ExpansionVector, CliError> {
        let dim = require("dimension", &self.dimension)?;
        let cutoff = require("cutoff", &self.cutoff)?;
        let doc = lifted_sde::hermite::ExpansionDocument {
            dim,
            cutoff,
            p: regularity,
            terms: block.terms.clone(),
        };
        at(field, ExpansionVector::try_from(doc))
    }

    fn build_blocks(&self) -> Result<SolveProblem, CliError> {
        let dim = require("dimension", &self.dimension)?;
        if dim == 0 {
            return Err(invalid("dimension", "must be at least 1"));
        }
        let horizon = require("horizon", &self.horizon)?;
        let steps = require("steps", &self.steps)?;
        let kappa = require("kappa", &self.kappa)?;
        let levy = self.levy.clone().unwrap_or(LevyBlock {
            small_atoms: Vec::new(),
            large_rate: 0.0,
            large_sampler: None,
        });
        let model = self.model(&levy, dim)?;
        let coefficients = require("coefficients", &self.coefficients)?;
        if let CoefficientBlock::Synthetic {
            drift,
            diffusion_scale,
            small_scale,
            large_scale,
        } = coefficients
        {
            for field in ["small_jump", "large_jump", "xi", "p", "cutoff"] {
                let given = match field {
                    "small_jump" => self.small_jump.is_some(),
                    "large_jump" => self.large_jump.is_some(),
                    "xi" => self.xi.is_some(),
                    "p" => self.p.is_some(),
                    _ => self.cutoff.is_some(),
                };
                if given {
                    return Err(invalid(field, "not used by synthetic coefficients"));
                }
            }
            let spec = SyntheticSpec {
                dim,
                drift,
                diffusion_scale,
                small_scale,
                large_scale,
            };
            return at("coefficients", SolveProblem::synthetic(spec, kappa, model, horizon, steps));
        }

        let p = require("p", &self.p)?;
        let cutoff = require("cutoff", &self.cutoff)?;
        let coeffs = match &coefficients {
            CoefficientBlock::Lifted { b, sigma, beta } => {
                let b = b
                    .iter()
                    .enumerate()
                    .map(|(i, e)| self.expansion(&format!("coefficients.b[{i}]"), e, p))
                    .collect::<Result<Vec<_>, _>>()?;
                let sigma = sigma
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, e)| self.expansion(&format!("coefficients.sigma[{i}][{j}]"), e, p))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                at("coefficients", DistributionCoefficientSet::new(sigma, b, p, *beta))?
            }
            CoefficientBlock::GaussianBump { b_scale, sigma_scale } => {
                DistributionCoefficientSet::gaussian_bump(dim, cutoff, p, *b_scale, *sigma_scale)
            }
            CoefficientBlock::Synthetic { .. } => unreachable!("handled above"),
        };
        let small = match self.small_jump.clone().unwrap_or(SmallJumpBlock::Zero) {
            SmallJumpBlock::Zero => SmallJumpFamily::Zero,
            SmallJumpBlock::ClampedLinear {
                phi,
                slope,
                intercept,
                clamp,
            } => SmallJumpFamily::ClampedLinear {
                phi: self.expansion("small_jump.phi", &phi, p)?,
                slope,
                intercept,
                clamp,
            },
        };
        let large = match self.large_jump.clone().unwrap_or(LargeJumpBlock::Zero) {
            LargeJumpBlock::Zero => LargeJumpFamily::Zero,
            LargeJumpBlock::Additive => LargeJumpFamily::Additive,
            LargeJumpBlock::TanhModulated { phi } => LargeJumpFamily::TanhModulated {
                phi: self.expansion("large_jump.phi", &phi, p)?,
            },
            LargeJumpBlock::LinearPairing { phi } => LargeJumpFamily::LinearPairing {
                phi: self.expansion("large_jump.phi", &phi, p)?,
            },
        };
        let xi_block = require("xi", &self.xi)?;
        let xi = match (&xi_block.preset, &xi_block.terms) {
            (Some(name), None) if name == "delta0" => ExpansionVector::delta0(dim, cutoff, -p),
            (Some(name), None) => return Err(invalid("xi.preset", format!("unknown preset `{name}`"))),
            (None, Some(terms)) => self.expansion("xi.terms", &ExpansionBlock { terms: terms.clone() }, -p)?,
            _ => return Err(invalid("xi", "give exactly one of `preset` and `terms`")),
        };
        at("coefficients", SolveProblem::lifted(coeffs, small, large, xi, kappa, model, horizon, steps))
    }
}
