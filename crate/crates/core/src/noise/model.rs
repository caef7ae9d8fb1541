use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point mass `λ δ_x` of the small-jump Lévy measure, `0 < |x| < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallAtom {
    pub mark: Vec<f64>,
    pub intensity: f64,
}

/// Distribution of the marks of large jumps. Every mark has `|x| >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LargeJumpSampler {
    /// Every jump has the same mark.
    Fixed { mark: Vec<f64> },
    /// Marks drawn from a finite list with the given relative weights.
    Atoms { marks: Vec<Vec<f64>>, weights: Vec<f64> },
    /// Uniform direction, radius uniform on `[min_radius, max_radius]`.
    RadialUniform { min_radius: f64, max_radius: f64 },
}

impl LargeJumpSampler {
    fn validate(&self, dim: usize) -> Result<()> {
        let check_mark = |m: &[f64]| -> Result<()> {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.len(),
                });
            }
            let r = norm(m);
            if r.is_finite() && r >= 1.0 {
                Ok(())
            } else {
                Err(Error::LargeMarkOutOfRange(r))
            }
        };
        match self {
            LargeJumpSampler::Fixed { mark } => check_mark(mark),
            LargeJumpSampler::Atoms { marks, weights } => {
                if marks.is_empty() || marks.len() != weights.len() {
                    return Err(Error::InvalidArgument(
                        "large-jump atoms need one positive weight per mark".into(),
                    ));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidArgument("large-jump weights must be positive".into()));
                }
                marks.iter().try_for_each(|m| check_mark(m))
            }
            LargeJumpSampler::RadialUniform {
                min_radius,
                max_radius,
            } => {
                if !(*min_radius >= 1.0 && max_radius >= min_radius && max_radius.is_finite()) {
                    return Err(Error::LargeMarkOutOfRange(*min_radius));
                }
                Ok(())
            }
        }
    }

    pub(crate) fn sample<R: Rng>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        match self {
            LargeJumpSampler::Fixed { mark } => mark.clone(),
            LargeJumpSampler::Atoms { marks, weights } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                for (m, w) in marks.iter().zip(weights) {
                    if u < *w {
                        return m.clone();
                    }
                    u -= w;
                }
                marks.last().expect("non-empty").clone()
            }
            LargeJumpSampler::RadialUniform {
                min_radius,
                max_radius,
            } => {
                let mut dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                let mut len = norm(&dir);
                while len == 0.0 {
                    dir = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                    len = norm(&dir);
                }
                let r = min_radius + (max_radius - min_radius) * rng.random::<f64>();
                dir.iter().map(|v| v / len * r).collect()
            }
        }
    }
}

/// Brownian dimension, a finite atomic small-jump measure on the punctured
/// unit ball and a compound-Poisson stream of large jumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LevyModelSpec", into = "LevyModelSpec")]
pub struct LevyModel {
    brownian_dim: usize,
    small_atoms: Vec<SmallAtom>,
    large_rate: f64,
    large_sampler: LargeJumpSampler,
}

/// Unvalidated form of [`LevyModel`], as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyModelSpec {
    pub brownian_dim: usize,
    #[serde(default)]
    pub small_atoms: Vec<SmallAtom>,
    #[serde(default)]
    pub large_rate: f64,
    pub large_sampler: Option<LargeJumpSampler>,
}

impl TryFrom<LevyModelSpec> for LevyModel {
    type Error = Error;

    fn try_from(s: LevyModelSpec) -> Result<Self> {
        let sampler = s.large_sampler.unwrap_or_else(|| LargeJumpSampler::Fixed {
            mark: unit_mark(s.brownian_dim.max(1)),
        });
        LevyModel::new(s.brownian_dim, s.small_atoms, s.large_rate, sampler)
    }
}

impl From<LevyModel> for LevyModelSpec {
    fn from(m: LevyModel) -> Self {
        LevyModelSpec {
            brownian_dim: m.brownian_dim,
            small_atoms: m.small_atoms,
            large_rate: m.large_rate,
            large_sampler: Some(m.large_sampler),
        }
    }
}

fn unit_mark(dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    m[0] = 1.0;
    m
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl LevyModel {
    pub fn new(
        brownian_dim: usize,
        small_atoms: Vec<SmallAtom>,
        large_rate: f64,
        large_sampler: LargeJumpSampler,
    ) -> Result<Self> {
        if brownian_dim == 0 {
            return Err(Error::InvalidArgument("brownian_dim must be positive".into()));
        }
        for atom in &small_atoms {
            if atom.mark.len() != brownian_dim {
                return Err(Error::DimensionMismatch {
                    expected: brownian_dim,
                    found: atom.mark.len(),
                });
            }
            let r = norm(&atom.mark);
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::SmallMarkOutOfRange(r));
            }
            if !(atom.intensity.is_finite() && atom.intensity > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "atom intensity must be positive and finite, got {}",
                    atom.intensity
                )));
            }
        }
        if !(large_rate.is_finite() && large_rate >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "large_rate must be non-negative, got {large_rate}"
            )));
        }
        large_sampler.validate(brownian_dim)?;
        Ok(LevyModel {
            brownian_dim,
            small_atoms,
            large_rate,
            large_sampler,
        })
    }

    /// Brownian motion only.
    pub fn brownian(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), 0.0, LargeJumpSampler::Fixed { mark: unit_mark(dim.max(1)) })
    }

    /// Symmetric one-dimensional atoms `{(±x, λ)}`.
    pub fn symmetric_atoms_1d(x: f64, intensity: f64) -> Vec<SmallAtom> {
        vec![
            SmallAtom {
                mark: vec![x],
                intensity,
            },
            SmallAtom {
                mark: vec![-x],
                intensity,
            },
        ]
    }

    pub fn with_large_jumps(mut self, rate: f64, sampler: LargeJumpSampler) -> Result<Self> {
        self = Self::new(self.brownian_dim, self.small_atoms, rate, sampler)?;
        Ok(self)
    }

    pub fn without_large_jumps(&self) -> Self {
        LevyModel {
            large_rate: 0.0,
            ..self.clone()
        }
    }

    pub fn brownian_dim(&self) -> usize {
        self.brownian_dim
    }

    pub fn small_atoms(&self) -> &[SmallAtom] {
        &self.small_atoms
    }

    pub fn large_rate(&self) -> f64 {
        self.large_rate
    }

    pub fn large_sampler(&self) -> &LargeJumpSampler {
        &self.large_sampler
    }

    /// `Λ_s = sum λ_x`.
    pub fn total_small_intensity(&self) -> f64 {
        self.small_atoms.iter().map(|a| a.intensity).sum()
    }

    /// `∫ f dν = sum_x f(x) λ_x`, exact for the atomic measure.
    pub fn compensator_integral(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.small_atoms.iter().map(|a| f(&a.mark) * a.intensity).sum()
    }
}
