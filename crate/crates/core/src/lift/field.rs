use serde::{Deserialize, Serialize};

use super::coefficients::DistributionCoefficientSet;
use super::families::{LargeJumpFamily, SmallJumpFamily};
use crate::error::{ensure_dim, Error, Result};
use crate::hermite::{ExpansionVector, TranslatedPairing};
use crate::noise::LevyModel;

/// Coefficients at one state: `b̄(z)`, `σ̄(z)` and `F̄(z, x_a)` for every
/// small-jump atom `x_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCoefficients {
    pub drift: Vec<f64>,
    /// Row-major `σ̄_ij`.
    pub diffusion: Vec<f64>,
    /// `small[a * d..(a + 1) * d] = F̄(z, x_a)`.
    pub small: Vec<f64>,
    scratch: Vec<f64>,
}

impl LocalCoefficients {
    pub fn new(dim: usize, atoms: usize) -> Self {
        LocalCoefficients {
            drift: vec![0.0; dim],
            diffusion: vec![0.0; dim * dim],
            small: vec![0.0; atoms * dim],
            scratch: Vec::new(),
        }
    }

    pub fn for_field(field: &dyn CoefficientField) -> Self {
        Self::new(field.dim(), field.atom_count())
    }

    pub fn small_at(&self, atom: usize) -> &[f64] {
        let d = self.drift.len();
        &self.small[atom * d..(atom + 1) * d]
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.drift.iter_mut().chain(&mut self.diffusion).chain(&mut self.small) {
            *v *= factor;
        }
    }

    pub fn clear(&mut self) {
        for v in self.drift.iter_mut().chain(&mut self.diffusion).chain(&mut self.small) {
            *v = 0.0;
        }
    }
}

/// State-dependent SDE coefficients as seen by the solvers.
pub trait CoefficientField: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of small-jump atoms the field was built for.
    fn atom_count(&self) -> usize;

    /// `b̄(z)`, `σ̄(z)` and `F̄(z, x_a)` for all atoms.
    fn evaluate(&self, z: &[f64], out: &mut LocalCoefficients);

    /// `Ḡ(z, x)`.
    fn large_jump(&self, z: &[f64], mark: &[f64], out: &mut [f64]);

    /// True for test doubles that are not lifted from distributions and
    /// carry none of the structural guarantees.
    fn is_synthetic(&self) -> bool;

    fn describe(&self) -> String;
}

/// Coefficients lifted from a [`DistributionCoefficientSet`] and families
/// at a fixed `ξ`: `b̄(z) = <b, τ_z ξ>`, `σ̄(z) = <σ, τ_z ξ>`,
/// `F̄(z, x) = F(τ_z ξ, x)` and `Ḡ(z, x) = G(τ_z ξ, x)`.
#[derive(Clone, Debug)]
pub struct LiftedField {
    dim: usize,
    atoms: Vec<Vec<f64>>,
    small: SmallJumpFamily,
    large: LargeJumpFamily,
    pairing: TranslatedPairing,
    small_probe: Option<usize>,
    large_probe: Option<usize>,
}

impl LiftedField {
    pub fn new(
        coeffs: &DistributionCoefficientSet,
        small: &SmallJumpFamily,
        large: &LargeJumpFamily,
        xi: &ExpansionVector,
        model: &LevyModel,
    ) -> Result<Self> {
        let dim = coeffs.dim();
        ensure_dim(dim, xi.dim())?;
        ensure_dim(dim, model.brownian_dim())?;
        small.validate(dim)?;
        large.validate(dim)?;
        let mut probes: Vec<ExpansionVector> = coeffs.b_entries().to_vec();
        probes.extend_from_slice(coeffs.sigma_entries());
        let small_probe = small.probe().map(|phi| {
            probes.push(phi.clone());
            probes.len() - 1
        });
        let large_probe = large.probe().map(|phi| {
            probes.push(phi.clone());
            probes.len() - 1
        });
        let pairing = TranslatedPairing::new(xi, probes)?;
        Ok(LiftedField {
            dim,
            atoms: model.small_atoms().iter().map(|a| a.mark.clone()).collect(),
            small: small.clone(),
            large: large.clone(),
            pairing,
            small_probe,
            large_probe,
        })
    }

    pub fn xi(&self) -> &ExpansionVector {
        self.pairing.xi()
    }

    fn pair(&self, z: &[f64], scratch: &mut Vec<f64>) {
        scratch.resize(self.pairing.probe_count(), 0.0);
        self.pairing.evaluate(z, scratch);
    }
}

impl CoefficientField for LiftedField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn evaluate(&self, z: &[f64], out: &mut LocalCoefficients) {
        let d = self.dim;
        let mut scratch = std::mem::take(&mut out.scratch);
        self.pair(z, &mut scratch);
        out.drift.copy_from_slice(&scratch[..d]);
        out.diffusion.copy_from_slice(&scratch[d..d + d * d]);
        let s = self.small_probe.map_or(0.0, |i| scratch[i]);
        for (a, x) in self.atoms.iter().enumerate() {
            self.small.from_pairing(s, x, &mut out.small[a * d..(a + 1) * d]);
        }
        out.scratch = scratch;
    }

    fn large_jump(&self, z: &[f64], mark: &[f64], out: &mut [f64]) {
        let s = match self.large_probe {
            Some(i) => {
                let mut scratch = Vec::new();
                self.pair(z, &mut scratch);
                scratch[i]
            }
            None => 0.0,
        };
        self.large.from_pairing(s, mark, out);
    }

    fn is_synthetic(&self) -> bool {
        false
    }

    fn describe(&self) -> String {
        format!(
            "lifted d={} N={} F={} G={}",
            self.dim,
            self.pairing.xi().cutoff(),
            self.small.name(),
            self.large.name()
        )
    }
}

/// Drift of a synthetic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticDrift {
    Zero,
    Constant { value: Vec<f64> },
    /// Componentwise `b_i(z) = sum_k c_k z_i^k`.
    Polynomial { coefficients: Vec<f64> },
}

/// A hand-written coefficient field used as a test double: explicit drift,
/// `σ̄ = s_σ I`, `F̄(z, x) = s_F x`, `Ḡ(z, x) = s_G x`.
///
/// Synthetic fields are not lifted and satisfy none of the hypotheses by
/// construction (a cubic drift is not even of linear growth).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub drift: SyntheticDrift,
    #[serde(default)]
    pub diffusion_scale: f64,
    #[serde(default)]
    pub small_scale: f64,
    #[serde(default)]
    pub large_scale: f64,
}

#[derive(Clone, Debug)]
pub struct SyntheticField {
    spec: SyntheticSpec,
    atoms: Vec<Vec<f64>>,
}

impl SyntheticField {
    pub fn new(spec: SyntheticSpec, model: &LevyModel) -> Result<Self> {
        ensure_dim(spec.dim, model.brownian_dim())?;
        if let SyntheticDrift::Constant { value } = &spec.drift {
            ensure_dim(spec.dim, value.len())?;
        }
        if let SyntheticDrift::Polynomial { coefficients } = &spec.drift {
            if coefficients.is_empty() {
                return Err(Error::InvalidArgument("polynomial drift needs coefficients".into()));
            }
        }
        Ok(SyntheticField {
            spec,
            atoms: model.small_atoms().iter().map(|a| a.mark.clone()).collect(),
        })
    }

    /// `b(z) = z^3` in one dimension, nothing else.
    pub fn cubic(model: &LevyModel) -> Result<Self> {
        Self::new(
            SyntheticSpec {
                dim: 1,
                drift: SyntheticDrift::Polynomial {
                    coefficients: vec![0.0, 0.0, 0.0, 1.0],
                },
                diffusion_scale: 0.0,
                small_scale: 0.0,
                large_scale: 0.0,
            },
            model,
        )
    }

    pub fn spec(&self) -> &SyntheticSpec {
        &self.spec
    }
}

impl CoefficientField for SyntheticField {
    fn dim(&self) -> usize {
        self.spec.dim
    }

    fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn evaluate(&self, z: &[f64], out: &mut LocalCoefficients) {
        let d = self.spec.dim;
        match &self.spec.drift {
            SyntheticDrift::Zero => out.drift.iter_mut().for_each(|v| *v = 0.0),
            SyntheticDrift::Constant { value } => out.drift.copy_from_slice(value),
            SyntheticDrift::Polynomial { coefficients } => {
                for (o, &zi) in out.drift.iter_mut().zip(z) {
                    *o = coefficients.iter().rev().fold(0.0, |acc, c| acc * zi + c);
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                out.diffusion[i * d + j] = if i == j { self.spec.diffusion_scale } else { 0.0 };
            }
        }
        for (a, x) in self.atoms.iter().enumerate() {
            for (o, xi) in out.small[a * d..(a + 1) * d].iter_mut().zip(x) {
                *o = self.spec.small_scale * xi;
            }
        }
    }

    fn large_jump(&self, _z: &[f64], mark: &[f64], out: &mut [f64]) {
        for (o, x) in out.iter_mut().zip(mark) {
            *o = self.spec.large_scale * x;
        }
    }

    fn is_synthetic(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("synthetic {:?}", self.spec.drift)
    }
}
