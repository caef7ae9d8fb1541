use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::hermite::{dual_pair, ExpansionVector};
use crate::noise::norm;

/// Small-jump coefficient `F(y, x)` for `0 < |x| < 1`, together with its
/// declared Lipschitz profile `C_x`:
/// `|F(y_1, x) - F(y_2, x)| <= C_x ||y_1 - y_2||_{-p-1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SmallJumpFamily {
    /// `F = 0`.
    Zero,
    /// `F(y, x) = x g(<φ, y>)` with
    /// `g(s) = clamp(intercept + slope s, -clamp, clamp)`.
    ClampedLinear {
        phi: ExpansionVector,
        slope: f64,
        intercept: f64,
        clamp: f64,
    },
}

impl SmallJumpFamily {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if let SmallJumpFamily::ClampedLinear {
            phi,
            slope,
            intercept,
            clamp,
        } = self
        {
            ensure_dim(dim, phi.dim())?;
            if !(slope.is_finite() && intercept.is_finite() && *clamp >= 0.0 && clamp.is_finite()) {
                return Err(Error::InvalidArgument(
                    "clamped-linear family needs finite slope and intercept and a finite clamp >= 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// The test vector the family pairs `y` with, if any.
    pub fn probe(&self) -> Option<&ExpansionVector> {
        match self {
            SmallJumpFamily::Zero => None,
            SmallJumpFamily::ClampedLinear { phi, .. } => Some(phi),
        }
    }

    /// `F` given `s = <φ, y>`, written into `out`.
    #[inline]
    pub fn from_pairing(&self, s: f64, x: &[f64], out: &mut [f64]) {
        match self {
            SmallJumpFamily::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            SmallJumpFamily::ClampedLinear {
                slope,
                intercept,
                clamp,
                ..
            } => {
                let g = (intercept + slope * s).clamp(-clamp, *clamp);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi * g;
                }
            }
        }
    }

    /// `F(y, x)`.
    pub fn evaluate(&self, y: &ExpansionVector, x: &[f64]) -> Result<Vec<f64>> {
        ensure_dim(y.dim(), x.len())?;
        let s = match self.probe() {
            Some(phi) => dual_pair(phi, y)?,
            None => 0.0,
        };
        let mut out = vec![0.0; x.len()];
        self.from_pairing(s, x, &mut out);
        Ok(out)
    }

    /// Declared `C_x` for the space `S_{-p}`.
    pub fn lipschitz_profile(&self, x: &[f64], p: f64) -> f64 {
        match self {
            SmallJumpFamily::Zero => 0.0,
            SmallJumpFamily::ClampedLinear { phi, slope, .. } => norm(x) * slope.abs() * phi.norm(p + 0.5),
        }
    }

    /// `sup_{|x| < 1} C_x`.
    pub fn lipschitz_sup(&self, p: f64) -> f64 {
        match self {
            SmallJumpFamily::Zero => 0.0,
            SmallJumpFamily::ClampedLinear { phi, slope, .. } => slope.abs() * phi.norm(p + 0.5),
        }
    }

    /// `F(0, x)`.
    pub fn at_zero(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.from_pairing(0.0, x, &mut out);
        out
    }

    pub fn name(&self) -> &'static str {
        match self {
            SmallJumpFamily::Zero => "zero",
            SmallJumpFamily::ClampedLinear { .. } => "clamped_linear",
        }
    }
}

/// Large-jump coefficient `G(y, x)` for `|x| >= 1`. Every family is
/// continuous in `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LargeJumpFamily {
    /// `G = 0`.
    Zero,
    /// `G(y, x) = x`.
    Additive,
    /// `G(y, x) = x (1 + tanh <φ, y>)`.
    TanhModulated { phi: ExpansionVector },
    /// `G(y, x) = x <φ, y>`.
    LinearPairing { phi: ExpansionVector },
}

impl LargeJumpFamily {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if let Some(phi) = self.probe() {
            ensure_dim(dim, phi.dim())?;
        }
        Ok(())
    }

    pub fn probe(&self) -> Option<&ExpansionVector> {
        match self {
            LargeJumpFamily::Zero | LargeJumpFamily::Additive => None,
            LargeJumpFamily::TanhModulated { phi } | LargeJumpFamily::LinearPairing { phi } => Some(phi),
        }
    }

    #[inline]
    pub fn from_pairing(&self, s: f64, x: &[f64], out: &mut [f64]) {
        let factor = match self {
            LargeJumpFamily::Zero => 0.0,
            LargeJumpFamily::Additive => 1.0,
            LargeJumpFamily::TanhModulated { .. } => 1.0 + s.tanh(),
            LargeJumpFamily::LinearPairing { .. } => s,
        };
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi * factor;
        }
    }

    pub fn evaluate(&self, y: &ExpansionVector, x: &[f64]) -> Result<Vec<f64>> {
        ensure_dim(y.dim(), x.len())?;
        let s = match self.probe() {
            Some(phi) => dual_pair(phi, y)?,
            None => 0.0,
        };
        let mut out = vec![0.0; x.len()];
        self.from_pairing(s, x, &mut out);
        Ok(out)
    }

    pub fn name(&self) -> &'static str {
        match self {
            LargeJumpFamily::Zero => "zero",
            LargeJumpFamily::Additive => "additive",
            LargeJumpFamily::TanhModulated { .. } => "tanh_modulated",
            LargeJumpFamily::LinearPairing { .. } => "linear_pairing",
        }
    }
}
