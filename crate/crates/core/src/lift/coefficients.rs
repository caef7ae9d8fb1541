use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{ExpansionVector, MultiIndex};

/// The distribution-valued coefficients: a `d x d` matrix `σ` and a vector
/// `b` of elements of `S_p`, with a bound `β` on all their `p`-norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientDocument", into = "CoefficientDocument")]
pub struct DistributionCoefficientSet {
    dim: usize,
    cutoff: usize,
    regularity: f64,
    /// Row-major `σ_ij`.
    sigma: Vec<ExpansionVector>,
    b: Vec<ExpansionVector>,
    beta: f64,
}

impl DistributionCoefficientSet {
    /// `beta = None` takes the smallest admissible value,
    /// `max(||σ_ij||_p, ||b_i||_p)`.
    pub fn new(sigma: Vec<Vec<ExpansionVector>>, b: Vec<ExpansionVector>, p: f64, beta: Option<f64>) -> Result<Self> {
        let dim = b.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("b must have at least one component".into()));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("regularity p must be positive, got {p}")));
        }
        if sigma.len() != dim || sigma.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidArgument(format!("sigma must be {dim} x {dim}")));
        }
        let cutoff = b[0].cutoff();
        let sigma: Vec<ExpansionVector> = sigma.into_iter().flatten().collect();
        for e in sigma.iter().chain(&b) {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            if e.cutoff() != cutoff {
                return Err(Error::InvalidArgument(format!(
                    "all coefficient entries must share cutoff {cutoff}, found {}",
                    e.cutoff()
                )));
            }
        }
        let sigma: Vec<ExpansionVector> = sigma.into_iter().map(|e| e.with_regularity(p)).collect();
        let b: Vec<ExpansionVector> = b.into_iter().map(|e| e.with_regularity(p)).collect();
        let required = sigma.iter().chain(&b).map(|e| e.norm(p)).fold(0.0, f64::max);
        let beta = match beta {
            None => required,
            Some(beta) if beta >= required => beta,
            Some(beta) => {
                return Err(Error::InvalidArgument(format!(
                    "beta = {beta} is below max ||σ_ij||_p, ||b_i||_p = {required}"
                )))
            }
        };
        Ok(DistributionCoefficientSet {
            dim,
            cutoff,
            regularity: p,
            sigma,
            b,
            beta,
        })
    }

    pub fn zeros(dim: usize, cutoff: usize, p: f64) -> Self {
        let z = ExpansionVector::zeros(dim, cutoff, p);
        Self::new(vec![vec![z.clone(); dim]; dim], vec![z; dim], p, None).expect("valid shape")
    }

    /// `b_i = b_scale h_0` and `σ_ij = δ_ij σ_scale h_0`.
    pub fn gaussian_bump(dim: usize, cutoff: usize, p: f64, b_scale: f64, sigma_scale: f64) -> Self {
        let h0 = ExpansionVector::basis(&MultiIndex::new(vec![0; dim]), cutoff, p).expect("order 0 fits");
        let zero = ExpansionVector::zeros(dim, cutoff, p);
        let sigma = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { h0.scaled(sigma_scale) } else { zero.clone() })
                    .collect()
            })
            .collect();
        Self::new(sigma, vec![h0.scaled(b_scale); dim], p, None).expect("valid shape")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn regularity(&self) -> f64 {
        self.regularity
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self, i: usize, j: usize) -> &ExpansionVector {
        &self.sigma[i * self.dim + j]
    }

    pub fn sigma_entries(&self) -> &[ExpansionVector] {
        &self.sigma
    }

    pub fn b(&self, i: usize) -> &ExpansionVector {
        &self.b[i]
    }

    pub fn b_entries(&self) -> &[ExpansionVector] {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.sigma.iter().chain(&self.b).all(ExpansionVector::is_zero)
    }
}

/// Serialised form: header `(d, p, N, β)` followed by the entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDocument {
    pub dim: usize,
    pub p: f64,
    pub cutoff: usize,
    pub beta: Option<f64>,
    pub sigma: Vec<Vec<ExpansionVector>>,
    pub b: Vec<ExpansionVector>,
}

impl From<DistributionCoefficientSet> for CoefficientDocument {
    fn from(c: DistributionCoefficientSet) -> Self {
        let sigma = c.sigma.chunks(c.dim).map(<[ExpansionVector]>::to_vec).collect();
        CoefficientDocument {
            dim: c.dim,
            p: c.regularity,
            cutoff: c.cutoff,
            beta: Some(c.beta),
            sigma,
            b: c.b,
        }
    }
}

impl TryFrom<CoefficientDocument> for DistributionCoefficientSet {
    type Error = Error;

    fn try_from(doc: CoefficientDocument) -> Result<Self> {
        if doc.b.len() != doc.dim {
            return Err(Error::Malformed(format!("header says d = {} but b has {} entries", doc.dim, doc.b.len())));
        }
        if doc.b.iter().any(|e| e.cutoff() != doc.cutoff) {
            return Err(Error::Malformed(format!("entries must have cutoff {}", doc.cutoff)));
        }
        DistributionCoefficientSet::new(doc.sigma, doc.b, doc.p, doc.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_defaults_to_largest_norm() {
        let c = DistributionCoefficientSet::gaussian_bump(1, 8, 1.0, 1.0, 0.3);
        assert_eq!(c.beta(), 1.0);
        let sigma = vec![vec![c.sigma(0, 0).clone()]];
        assert!(DistributionCoefficientSet::new(sigma, c.b_entries().to_vec(), 1.0, Some(0.5)).is_err());
    }

    #[test]
    fn shapes_are_checked() {
        let e = ExpansionVector::zeros(1, 4, 1.0);
        assert!(DistributionCoefficientSet::new(vec![], vec![e.clone()], 1.0, None).is_err());
        let other = ExpansionVector::zeros(1, 5, 1.0);
        assert!(DistributionCoefficientSet::new(vec![vec![other]], vec![e], 1.0, None).is_err());
    }

    #[test]
    fn document_round_trip() {
        let c = DistributionCoefficientSet::gaussian_bump(2, 3, 1.5, 0.7, 0.2);
        let text = serde_json::to_string(&c).unwrap();
        let back: DistributionCoefficientSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
