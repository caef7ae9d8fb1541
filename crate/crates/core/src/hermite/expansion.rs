//! Truncated Hermite expansions standing in for elements of `S_p`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::basis::{BasisLayout, MultiIndex};
use super::functions::{hermite_eval, hermite_functions, hermite_table};
use super::quadrature::QuadratureRule;
use crate::error::{ensure_dim, Error, Result};

/// Coefficients `<f, h_n>` for `|n| <= cutoff`, tagged with the order `p`
/// of the Hermite–Sobolev space the element is treated as living in.
///
/// The tag is metadata: norms of every order are finite sums and can be
/// taken regardless of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExpansionDocument", try_from = "ExpansionDocument")]
pub struct ExpansionVector {
    layout: Arc<BasisLayout>,
    coeffs: Vec<f64>,
    regularity: f64,
}

impl ExpansionVector {
    pub fn zeros(dim: usize, cutoff: usize, regularity: f64) -> Self {
        let layout = BasisLayout::shared(dim, cutoff);
        let coeffs = vec![0.0; layout.len()];
        ExpansionVector {
            layout,
            coeffs,
            regularity,
        }
    }

    /// Coefficients in layout order. Length must match the layout.
    pub fn from_coeffs(dim: usize, cutoff: usize, regularity: f64, coeffs: Vec<f64>) -> Result<Self> {
        let layout = BasisLayout::shared(dim, cutoff);
        if coeffs.len() != layout.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for dim {dim} cutoff {cutoff}, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(ExpansionVector {
            layout,
            coeffs,
            regularity,
        })
    }

    /// The basis element `h_n`.
    pub fn basis(n: &MultiIndex, cutoff: usize, regularity: f64) -> Result<Self> {
        let mut v = Self::zeros(n.dim(), cutoff, regularity);
        let i = v.layout.position(n).ok_or_else(|| {
            Error::InvalidArgument(format!("index {n} exceeds cutoff {cutoff}"))
        })?;
        v.coeffs[i] = 1.0;
        Ok(v)
    }

    /// Truncated Dirac mass at the origin: coefficients `h_n(0)`.
    pub fn delta0(dim: usize, cutoff: usize, regularity: f64) -> Self {
        let mut one_d = vec![0.0; cutoff + 1];
        hermite_functions(0.0, &mut one_d);
        let layout = BasisLayout::shared(dim, cutoff);
        let coeffs = layout
            .iter()
            .map(|n| n.iter().map(|&k| one_d[k as usize]).product())
            .collect();
        ExpansionVector {
            layout,
            coeffs,
            regularity,
        }
    }

    /// `<f, h_n>` for `|n| <= cutoff` by tensor-product quadrature on
    /// `[-L, L]^d`.
    ///
    /// `f` must be negligible outside the box; that is the caller's
    /// responsibility.
    pub fn project(
        f: impl Fn(&[f64]) -> f64,
        dim: usize,
        cutoff: usize,
        rule: &QuadratureRule,
    ) -> Result<Self> {
        rule.check_cutoff(cutoff)?;
        let layout = BasisLayout::shared(dim, cutoff);
        let nq = rule.len();
        let mut table = Vec::new();
        hermite_table(cutoff, rule.nodes(), &mut table);

        let mut coeffs = vec![0.0; layout.len()];
        let mut counter = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        loop {
            let mut w = 1.0;
            for (axis, &q) in counter.iter().enumerate() {
                point[axis] = rule.nodes()[q];
                w *= rule.weights()[q];
            }
            let fw = f(&point) * w;
            if fw != 0.0 {
                for (c, n) in coeffs.iter_mut().zip(layout.iter()) {
                    let mut basis = 1.0;
                    for (axis, &k) in n.iter().enumerate() {
                        basis *= table[k as usize * nq + counter[axis]];
                    }
                    *c += fw * basis;
                }
            }
            // odometer over the tensor grid
            let mut axis = 0;
            loop {
                counter[axis] += 1;
                if counter[axis] < nq {
                    break;
                }
                counter[axis] = 0;
                axis += 1;
                if axis == dim {
                    return Ok(ExpansionVector {
                        layout,
                        coeffs,
                        regularity: 0.0,
                    });
                }
            }
        }
    }

    pub fn layout(&self) -> &Arc<BasisLayout> {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn cutoff(&self) -> usize {
        self.layout.cutoff()
    }

    pub fn regularity(&self) -> f64 {
        self.regularity
    }

    pub fn with_regularity(mut self, regularity: f64) -> Self {
        self.regularity = regularity;
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, n: &MultiIndex) -> Option<f64> {
        self.layout.position(n).map(|i| self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Reconstruct `sum_n c_n h_n(x)`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension");
        let cutoff = self.cutoff();
        let tables: Vec<Vec<f64>> = x
            .iter()
            .map(|&t| {
                let mut buf = vec![0.0; cutoff + 1];
                hermite_functions(t, &mut buf);
                buf
            })
            .collect();
        self.layout
            .iter()
            .zip(&self.coeffs)
            .map(|(n, c)| {
                c * n
                    .iter()
                    .zip(&tables)
                    .map(|(&k, tab)| tab[k as usize])
                    .product::<f64>()
            })
            .sum()
    }

    /// Zero-padded (or truncated) copy with a different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let layout = BasisLayout::shared(self.dim(), cutoff);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(layout.len(), 0.0);
        ExpansionVector {
            layout,
            coeffs,
            regularity: self.regularity,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// `a * self + b * other`, padded to the larger cutoff.
    pub fn combine(&self, a: f64, other: &ExpansionVector, b: f64) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        let cutoff = self.cutoff().max(other.cutoff());
        let mut out = self.with_cutoff(cutoff);
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let y = other.coeffs.get(i).copied().unwrap_or(0.0);
            *c = a * *c + b * y;
        }
        Ok(out)
    }

    /// `∂/∂x_axis` of the expansion, exact on the span: the result has
    /// cutoff `N + 1` because `∂h_n = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}`.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for dimension {}",
                self.dim()
            )));
        }
        let mut out = Self::zeros(self.dim(), self.cutoff() + 1, self.regularity);
        let mut target = vec![0u32; self.dim()];
        for (i, n) in self.layout.iter().enumerate() {
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            let k = n[axis];
            target.copy_from_slice(n);
            if k > 0 {
                target[axis] = k - 1;
                let j = out.layout.position(&MultiIndex::new(target.clone())).expect("in span");
                out.coeffs[j] += c * (f64::from(k) / 2.0).sqrt();
            }
            target[axis] = k + 1;
            let j = out.layout.position(&MultiIndex::new(target.clone())).expect("in span");
            out.coeffs[j] -= c * ((f64::from(k) + 1.0) / 2.0).sqrt();
        }
        Ok(out)
    }

    /// `||self||_p`
    pub fn norm(&self, p: f64) -> f64 {
        norm_p(self, p)
    }
}

/// `<f, g>_p = sum_n (2|n| + d)^{2p} <f, h_n> <g, h_n>`, with the shorter
/// expansion zero-padded.
pub fn inner_p(f: &ExpansionVector, g: &ExpansionVector, p: f64) -> Result<f64> {
    ensure_dim(f.dim(), g.dim())?;
    let d = f.dim() as f64;
    let layout = if f.cutoff() <= g.cutoff() { &f.layout } else { &g.layout };
    Ok(f.coeffs
        .iter()
        .zip(&g.coeffs)
        .enumerate()
        .map(|(i, (a, b))| (2.0 * layout.order(i) as f64 + d).powf(2.0 * p) * a * b)
        .sum())
}

/// `||f||_p = sqrt(<f, f>_p)`.
pub fn norm_p(f: &ExpansionVector, p: f64) -> f64 {
    let d = f.dim() as f64;
    f.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (2.0 * f.layout.order(i) as f64 + d).powf(2.0 * p) * c * c)
        .sum::<f64>()
        .sqrt()
}

/// The pairing between `S_p` and `S_{-p}`: `sum_n f_n y_n`.
///
/// Satisfies `|dual_pair(f, y)| <= ||f||_p ||y||_{-p}` for every `p`.
pub fn dual_pair(f: &ExpansionVector, y: &ExpansionVector) -> Result<f64> {
    ensure_dim(f.dim(), y.dim())?;
    Ok(dot(&f.coeffs, &y.coeffs))
}

/// Dot product over the common prefix.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Serialised form: a header plus `(multi-index, coefficient)` pairs.
/// Coefficients are written in shortest round-trip decimal, so a
/// serialise/parse cycle is exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionDocument {
    pub dim: usize,
    pub cutoff: usize,
    pub p: f64,
    pub terms: Vec<ExpansionTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub index: MultiIndex,
    pub value: f64,
}

impl From<ExpansionVector> for ExpansionDocument {
    fn from(v: ExpansionVector) -> Self {
        let terms = (0..v.layout.len())
            .map(|i| ExpansionTerm {
                index: v.layout.index(i),
                value: v.coeffs[i],
            })
            .collect();
        ExpansionDocument {
            dim: v.dim(),
            cutoff: v.cutoff(),
            p: v.regularity,
            terms,
        }
    }
}

impl TryFrom<ExpansionDocument> for ExpansionVector {
    type Error = Error;

    fn try_from(doc: ExpansionDocument) -> Result<Self> {
        if doc.dim == 0 {
            return Err(Error::Malformed("dim must be positive".into()));
        }
        let mut v = ExpansionVector::zeros(doc.dim, doc.cutoff, doc.p);
        let mut seen = vec![false; v.coeffs.len()];
        for term in doc.terms {
            if term.index.dim() != doc.dim {
                return Err(Error::Malformed(format!(
                    "index {} has dimension {}, header says {}",
                    term.index,
                    term.index.dim(),
                    doc.dim
                )));
            }
            let i = v.layout.position(&term.index).ok_or_else(|| {
                Error::Malformed(format!("index {} exceeds cutoff {}", term.index, doc.cutoff))
            })?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Malformed(format!("duplicate index {}", term.index)));
            }
            v.coeffs[i] = term.value;
        }
        Ok(v)
    }
}

/// `h_n(x)` for a multi-index, re-exported here for symmetry with `project`.
pub fn basis_value(n: &MultiIndex, x: &[f64]) -> f64 {
    hermite_eval(n, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basis_norm_identity() {
        let h2 = ExpansionVector::basis(&MultiIndex::scalar(2), 4, 1.0).unwrap();
        assert_eq!(inner_p(&h2, &h2, 1.0).unwrap(), 25.0);
        assert_eq!(h2.norm(1.0), 5.0);
    }

    #[test]
    fn p_zero_is_euclidean() {
        let a = ExpansionVector::from_coeffs(1, 3, 0.0, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let b = ExpansionVector::from_coeffs(1, 3, 0.0, vec![0.25, 1.0, 4.0, -1.0]).unwrap();
        assert_eq!(inner_p(&a, &b, 0.0).unwrap(), 0.25 - 2.0 + 2.0 - 3.0);
    }

    #[test]
    fn padding_between_cutoffs() {
        let a = ExpansionVector::from_coeffs(1, 2, 0.0, vec![1.0, 2.0, 3.0]).unwrap();
        let b = ExpansionVector::from_coeffs(1, 4, 0.0, vec![1.0, 1.0, 1.0, 7.0, 9.0]).unwrap();
        assert_eq!(dual_pair(&a, &b).unwrap(), 6.0);
        assert_eq!(inner_p(&a, &b, 0.0).unwrap(), 6.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = ExpansionVector::zeros(1, 2, 0.0);
        let b = ExpansionVector::zeros(2, 2, 0.0);
        assert!(matches!(inner_p(&a, &b, 1.0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(dual_pair(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dual_pair_of_basis_is_kronecker() {
        for m in 0..5 {
            for n in 0..5 {
                let a = ExpansionVector::basis(&MultiIndex::scalar(m), 4, 1.0).unwrap();
                let b = ExpansionVector::basis(&MultiIndex::scalar(n), 4, -1.0).unwrap();
                assert_eq!(dual_pair(&a, &b).unwrap(), if m == n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn partial_of_h0() {
        // h_0' = -t h_0 = -h_1 / sqrt(2)
        let h0 = ExpansionVector::basis(&MultiIndex::scalar(0), 3, 0.0).unwrap();
        let d = h0.partial(0).unwrap();
        assert_eq!(d.cutoff(), 4);
        assert!((d.coeffs()[1] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // finite-difference cross-check of the reconstruction
        let f = ExpansionVector::from_coeffs(1, 3, 0.0, vec![0.3, -0.1, 0.7, 0.2]).unwrap();
        let df = f.partial(0).unwrap();
        let t = 0.37;
        let h = 1e-5;
        let fd = (f.evaluate(&[t + h]) - f.evaluate(&[t - h])) / (2.0 * h);
        assert!((df.evaluate(&[t]) - fd).abs() < 1e-9);
    }

    #[test]
    fn document_round_trip_is_exact() {
        let v = ExpansionVector::from_coeffs(2, 2, -0.75, vec![0.1, 1.0 / 3.0, -2.5e-300, 7.0, 1e20, -0.0])
            .unwrap();
        let text = serde_json::to_string(&v).unwrap();
        let back: ExpansionVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back.coeffs(), v.coeffs());
        assert_eq!(back.regularity(), v.regularity());
        assert_eq!(back.cutoff(), 2);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad = r#"{"dim":1,"cutoff":2,"p":0.0,"terms":[{"index":[3],"value":1.0}]}"#;
        assert!(serde_json::from_str::<ExpansionVector>(bad).is_err());
        let dup = r#"{"dim":1,"cutoff":2,"p":0.0,"terms":[{"index":[1],"value":1.0},{"index":[1],"value":2.0}]}"#;
        assert!(serde_json::from_str::<ExpansionVector>(dup).is_err());
    }

    proptest! {
        #[test]
        fn norms_increase_with_order(coeffs in proptest::collection::vec(-10.0f64..10.0, 17),
                                     q in -2.0f64..2.0, gap in 0.0f64..2.0) {
            let y = ExpansionVector::from_coeffs(1, 16, 0.0, coeffs).unwrap();
            prop_assert!(y.norm(q) <= y.norm(q + gap) * (1.0 + 1e-12));
        }

        #[test]
        fn cauchy_schwarz_duality(f in proptest::collection::vec(-5.0f64..5.0, 45),
                                  y in proptest::collection::vec(-5.0f64..5.0, 45),
                                  p in 0.0f64..2.0) {
            let f = ExpansionVector::from_coeffs(2, 8, p, f).unwrap();
            let y = ExpansionVector::from_coeffs(2, 8, -p, y).unwrap();
            let lhs = dual_pair(&f, &y).unwrap().abs();
            prop_assert!(lhs <= f.norm(p) * y.norm(-p) * (1.0 + 1e-12));
        }
    }
}
