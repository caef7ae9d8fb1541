//! Composite Gauss–Legendre rules on `[-L, L]`, plus the Gauss–Hermite rule
//! used where the integrand carries its own Gaussian weight.

use serde::{Deserialize, Serialize};

use super::functions::{recurrence, PI_POW_NEG_QUARTER};
use crate::error::{Error, Result};

/// Gauss–Legendre order used on every panel of the default rule.
const PANEL_ORDER: usize = 16;

/// Extra room past `sqrt(4N + 6)`, the point beyond which every `h_n` with
/// `n <= N` has decayed below double-precision relevance once squared.
const HALFWIDTH_PAD: f64 = 3.0;

/// One-dimensional quadrature on `[-L, L]`; d-dimensional integrals use the
/// tensor product on `[-L, L]^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    halfwidth: f64,
}

impl QuadratureRule {
    /// `panels` equal panels on `[-halfwidth, halfwidth]`, each carrying an
    /// `order`-point Gauss–Legendre rule.
    pub fn composite_gauss_legendre(halfwidth: f64, panels: usize, order: usize) -> Result<Self> {
        if !(halfwidth > 0.0 && halfwidth.is_finite()) || panels == 0 || order == 0 {
            return Err(Error::InvalidArgument(format!(
                "composite rule needs positive halfwidth, panels and order (got {halfwidth}, {panels}, {order})"
            )));
        }
        let (x, w) = gauss_legendre(order);
        let width = 2.0 * halfwidth / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let left = -halfwidth + width * p as f64;
            let mid = left + 0.5 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * width * xi);
                weights.push(0.5 * width * wi);
            }
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            halfwidth,
        })
    }

    /// Default rule for Hermite functions up to order `cutoff`.
    ///
    /// `L = sqrt(4N + 6) + 3` and panels of width at most
    /// `min(2, 10 / sqrt(2N + 1))` with 16 points each. This reproduces
    /// orthonormality to about `1e-12` for `N <= 32` and always has at least
    /// `4N + 1` nodes.
    pub fn for_cutoff(cutoff: usize) -> Self {
        let n = cutoff as f64;
        let halfwidth = (4.0 * n + 6.0).sqrt() + HALFWIDTH_PAD;
        let max_width = (10.0 / (2.0 * n + 1.0).sqrt()).min(2.0);
        let mut panels = (2.0 * halfwidth / max_width).ceil() as usize;
        while panels * PANEL_ORDER < 4 * cutoff + 1 {
            panels += 1;
        }
        Self::composite_gauss_legendre(halfwidth, panels, PANEL_ORDER)
            .expect("default rule parameters are valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rejects rules with fewer than `2 * cutoff + 1` nodes.
    pub fn check_cutoff(&self, cutoff: usize) -> Result<()> {
        let required = 2 * cutoff + 1;
        if self.nodes.len() < required {
            Err(Error::InsufficientQuadrature {
                nodes: self.nodes.len(),
                cutoff,
                required,
            })
        } else {
            Ok(())
        }
    }

    /// `∫_{-L}^{L} f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n` from the Chebyshev-like initial guesses.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the weight
/// `e^{-u^2}`, exact for polynomials of degree `2n - 1`. Newton iteration on
/// the normalised recurrence, with the usual asymptotic starting points.
pub(crate) fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut slope = 1.0;
        for _ in 0..100 {
            let (p, prev) = hermite_poly_pair(n, z);
            slope = (2.0 * nf).sqrt() * prev;
            let step = p / slope;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, prev) = hermite_poly_pair(n, z);
        if prev != 0.0 {
            slope = (2.0 * nf).sqrt() * prev;
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (slope * slope);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// `(P_n(z), P_{n-1}(z))` for the polynomials orthonormal under `e^{-z^2}`.
fn hermite_poly_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI_POW_NEG_QUARTER;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let (a, b) = recurrence(j);
        p1 = z * a * p2 - b * p3;
    }
    (p1, p2)
}
