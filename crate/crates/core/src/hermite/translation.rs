//! Translation operators `τ_z` on truncated expansions.
//!
//! `T(z)[m, n] = <τ_z h_m, h_n> = ∫ h_m(x - z) h_n(x) dx` factorises over
//! coordinates, so only one-dimensional matrices `T1(s)` are ever computed.
//! They come from the default quadrature rule for the cutoff: the unshifted
//! factor `h_n(x)` confines the integrand to `[-L, L]` whatever the shift.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use lru::LruCache;

use super::expansion::{dot, ExpansionVector};
use super::functions::{hermite_table, recurrence, PI_POW_NEG_QUARTER};
use super::quadrature::{gauss_hermite, QuadratureRule};
use crate::error::{ensure_dim, Result};

/// Default capacity of [`TranslationCache::global`].
pub const DEFAULT_CACHE_CAPACITY: usize = 1024;

/// Quadrature nodes together with `w_q h_n(x_q)` for `n <= cutoff`.
#[derive(Debug)]
pub(crate) struct NodeTable {
    pub(crate) rule: QuadratureRule,
    /// Order-major: `weighted[n * len + q] = w_q h_n(x_q)`.
    pub(crate) weighted: Vec<f64>,
}

impl NodeTable {
    fn build(rule: QuadratureRule, cutoff: usize) -> Self {
        let mut weighted = Vec::new();
        hermite_table(cutoff, rule.nodes(), &mut weighted);
        let nq = rule.len();
        for row in weighted.chunks_mut(nq) {
            for (v, w) in row.iter_mut().zip(rule.weights()) {
                *v *= w;
            }
        }
        NodeTable { rule, weighted }
    }

    /// Interned table for the default rule of `cutoff`.
    pub(crate) fn shared(cutoff: usize) -> Arc<NodeTable> {
        static TABLES: OnceLock<Mutex<HashMap<usize, Arc<NodeTable>>>> = OnceLock::new();
        let mut tables = TABLES
            .get_or_init(Default::default)
            .lock()
            .expect("node table poisoned");
        tables
            .entry(cutoff)
            .or_insert_with(|| Arc::new(NodeTable::build(QuadratureRule::for_cutoff(cutoff), cutoff)))
            .clone()
    }

    pub(crate) fn len(&self) -> usize {
        self.rule.len()
    }
}

/// `T1(s)` as an `(N+1) x (N+1)` row-major matrix, `[m * (N+1) + n]`.
/// `s = 0` gives the identity exactly.
pub fn shift_matrix_1d(s: f64, cutoff: usize) -> Vec<f64> {
    shift_matrix_from(&NodeTable::shared(cutoff), s, cutoff)
}

/// `T1(s)` using a caller-supplied rule.
pub fn shift_matrix_1d_with_rule(s: f64, cutoff: usize, rule: &QuadratureRule) -> Result<Vec<f64>> {
    rule.check_cutoff(cutoff)?;
    Ok(shift_matrix_from(&NodeTable::build(rule.clone(), cutoff), s, cutoff))
}

fn shift_matrix_from(table: &NodeTable, s: f64, cutoff: usize) -> Vec<f64> {
    let size = cutoff + 1;
    let mut out = vec![0.0; size * size];
    if s == 0.0 {
        for k in 0..size {
            out[k * size + k] = 1.0;
        }
        return out;
    }
    let nq = table.len();
    let shifted: Vec<f64> = table.rule.nodes().iter().map(|x| x - s).collect();
    let mut h = Vec::new();
    hermite_table(cutoff, &shifted, &mut h);
    for m in 0..size {
        let hm = &h[m * nq..(m + 1) * nq];
        for n in 0..size {
            out[m * size + n] = dot(hm, &table.weighted[n * nq..(n + 1) * nq]);
        }
    }
    out
}

/// Bounded LRU memo of `T1(s)` keyed by `(cutoff, s)`. Safe to share
/// between threads; lookups and inserts take a short lock.
pub struct TranslationCache {
    inner: Mutex<LruCache<(usize, u64), Arc<[f64]>>>,
}

impl TranslationCache {
    pub fn new(capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity.max(1)).expect("non-zero");
        TranslationCache {
            inner: Mutex::new(LruCache::new(capacity)),
        }
    }

    /// Process-wide cache with [`DEFAULT_CACHE_CAPACITY`] entries.
    pub fn global() -> &'static TranslationCache {
        static GLOBAL: OnceLock<TranslationCache> = OnceLock::new();
        GLOBAL.get_or_init(|| TranslationCache::new(DEFAULT_CACHE_CAPACITY))
    }

    pub fn shift_1d(&self, s: f64, cutoff: usize) -> Arc<[f64]> {
        // +0.0 and -0.0 share an entry
        let key = (cutoff, (s + 0.0).to_bits());
        if let Some(hit) = self.inner.lock().expect("cache poisoned").get(&key) {
            return hit.clone();
        }
        let m: Arc<[f64]> = shift_matrix_1d(s, cutoff).into();
        self.inner
            .lock()
            .expect("cache poisoned")
            .put(key, m.clone());
        m
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn capacity(&self) -> usize {
        self.inner.lock().expect("cache poisoned").cap().get()
    }
}

/// `(τ_z y)[n] = sum_m y[m] T(z)[m, n]`. `z = 0` returns `y` unchanged.
pub fn translate(y: &ExpansionVector, z: &[f64]) -> Result<ExpansionVector> {
    ensure_dim(y.dim(), z.len())?;
    if z.iter().all(|&s| s == 0.0) {
        return Ok(y.clone());
    }
    let cache = TranslationCache::global();
    let mats: Vec<Arc<[f64]>> = z.iter().map(|&s| cache.shift_1d(s, y.cutoff())).collect();
    Ok(apply_factors(y, &mats))
}

/// As [`translate`] but with the one-dimensional factors computed from
/// `rule` and not cached.
pub fn translate_with_rule(y: &ExpansionVector, z: &[f64], rule: &QuadratureRule) -> Result<ExpansionVector> {
    ensure_dim(y.dim(), z.len())?;
    rule.check_cutoff(y.cutoff())?;
    if z.iter().all(|&s| s == 0.0) {
        return Ok(y.clone());
    }
    let table = NodeTable::build(rule.clone(), y.cutoff());
    let mats: Vec<Vec<f64>> = z
        .iter()
        .map(|&s| shift_matrix_from(&table, s, y.cutoff()))
        .collect();
    Ok(apply_factors(y, &mats))
}

fn apply_factors<M: AsRef<[f64]>>(y: &ExpansionVector, mats: &[M]) -> ExpansionVector {
    let layout = y.layout();
    let size = y.cutoff() + 1;
    let mut out = vec![0.0; layout.len()];
    if y.dim() == 1 {
        let t = mats[0].as_ref();
        for (m, &ym) in y.coeffs().iter().enumerate() {
            if ym != 0.0 {
                let row = &t[m * size..(m + 1) * size];
                for (o, r) in out.iter_mut().zip(row) {
                    *o += ym * r;
                }
            }
        }
    } else {
        for (m, &ym) in y.coeffs().iter().enumerate() {
            if ym == 0.0 {
                continue;
            }
            let mi = layout.entries(m);
            for (n, o) in out.iter_mut().enumerate() {
                let ni = layout.entries(n);
                let mut prod = ym;
                for (axis, t) in mats.iter().enumerate() {
                    prod *= t.as_ref()[mi[axis] as usize * size + ni[axis] as usize];
                }
                *o += prod;
            }
        }
    }
    ExpansionVector::from_coeffs(y.dim(), y.cutoff(), y.regularity(), out).expect("same layout")
}

/// Dense `T(z)` over the layout of `(dim, cutoff)`, row-major `[m][n]`.
pub fn translation_matrix(dim: usize, cutoff: usize, z: &[f64]) -> Result<Vec<f64>> {
    ensure_dim(dim, z.len())?;
    let len = crate::hermite::BasisLayout::shared(dim, cutoff).len();
    let mut out = Vec::with_capacity(len * len);
    let mut e = ExpansionVector::zeros(dim, cutoff, 0.0);
    for m in 0..len {
        e.coeffs_mut()[m] = 1.0;
        out.extend_from_slice(translate(&e, z)?.coeffs());
        e.coeffs_mut()[m] = 0.0;
    }
    Ok(out)
}

/// Pairings `<g_j, τ_z ξ>` for a fixed `ξ` and a fixed list of probes `g_j`,
/// evaluated at many shifts.
///
/// In one dimension this never forms `T(z)`. Writing `h_n = π^{-1/4}
/// e^{-x^2/2} p_n`, the integrand `g(x) ξ(x - z)` is
/// `π^{-1/2} e^{-z^2/4} e^{-u^2} G(u + z/2) X(u - z/2)` with `u = x - z/2`
/// and `G X` a polynomial of degree at most `2N`, so the `(N+1)`-point
/// Gauss–Hermite rule integrates it exactly. In higher dimension the cached
/// factors are applied.
#[derive(Clone, Debug)]
pub struct TranslatedPairing {
    xi: ExpansionVector,
    probes: Vec<ExpansionVector>,
    /// Gauss–Hermite nodes and weights, the latter scaled by `π^{-1/2}`.
    rule: Option<(Vec<f64>, Vec<f64>)>,
}

impl TranslatedPairing {
    pub fn new(xi: &ExpansionVector, probes: Vec<ExpansionVector>) -> Result<Self> {
        for g in &probes {
            ensure_dim(xi.dim(), g.dim())?;
        }
        let cutoff = probes.iter().map(|g| g.cutoff()).fold(xi.cutoff(), usize::max);
        let xi = xi.with_cutoff(cutoff);
        let probes: Vec<ExpansionVector> = probes.iter().map(|g| g.with_cutoff(cutoff)).collect();
        let rule = (xi.dim() == 1).then(|| {
            let (nodes, weights) = gauss_hermite(cutoff + 1);
            let scale = PI_POW_NEG_QUARTER * PI_POW_NEG_QUARTER;
            (nodes, weights.into_iter().map(|w| w * scale).collect())
        });
        Ok(TranslatedPairing { xi, probes, rule })
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn probe_count(&self) -> usize {
        self.probes.len()
    }

    pub fn xi(&self) -> &ExpansionVector {
        &self.xi
    }

    /// Writes `<g_j, τ_z ξ>` into `out[j]`. Panics if `z` or `out` has the
    /// wrong length.
    pub fn evaluate(&self, z: &[f64], out: &mut [f64]) {
        assert_eq!(z.len(), self.dim(), "shift dimension");
        assert_eq!(out.len(), self.probes.len(), "probe count");
        if z.iter().all(|&s| s == 0.0) {
            for (o, g) in out.iter_mut().zip(&self.probes) {
                *o = dot(g.coeffs(), self.xi.coeffs());
            }
            return;
        }
        match &self.rule {
            Some((nodes, weights)) => self.evaluate_1d(nodes, weights, z[0], out),
            None => {
                let shifted = translate(&self.xi, z).expect("dimension checked");
                for (o, g) in out.iter_mut().zip(&self.probes) {
                    *o = dot(g.coeffs(), shifted.coeffs());
                }
            }
        }
    }

    fn evaluate_1d(&self, nodes: &[f64], weights: &[f64], s: f64, out: &mut [f64]) {
        let gauss = (-0.25 * s * s).exp();
        out.iter_mut().for_each(|o| *o = 0.0);
        if gauss == 0.0 {
            return;
        }
        let half = 0.5 * s;
        let nq = nodes.len();
        let len = self.xi.coeffs().len();
        // order-major tables of p_n at u - s/2 and u + s/2
        let mut minus = vec![0.0; len * nq];
        let mut plus = vec![0.0; len * nq];
        polynomial_table(nodes, -half, &mut minus);
        polynomial_table(nodes, half, &mut plus);
        let mut x = weights.to_vec();
        let mut xi_part = vec![0.0; nq];
        for (c, row) in self.xi.coeffs().iter().zip(minus.chunks_exact(nq)) {
            for (v, r) in xi_part.iter_mut().zip(row) {
                *v += c * r;
            }
        }
        for (v, p) in x.iter_mut().zip(&xi_part) {
            *v *= p;
        }
        let mut probe_part = vec![0.0; nq];
        for (o, g) in out.iter_mut().zip(&self.probes) {
            probe_part.iter_mut().for_each(|v| *v = 0.0);
            for (c, row) in g.coeffs().iter().zip(plus.chunks_exact(nq)) {
                if *c != 0.0 {
                    for (v, r) in probe_part.iter_mut().zip(row) {
                        *v += c * r;
                    }
                }
            }
            *o = gauss * dot(&x, &probe_part);
        }
    }
}

/// `out[n * nodes.len() + q] = p_n(nodes[q] + shift)` where
/// `h_n(t) = π^{-1/4} e^{-t^2/2} p_n(t)`.
fn polynomial_table(nodes: &[f64], shift: f64, out: &mut [f64]) {
    let nq = nodes.len();
    let orders = out.len() / nq;
    out[..nq].iter_mut().for_each(|v| *v = 1.0);
    if orders > 1 {
        for (v, u) in out[nq..2 * nq].iter_mut().zip(nodes) {
            *v = std::f64::consts::SQRT_2 * (u + shift);
        }
    }
    for k in 1..orders.saturating_sub(1) {
        let (a, b) = recurrence(k);
        let (head, tail) = out.split_at_mut((k + 1) * nq);
        let prev = &head[(k - 1) * nq..k * nq];
        let cur = &head[k * nq..];
        for (q, next) in tail[..nq].iter_mut().enumerate() {
            *next = (nodes[q] + shift) * a * cur[q] - b * prev[q];
        }
    }
}

/// Largest singular value of `τ_z` on the truncated span measured in
/// `||.||_p`, i.e. `sup ||τ_z y||_p / ||y||_p`, by power iteration.
pub fn tau_opnorm(dim: usize, p: f64, cutoff: usize, z: &[f64]) -> Result<f64> {
    ensure_dim(dim, z.len())?;
    let layout = crate::hermite::BasisLayout::shared(dim, cutoff);
    let len = layout.len();
    let t = translation_matrix(dim, cutoff, z)?;
    let w = layout.weights(p);
    // A[n][m] = w_n T[m][n] / w_m maps weighted coordinates to weighted coordinates
    let mut a = vec![0.0; len * len];
    for m in 0..len {
        for n in 0..len {
            a[n * len + m] = w[n] * t[m * len + n] / w[m];
        }
    }
    Ok(largest_singular_value(&a, len))
}

fn largest_singular_value(a: &[f64], len: usize) -> f64 {
    let mut v = vec![1.0 / (len as f64).sqrt(); len];
    let mut av = vec![0.0; len];
    let mut atav = vec![0.0; len];
    let mut sigma = 0.0;
    for _ in 0..20_000 {
        for (i, o) in av.iter_mut().enumerate() {
            *o = dot(&a[i * len..(i + 1) * len], &v);
        }
        atav.iter_mut().for_each(|x| *x = 0.0);
        for (i, &c) in av.iter().enumerate() {
            for (o, aij) in atav.iter_mut().zip(&a[i * len..(i + 1) * len]) {
                *o += aij * c;
            }
        }
        let norm = dot(&atav, &atav).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = dot(&av, &av).sqrt();
        v.iter_mut().zip(&atav).for_each(|(x, y)| *x = y / norm);
        if (next - sigma).abs() <= 1e-14 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// `(radius, ||τ_z||_{p -> p})` along the first coordinate axis.
pub fn tau_opnorm_profile(dim: usize, p: f64, cutoff: usize, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii
        .iter()
        .map(|&r| {
            let mut z = vec![0.0; dim];
            z[0] = r;
            tau_opnorm(dim, p, cutoff, &z).map(|v| (r, v))
        })
        .collect()
}

/// The `L^2` mass that `τ_z` pushes past the cutoff,
/// `sqrt(||y||_0^2 - ||τ_z y||_0^2)`.
///
/// It bounds both the round-trip error `||τ_{-z} τ_z y - y||_0` and the
/// isometry defect `||y||_0 - ||τ_z y||_0`.
pub fn translation_leakage(y: &ExpansionVector, z: &[f64]) -> Result<f64> {
    let moved = translate(y, z)?;
    let before = dot(y.coeffs(), y.coeffs());
    let after = dot(moved.coeffs(), moved.coeffs());
    Ok((before - after).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{dual_pair, MultiIndex};
    use proptest::prelude::*;

    /// `<n| D(α) |m>` for the displacement operator with real `α = s / sqrt 2`,
    /// via associated Laguerre polynomials.
    fn displaced_overlap(m: usize, n: usize, s: f64) -> f64 {
        let alpha = s / std::f64::consts::SQRT_2;
        let x = alpha * alpha;
        let (lo, hi, sign) = if n >= m { (m, n, 1.0) } else { (n, m, -1.0) };
        let k = hi - lo;
        // L_lo^{(k)}(x) by upward recurrence
        let mut l_prev = 1.0;
        let mut l_cur = 1.0 + k as f64 - x;
        let lag = if lo == 0 {
            1.0
        } else {
            for j in 1..lo {
                let jf = j as f64;
                let next = ((2.0 * jf + 1.0 + k as f64 - x) * l_cur - (jf + k as f64) * l_prev) / (jf + 1.0);
                l_prev = l_cur;
                l_cur = next;
            }
            l_cur
        };
        let mut ratio = 1.0;
        for j in lo + 1..=hi {
            ratio /= j as f64;
        }
        ratio.sqrt() * (sign * alpha).powi(k as i32) * (-x / 2.0).exp() * lag
    }

    #[test]
    fn matches_displaced_oscillator_overlaps() {
        for &s in &[0.3, -1.1, 2.5, 4.0, -6.0] {
            let n1 = 16;
            let t = shift_matrix_1d(s, n1);
            let mut worst: f64 = 0.0;
            for m in 0..=n1 {
                for n in 0..=n1 {
                    worst = worst.max((t[m * (n1 + 1) + n] - displaced_overlap(m, n, s)).abs());
                }
            }
            assert!(worst < 1e-11, "s = {s}: {worst}");
        }
    }

    #[test]
    fn low_order_closed_forms() {
        let s = 0.8;
        let t = shift_matrix_1d(s, 2);
        let g = (-s * s / 4.0).exp();
        assert!((t[0] - g).abs() < 1e-13);
        assert!((t[1] - s / std::f64::consts::SQRT_2 * g).abs() < 1e-13, "{} {}", t[1], s / std::f64::consts::SQRT_2 * g);
    }

    #[test]
    fn zero_shift_is_identity_exactly() {
        let y = ExpansionVector::from_coeffs(2, 3, -1.0, (0..10).map(|i| i as f64 * 0.1).collect()).unwrap();
        assert_eq!(translate(&y, &[0.0, 0.0]).unwrap(), y);
        let t = translation_matrix(1, 4, &[0.0]).unwrap();
        for m in 0..5 {
            for n in 0..5 {
                assert_eq!(t[m * 5 + n], if m == n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn far_shift_annihilates() {
        let y = ExpansionVector::delta0(1, 8, -1.0);
        let moved = translate(&y, &[60.0]).unwrap();
        assert!(moved.coeffs().iter().all(|c| c.abs() < 1e-300));
    }

    #[test]
    fn delta_reproduces_point_values() {
        let f = ExpansionVector::from_coeffs(1, 8, 1.0, vec![0.5, -0.3, 0.2, 0.1, -0.05, 0.02, 0.01, -0.01, 0.005])
            .unwrap();
        let delta = ExpansionVector::delta0(1, 24, -1.0);
        for &z in &[-2.0, -0.7, 0.0, 0.4, 1.3, 2.0] {
            let lhs = dual_pair(&f, &translate(&delta, &[z]).unwrap()).unwrap();
            assert!((lhs - f.evaluate(&[z])).abs() < 1e-4, "z = {z}");
        }
    }

    #[test]
    fn pairing_engine_agrees_with_matrix_path() {
        let xi = ExpansionVector::delta0(1, 16, -1.0);
        let b = ExpansionVector::basis(&MultiIndex::scalar(0), 16, 1.0).unwrap();
        let phi = ExpansionVector::from_coeffs(1, 4, 1.0, vec![0.3, 0.0, -0.2, 0.1, 0.05]).unwrap();
        let engine = TranslatedPairing::new(&xi, vec![b.clone(), phi.clone()]).unwrap();
        let mut out = [0.0; 2];
        for &z in &[-3.0, -0.5, 0.0, 0.25, 1.75, 5.0] {
            engine.evaluate(&[z], &mut out);
            let moved = translate(&xi, &[z]).unwrap();
            assert!((out[0] - dual_pair(&b, &moved).unwrap()).abs() < 1e-13);
            assert!((out[1] - dual_pair(&phi, &moved).unwrap()).abs() < 1e-13);
        }
        // b = h_0 against δ_0 gives h_0(z)
        engine.evaluate(&[0.9], &mut out);
        assert!((out[0] - PI_POW_NEG_QUARTER * (-0.405f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn pairing_engine_in_two_dimensions() {
        let xi = ExpansionVector::delta0(2, 8, -1.0);
        let g = ExpansionVector::basis(&MultiIndex::new([1, 0]), 8, 1.0).unwrap();
        let engine = TranslatedPairing::new(&xi, vec![g.clone()]).unwrap();
        let mut out = [0.0];
        engine.evaluate(&[0.3, -0.4], &mut out);
        let direct = dual_pair(&g, &translate(&xi, &[0.3, -0.4]).unwrap()).unwrap();
        assert_eq!(out[0], direct);
    }

    #[test]
    fn opnorm_at_zero_and_in_l2() {
        assert_eq!(tau_opnorm(1, 1.0, 16, &[0.0]).unwrap(), 1.0);
        for (r, v) in tau_opnorm_profile(1, 0.0, 16, &[0.0, 0.5, 1.0, 2.0]).unwrap() {
            assert!(v <= 1.0 + 1e-10 && v > 0.9, "r = {r}: {v}");
        }
    }

    #[test]
    fn cache_is_bounded_and_reused() {
        let cache = TranslationCache::new(4);
        let a = cache.shift_1d(0.5, 6);
        let b = cache.shift_1d(0.5, 6);
        assert!(Arc::ptr_eq(&a, &b));
        for i in 0..10 {
            cache.shift_1d(i as f64, 6);
        }
        assert_eq!(cache.len(), 4);
    }

    #[test]
    fn continuity_profile_decreases() {
        let y = ExpansionVector::from_coeffs(1, 16, -1.0, (0..17).map(|i| 1.0 / (1.0 + i as f64)).collect()).unwrap();
        let z = 0.7;
        let base = translate(&y, &[z]).unwrap();
        let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|d| translate(&y, &[z + d]).unwrap().combine(1.0, &base, -1.0).unwrap().norm(1.0))
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    proptest! {
        #[test]
        fn adjoint_identity(f in proptest::collection::vec(-1.0f64..1.0, 17),
                            y in proptest::collection::vec(-1.0f64..1.0, 17),
                            z in -3.0f64..3.0) {
            let f = ExpansionVector::from_coeffs(1, 16, 1.0, f).unwrap();
            let y = ExpansionVector::from_coeffs(1, 16, -1.0, y).unwrap();
            let lhs = dual_pair(&f, &translate(&y, &[z]).unwrap()).unwrap();
            let rhs = dual_pair(&translate(&f, &[-z]).unwrap(), &y).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-8);
        }

        #[test]
        fn round_trip_within_leakage(y in proptest::collection::vec(-1.0f64..1.0, 45),
                                     z1 in -2.0f64..2.0, z2 in -2.0f64..2.0) {
            let y = ExpansionVector::from_coeffs(2, 8, 0.0, y).unwrap();
            let z = [z1, z2];
            let back = translate(&translate(&y, &z).unwrap(), &[-z1, -z2]).unwrap();
            let err = back.combine(1.0, &y, -1.0).unwrap().norm(0.0);
            let leak = translation_leakage(&y, &z).unwrap();
            prop_assert!(err <= leak + 1e-10, "{err} > {leak}");
            let defect = (translate(&y, &z).unwrap().norm(0.0) - y.norm(0.0)).abs();
            prop_assert!(defect <= leak + 1e-10);
        }
    }
}
