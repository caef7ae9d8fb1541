//! Normalised Hermite functions via the three-term recurrence.
//!
//! `h_0(t) = pi^{-1/4} e^{-t^2/2}`, `h_1(t) = sqrt(2) t h_0(t)` and
//! `h_{k+1}(t) = t sqrt(2/(k+1)) h_k(t) - sqrt(k/(k+1)) h_{k-1}(t)`.
//! No factorials appear, so high orders neither overflow nor lose the
//! normalisation.

use std::sync::OnceLock;

use super::basis::MultiIndex;

/// `pi^{-1/4}`
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// `(sqrt(2/(k+1)), sqrt(k/(k+1)))` for the step from `h_k` to `h_{k+1}`.
pub(crate) fn recurrence(k: usize) -> (f64, f64) {
    const CACHED: usize = 256;
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let coeffs = |k: usize| {
        let kf = k as f64;
        ((2.0 / (kf + 1.0)).sqrt(), (kf / (kf + 1.0)).sqrt())
    };
    if k < CACHED {
        TABLE.get_or_init(|| (0..CACHED).map(coeffs).collect())[k]
    } else {
        coeffs(k)
    }
}

/// Fill `out[k] = h_k(t)` for `k = 0..out.len()`.
pub fn hermite_functions(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI_POW_NEG_QUARTER * (-0.5 * t * t).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * t * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let (a, b) = recurrence(k);
        out[k + 1] = t * a * out[k] - b * out[k - 1];
    }
}

/// Orders `0..=max_order` at every point of `points`, stored order-major:
/// `out[k * points.len() + q] = h_k(points[q])`.
pub(crate) fn hermite_table(max_order: usize, points: &[f64], out: &mut Vec<f64>) {
    let nq = points.len();
    out.clear();
    out.resize((max_order + 1) * nq, 0.0);
    for (q, &t) in points.iter().enumerate() {
        out[q] = PI_POW_NEG_QUARTER * (-0.5 * t * t).exp();
    }
    if max_order == 0 {
        return;
    }
    for q in 0..nq {
        out[nq + q] = std::f64::consts::SQRT_2 * points[q] * out[q];
    }
    for k in 1..max_order {
        let (a, b) = recurrence(k);
        let (head, tail) = out.split_at_mut((k + 1) * nq);
        let prev = &head[(k - 1) * nq..k * nq];
        let cur = &head[k * nq..];
        let next = &mut tail[..nq];
        for q in 0..nq {
            next[q] = points[q] * a * cur[q] - b * prev[q];
        }
    }
}

/// One-dimensional `h_n(t)`.
pub fn hermite_1d(n: u32, t: f64) -> f64 {
    let mut buf = vec![0.0; n as usize + 1];
    hermite_functions(t, &mut buf);
    buf[n as usize]
}

/// `h_n(x) = h_{n_1}(x_1) ... h_{n_d}(x_d)`.
///
/// Panics if `x` and `n` have different lengths.
pub fn hermite_eval(n: &MultiIndex, x: &[f64]) -> f64 {
    assert_eq!(n.dim(), x.len(), "multi-index and point dimensions differ");
    n.entries()
        .iter()
        .zip(x)
        .map(|(&k, &t)| hermite_1d(k, t))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn h0_at_origin() {
        let v = hermite_eval(&MultiIndex::scalar(0), &[0.0]);
        assert!((v - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        assert!((v - 0.751_125_54).abs() < 1e-8);
    }

    #[test]
    fn h1_is_odd() {
        assert_eq!(hermite_eval(&MultiIndex::scalar(1), &[0.0]), 0.0);
        let a = hermite_1d(1, 0.7);
        let b = hermite_1d(1, -0.7);
        assert_eq!(a, -b);
    }

    #[test]
    fn h2_matches_closed_form() {
        // H_2(t) = 4t^2 - 2, normalisation (2^2 2! sqrt(pi))^{-1/2}
        let t: f64 = 1.3;
        let norm = (4.0 * factorial(2) * std::f64::consts::PI.sqrt()).powf(-0.5);
        let expected = norm * (-t * t / 2.0).exp() * (4.0 * t * t - 2.0);
        assert!((hermite_1d(2, t) - expected).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_physicists_polynomials() {
        // H_{k+1} = 2t H_k - 2k H_{k-1}, evaluated independently
        for &t in &[-2.5, -0.3, 0.0, 0.9, 3.1] {
            let mut h = [1.0f64, 2.0 * t];
            let mut polys = vec![h[0], h[1]];
            for k in 1..12u32 {
                let next = 2.0 * t * h[1] - 2.0 * f64::from(k) * h[0];
                h = [h[1], next];
                polys.push(next);
            }
            for (n, hp) in polys.iter().enumerate() {
                let n = n as u32;
                let norm = (2f64.powi(n as i32) * factorial(n) * std::f64::consts::PI.sqrt()).powf(-0.5);
                let expected = norm * (-t * t / 2.0).exp() * hp;
                let got = hermite_1d(n, t);
                assert!((got - expected).abs() < 1e-12 * (1.0 + expected.abs()), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn tensor_product_in_two_dimensions() {
        let n = MultiIndex::new(vec![2, 3]);
        let v = hermite_eval(&n, &[0.4, -1.1]);
        assert_eq!(v, hermite_1d(2, 0.4) * hermite_1d(3, -1.1));
    }

    #[test]
    fn high_orders_stay_finite() {
        let v = hermite_1d(400, 5.0);
        assert!(v.is_finite() && v.abs() < 1.0);
    }

    #[test]
    fn table_agrees_with_pointwise() {
        let pts = [-1.5, 0.0, 0.25, 4.0];
        let mut table = Vec::new();
        hermite_table(9, &pts, &mut table);
        for k in 0..=9u32 {
            for (q, &t) in pts.iter().enumerate() {
                assert_eq!(table[k as usize * pts.len() + q], hermite_1d(k, t));
            }
        }
    }
}
