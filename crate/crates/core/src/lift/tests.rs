use super::*;
use crate::hermite::{MultiIndex, PI_POW_NEG_QUARTER};
use crate::noise::{stream_rng, LargeJumpSampler, LevyModel, Stream};
use rand::Rng;

fn phi() -> ExpansionVector {
    ExpansionVector::from_coeffs(1, 4, 1.0, vec![0.5, 0.1, -0.2, 0.0, 0.05]).unwrap()
}

fn clamped() -> SmallJumpFamily {
    SmallJumpFamily::ClampedLinear {
        phi: phi(),
        slope: 0.8,
        intercept: 0.2,
        clamp: 1.0,
    }
}

fn model() -> LevyModel {
    LevyModel::new(1, LevyModel::symmetric_atoms_1d(0.5, 1.0), 0.0, LargeJumpSampler::Fixed { mark: vec![1.0] })
        .unwrap()
}

fn random_y(rng: &mut impl Rng, dim: usize, cutoff: usize, p: f64) -> ExpansionVector {
    let len = crate::hermite::BasisLayout::shared(dim, cutoff).len();
    ExpansionVector::from_coeffs(dim, cutoff, -p, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn drift_examples() {
    let c = DistributionCoefficientSet::gaussian_bump(1, 16, 1.0, 1.0, 0.3);
    let zero = ExpansionVector::zeros(1, 16, -1.0);
    assert_eq!(lift_drift(&c, &[0.7], &zero).unwrap(), vec![0.0]);
    let delta = ExpansionVector::delta0(1, 16, -1.0);
    for &z in &[-2.0f64, -0.3, 1.1] {
        let h0 = PI_POW_NEG_QUARTER * (-0.5 * z * z).exp();
        assert!((lift_drift(&c, &[z], &delta).unwrap()[0] - h0).abs() < 1e-4);
    }
    let y = ExpansionVector::from_coeffs(1, 16, -1.0, (0..17).map(|i| (i as f64).sin()).collect()).unwrap();
    assert_eq!(lift_drift(&c, &[0.0], &y).unwrap()[0], dual_pair(c.b(0), &y).unwrap());
}

#[test]
fn diffusion_examples() {
    let c = DistributionCoefficientSet::gaussian_bump(2, 8, 1.0, 1.0, 1.0);
    let delta = ExpansionVector::delta0(2, 8, -1.0);
    let z = [0.4, -0.6];
    let s = lift_diffusion(&c, &z, &delta).unwrap();
    let h = |t: f64| PI_POW_NEG_QUARTER * (-0.5 * t * t).exp();
    // a two-dimensional δ_0 at cutoff 8 resolves h_0(z) to about 1e-3
    assert!((s[0][0] - h(z[0]) * h(z[1])).abs() < 5e-3);
    assert!(s[0][1].abs() < 1e-12);

    let h2 = ExpansionVector::basis(&MultiIndex::scalar(2), 4, 1.0).unwrap();
    let c = DistributionCoefficientSet::new(vec![vec![h2.clone()]], vec![h2.clone()], 1.0, None).unwrap();
    assert_eq!(lift_diffusion(&c, &[0.0], &h2).unwrap(), vec![vec![1.0]]);
    let zero = ExpansionVector::zeros(1, 4, -1.0);
    assert_eq!(lift_diffusion(&c, &[3.0], &zero).unwrap(), vec![vec![0.0]]);
}

#[test]
fn small_jump_examples() {
    let f = clamped();
    let zero = ExpansionVector::zeros(1, 16, -1.0);
    assert_eq!(lift_small_jump(&f, &[1.0], &[0.5], &zero).unwrap(), vec![0.5 * 0.2]);
    let xi = ExpansionVector::delta0(1, 16, -1.0);
    let direct = f.evaluate(&translate(&xi, &[0.8]).unwrap(), &[-0.5]).unwrap();
    assert_eq!(lift_small_jump(&f, &[0.8], &[-0.5], &xi).unwrap(), direct);
    assert!(matches!(lift_small_jump(&f, &[0.0], &[1.0], &xi), Err(Error::SmallMarkOutOfRange(_))));
    assert!(matches!(lift_small_jump(&f, &[0.0], &[0.0], &xi), Err(Error::SmallMarkOutOfRange(_))));
}

#[test]
fn large_jump_examples() {
    let xi = ExpansionVector::delta0(1, 16, -1.0);
    assert_eq!(lift_large_jump(&LargeJumpFamily::Additive, &[0.3], &[1.5], &xi).unwrap(), vec![1.5]);
    let zero = ExpansionVector::zeros(1, 16, -1.0);
    let lin = LargeJumpFamily::LinearPairing { phi: phi() };
    assert_eq!(lift_large_jump(&lin, &[0.3], &[2.0], &zero).unwrap(), vec![0.0]);
    assert!(matches!(
        lift_large_jump(&lin, &[0.3], &[0.5], &zero),
        Err(Error::LargeMarkOutOfRange(_))
    ));
    let tanh = LargeJumpFamily::TanhModulated { phi: phi() };
    let at = |z: f64| lift_large_jump(&tanh, &[z], &[1.0], &xi).unwrap()[0];
    let base = at(0.4);
    let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|d| (at(0.4 + d) - base).abs()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
}

#[test]
fn field_agrees_with_free_functions() {
    let c = DistributionCoefficientSet::gaussian_bump(1, 16, 1.0, 1.0, 0.3);
    let xi = ExpansionVector::delta0(1, 16, -1.0);
    let m = model();
    let g = LargeJumpFamily::TanhModulated { phi: phi() };
    let field = LiftedField::new(&c, &clamped(), &g, &xi, &m).unwrap();
    let mut out = LocalCoefficients::for_field(&field);
    for &z in &[-1.0, 0.0, 0.45, 2.5] {
        field.evaluate(&[z], &mut out);
        assert!((out.drift[0] - lift_drift(&c, &[z], &xi).unwrap()[0]).abs() < 1e-13);
        assert!((out.diffusion[0] - lift_diffusion(&c, &[z], &xi).unwrap()[0][0]).abs() < 1e-13);
        for (a, atom) in m.small_atoms().iter().enumerate() {
            let direct = lift_small_jump(&clamped(), &[z], &atom.mark, &xi).unwrap();
            assert!((out.small_at(a)[0] - direct[0]).abs() < 1e-13);
        }
        let mut jump = [0.0];
        field.large_jump(&[z], &[1.5], &mut jump);
        assert!((jump[0] - lift_large_jump(&g, &[z], &[1.5], &xi).unwrap()[0]).abs() < 1e-13);
    }
}

#[test]
fn linearity_in_xi() {
    let c = DistributionCoefficientSet::gaussian_bump(1, 12, 1.0, 1.0, 0.4);
    let mut rng = stream_rng(1, 0, Stream::Auxiliary);
    for _ in 0..50 {
        let y1 = random_y(&mut rng, 1, 12, 1.0);
        let y2 = random_y(&mut rng, 1, 12, 1.0);
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let z = [rng.random_range(-3.0..3.0)];
        let combo = y1.combine(a, &y2, b).unwrap();
        let lhs = lift_drift(&c, &z, &combo).unwrap()[0];
        let rhs = a * lift_drift(&c, &z, &y1).unwrap()[0] + b * lift_drift(&c, &z, &y2).unwrap()[0];
        assert!((lhs - rhs).abs() < 1e-10);
        let lhs = lift_diffusion(&c, &z, &combo).unwrap()[0][0];
        let rhs = a * lift_diffusion(&c, &z, &y1).unwrap()[0][0] + b * lift_diffusion(&c, &z, &y2).unwrap()[0][0];
        assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn zero_state_bounds() {
    let p = 1.0;
    for dim in [1usize, 2] {
        let cutoff = if dim == 1 { 12 } else { 6 };
        let mut rng = stream_rng(2, dim as u64, Stream::Auxiliary);
        let len = crate::hermite::BasisLayout::shared(dim, cutoff).len();
        let mk = |rng: &mut rand_chacha::ChaCha20Rng| {
            ExpansionVector::from_coeffs(dim, cutoff, p, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect())
                .unwrap()
        };
        let sigma = (0..dim).map(|_| (0..dim).map(|_| mk(&mut rng)).collect()).collect();
        let b = (0..dim).map(|_| mk(&mut rng)).collect();
        let c = DistributionCoefficientSet::new(sigma, b, p, None).unwrap();
        let origin = vec![0.0; dim];
        let d = dim as f64;
        for _ in 0..1000 {
            let y = random_y(&mut rng, dim, cutoff, p);
            let n = y.norm(-p);
            let drift = lift_drift(&c, &origin, &y).unwrap();
            assert!(norm(&drift) <= c.beta() * d.sqrt() * n);
            let diff: Vec<f64> = lift_diffusion(&c, &origin, &y).unwrap().concat();
            assert!(norm(&diff) <= c.beta() * d * n);
        }
    }
}

#[test]
fn f1_transfer_bound() {
    let p = 1.0;
    let f = clamped();
    let mut rng = stream_rng(3, 0, Stream::Auxiliary);
    for _ in 0..500 {
        let y = random_y(&mut rng, 1, 12, p);
        let z = [rng.random_range(-3.0..3.0)];
        let x = [rng.random_range(0.05..0.95)];
        let lhs = norm(&lift_small_jump(&f, &z, &x, &y).unwrap());
        let moved = translate(&y, &z).unwrap();
        let rhs = f.lipschitz_profile(&x, p) * moved.norm(-p) + norm(&f.at_zero(&x));
        assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}

#[test]
fn zero_coefficients_report_zeros() {
    let c = DistributionCoefficientSet::zeros(1, 8, 1.0);
    let k = vec![ExpansionVector::delta0(1, 8, -1.0)];
    let opts = HypothesisOptions {
        samples: 32,
        ..Default::default()
    };
    let r = verify_hypotheses(&c, &SmallJumpFamily::Zero, &LargeJumpFamily::Zero, &model(), &k, &[1.0, 2.0], &opts)
        .unwrap();
    assert!(r.pass, "{r:?}");
    for v in [r.sup_cx, r.integral_cx2, r.sup_f0, r.integral_f02, r.alpha_k, r.lipschitz_global] {
        assert_eq!(v, 0.0);
    }
    assert!(r.local.iter().all(|l| l.empirical == 0.0));
}

#[test]
fn clamped_family_report() {
    let p = 1.0;
    let c = DistributionCoefficientSet::gaussian_bump(1, 16, p, 1.0, 0.3);
    let k = vec![ExpansionVector::delta0(1, 16, -p)];
    let opts = HypothesisOptions {
        samples: 64,
        ..Default::default()
    };
    let r = verify_hypotheses(
        &c,
        &clamped(),
        &LargeJumpFamily::TanhModulated { phi: phi() },
        &model(),
        &k,
        &[1.0, 2.0, 4.0],
        &opts,
    )
    .unwrap();
    let cx = 0.5 * 0.8 * phi().norm(p + 0.5);
    assert!((r.integral_cx2 - 2.0 * cx * cx).abs() < 1e-14 * cx * cx);
    assert!(r.pass, "{r:#?}");
    assert_eq!(r.f1_violations, 0);
    for l in &r.local {
        assert!(l.empirical <= l.bound, "{l:?}");
    }
    // the compensator integral of |F(0,.)|^2 is the report's F3 integral
    let f = clamped();
    assert_eq!(r.integral_f02, model().compensator_integral(|x| norm(&f.at_zero(x)).powi(2)));
}

#[test]
fn empirical_constants_stable_under_doubling() {
    let c = DistributionCoefficientSet::gaussian_bump(1, 16, 1.0, 1.0, 0.3);
    let xi = ExpansionVector::delta0(1, 16, -1.0);
    let m = model();
    let field = LiftedField::new(&c, &clamped(), &LargeJumpFamily::Zero, &xi, &m).unwrap();
    let intensities = [1.0, 1.0];
    for radius in [1.0, 2.0, 8.0] {
        let mut rng = stream_rng(5, 0, Stream::Hypothesis);
        let a = empirical_lipschitz(&field, &intensities, radius, 128, &mut rng);
        let mut rng = stream_rng(5, 1, Stream::Hypothesis);
        let b = empirical_lipschitz(&field, &intensities, radius, 256, &mut rng);
        assert!((a - b).abs() / b < 0.2, "radius {radius}: {a} vs {b}");
    }
}
