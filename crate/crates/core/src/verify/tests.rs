use super::*;
use crate::engine::{solve_reduced_euler, PicardTrace, SolveProblem};
use crate::hermite::ExpansionVector;
use crate::lift::{
    DistributionCoefficientSet, HypothesisOptions, LargeJumpFamily, SmallJumpFamily, SyntheticDrift, SyntheticSpec,
};
use crate::noise::{LargeJumpSampler, LevyModel};

fn model(large_rate: f64) -> LevyModel {
    LevyModel::new(1, LevyModel::symmetric_atoms_1d(0.5, 1.0), large_rate, LargeJumpSampler::Fixed { mark: vec![1.0] })
        .unwrap()
}

fn lifted(large_rate: f64, steps: usize) -> SolveProblem {
    let phi = ExpansionVector::from_coeffs(1, 4, 1.0, vec![0.5, 0.1, -0.2, 0.0, 0.05]).unwrap();
    SolveProblem::lifted(
        DistributionCoefficientSet::gaussian_bump(1, 16, 1.0, 1.0, 0.3),
        SmallJumpFamily::ClampedLinear {
            phi: phi.clone(),
            slope: 0.8,
            intercept: 0.2,
            clamp: 1.0,
        },
        LargeJumpFamily::TanhModulated { phi },
        ExpansionVector::delta0(1, 16, -1.0),
        vec![0.3],
        model(large_rate),
        1.0,
        steps,
    )
    .unwrap()
}

fn synthetic(drift: SyntheticDrift, large_scale: f64, large_rate: f64) -> SolveProblem {
    let spec = SyntheticSpec {
        dim: 1,
        drift,
        diffusion_scale: 0.0,
        small_scale: 0.0,
        large_scale,
    };
    SolveProblem::synthetic(spec, vec![1.0], model(large_rate), 1.0, 64).unwrap()
}

#[test]
fn fnv_reference_values() {
    assert_eq!(fnv1a_hex(b""), "cbf29ce484222325");
    assert_eq!(fnv1a_hex(b"a"), "af63dc4c8601ec8c");
}

#[test]
fn inline_matches_euler_for_constant_drift() {
    let p = synthetic(SyntheticDrift::Constant { value: vec![0.7] }, 0.0, 0.0);
    let noise = p.sample_noise(1, 0).unwrap();
    let a = inline_solve(&p, &noise).unwrap();
    let b = solve_reduced_euler(&p, &noise).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn inline_is_second_order_without_noise() {
    // u' = -u, u(0) = 1
    let spec = SyntheticSpec {
        dim: 1,
        drift: SyntheticDrift::Polynomial {
            coefficients: vec![0.0, -1.0],
        },
        diffusion_scale: 0.0,
        small_scale: 0.0,
        large_scale: 0.0,
    };
    let p = SolveProblem::synthetic(spec, vec![1.0], LevyModel::brownian(1).unwrap(), 1.0, 100).unwrap();
    let path = inline_solve(&p, &p.sample_noise(0, 0).unwrap()).unwrap();
    assert!((path.value(100)[0] - (-1.0f64).exp()).abs() < 1e-5);
}

#[test]
fn growth_examples() {
    let zero = synthetic(SyntheticDrift::Zero, 0.0, 0.0);
    let report = check_growth_bound(&zero, &GrowthOptions::default()).unwrap();
    assert_eq!(report.scalars["d"], 0.0);
    assert!(report.pass);

    let cubic = synthetic(
        SyntheticDrift::Polynomial {
            coefficients: vec![0.0, 0.0, 0.0, 1.0],
        },
        0.0,
        0.0,
    );
    let report = check_growth_bound(&cubic, &GrowthOptions::default()).unwrap();
    assert!(!report.pass);
    assert!(report.acceptable());

    let p = lifted(0.0, 64);
    let report = check_growth_bound(&p, &GrowthOptions::default()).unwrap();
    assert!(report.pass, "{report:?}");
    let (hyp, _) = check_hypotheses(&p, &[2.0], &HypothesisOptions::default()).unwrap();
    assert!(report.scalars["d"] <= hyp.growth_bound);
}

#[test]
fn uniqueness_examples() {
    let c = synthetic(SyntheticDrift::Constant { value: vec![-0.4] }, 0.0, 0.0);
    let options = UniquenessOptions {
        replications: 4,
        steps: vec![16, 64],
        ..UniquenessOptions::default()
    };
    let report = check_uniqueness(&c, &options).unwrap();
    assert_eq!(report.series["mean_sup_distance"], vec![0.0, 0.0]);
    assert!(report.pass);

    let p = lifted(0.0, 64);
    let options = UniquenessOptions {
        replications: 8,
        steps: vec![64, 256, 1024],
        tolerance: 1e-2,
        ..UniquenessOptions::default()
    };
    let report = check_uniqueness(&p, &options).unwrap();
    assert!(report.pass, "{report:?}");

    let control = UniquenessOptions {
        inline_seed: Some(99),
        ..options
    };
    let report = check_uniqueness(&p, &control).unwrap();
    assert!(report.negative_control);
    assert!(!report.pass);

    let cubic = crate::presets::cubic_preset(64).unwrap();
    let options = UniquenessOptions {
        replications: 2,
        steps: vec![64, 256],
        ..UniquenessOptions::default()
    };
    let report = check_uniqueness(&cubic, &options).unwrap();
    assert!(report.negative_control && !report.pass);
}

#[test]
fn picard_decay_examples() {
    let zero = synthetic(SyntheticDrift::Zero, 0.0, 0.0);
    let traces = picard_traces(&zero, 0, 4, 20, 0.0).unwrap();
    let report = check_picard_decay(&traces, 1.0, 5.0);
    assert!(report.pass);
    assert!(report.series["mean_e_sq"].iter().all(|&v| v == 0.0));

    let p = lifted(0.0, 128);
    let (hyp, _) = check_hypotheses(&p, &[2.0], &HypothesisOptions::default()).unwrap();
    let c_tilde = picard_constant(&hyp, 1.0);
    let traces = picard_traces(&p, 0, 16, 20, 0.0).unwrap();
    let report = check_picard_decay(&traces, 1.0, c_tilde);
    assert!(report.pass, "{report:?}");
    assert!(report.scalars["first_k_below_tol"] <= 20.0);

    let single = check_picard_decay(&traces[..1], 1.0, c_tilde);
    assert!(single.report_only && single.acceptable());
    let empty = check_picard_decay(&[PicardTrace { iterations: 0, distances: vec![], converged: false }], 1.0, 1.0);
    assert!(empty.pass);
}

#[test]
fn interlace_examples() {
    let shift = synthetic(SyntheticDrift::Zero, 1.0, 2.0);
    let report = check_interlace(&shift, 3, 8, 5.0).unwrap();
    assert!(report.pass);
    assert_eq!(report.scalars["max_ratio"], 0.0);
    assert!(report.scalars["large_jumps"] > 0.0);

    let p = lifted(2.0, 256);
    let report = check_interlace(&p, 0, 8, 5.0).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn truncation_examples() {
    let p = lifted(0.0, 64);
    let (hyp, _) = check_hypotheses(&p, &[2.0], &HypothesisOptions::default()).unwrap();
    let constants = TruncationConstants::from_report(&hyp, 2.0).unwrap();
    let options = TruncationOptions {
        pairs: 10_000,
        samples: 1024,
        ..TruncationOptions::default()
    };
    let report = check_truncation(&p, &constants, &options).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(report.scalars["inside_mismatches"], 0.0);
    assert!(TruncationConstants::from_report(&hyp, 3.0).is_err());
}

#[test]
fn reports_are_reproducible() {
    let p = lifted(2.0, 64);
    let a = check_interlace(&p, 5, 4, 5.0).unwrap();
    let b = check_interlace(&p, 5, 4, 5.0).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = check_interlace(&p, 6, 4, 5.0).unwrap();
    assert_ne!(a.inputs_digest, c.inputs_digest);
}
