//! `simulate` and `verify`: solve replications, run checks, write outputs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use lifted_sde::engine::{
    interlace_solve, picard_solve, solve_local, solve_reduced_euler, ExplosionInfo, PathRecord, PathState, PicardTrace,
    SolveProblem,
};
use lifted_sde::lift::HypothesisOptions;
use lifted_sde::verify::{
    check_growth_bound, check_hypotheses, check_interlace, check_picard_decay, check_truncation, check_uniqueness,
    fnv1a_hex, picard_constant, picard_traces, CheckReport, TruncationConstants, UniquenessOptions,
};

use crate::config::{CheckKind, RunConfig, Solver};
use crate::CliError;

#[derive(Serialize)]
struct ReplicationSummary {
    replication: u64,
    path: String,
    final_state: Option<Vec<f64>>,
    large_jumps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    picard: Option<PicardTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    explosion: Option<ExplosionInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolved_until: Option<f64>,
}

#[derive(Serialize)]
struct CheckSummary {
    id: String,
    pass: bool,
    negative_control: bool,
    report_only: bool,
    scalars: std::collections::BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Summary {
    config_digest: String,
    solver: Solver,
    seed: u64,
    replications: u64,
    horizon: f64,
    steps: usize,
    field: String,
    runs: Vec<ReplicationSummary>,
    checks: Vec<CheckSummary>,
}

/// What a command produced; the exit status follows from `checks_ok`.
pub struct RunOutcome {
    pub checks_ok: bool,
    pub reports: Vec<CheckReport>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn solve(config: &RunConfig, prob: &SolveProblem, replication: u64) -> Result<(PathRecord, Option<PicardTrace>), CliError> {
    let context = |e: lifted_sde::Error| CliError::Solver {
        replication,
        source: e,
    };
    let noise = prob.sample_noise(config.seed, replication).map_err(context)?;
    let opts = &config.solver_options;
    Ok(match config.solver {
        Solver::Euler => (solve_reduced_euler(prob, &noise).map_err(context)?, None),
        Solver::Picard => {
            let (path, trace) = picard_solve(prob, &noise, opts.k_max, opts.tol).map_err(context)?;
            (path, Some(trace))
        }
        Solver::Interlace => (interlace_solve(prob, &noise).map_err(context)?, None),
        Solver::Local => (solve_local(prob, &noise, &opts.m_levels).map_err(context)?, None),
    })
}

fn run_check(kind: CheckKind, config: &RunConfig, prob: &SolveProblem) -> Result<CheckReport, CliError> {
    let opts = &config.check_options;
    let seed = config.seed;
    let hypothesis_options = HypothesisOptions {
        samples: opts.hypotheses.samples,
        seed,
        global_radius: None,
    };
    let context = |e: lifted_sde::Error| CliError::Check {
        check: kind.name().to_string(),
        source: e,
    };
    let report = match kind {
        CheckKind::Hypotheses => check_hypotheses(prob, &opts.hypotheses.radii, &hypothesis_options).map_err(context)?.1,
        CheckKind::Growth => {
            let growth = lifted_sde::verify::GrowthOptions {
                seed,
                ..opts.growth.clone()
            };
            check_growth_bound(prob, &growth).map_err(context)?
        }
        CheckKind::Uniqueness | CheckKind::UniquenessControl => {
            let mut u = UniquenessOptions {
                seed,
                ..opts.uniqueness.clone()
            };
            if kind == CheckKind::UniquenessControl {
                u.inline_seed = Some(seed.wrapping_add(1));
            }
            let mut report = check_uniqueness(prob, &u).map_err(context)?;
            report.id = kind.name().to_string();
            report
        }
        CheckKind::PicardDecay => {
            let (hyp, _) = check_hypotheses(prob, &opts.hypotheses.radii, &hypothesis_options).map_err(context)?;
            let c_tilde = picard_constant(&hyp, prob.horizon());
            let p = &opts.picard_decay;
            let traces = picard_traces(prob, seed, p.replications, p.k_max, 0.0).map_err(context)?;
            check_picard_decay(&traces, prob.horizon(), c_tilde)
        }
        CheckKind::Interlace => {
            let i = &opts.interlace;
            check_interlace(prob, seed, i.replications, i.tolerance).map_err(context)?
        }
        CheckKind::Truncation => {
            let radius = opts.truncation.radius;
            let (hyp, _) = check_hypotheses(prob, &[radius], &hypothesis_options).map_err(context)?;
            let constants = TruncationConstants::from_report(&hyp, radius).map_err(context)?;
            let t = lifted_sde::verify::TruncationOptions {
                seed,
                ..opts.truncation.clone()
            };
            check_truncation(prob, &constants, &t).map_err(context)?
        }
    };
    Ok(report)
}

fn run_checks(config: &RunConfig, prob: &SolveProblem, out: &Path) -> Result<Vec<CheckReport>, CliError> {
    if config.checks.is_empty() {
        return Ok(Vec::new());
    }
    let dir = out.join("reports");
    create_dir(&dir)?;
    let mut reports = Vec::with_capacity(config.checks.len());
    for &kind in &config.checks {
        let report = run_check(kind, config, prob)?;
        let json = serde_json::to_vec_pretty(&report).expect("reports serialize");
        write(&dir.join(format!("{}.json", kind.name())), &json)?;
        reports.push(report);
    }
    Ok(reports)
}

fn summarize(reports: &[CheckReport]) -> Vec<CheckSummary> {
    reports
        .iter()
        .map(|r| CheckSummary {
            id: r.id.clone(),
            pass: r.pass,
            negative_control: r.negative_control,
            report_only: r.report_only,
            scalars: r.scalars.clone(),
        })
        .collect()
}

fn digest(config: &RunConfig) -> String {
    fnv1a_hex(serde_json::to_string(config).expect("config serializes").as_bytes())
}

/// Solve every replication and write `paths/`, `summary.json` and, for
/// configured checks, `reports/`.
pub fn simulate(config: &RunConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let prob = config.problem()?;
    create_dir(out)?;
    let paths_dir = out.join("paths");
    create_dir(&paths_dir)?;

    // workers solve; this thread alone writes, in replication order
    let solved: Vec<(PathRecord, Option<PicardTrace>)> = (0..config.replications)
        .into_par_iter()
        .map(|r| solve(config, &prob, r))
        .collect::<Result<_, _>>()?;
    let mut runs = Vec::with_capacity(solved.len());
    for (r, (path, picard)) in solved.into_iter().enumerate() {
        let name = format!("replication_{r:05}.csv");
        let file: PathBuf = paths_dir.join(&name);
        let mut bytes = Vec::new();
        path.write_csv(&mut bytes).expect("in-memory write");
        write(&file, &bytes)?;
        runs.push(ReplicationSummary {
            replication: r as u64,
            path: format!("paths/{name}"),
            final_state: match path.final_state() {
                PathState::Finite(v) => Some(v.to_vec()),
                PathState::Infinity => None,
            },
            large_jumps: path.large_jumps().len(),
            picard,
            explosion: path.explosion.clone(),
            resolved_until: path.resolved_until,
        });
    }

    let reports = run_checks(config, &prob, out)?;
    let summary = Summary {
        config_digest: digest(config),
        solver: config.solver,
        seed: config.seed,
        replications: config.replications,
        horizon: prob.horizon(),
        steps: prob.steps(),
        field: prob.field().describe(),
        runs,
        checks: summarize(&reports),
    };
    write(&out.join("summary.json"), &serde_json::to_vec_pretty(&summary).expect("summary serializes"))?;
    Ok(RunOutcome {
        checks_ok: reports.iter().all(CheckReport::acceptable),
        reports,
    })
}

/// Run the configured checks only.
pub fn verify(config: &RunConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let prob = config.problem()?;
    if config.checks.is_empty() {
        return Err(CliError::Invalid {
            field: "checks".into(),
            message: "nothing to verify".into(),
        });
    }
    create_dir(out)?;
    let reports = run_checks(config, &prob, out)?;
    let summary = serde_json::json!({
        "config_digest": digest(config),
        "seed": config.seed,
        "checks": summarize(&reports),
    });
    write(&out.join("summary.json"), &serde_json::to_vec_pretty(&summary).expect("summary serializes"))?;
    Ok(RunOutcome {
        checks_ok: reports.iter().all(CheckReport::acceptable),
        reports,
    })
}
