//! Executes scenario checks and assembles the run report.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tauber_core::convergence::{
    bounded_laplace_test, continuity_backward, continuity_forward, f_convergence_test, psi_convergence_test,
    remark_sufficient_condition_test, right_equicontinuity_test, vague_test,
};
use tauber_core::laplace::{quadrature_transform, Backend, TransformEvaluator};
use tauber_core::tauberian::{
    asymptotic_ratio_report, condition_ratio_report, condition_window_report, karamata_pipeline, rv_f_report,
    rv_psi_report, slow_variation_report,
};
use tauber_core::verdict::num;
use tauber_core::{SignedMeasure, Status, VerdictReport, Witness};

use crate::scenario::{CheckKind, CheckSpec, Scenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Status>,
    /// The verdict after applying `expect`; drives the exit code.
    pub outcome: Status,
    #[serde(default)]
    pub errored: bool,
    pub report: VerdictReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub version: String,
    /// The scenario as run, overrides applied.
    pub input: Scenario,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl RunReport {
    /// 0 when every check passes, 1 when any fails, 2 when any errored or
    /// was inconclusive.
    pub fn exit_code(&self) -> i32 {
        if self.summary.error > 0 || self.summary.inconclusive > 0 {
            2
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub timings: bool,
}

pub fn run(scenario: &Scenario, opts: RunOptions) -> RunReport {
    let checks: Vec<CheckResult> = scenario.checks.par_iter().map(|c| run_check(scenario, c, opts)).collect();
    let mut summary = Summary::default();
    for c in &checks {
        if c.errored {
            summary.error += 1;
        } else {
            match c.outcome {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Inconclusive => summary.inconclusive += 1,
            }
        }
    }
    RunReport { scenario: scenario.name.clone(), version: VERSION.to_string(), input: scenario.clone(), checks, summary }
}

fn has_error(r: &VerdictReport) -> bool {
    r.details.contains_key("error") || r.children.iter().any(has_error)
}

fn run_check(scenario: &Scenario, spec: &CheckSpec, opts: RunOptions) -> CheckResult {
    let start = Instant::now();
    let report = evaluate(scenario, &spec.kind);
    let elapsed_ms = opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    let errored = has_error(&report) && report.status == Status::Inconclusive;
    let outcome = match spec.expect {
        _ if errored => Status::Inconclusive,
        Some(e) if e == report.status => Status::Pass,
        Some(_) => Status::Fail,
        None => report.status,
    };
    CheckResult { name: spec.label(), kind: spec.kind.name().to_string(), expect: spec.expect, outcome, errored, report, elapsed_ms }
}

fn evaluate(scenario: &Scenario, kind: &CheckKind) -> VerdictReport {
    let cfg = scenario.config.convergence();
    let tcfg = &scenario.config.tauberian;
    let lambdas = |l: &Option<Vec<f64>>| l.clone().unwrap_or_else(|| cfg.lambda_grid.clone());
    if let Some(name) = kind.sequence() {
        let seq = match scenario.sequence(name) {
            Ok(s) => s,
            Err(e) => return VerdictReport::errored(kind.name(), &e),
        };
        return match kind {
            CheckKind::Vague { centres, .. } => vague_test(&seq, centres, &cfg),
            CheckKind::PsiConvergence { lambdas: l, .. } => psi_convergence_test(&seq, &lambdas(l), &cfg),
            CheckKind::BoundedLaplace { lambdas: l, .. } => bounded_laplace_test(&seq, &lambdas(l), &cfg),
            CheckKind::RightEquicontinuity { x, .. } => right_equicontinuity_test(&seq, *x, &cfg),
            CheckKind::FConvergence { points, .. } => f_convergence_test(&seq, points, &cfg),
            CheckKind::ContinuityForward { x, skip_equicontinuity, .. } => {
                continuity_forward(&seq, *x, &cfg, *skip_equicontinuity)
            }
            CheckKind::ContinuityBackward { lambdas: l, points, .. } => {
                continuity_backward(&seq, &lambdas(l), points, &cfg)
            }
            CheckKind::RemarkSufficientCondition { delta, lambdas: l, .. } => {
                remark_sufficient_condition_test(&seq, *delta, &lambdas(l), &cfg)
            }
            _ => unreachable!("sequence checks are matched above"),
        };
    }
    let Some(mu) = kind.measure().and_then(|m| scenario.measures.get(m)) else {
        return VerdictReport::errored(kind.name(), &"unknown measure");
    };
    match kind {
        CheckKind::TransformTable { lambdas, .. } => transform_table(mu, lambdas),
        CheckKind::TotalVariation { restrict, .. } => total_variation(mu, *restrict),
        CheckKind::RvIndexPsi { .. } => rv_psi_report(mu, tcfg),
        CheckKind::RvIndexF { .. } => rv_f_report(mu, tcfg),
        CheckKind::ConditionRatio { .. } => condition_ratio_report(mu, tcfg),
        CheckKind::ConditionWindow { x, .. } => condition_window_report(mu, *x, tcfg),
        CheckKind::AsymptoticRatio { rho, .. } => asymptotic_ratio_report(mu, *rho, tcfg),
        CheckKind::SlowVariation { rho, tol, .. } => slow_variation_report(mu, *rho, *tol, tcfg),
        CheckKind::KaramataPipeline { direction, .. } => karamata_pipeline(mu, *direction, tcfg),
        _ => unreachable!("measure checks only"),
    }
}

/// `Ψ_μ` and `Ψ_{|μ|}` on a grid. The closed form is cross-checked against
/// quadrature; the check passes when the two agree to `max(1e-8·|Ψ|, 1e-10)`.
fn transform_table(mu: &SignedMeasure, lambdas: &[f64]) -> VerdictReport {
    let closed = TransformEvaluator::new(mu.clone(), Backend::ClosedForm);
    let (rel, abs) = match Backend::quadrature() {
        Backend::Quadrature { rel_tol, abs_tol } => (rel_tol, abs_tol),
        Backend::ClosedForm => unreachable!(),
    };
    let mut status = Status::Pass;
    let mut r = VerdictReport::new("transform_table", Status::Pass);
    let mut worst = 0.0f64;
    for &lam in lambdas {
        let row = closed
            .psi(lam)
            .and_then(|c| quadrature_transform(mu, lam, rel, abs).map(|(q, _)| (c, q)))
            .and_then(|(c, q)| closed.psi_abs(lam).map(|a| (c, q, a)));
        match row {
            Ok((c, q, a)) => {
                let diff = (c - q).abs();
                let tol = (1e-8 * c.abs()).max(1e-10);
                status = status.combine(Status::at_most(diff, tol));
                worst = worst.max(diff / tol);
                for (route, v) in [("closed_form", c), ("quadrature", q), ("abs_closed_form", a)] {
                    let mut w = Witness::new(&[("lambda", lam)], v);
                    w.params.insert("route".into(), route.into());
                    r.witnesses.push(w);
                }
            }
            Err(e) => return VerdictReport::errored("transform_table", &e).setting("lambda", lam),
        }
    }
    r.status = status;
    r.detail("worst_tolerance_fraction", num(worst))
}

fn total_variation(mu: &SignedMeasure, restrict: Option<f64>) -> VerdictReport {
    let m = match restrict {
        Some(t) => mu.restrict(t),
        None => mu.clone(),
    };
    match m.total_variation() {
        Ok(tv) => {
            let norm = tv.eval_interval(0.0, None, true).to_f64();
            let mut r = VerdictReport::new("total_variation", Status::Pass).detail("norm", num(norm));
            if let Some(t) = restrict {
                r = r.setting("restrict", t);
            }
            r.witnesses.push(Witness::new(&[("restrict", restrict.unwrap_or(f64::INFINITY))], norm));
            r
        }
        Err(e) => VerdictReport::errored("total_variation", &e),
    }
}
