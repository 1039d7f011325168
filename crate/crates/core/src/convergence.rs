//! Verdicts for sequences of measures: vague convergence, convergence of
//! transforms and distribution functions, uniform transform bounds,
//! right-equicontinuity, and both directions of the continuity theorem.
//!
//! Limits over `n` are replaced by statistics over the tail window of a
//! geometric index grid (see [`crate::verdict`]).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::laplace::psi;
use crate::measure::SignedMeasure;
use crate::verdict::{index_grid, num, ols_slope, tail_window, Status, TailEstimate, VerdictReport, Witness};

pub type Rule = Arc<dyn Fn(u64) -> Result<SignedMeasure> + Send + Sync>;

/// `n ↦ μ_n` together with the declared limit `μ`.
#[derive(Clone)]
pub struct MeasureSequence {
    label: String,
    rule: Rule,
    limit: SignedMeasure,
    exceptional_set: Vec<f64>,
}

impl fmt::Debug for MeasureSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSequence")
            .field("label", &self.label)
            .field("limit", &self.limit)
            .field("exceptional_set", &self.exceptional_set)
            .finish()
    }
}

impl MeasureSequence {
    pub fn new(
        label: impl Into<String>,
        rule: impl Fn(u64) -> Result<SignedMeasure> + Send + Sync + 'static,
        limit: SignedMeasure,
    ) -> Self {
        MeasureSequence { label: label.into(), rule: Arc::new(rule), limit, exceptional_set: Vec::new() }
    }

    pub fn constant(label: impl Into<String>, mu: SignedMeasure) -> Self {
        let m = mu.clone();
        MeasureSequence::new(label, move |_| Ok(m.clone()), mu)
    }

    pub fn with_exceptional_set(mut self, points: Vec<f64>) -> Self {
        self.exceptional_set = points;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn limit(&self) -> &SignedMeasure {
        &self.limit
    }

    pub fn exceptional_set(&self) -> &[f64] {
        &self.exceptional_set
    }

    pub fn term(&self, n: u64) -> Result<SignedMeasure> {
        if n == 0 {
            return Err(Error::InvalidArgument("sequence indices start at 1".into()));
        }
        (self.rule)(n)
    }

    fn is_exceptional(&self, x: f64) -> bool {
        self.exceptional_set.iter().any(|&e| (e - x).abs() <= 1e-12 * e.abs().max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub n_max: u64,
    pub tol: f64,
    pub eps: f64,
    pub cap: f64,
    pub growth_tol: f64,
    /// Use the Richardson estimate of the limit alongside the raw tail.
    pub extrapolate: bool,
    pub lambda_grid: Vec<f64>,
    /// Right-equicontinuity radii; defaults to `10^{-k/2}` down to `10/n_max`.
    pub h_grid: Option<Vec<f64>>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            n_max: 10_000,
            tol: 1e-3,
            eps: 0.05,
            cap: 1e6,
            growth_tol: 0.05,
            extrapolate: true,
            lambda_grid: vec![0.5, 1.0, 2.0],
            h_grid: None,
        }
    }
}

impl ConvergenceConfig {
    pub fn tail(&self) -> Vec<u64> {
        tail_window(&index_grid(self.n_max))
    }

    pub fn h_grid(&self) -> Vec<f64> {
        if let Some(h) = &self.h_grid {
            return h.clone();
        }
        let floor = 10.0 / self.n_max as f64;
        let mut out = Vec::new();
        for k in 1..=40 {
            let h = 10f64.powf(-(k as f64) / 2.0);
            if h < floor * (1.0 - 1e-12) {
                break;
            }
            out.push(h);
        }
        if out.is_empty() {
            out.push(0.1);
        }
        out
    }

    fn echo(&self, r: VerdictReport) -> VerdictReport {
        let tail = self.tail();
        r.setting("n_max", self.n_max)
            .setting("tail_n_from", tail[0])
            .setting("tail_points", tail.len())
            .setting("extrapolate", self.extrapolate)
    }
}

fn tail_terms(seq: &MeasureSequence, tail: &[u64]) -> Result<Vec<(u64, SignedMeasure)>> {
    tail.par_iter().map(|&n| seq.term(n).map(|m| (n, m))).collect()
}

/// `∫ f dμ` for the hat of height 1 centred at `c` with half-width `w`.
pub fn hat_integral(mu: &SignedMeasure, c: f64, w: f64) -> Result<f64> {
    let left = mu.integrate_affine((c - w).max(0.0), c, 1.0 - c / w, 1.0 / w, true)?;
    let right = mu.integrate_affine(c, c + w, 1.0 + c / w, -1.0 / w, false)?;
    Ok(left + right)
}

/// Limit check for one scalar family `v(n) → target`.
fn limit_row(est: &TailEstimate, target: f64, tol: f64, extrapolate: bool, params: &[(&str, f64)]) -> (Status, Witness, f64) {
    let stat = est.deviation(target, extrapolate);
    let mut p: Vec<(&str, f64)> = params.to_vec();
    p.push(("n", est.worst_index as f64));
    (Status::at_most(stat, tol), Witness::new(&p, est.raw_deviation), stat)
}

fn errored(check: &str, e: Error) -> VerdictReport {
    VerdictReport::errored(check, &e)
}

/// Vague convergence tested against hat functions centred at `centres`.
pub fn vague_test(seq: &MeasureSequence, centres: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    const CHECK: &str = "vague";
    let mut cs: Vec<f64> = centres.to_vec();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    if cs.is_empty() || cs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return errored(CHECK, Error::InvalidArgument("hat centres must be finite and nonnegative".into()));
    }
    let spacing = cs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let width = if spacing.is_finite() { 0.5 * spacing } else { 0.5 };
    let tail = cfg.tail();
    let run = || -> Result<VerdictReport> {
        let terms = tail_terms(seq, &tail)?;
        let mut report = VerdictReport::new(CHECK, Status::Pass);
        let mut stats = Vec::new();
        for &c in &cs {
            let target = hat_integral(seq.limit(), c, width)?;
            let values = terms.iter().map(|(_, m)| hat_integral(m, c, width)).collect::<Result<Vec<_>>>()?;
            let est = TailEstimate::new(tail.clone(), values, target);
            let (status, witness, stat) = limit_row(&est, target, cfg.tol, cfg.extrapolate, &[("centre", c)]);
            report.status = report.status.combine(status);
            report.witnesses.push(witness);
            stats.push(json!({"centre": c, "statistic": num(stat), "tail": est.summary()}));
        }
        Ok(report.detail("hat_width", width).detail("per_centre", stats))
    };
    match run() {
        Ok(r) => cfg.echo(r).setting("tol", cfg.tol).setting("centres", cs.clone()),
        Err(e) => errored(CHECK, e),
    }
}

/// `Ψ_{μ_n}(λ) → Ψ_μ(λ)` for every `λ` in the grid.
pub fn psi_convergence_test(seq: &MeasureSequence, lambdas: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    const CHECK: &str = "psi_convergence";
    let tail = cfg.tail();
    let run = || -> Result<VerdictReport> {
        let terms = tail_terms(seq, &tail)?;
        let mut report = VerdictReport::new(CHECK, Status::Pass);
        let mut stats = Vec::new();
        for &lam in lambdas {
            let target = psi(seq.limit(), lam)?;
            let values = terms.iter().map(|(_, m)| psi(m, lam)).collect::<Result<Vec<_>>>()?;
            let est = TailEstimate::new(tail.clone(), values, target);
            let (status, witness, stat) = limit_row(&est, target, cfg.tol, cfg.extrapolate, &[("lambda", lam)]);
            report.status = report.status.combine(status);
            report.witnesses.push(witness);
            stats.push(json!({"lambda": lam, "limit": num(target), "statistic": num(stat), "tail": est.summary()}));
        }
        Ok(report.detail("per_lambda", stats))
    };
    match run() {
        Ok(r) => cfg.echo(r).setting("tol", cfg.tol).setting("lambda_grid", lambdas.to_vec()),
        Err(e) => errored(CHECK, e),
    }
}

/// `limsup_n Ψ_{|μ_n|}(λ) < ∞`: the tail maximum stays below `cap` and the
/// tail shows no growth (least-squares slope against `ln n`, relative to the
/// tail mean, at most `growth_tol`). The witness value is the limsup estimate.
pub fn bounded_laplace_test(seq: &MeasureSequence, lambdas: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    const CHECK: &str = "bounded_laplace";
    let tail = cfg.tail();
    let run = || -> Result<VerdictReport> {
        let terms = tail_terms(seq, &tail)?;
        let abs: Vec<SignedMeasure> = terms.iter().map(|(_, m)| m.total_variation()).collect::<Result<_>>()?;
        let log_n: Vec<f64> = tail.iter().map(|&n| (n as f64).ln()).collect();
        let mut report = VerdictReport::new(CHECK, Status::Pass);
        let mut stats = Vec::new();
        for &lam in lambdas {
            let values = abs.iter().map(|m| psi(m, lam)).collect::<Result<Vec<_>>>()?;
            let est = TailEstimate::new(tail.clone(), values.clone(), 0.0);
            let (argmax, max) = est.max_value();
            let mean = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
            let slope = ols_slope(&log_n, &values);
            let rel_slope = if mean > 0.0 { slope / mean } else { 0.0 };
            let limsup = match (cfg.extrapolate, est.extrapolated) {
                (true, Some(e)) => e,
                _ => max,
            };
            let status = Status::at_most(max, cfg.cap).combine(Status::at_most(rel_slope, cfg.growth_tol));
            report.status = report.status.combine(status);
            report.witnesses.push(Witness::new(&[("lambda", lam), ("n", argmax as f64)], limsup));
            stats.push(json!({
                "lambda": lam,
                "tail_max": num(max),
                "limsup_estimate": num(limsup),
                "relative_slope": num(rel_slope),
                "tail": est.summary(),
            }));
        }
        Ok(report.detail("per_lambda", stats))
    };
    match run() {
        Ok(r) => cfg
            .echo(r)
            .setting("cap", cfg.cap)
            .setting("growth_tol", cfg.growth_tol)
            .setting("lambda_grid", lambdas.to_vec()),
        Err(e) => errored(CHECK, e),
    }
}

/// Right-equicontinuity at `x`: some radius `h` in the grid such that
/// `max_{n in tail} |μ_n((x, x+δ])| ≤ ε` for every grid `δ ≤ h`.
pub fn right_equicontinuity_test(seq: &MeasureSequence, x: f64, cfg: &ConvergenceConfig) -> VerdictReport {
    const CHECK: &str = "right_equicontinuity";
    let mut hs = cfg.h_grid();
    hs.sort_by(|a, b| b.total_cmp(a));
    let tail = cfg.tail();
    let run = || -> Result<VerdictReport> {
        let terms = tail_terms(seq, &tail)?;
        let mut report = VerdictReport::new(CHECK, Status::Pass);
        let mut per_delta = Vec::new();
        for &d in &hs {
            let mut worst = (tail[0], 0.0f64);
            for (n, m) in &terms {
                let v = m.eval_interval(x, Some(x + d), false).to_f64().abs();
                if v > worst.1 {
                    worst = (*n, v);
                }
            }
            per_delta.push((d, worst.0, worst.1, Status::at_most(worst.1, cfg.eps)));
        }
        // Largest h whose whole suffix of the (decreasing) grid passes.
        let mut h_star = None;
        for (d, _, _, s) in per_delta.iter().rev() {
            if *s == Status::Pass {
                h_star = Some(*d);
            } else {
                break;
            }
        }
        report.status = match (h_star, per_delta.last()) {
            (Some(_), _) => Status::Pass,
            (None, Some(last)) => last.3,
            (None, None) => Status::Inconclusive,
        };
        for (d, n, v, _) in &per_delta {
            report.witnesses.push(Witness::new(&[("delta", *d), ("n", *n as f64)], *v));
        }
        Ok(report.detail("h_star", h_star.map(num).unwrap_or(serde_json::Value::Null)))
    };
    match run() {
        Ok(r) => cfg.echo(r).setting("x", x).setting("eps", cfg.eps).setting("h_grid", hs.clone()),
        Err(e) => errored(CHECK, e),
    }
}

/// `F_{μ_n}(x) → F_μ(x)` at every point of the grid outside the exceptional set.
pub fn f_convergence_test(seq: &MeasureSequence, points: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    let used: Vec<f64> = points.iter().copied().filter(|&p| !seq.is_exceptional(p)).collect();
    let skipped: Vec<f64> = points.iter().copied().filter(|&p| seq.is_exceptional(p)).collect();
    let mut r = f_convergence_at(seq, &used, cfg).note("grid-a.e.: points of the declared exceptional set are skipped");
    if !skipped.is_empty() {
        r = r.detail("skipped_points", skipped);
    }
    r
}

fn f_convergence_at(seq: &MeasureSequence, points: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    const CHECK: &str = "F_convergence";
    let tail = cfg.tail();
    let run = || -> Result<VerdictReport> {
        let terms = tail_terms(seq, &tail)?;
        let mut report = VerdictReport::new(CHECK, if points.is_empty() { Status::Inconclusive } else { Status::Pass });
        let mut stats = Vec::new();
        for &x in points {
            let target = seq.limit().distribution(x);
            let values: Vec<f64> = terms.iter().map(|(_, m)| m.distribution(x)).collect();
            let est = TailEstimate::new(tail.clone(), values, target);
            let (status, witness, stat) = limit_row(&est, target, cfg.tol, cfg.extrapolate, &[("x", x)]);
            report.status = report.status.combine(status);
            report.witnesses.push(witness);
            stats.push(json!({"x": x, "limit": num(target), "statistic": num(stat), "tail": est.summary()}));
        }
        Ok(report.detail("per_point", stats))
    };
    match run() {
        Ok(r) => cfg.echo(r).setting("tol", cfg.tol).setting("points", points.to_vec()),
        Err(e) => errored(CHECK, e),
    }
}

/// `x` carries no atom of `μ`.
pub fn continuity_point_test(mu: &SignedMeasure, x: f64) -> bool {
    !mu.has_atom_at(x)
}

fn continuity_point_report(mu: &SignedMeasure, x: f64) -> VerdictReport {
    let weight: f64 = mu.atoms().iter().filter(|a| a.location == x).map(|a| a.weight).sum();
    let status = if continuity_point_test(mu, x) { Status::Pass } else { Status::Fail };
    let mut r = VerdictReport::new("continuity_point", status).setting("x", x);
    r.witnesses.push(Witness::new(&[("x", x)], weight));
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    TheoremConfirmed,
    HypothesisFailConclusionFail,
    HypothesisFailConclusionPass,
    TheoremViolated,
    Inconclusive,
}

impl Outcome {
    fn classify(hypotheses: Status, conclusion: Status) -> Outcome {
        match (hypotheses, conclusion) {
            (Status::Pass, Status::Pass) => Outcome::TheoremConfirmed,
            (Status::Pass, Status::Fail) => Outcome::TheoremViolated,
            (Status::Fail, Status::Pass) => Outcome::HypothesisFailConclusionPass,
            (Status::Fail, Status::Fail) => Outcome::HypothesisFailConclusionFail,
            _ => Outcome::Inconclusive,
        }
    }

    /// Only a confirmed violation of the implication fails the check.
    fn status(self) -> Status {
        match self {
            Outcome::TheoremViolated => Status::Fail,
            Outcome::Inconclusive => Status::Inconclusive,
            _ => Status::Pass,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::TheoremConfirmed => "theorem_confirmed",
            Outcome::HypothesisFailConclusionFail => "hypothesis_fail_conclusion_fail",
            Outcome::HypothesisFailConclusionPass => "hypothesis_fail_conclusion_pass",
            Outcome::TheoremViolated => "theorem_violated",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

fn implication_report(check: &str, hypotheses: Vec<VerdictReport>, conclusion: VerdictReport) -> VerdictReport {
    let hyp_status = Status::all(hypotheses.iter().map(|h| h.status));
    let outcome = Outcome::classify(hyp_status, conclusion.status);
    let hyp_map: serde_json::Map<String, serde_json::Value> =
        hypotheses.iter().map(|h| (h.check.clone(), h.status.as_str().into())).collect();
    let mut r = VerdictReport::new(check, outcome.status())
        .detail("outcome", outcome.as_str())
        .detail("hypotheses", hyp_map)
        .detail("conclusion", json!({"check": conclusion.check, "status": conclusion.status.as_str()}));
    r.children = hypotheses;
    r.children.push(conclusion);
    r
}

/// Forward direction at `x`: transform convergence, bounded transforms of
/// `|μ_n|`, `x` a continuity point, right-equicontinuity at `x`, then the
/// conclusion `F_{μ_n}(x) → F_μ(x)`, which is evaluated even when a
/// hypothesis fails. Right-equicontinuity may be skipped for nonnegative
/// sequences, where it is not needed.
pub fn continuity_forward(seq: &MeasureSequence, x: f64, cfg: &ConvergenceConfig, skip_equicontinuity: bool) -> VerdictReport {
    let mut hyps = vec![
        psi_convergence_test(seq, &cfg.lambda_grid, cfg),
        bounded_laplace_test(seq, &cfg.lambda_grid, cfg),
        continuity_point_report(seq.limit(), x),
    ];
    let mut notes = Vec::new();
    let nonnegative = || -> Result<bool> {
        for (_, m) in tail_terms(seq, &cfg.tail())? {
            if !m.is_nonnegative()? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let skipped = skip_equicontinuity && matches!(nonnegative(), Ok(true));
    if skipped {
        notes.push("right-equicontinuity skipped: the sequence is nonnegative on the tail".to_string());
    } else {
        if skip_equicontinuity {
            notes.push("skip requested but the sequence is not nonnegative; right-equicontinuity evaluated".to_string());
        }
        hyps.push(right_equicontinuity_test(seq, x, cfg));
    }
    let conclusion = f_convergence_at(seq, &[x], cfg);
    let mut r = implication_report("continuity_forward", hyps, conclusion)
        .setting("x", x)
        .setting("skip_equicontinuity", skipped);
    r.notes.extend(notes);
    r
}

/// Backward direction: distribution functions converge on the grid (outside
/// the exceptional set) and `|μ_n|` has bounded transforms; the conclusion is
/// transform convergence on the `λ` grid.
pub fn continuity_backward(seq: &MeasureSequence, lambdas: &[f64], points: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    let hyps = vec![f_convergence_test(seq, points, cfg), bounded_laplace_test(seq, lambdas, cfg)];
    let conclusion = psi_convergence_test(seq, lambdas, cfg);
    implication_report("continuity_backward", hyps, conclusion)
}

/// `Ψ_{μ_n⁻}(λ) < δ Ψ_{μ_n⁺}(λ)` on the tail and grid (or with the parts
/// swapped). Whenever it holds, uniform boundedness of `Ψ_{|μ_n|}` follows from
/// that of `Ψ_{μ_n}`; the bounded-transform check is run alongside and the
/// consistency of the two verdicts is recorded.
pub fn remark_sufficient_condition_test(seq: &MeasureSequence, delta: f64, lambdas: &[f64], cfg: &ConvergenceConfig) -> VerdictReport {
    const CHECK: &str = "remark_sufficient_condition";
    if !(0.0..1.0).contains(&delta) {
        return errored(CHECK, Error::InvalidArgument(format!("δ = {delta} is not in [0, 1)")));
    }
    let tail = cfg.tail();
    let run = || -> Result<VerdictReport> {
        let terms = tail_terms(seq, &tail)?;
        // (ratio, n, λ) worst cases for both orientations
        let mut worst = [(0.0f64, 0u64, 0.0f64); 2];
        for (n, m) in &terms {
            let (pos, neg) = m.jordan()?;
            for &lam in lambdas {
                let (p, q) = (psi(&pos, lam)?, psi(&neg, lam)?);
                for (slot, (num_, den)) in [(q, p), (p, q)].into_iter().enumerate() {
                    let ratio = if num_ == 0.0 { 0.0 } else if den == 0.0 { f64::INFINITY } else { num_ / den };
                    if ratio > worst[slot].0 || worst[slot].1 == 0 {
                        worst[slot] = (ratio, *n, lam);
                    }
                }
            }
        }
        let pick = if worst[0].0 <= worst[1].0 { 0 } else { 1 };
        let (ratio, n, lam) = worst[pick];
        let status = if ratio == 0.0 {
            Status::Pass
        } else if delta > 0.0 && (ratio - delta).abs() < crate::verdict::BOUNDARY_BAND * delta {
            Status::Inconclusive
        } else if ratio < delta {
            Status::Pass
        } else {
            Status::Fail
        };
        let bounded = bounded_laplace_test(seq, lambdas, cfg);
        let consistent = status != Status::Pass || bounded.status == Status::Pass;
        let mut r = VerdictReport::new(CHECK, status)
            .detail("orientation", if pick == 0 { "negative_below_positive" } else { "positive_below_negative" })
            .detail("worst_ratio", num(ratio))
            .detail("implication_consistent", consistent);
        r.witnesses.push(Witness::new(&[("lambda", lam), ("n", n as f64)], ratio));
        r.children.push(bounded);
        Ok(r)
    };
    match run() {
        Ok(r) => cfg.echo(r).setting("delta", delta).setting("lambda_grid", lambdas.to_vec()),
        Err(e) => errored(CHECK, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::Expression;

    fn atom_pair(x: f64) -> MeasureSequence {
        MeasureSequence::new(
            "atom pair",
            move |n| SignedMeasure::from_atoms(&[(x, 1.0), (x + 1.0 / n as f64, -1.0)]),
            SignedMeasure::zero(),
        )
    }

    fn mollified() -> MeasureSequence {
        MeasureSequence::new(
            "mollified delta",
            |n| {
                let n = n as f64;
                SignedMeasure::with_density(1.0, Some(1.0 + 1.0 / n), Expression::constant(n))
            },
            SignedMeasure::dirac(1.0, 1.0).unwrap(),
        )
        .with_exceptional_set(vec![1.0])
    }

    fn cfg() -> ConvergenceConfig {
        ConvergenceConfig::default()
    }

    #[test]
    fn vague_examples() {
        let shifted = MeasureSequence::new(
            "shifted",
            |n| SignedMeasure::dirac(1.0 + 1.0 / n as f64, 1.0),
            SignedMeasure::dirac(1.0, 1.0).unwrap(),
        );
        assert_eq!(vague_test(&shifted, &[0.5, 1.0, 2.0], &cfg()).status, Status::Pass);
        assert_eq!(vague_test(&atom_pair(1.0), &[0.5, 1.0, 2.0], &cfg()).status, Status::Pass);
        let c = MeasureSequence::constant("c", SignedMeasure::from_atoms(&[(1.0, 2.0), (3.0, -1.0)]).unwrap());
        let zero_tol = ConvergenceConfig { tol: 0.0, ..cfg() };
        assert_eq!(vague_test(&c, &[1.0, 2.5], &zero_tol).status, Status::Pass);
    }

    #[test]
    fn vague_detects_escaping_mass() {
        let hop = MeasureSequence::new("hop", |n| SignedMeasure::dirac(1.0 + (n % 2) as f64, 1.0), SignedMeasure::dirac(1.0, 1.0).unwrap());
        let r = vague_test(&hop, &[1.0, 2.0], &cfg());
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn bounded_laplace_examples() {
        let r = bounded_laplace_test(&atom_pair(1.0), &[1.0], &cfg());
        assert_eq!(r.status, Status::Pass);
        assert!((r.witnesses[0].value - 2.0 * (-1.0f64).exp()).abs() < 1e-6);
        let growing = MeasureSequence::new("n δ_1", |n| SignedMeasure::dirac(1.0, n as f64), SignedMeasure::zero());
        let r = bounded_laplace_test(&growing, &[1.0], &cfg());
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witnesses[0].param("n"), Some(10_000.0));
    }

    #[test]
    fn right_equicontinuity_examples() {
        let r = right_equicontinuity_test(&atom_pair(1.0), 1.0, &cfg());
        assert_eq!(r.status, Status::Fail);
        for w in &r.witnesses {
            assert_eq!(w.value, 1.0);
            assert!(w.param("n").unwrap() >= 1.0 / w.param("delta").unwrap());
        }
        let bounded_density = MeasureSequence::new(
            "wiggle",
            |n| SignedMeasure::with_density(0.0, Some(5.0), Expression::constant(if n % 2 == 0 { 2.0 } else { -2.0 })),
            SignedMeasure::zero(),
        );
        let r = right_equicontinuity_test(&bounded_density, 1.0, &cfg());
        assert_eq!(r.status, Status::Pass);
        assert!(r.detail_f64("h_star").unwrap() < 0.025);
    }

    #[test]
    fn f_convergence_examples() {
        let r = f_convergence_test(&atom_pair(1.0), &[1.0], &cfg());
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witnesses[0].value, 1.0);
        let r = f_convergence_test(&mollified(), &[0.5, 1.0, 2.0], &cfg());
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.witnesses.len(), 2);
    }

    #[test]
    fn continuity_point_examples() {
        let m = SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -1.0)]).unwrap();
        assert!(!continuity_point_test(&m, 1.0));
        assert!(continuity_point_test(&m, 1.5));
        assert!(continuity_point_test(&SignedMeasure::lebesgue(), 1.0));
    }

    #[test]
    fn forward_counterexample_pattern() {
        let r = continuity_forward(&atom_pair(1.0), 1.0, &cfg(), false);
        let status = |name: &str| r.child(name).unwrap().status;
        assert_eq!(status("psi_convergence"), Status::Pass);
        assert_eq!(status("bounded_laplace"), Status::Pass);
        assert_eq!(status("continuity_point"), Status::Pass);
        assert_eq!(status("right_equicontinuity"), Status::Fail);
        assert_eq!(status("F_convergence"), Status::Fail);
        assert_eq!(r.details["outcome"], "hypothesis_fail_conclusion_fail");
    }

    #[test]
    fn forward_positive_case_with_and_without_skip() {
        for skip in [false, true] {
            let r = continuity_forward(&mollified(), 2.0, &cfg(), skip);
            assert_eq!(r.details["outcome"], "theorem_confirmed", "skip = {skip}");
            assert_eq!(r.child("right_equicontinuity").is_none(), skip);
        }
        // Skipping is refused for signed sequences.
        let r = continuity_forward(&atom_pair(1.0), 1.0, &cfg(), true);
        assert!(r.child("right_equicontinuity").is_some());
    }

    #[test]
    fn backward_examples() {
        let r = continuity_backward(&mollified(), &[0.5, 1.0, 2.0], &[0.5, 1.0, 2.0], &cfg());
        assert_eq!(r.details["outcome"], "theorem_confirmed");
        let r = continuity_backward(&atom_pair(1.0), &[0.5, 1.0, 2.0], &[1.0], &cfg());
        assert_eq!(r.details["outcome"], "hypothesis_fail_conclusion_pass");
        let c = MeasureSequence::constant("c", SignedMeasure::dirac(1.0, 1.0).unwrap());
        let r = continuity_backward(&c, &[1.0], &[0.5, 2.0], &ConvergenceConfig { tol: 0.0, ..cfg() });
        assert_eq!(r.details["outcome"], "theorem_confirmed");
    }

    #[test]
    fn remark_examples() {
        let lambdas = [0.01, 0.1, 1.0, 10.0];
        let quarter = MeasureSequence::constant("q", SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -0.25)]).unwrap());
        let r = remark_sufficient_condition_test(&quarter, 0.5, &lambdas, &cfg());
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.details["implication_consistent"], true);
        let pos = MeasureSequence::constant("p", SignedMeasure::lebesgue());
        assert_eq!(remark_sufficient_condition_test(&pos, 0.0, &lambdas, &cfg()).status, Status::Pass);
        let close = MeasureSequence::constant("c", SignedMeasure::from_atoms(&[(1.0, 1.0), (1.001, -1.0)]).unwrap());
        assert_eq!(remark_sufficient_condition_test(&close, 0.5, &lambdas, &cfg()).status, Status::Fail);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&continuity_forward(&atom_pair(1.0), 1.0, &cfg(), false)).unwrap();
        let b = serde_json::to_string(&continuity_forward(&atom_pair(1.0), 1.0, &cfg(), false)).unwrap();
        assert_eq!(a, b);
    }
}
