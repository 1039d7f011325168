//! Scenario files: named measures, sequence templates, and an ordered list of
//! checks, all in one JSON document.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tauber_core::convergence::{ConvergenceConfig, MeasureSequence};
use tauber_core::measure::{AtomSpec, MeasureSpec, OscSpec, SegmentSpec, TermSpec};
use tauber_core::tauberian::{rescaled_family, Direction, TauberianConfig};
use tauber_core::{Part, SignedMeasure, Status};

use crate::expr::{self, Ast};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Validation { field: field.into(), message: message.into() }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

/// A literal or an arithmetic expression in the sequence index `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Lit(f64),
    Expr { expr: String },
}

impl Default for Num {
    fn default() -> Self {
        Num::Lit(0.0)
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Lit(v)
    }
}

type Compiled = HashMap<String, Ast>;

impl Num {
    fn compile(&self, field: &str, out: &mut Compiled) -> Result<(), ScenarioError> {
        if let Num::Expr { expr } = self {
            let ast = expr::parse(expr).map_err(|e| ScenarioError::invalid(field, e.to_string()))?;
            out.insert(expr.clone(), ast);
        }
        Ok(())
    }

    fn eval(&self, n: f64, compiled: &Compiled) -> f64 {
        match self {
            Num::Lit(v) => *v,
            Num::Expr { expr } => compiled[expr].eval(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscTemplate {
    Cos(Num),
    Sin(Num),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermTemplate {
    pub c: Num,
    #[serde(default)]
    pub k: Num,
    #[serde(default)]
    pub a: Num,
    #[serde(default)]
    pub osc: Option<OscTemplate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomTemplate {
    pub x: Num,
    pub w: Num,
}

fn whole() -> Part {
    Part::Whole
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentTemplate {
    pub lo: Num,
    pub hi: Option<Num>,
    pub terms: Vec<TermTemplate>,
    #[serde(default = "whole")]
    pub part: Part,
    #[serde(default)]
    pub negated: bool,
}

/// The measure JSON form with `{"expr": ...}` allowed in any numeric field.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureTemplate {
    #[serde(default)]
    pub atoms: Vec<AtomTemplate>,
    #[serde(default)]
    pub segments: Vec<SegmentTemplate>,
}

impl MeasureTemplate {
    fn compile(&self, field: &str) -> Result<Compiled, ScenarioError> {
        let mut out = Compiled::new();
        for (i, a) in self.atoms.iter().enumerate() {
            a.x.compile(&format!("{field}.atoms[{i}].x"), &mut out)?;
            a.w.compile(&format!("{field}.atoms[{i}].w"), &mut out)?;
        }
        for (i, s) in self.segments.iter().enumerate() {
            let f = format!("{field}.segments[{i}]");
            s.lo.compile(&format!("{f}.lo"), &mut out)?;
            if let Some(hi) = &s.hi {
                hi.compile(&format!("{f}.hi"), &mut out)?;
            }
            for (j, t) in s.terms.iter().enumerate() {
                let g = format!("{f}.terms[{j}]");
                t.c.compile(&format!("{g}.c"), &mut out)?;
                t.k.compile(&format!("{g}.k"), &mut out)?;
                t.a.compile(&format!("{g}.a"), &mut out)?;
                if let Some(OscTemplate::Cos(b) | OscTemplate::Sin(b)) = &t.osc {
                    b.compile(&format!("{g}.osc"), &mut out)?;
                }
            }
        }
        Ok(out)
    }

    fn instantiate(&self, n: f64, compiled: &Compiled) -> tauber_core::Result<SignedMeasure> {
        let ev = |v: &Num| v.eval(n, compiled);
        let spec = MeasureSpec {
            atoms: self.atoms.iter().map(|a| AtomSpec { x: ev(&a.x), w: ev(&a.w) }).collect(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentSpec {
                    lo: ev(&s.lo),
                    hi: s.hi.as_ref().map(ev),
                    terms: s
                        .terms
                        .iter()
                        .map(|t| TermSpec {
                            c: ev(&t.c),
                            k: ev(&t.k),
                            a: ev(&t.a),
                            osc: t.osc.as_ref().map(|o| match o {
                                OscTemplate::Cos(b) => OscSpec::Cos(ev(b)),
                                OscTemplate::Sin(b) => OscSpec::Sin(ev(b)),
                            }),
                        })
                        .collect(),
                    part: s.part,
                    negated: s.negated,
                })
                .collect(),
        };
        SignedMeasure::try_from(spec)
    }
}

/// A declared limit: the name of a scenario measure or an inline measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LimitRef {
    Name(String),
    Measure(SignedMeasure),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescaledSpec {
    pub measure: String,
    /// `τ_n`; defaults to `1/n`.
    #[serde(default = "default_tau")]
    pub tau: Num,
    /// Index of the gamma-type limit; the declared limit is zero without it.
    #[serde(default)]
    pub rho: Option<f64>,
}

fn default_tau() -> Num {
    Num::Expr { expr: "1/n".into() }
}

/// Either a measure template in `n` with a declared limit, or the rescaled
/// family `μ(d(x/τ_n))/Ψ_μ(τ_n)` of a named measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<MeasureTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exceptional_set: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescaled: Option<RescaledSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckKind {
    Vague {
        sequence: String,
        centres: Vec<f64>,
    },
    PsiConvergence {
        sequence: String,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
    },
    BoundedLaplace {
        sequence: String,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
    },
    RightEquicontinuity {
        sequence: String,
        x: f64,
    },
    #[serde(rename = "F_convergence")]
    FConvergence {
        sequence: String,
        points: Vec<f64>,
    },
    ContinuityForward {
        sequence: String,
        x: f64,
        #[serde(default)]
        skip_equicontinuity: bool,
    },
    ContinuityBackward {
        sequence: String,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
        points: Vec<f64>,
    },
    RemarkSufficientCondition {
        sequence: String,
        delta: f64,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
    },
    TransformTable {
        measure: String,
        lambdas: Vec<f64>,
    },
    TotalVariation {
        measure: String,
        #[serde(default)]
        restrict: Option<f64>,
    },
    RvIndexPsi {
        measure: String,
    },
    #[serde(rename = "rv_index_F")]
    RvIndexF {
        measure: String,
    },
    ConditionRatio {
        measure: String,
    },
    ConditionWindow {
        measure: String,
        x: f64,
    },
    AsymptoticRatio {
        measure: String,
        rho: f64,
    },
    SlowVariation {
        measure: String,
        rho: f64,
        #[serde(default = "default_slow_tol")]
        tol: f64,
    },
    KaramataPipeline {
        measure: String,
        direction: Direction,
    },
}

fn default_slow_tol() -> f64 {
    0.01
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Vague { .. } => "vague",
            CheckKind::PsiConvergence { .. } => "psi_convergence",
            CheckKind::BoundedLaplace { .. } => "bounded_laplace",
            CheckKind::RightEquicontinuity { .. } => "right_equicontinuity",
            CheckKind::FConvergence { .. } => "F_convergence",
            CheckKind::ContinuityForward { .. } => "continuity_forward",
            CheckKind::ContinuityBackward { .. } => "continuity_backward",
            CheckKind::RemarkSufficientCondition { .. } => "remark_sufficient_condition",
            CheckKind::TransformTable { .. } => "transform_table",
            CheckKind::TotalVariation { .. } => "total_variation",
            CheckKind::RvIndexPsi { .. } => "rv_index_psi",
            CheckKind::RvIndexF { .. } => "rv_index_F",
            CheckKind::ConditionRatio { .. } => "condition_ratio",
            CheckKind::ConditionWindow { .. } => "condition_window",
            CheckKind::AsymptoticRatio { .. } => "asymptotic_ratio",
            CheckKind::SlowVariation { .. } => "slow_variation",
            CheckKind::KaramataPipeline { .. } => "karamata_pipeline",
        }
    }

    pub fn sequence(&self) -> Option<&str> {
        match self {
            CheckKind::Vague { sequence, .. }
            | CheckKind::PsiConvergence { sequence, .. }
            | CheckKind::BoundedLaplace { sequence, .. }
            | CheckKind::RightEquicontinuity { sequence, .. }
            | CheckKind::FConvergence { sequence, .. }
            | CheckKind::ContinuityForward { sequence, .. }
            | CheckKind::ContinuityBackward { sequence, .. }
            | CheckKind::RemarkSufficientCondition { sequence, .. } => Some(sequence),
            _ => None,
        }
    }

    pub fn measure(&self) -> Option<&str> {
        match self {
            CheckKind::TransformTable { measure, .. }
            | CheckKind::TotalVariation { measure, .. }
            | CheckKind::RvIndexPsi { measure }
            | CheckKind::RvIndexF { measure }
            | CheckKind::ConditionRatio { measure }
            | CheckKind::ConditionWindow { measure, .. }
            | CheckKind::AsymptoticRatio { measure, .. }
            | CheckKind::SlowVariation { measure, .. }
            | CheckKind::KaramataPipeline { measure, .. } => Some(measure),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Expected verdict; a check meeting its expectation counts as passed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Status>,
    #[serde(flatten)]
    pub kind: CheckKind,
}

impl CheckSpec {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }
}

/// Sequence settings at the top level, Tauberian settings nested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_max: u64,
    pub tol: f64,
    pub eps: f64,
    pub cap: f64,
    pub growth_tol: f64,
    pub extrapolate: bool,
    pub lambda_grid: Vec<f64>,
    pub h_grid: Option<Vec<f64>>,
    pub tauberian: TauberianConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let c = ConvergenceConfig::default();
        ScenarioConfig {
            n_max: c.n_max,
            tol: c.tol,
            eps: c.eps,
            cap: c.cap,
            growth_tol: c.growth_tol,
            extrapolate: c.extrapolate,
            lambda_grid: c.lambda_grid,
            h_grid: c.h_grid,
            tauberian: TauberianConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn convergence(&self) -> ConvergenceConfig {
        ConvergenceConfig {
            n_max: self.n_max,
            tol: self.tol,
            eps: self.eps,
            cap: self.cap,
            growth_tol: self.growth_tol,
            extrapolate: self.extrapolate,
            lambda_grid: self.lambda_grid.clone(),
            h_grid: self.h_grid.clone(),
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        validate_convergence(&self.convergence(), "config")?;
        let t = &self.tauberian;
        for (name, grid) in [
            ("tau_grid", &t.tau_grid),
            ("t_grid", &t.t_grid),
            ("lambda_grid", &t.lambda_grid),
            ("x_grid", &t.x_grid),
            ("h_grid", &t.h_grid),
            ("window_points", &t.window_points),
        ] {
            positive_grid(grid, &format!("config.tauberian.{name}"))?;
        }
        for (name, v) in [
            ("ratio_floor", t.ratio_floor),
            ("window_ceiling", t.window_ceiling),
            ("rho_tol", t.rho_tol),
            ("ratio_tol", t.ratio_tol),
        ] {
            positive(v, &format!("config.tauberian.{name}"))?;
        }
        if let Some(x) = t.integrated_tail_start {
            positive(x, "config.tauberian.integrated_tail_start")?;
        }
        validate_convergence(&t.rescale, "config.tauberian.rescale")
    }
}

fn positive(v: f64, field: &str) -> Result<(), ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn positive_grid(grid: &[f64], field: &str) -> Result<(), ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::invalid(field, "must not be empty"));
    }
    for (i, &v) in grid.iter().enumerate() {
        positive(v, &format!("{field}[{i}]"))?;
    }
    Ok(())
}

fn validate_convergence(c: &ConvergenceConfig, prefix: &str) -> Result<(), ScenarioError> {
    if c.n_max < 4 {
        return Err(ScenarioError::invalid(format!("{prefix}.n_max"), format!("must be at least 4, got {}", c.n_max)));
    }
    positive(c.tol, &format!("{prefix}.tol"))?;
    positive(c.eps, &format!("{prefix}.eps"))?;
    positive(c.cap, &format!("{prefix}.cap"))?;
    positive(c.growth_tol, &format!("{prefix}.growth_tol"))?;
    positive_grid(&c.lambda_grid, &format!("{prefix}.lambda_grid"))?;
    if let Some(h) = &c.h_grid {
        positive_grid(h, &format!("{prefix}.h_grid"))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub config: ScenarioConfig,
    #[serde(default)]
    pub measures: BTreeMap<String, SignedMeasure>,
    #[serde(default)]
    pub sequences: BTreeMap<String, SequenceSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.trim().is_empty() {
            return Err(ScenarioError::invalid("name", "must not be empty"));
        }
        self.config.validate()?;
        for name in self.sequences.keys() {
            self.sequence(name)?;
        }
        for (i, check) in self.checks.iter().enumerate() {
            let field = format!("checks[{i}]");
            if let Some(s) = check.kind.sequence() {
                if !self.sequences.contains_key(s) {
                    return Err(ScenarioError::invalid(format!("{field}.sequence"), format!("unknown sequence `{s}`")));
                }
            }
            if let Some(m) = check.kind.measure() {
                if !self.measures.contains_key(m) {
                    return Err(ScenarioError::invalid(format!("{field}.measure"), format!("unknown measure `{m}`")));
                }
            }
            check_params(&check.kind, &field)?;
        }
        Ok(())
    }

    fn measure_ref(&self, name: &str, field: &str) -> Result<SignedMeasure, ScenarioError> {
        self.measures
            .get(name)
            .cloned()
            .ok_or_else(|| ScenarioError::invalid(field, format!("unknown measure `{name}`")))
    }

    /// Builds the named sequence; its term at `n = 1` must be a valid measure.
    pub fn sequence(&self, name: &str) -> Result<MeasureSequence, ScenarioError> {
        let field = format!("sequences.{name}");
        let spec = self
            .sequences
            .get(name)
            .ok_or_else(|| ScenarioError::invalid(&field, format!("unknown sequence `{name}`")))?;
        let seq = match (&spec.template, &spec.rescaled) {
            (Some(t), None) => {
                let compiled = Arc::new(t.compile(&format!("{field}.template"))?);
                let limit = match &spec.limit {
                    None => SignedMeasure::zero(),
                    Some(LimitRef::Name(m)) => self.measure_ref(m, &format!("{field}.limit"))?,
                    Some(LimitRef::Measure(m)) => m.clone(),
                };
                let template = t.clone();
                MeasureSequence::new(name, move |n| template.instantiate(n as f64, &compiled), limit)
            }
            (None, Some(r)) => {
                if spec.limit.is_some() {
                    return Err(ScenarioError::invalid(format!("{field}.limit"), "the limit of a rescaled family is implied"));
                }
                let mu = self.measure_ref(&r.measure, &format!("{field}.rescaled.measure"))?;
                let mut compiled = Compiled::new();
                r.tau.compile(&format!("{field}.rescaled.tau"), &mut compiled)?;
                if let Some(rho) = r.rho {
                    if !(rho >= 0.0 && rho.is_finite()) {
                        return Err(ScenarioError::invalid(format!("{field}.rescaled.rho"), format!("must be nonnegative, got {rho}")));
                    }
                }
                let tau = r.tau.clone();
                rescaled_family(&mu, move |n| tau.eval(n as f64, &compiled), r.rho)
                    .map_err(|e| ScenarioError::invalid(format!("{field}.rescaled"), e.to_string()))?
            }
            _ => return Err(ScenarioError::invalid(&field, "needs exactly one of `template` or `rescaled`")),
        };
        seq.term(1).map_err(|e| ScenarioError::invalid(&field, format!("term n = 1: {e}")))?;
        Ok(seq.with_exceptional_set(spec.exceptional_set.clone()))
    }
}

fn check_params(kind: &CheckKind, field: &str) -> Result<(), ScenarioError> {
    let grid = |g: &[f64], name: &str| positive_grid(g, &format!("{field}.{name}"));
    match kind {
        CheckKind::Vague { centres, .. } => {
            if centres.is_empty() {
                return Err(ScenarioError::invalid(format!("{field}.centres"), "must not be empty"));
            }
        }
        CheckKind::PsiConvergence { lambdas, .. }
        | CheckKind::BoundedLaplace { lambdas, .. }
        | CheckKind::ContinuityBackward { lambdas, .. }
        | CheckKind::RemarkSufficientCondition { lambdas, .. } => {
            if let Some(l) = lambdas {
                grid(l, "lambdas")?;
            }
        }
        CheckKind::TransformTable { lambdas, .. } => grid(lambdas, "lambdas")?,
        CheckKind::ConditionWindow { x, .. } => positive(*x, &format!("{field}.x"))?,
        CheckKind::SlowVariation { tol, .. } => positive(*tol, &format!("{field}.tol"))?,
        CheckKind::RightEquicontinuity { x, .. } | CheckKind::ContinuityForward { x, .. } => {
            if !(*x >= 0.0 && x.is_finite()) {
                return Err(ScenarioError::invalid(format!("{field}.x"), format!("must be nonnegative, got {x}")));
            }
        }
        _ => {}
    }
    if let CheckKind::RemarkSufficientCondition { delta, .. } = kind {
        positive(*delta, &format!("{field}.delta"))?;
    }
    if let CheckKind::ContinuityBackward { points, .. } | CheckKind::FConvergence { points, .. } = kind {
        if points.is_empty() {
            return Err(ScenarioError::invalid(format!("{field}.points"), "must not be empty"));
        }
    }
    Ok(())
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    Scenario::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "name": "t",
        "measures": {"mu": {"atoms": [{"x": 1.0, "w": 2.0}]}},
        "sequences": {
            "s": {"template": {"atoms": [{"x": {"expr": "1+1/n"}, "w": 1}]}, "limit": {"atoms": [{"x": 1, "w": 1}]}}
        },
        "checks": [{"kind": "vague", "sequence": "s", "centres": [1.0]}]
    }"#;

    #[test]
    fn template_instantiates_per_index() {
        let s = Scenario::from_json(BASE).unwrap();
        let seq = s.sequence("s").unwrap();
        let m = seq.term(4).unwrap();
        assert_eq!(m.atoms()[0].location, 1.25);
        assert_eq!(seq.limit().atoms()[0].location, 1.0);
    }

    #[test]
    fn negative_tolerance_names_the_field() {
        let text = BASE.replace("\"name\": \"t\",", "\"name\": \"t\", \"config\": {\"tol\": -1},");
        let e = Scenario::from_json(&text).unwrap_err();
        assert_eq!(e.field(), Some("config.tol"));
    }

    #[test]
    fn unresolved_names_are_rejected() {
        let text = BASE.replace("\"sequence\": \"s\"", "\"sequence\": \"missing\"");
        assert_eq!(Scenario::from_json(&text).unwrap_err().field(), Some("checks[0].sequence"));
        let text = BASE.replace(r#""limit": {"atoms": [{"x": 1, "w": 1}]}"#, r#""limit": "nope""#);
        assert_eq!(Scenario::from_json(&text).unwrap_err().field(), Some("sequences.s.limit"));
    }

    #[test]
    fn bad_expression_names_the_field() {
        let text = BASE.replace("1+1/n", "1+1/m");
        assert_eq!(Scenario::from_json(&text).unwrap_err().field(), Some("sequences.s.template.atoms[0].x"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = Scenario::from_json("{\n  \"name\": \"t\",\n  \"bogus\": 1\n}").unwrap_err();
        match e {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Scenario::from_json("{\"name\": "), Err(ScenarioError::Parse { .. })));
        let bad_kind = BASE.replace("\"kind\": \"vague\"", "\"kind\": \"nope\"");
        assert!(matches!(Scenario::from_json(&bad_kind), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn rescaled_sequence_requires_known_measure() {
        let text = BASE.replace(
            r#""s": {"#,
            r#""r": {"rescaled": {"measure": "mu", "rho": 0}}, "q": {"rescaled": {"measure": "zz"}}, "s": {"#,
        );
        let e = Scenario::from_json(&text).unwrap_err();
        assert_eq!(e.field(), Some("sequences.q.rescaled.measure"));
    }

    #[test]
    fn echo_round_trips() {
        let s = Scenario::from_json(BASE).unwrap();
        let back = Scenario::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }
}
