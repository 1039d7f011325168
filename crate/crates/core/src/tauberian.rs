//! Regular variation of transforms and distribution functions, the two
//! Tauberian conditions for signed measures, and the Karamata-type pipeline
//! connecting `Ψ_μ(1/t)` with `F_μ(t) Γ(ρ+1)`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::convergence::{continuity_forward, ConvergenceConfig, MeasureSequence};
use crate::error::{Error, Result};
use crate::expression::{Expression, Term};
use crate::laplace::psi;
use crate::measure::SignedMeasure;
use crate::special::gamma;
use crate::verdict::{num, ols_slope, tail_window, Status, VerdictReport, Witness};

/// Points per top-decade averaging window.
pub const WINDOW_POINTS: usize = 101;

/// `10^{-k/4}` for `k = 0..=24`.
pub fn default_tau_grid() -> Vec<f64> {
    (0..=24).map(|k| 10f64.powf(-(k as f64) / 4.0)).collect()
}

/// `10^{k/4}` for `k = 0..=16`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=16).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
}

pub fn default_points() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0, 4.0]
}

/// `10^{-k/4}` for `k = 4..=24`.
pub fn default_h_grid() -> Vec<f64> {
    (4..=24).map(|k| 10f64.powf(-(k as f64) / 4.0)).collect()
}

/// Log-uniform points over `[t_max/10, t_max]`.
fn top_decade(t_max: f64) -> Vec<f64> {
    let lo = t_max.log10() - 1.0;
    (0..WINDOW_POINTS)
        .map(|i| 10f64.powf(lo + i as f64 / (WINDOW_POINTS - 1) as f64))
        .collect()
}

fn max_of(grid: &[f64]) -> Result<f64> {
    grid.iter()
        .copied()
        .filter(|v| v.is_finite() && *v > 0.0)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
        .ok_or_else(|| Error::InvalidArgument("grid needs a positive finite point".into()))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvEstimate {
    pub rho_hat: f64,
    /// `(λ or x, ρ estimate)`.
    pub per_param: Vec<(f64, f64)>,
    pub dispersion: f64,
    /// Grid points at which the estimate was formed.
    pub grid: Vec<f64>,
    /// Log-log regression slope, as a cross-check.
    pub regression_rho: f64,
}

impl RvEstimate {
    fn from_per_param(per_param: Vec<(f64, f64)>, grid: Vec<f64>, regression_rho: f64) -> Result<Self> {
        if per_param.is_empty() {
            return Err(Error::InvalidArgument("index estimation needs a point other than 1".into()));
        }
        let mut rhos: Vec<f64> = per_param.iter().map(|p| p.1).collect();
        let rho_hat = median(&mut rhos);
        let dispersion = rhos.iter().map(|r| (r - rho_hat).abs()).fold(0.0, f64::max);
        Ok(RvEstimate { rho_hat, per_param, dispersion, grid, regression_rho })
    }
}

/// Index of regular variation of `Ψ_μ` at the origin:
/// `ρ_λ = −ln(Ψ(τ λ)/Ψ(τ)) / ln λ` at the smallest grid `τ`, median over `λ`.
pub fn rv_index_psi(mu: &SignedMeasure, lambdas: &[f64], taus: &[f64]) -> Result<RvEstimate> {
    let mut taus: Vec<f64> = taus.to_vec();
    taus.sort_by(|a, b| b.total_cmp(a));
    let values = taus.iter().map(|&t| psi(mu, t)).collect::<Result<Vec<_>>>()?;
    let s0 = sign(values[0]);
    for (&t, &v) in taus.iter().zip(&values) {
        if sign(v) != s0 || v == 0.0 {
            return Err(Error::SignChangeNearZero { tau: t });
        }
    }
    let tau = *taus.last().ok_or_else(|| Error::InvalidArgument("empty τ grid".into()))?;
    let base = *values.last().expect("nonempty");
    let mut per = Vec::new();
    for &lam in lambdas {
        if lam == 1.0 || !(lam > 0.0) {
            continue;
        }
        let v = psi(mu, tau * lam)?;
        if sign(v) != s0 {
            return Err(Error::SignChangeNearZero { tau: tau * lam });
        }
        per.push((lam, -(v / base).ln() / lam.ln()));
    }
    let tail = tail_window(&taus);
    let tail_vals = tail_window(&values);
    let xs: Vec<f64> = tail.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = tail_vals.iter().map(|v| v.abs().ln()).collect();
    RvEstimate::from_per_param(per, vec![tau], -ols_slope(&xs, &ys))
}

/// Index of regular variation of `F_μ` at infinity: `ln(F(tx)/F(t)) / ln x`
/// averaged over the top decade of the `t` grid, median over `x`.
pub fn rv_index_f(mu: &SignedMeasure, xs: &[f64], ts: &[f64]) -> Result<RvEstimate> {
    let window = top_decade(max_of(ts)?);
    let f_window: Vec<f64> = window.iter().map(|&t| mu.distribution(t)).collect();
    let s0 = sign(f_window[0]);
    for (&t, &f) in window.iter().zip(&f_window) {
        if sign(f) != s0 || f == 0.0 {
            return Err(Error::SignChangeNearInfinity { t });
        }
    }
    let mut per = Vec::new();
    for &x in xs {
        if x == 1.0 || !(x > 0.0) {
            continue;
        }
        let mut acc = 0.0;
        for (&t, &f) in window.iter().zip(&f_window) {
            let fx = mu.distribution(t * x);
            if sign(fx) != s0 {
                return Err(Error::SignChangeNearInfinity { t: t * x });
            }
            acc += (fx / f).ln() / x.ln();
        }
        per.push((x, acc / window.len() as f64));
    }
    let lx: Vec<f64> = window.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = f_window.iter().map(|f| f.abs().ln()).collect();
    RvEstimate::from_per_param(per, window, ols_slope(&lx, &ly))
}

/// A table of a limit statistic over a grid with its tail surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionStatistic {
    pub table: Vec<(f64, f64)>,
    /// Grid points of the tail window.
    pub tail: Vec<f64>,
    pub statistic: f64,
}

/// `liminf_{τ↓0} |Ψ_μ(τ)| / Ψ_{|μ|}(τ)`, as the minimum over the tail window
/// of the decreasing `τ` grid.
pub fn tauberian_condition_ratio(mu: &SignedMeasure, taus: &[f64]) -> Result<ConditionStatistic> {
    let mut taus: Vec<f64> = taus.to_vec();
    taus.sort_by(|a, b| b.total_cmp(a));
    let abs = mu.total_variation()?;
    let mut table = Vec::with_capacity(taus.len());
    for &t in &taus {
        let a = psi(&abs, t)?;
        let p = psi(mu, t)?;
        table.push((t, if a == 0.0 { 1.0 } else { p.abs() / a }));
    }
    let tail = tail_window(&table);
    let statistic = tail.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(ConditionStatistic { tail: tail.iter().map(|p| p.0).collect(), table, statistic })
}

/// `limsup_{h↓0} limsup_{τ↓0} |F_μ((x+h)/τ) − F_μ(x/τ)| / |Ψ_μ(τ)|`: for each
/// `h` the maximum over the `τ` tail, then the maximum over the smallest `h`.
pub fn tauberian_condition_window(mu: &SignedMeasure, x: f64, hs: &[f64], taus: &[f64]) -> Result<ConditionStatistic> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("window point x = {x} must be positive")));
    }
    let mut taus: Vec<f64> = taus.to_vec();
    taus.sort_by(|a, b| b.total_cmp(a));
    let tau_tail = tail_window(&taus);
    let psis = tau_tail.iter().map(|&t| psi(mu, t)).collect::<Result<Vec<_>>>()?;
    let mut hs: Vec<f64> = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let mut table = Vec::with_capacity(hs.len());
    for &h in &hs {
        let mut inner = 0.0f64;
        for (&t, &p) in tau_tail.iter().zip(&psis) {
            let inc = mu.eval_interval(x / t, Some((x + h) / t), false).to_f64();
            let v = if p == 0.0 { f64::INFINITY } else { (inc / p).abs() };
            inner = inner.max(v);
        }
        table.push((h, inner));
    }
    let tail = tail_window(&table);
    let statistic = tail.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(ConditionStatistic { tail: tail.iter().map(|p| p.0).collect(), table, statistic })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRatio {
    pub rho: f64,
    /// `(t, Ψ_μ(1/t) / (F_μ(t) Γ(ρ+1)))` on the grid.
    pub table: Vec<(f64, f64)>,
    /// Grid and window points where `F_μ(t) = 0`.
    pub skipped: Vec<f64>,
    pub window: (f64, f64),
    pub window_mean: f64,
}

/// `Ψ_μ(1/t) / (F_μ(t) Γ(ρ+1))` on the grid, plus its mean over the top decade.
pub fn asymptotic_ratio(mu: &SignedMeasure, rho: f64, ts: &[f64]) -> Result<AsymptoticRatio> {
    let g = gamma(rho + 1.0);
    let mut skipped = Vec::new();
    let mut ratio = |t: f64| -> Result<Option<f64>> {
        let f = mu.distribution(t);
        if f == 0.0 {
            skipped.push(t);
            return Ok(None);
        }
        Ok(Some(psi(mu, 1.0 / t)? / (f * g)))
    };
    let mut table = Vec::new();
    for &t in ts {
        if let Some(r) = ratio(t)? {
            table.push((t, r));
        }
    }
    let t_max = max_of(ts)?;
    let mut acc = Vec::new();
    for t in top_decade(t_max) {
        if let Some(r) = ratio(t)? {
            acc.push(r);
        }
    }
    let window_mean = if acc.is_empty() { f64::NAN } else { acc.iter().sum::<f64>() / acc.len() as f64 };
    Ok(AsymptoticRatio { rho, table, skipped, window: (t_max / 10.0, t_max), window_mean })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaLimitMeasure {
    pub rho: f64,
    pub realised: SignedMeasure,
}

/// `x^{ρ−1}/Γ(ρ) dx` for `ρ > 0`, the unit atom at the origin for `ρ = 0`.
pub fn gamma_limit_measure(rho: f64) -> Result<GammaLimitMeasure> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("ρ = {rho} must be finite and nonnegative")));
    }
    let realised = if rho == 0.0 {
        SignedMeasure::dirac(0.0, 1.0)?
    } else {
        SignedMeasure::with_density(0.0, None, Expression::new([Term::simple(1.0 / gamma(rho), rho - 1.0, 0.0)?]))?
    };
    Ok(GammaLimitMeasure { rho, realised })
}

/// `ν_n(dx) = μ(d(t_n x)) / Ψ_μ(τ_n)` with `t_n = 1/τ_n`; the declared limit is
/// the gamma-type measure when `ρ` is given and the zero measure otherwise.
pub fn rescaled_family(
    mu: &SignedMeasure,
    tau_rule: impl Fn(u64) -> f64 + Send + Sync + 'static,
    rho: Option<f64>,
) -> Result<MeasureSequence> {
    let limit = match rho {
        Some(r) => gamma_limit_measure(r)?.realised,
        None => SignedMeasure::zero(),
    };
    let m = mu.clone();
    let rule = move |n: u64| {
        let tau = tau_rule(n);
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("τ_{n} = {tau} must be positive")));
        }
        let c = psi(&m, tau)?;
        if c == 0.0 {
            return Err(Error::ZeroTransform { n });
        }
        m.scale_normalize(1.0 / tau, c)
    };
    Ok(MeasureSequence::new("rescaled", rule, limit))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowRatio {
    pub lambda: f64,
    /// `(t, l(λt)/l(t))` on the grid.
    pub table: Vec<(f64, f64)>,
    pub window_mean: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowVariationDiagnostic {
    pub rho: f64,
    /// `(t, l(t))` with `l(t) = F_μ(t)/t^ρ`.
    pub samples: Vec<(f64, f64)>,
    pub ratios: Vec<SlowRatio>,
}

impl SlowVariationDiagnostic {
    pub fn max_deviation(&self) -> f64 {
        self.ratios.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }
}

/// Tabulates `l(t) = F_μ(t)/t^ρ` and `l(λt)/l(t)`; the deviation of each
/// ratio from 1 is measured by its mean over the top decade of the grid.
pub fn slow_variation_diagnostic(mu: &SignedMeasure, rho: f64, ts: &[f64], lambdas: &[f64]) -> Result<SlowVariationDiagnostic> {
    let l = |t: f64| mu.distribution(t) / t.powf(rho);
    let samples: Vec<(f64, f64)> = ts.iter().map(|&t| (t, l(t))).collect();
    let window = top_decade(max_of(ts)?);
    let mut ratios = Vec::new();
    for &lam in lambdas {
        let table = ts.iter().map(|&t| (t, l(lam * t) / l(t))).collect();
        let vals: Vec<f64> = window.iter().map(|&t| l(lam * t) / l(t)).collect();
        let window_mean = vals.iter().sum::<f64>() / vals.len() as f64;
        ratios.push(SlowRatio { lambda: lam, table, window_mean, deviation: (window_mean - 1.0).abs() });
    }
    Ok(SlowVariationDiagnostic { rho, samples, ratios })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "psi_to_F")]
    PsiToF,
    #[serde(rename = "F_to_psi")]
    FToPsi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauberianConfig {
    pub tau_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    /// Points at which the window condition is evaluated.
    pub window_points: Vec<f64>,
    pub ratio_floor: f64,
    pub window_ceiling: f64,
    pub rho_tol: f64,
    pub ratio_tol: f64,
    /// Start of the integrated tail; chosen from the sign of `F_μ` when absent.
    pub integrated_tail_start: Option<f64>,
    /// Settings for the convergence checks of the rescaled family.
    pub rescale: ConvergenceConfig,
}

impl Default for TauberianConfig {
    fn default() -> Self {
        TauberianConfig {
            tau_grid: default_tau_grid(),
            t_grid: default_t_grid(),
            lambda_grid: default_points(),
            x_grid: default_points(),
            h_grid: default_h_grid(),
            window_points: vec![1.0],
            ratio_floor: 0.01,
            window_ceiling: 0.05,
            rho_tol: 0.05,
            ratio_tol: 0.02,
            integrated_tail_start: None,
            rescale: ConvergenceConfig { n_max: 1000, tol: 0.02, ..ConvergenceConfig::default() },
        }
    }
}

fn pairs(v: &[(f64, f64)]) -> serde_json::Value {
    v.iter().map(|(a, b)| json!([num(*a), num(*b)])).collect()
}

pub fn rv_psi_report(mu: &SignedMeasure, cfg: &TauberianConfig) -> VerdictReport {
    match rv_index_psi(mu, &cfg.lambda_grid, &cfg.tau_grid) {
        Ok(est) => rv_report("rv_index_psi", &est, "lambda", cfg),
        Err(e) => VerdictReport::errored("rv_index_psi", &e),
    }
}

pub fn rv_f_report(mu: &SignedMeasure, cfg: &TauberianConfig) -> VerdictReport {
    match rv_index_f(mu, &cfg.x_grid, &cfg.t_grid) {
        Ok(est) => rv_report("rv_index_F", &est, "x", cfg),
        Err(e) => VerdictReport::errored("rv_index_F", &e),
    }
}

fn rv_report(check: &str, est: &RvEstimate, key: &str, cfg: &TauberianConfig) -> VerdictReport {
    let mut r = VerdictReport::new(check, Status::at_most(est.dispersion, cfg.rho_tol))
        .detail("rho_hat", num(est.rho_hat))
        .detail("dispersion", num(est.dispersion))
        .detail("regression_rho", num(est.regression_rho))
        .setting("rho_tol", cfg.rho_tol);
    for &(p, rho) in &est.per_param {
        r.witnesses.push(Witness::new(&[(key, p)], rho));
    }
    r
}

pub fn condition_ratio_report(mu: &SignedMeasure, cfg: &TauberianConfig) -> VerdictReport {
    match tauberian_condition_ratio(mu, &cfg.tau_grid) {
        Ok(c) => {
            let mut r = VerdictReport::new("condition_ratio", Status::at_least(c.statistic, cfg.ratio_floor))
                .detail("statistic", num(c.statistic))
                .detail("tail_tau", c.tail.clone())
                .setting("floor", cfg.ratio_floor);
            for &(t, v) in &c.table {
                r.witnesses.push(Witness::new(&[("tau", t)], v));
            }
            r
        }
        Err(e) => VerdictReport::errored("condition_ratio", &e),
    }
}

pub fn condition_window_report(mu: &SignedMeasure, x: f64, cfg: &TauberianConfig) -> VerdictReport {
    match tauberian_condition_window(mu, x, &cfg.h_grid, &cfg.tau_grid) {
        Ok(c) => {
            let mut r = VerdictReport::new("condition_window", Status::at_most(c.statistic, cfg.window_ceiling))
                .detail("statistic", num(c.statistic))
                .detail("tail_h", c.tail.clone())
                .setting("x", x)
                .setting("ceiling", cfg.window_ceiling);
            for &(h, v) in &c.table {
                r.witnesses.push(Witness::new(&[("h", h)], v));
            }
            r
        }
        Err(e) => VerdictReport::errored("condition_window", &e),
    }
}

pub fn asymptotic_ratio_report(mu: &SignedMeasure, rho: f64, cfg: &TauberianConfig) -> VerdictReport {
    match asymptotic_ratio(mu, rho, &cfg.t_grid) {
        Ok(a) => {
            let status = Status::at_most((a.window_mean - 1.0).abs(), cfg.ratio_tol);
            let mut r = VerdictReport::new("asymptotic_ratio", status)
                .detail("rho", num(rho))
                .detail("window_mean", num(a.window_mean))
                .detail("window", json!([a.window.0, a.window.1]))
                .setting("ratio_tol", cfg.ratio_tol);
            if !a.skipped.is_empty() {
                r = r.detail("skipped", a.skipped.clone());
            }
            for &(t, v) in &a.table {
                r.witnesses.push(Witness::new(&[("t", t)], v));
            }
            r
        }
        Err(e) => VerdictReport::errored("asymptotic_ratio", &e),
    }
}

pub fn slow_variation_report(mu: &SignedMeasure, rho: f64, tol: f64, cfg: &TauberianConfig) -> VerdictReport {
    match slow_variation_diagnostic(mu, rho, &cfg.t_grid, &cfg.lambda_grid) {
        Ok(d) => {
            let mut r = VerdictReport::new("slow_variation", Status::at_most(d.max_deviation(), tol))
                .detail("rho", num(rho))
                .detail("samples", pairs(&d.samples))
                .setting("tol", tol);
            for s in &d.ratios {
                r.witnesses.push(Witness::new(&[("lambda", s.lambda)], s.window_mean));
            }
            r
        }
        Err(e) => VerdictReport::errored("slow_variation", &e),
    }
}

fn agreement(check: &str, estimate: &VerdictReport, expected: f64, tol: f64) -> VerdictReport {
    match estimate.detail_f64("rho_hat") {
        Some(rho) => {
            let dev = (rho - expected).abs();
            let mut r = VerdictReport::new(check, Status::at_most(dev, tol).combine(estimate.status))
                .detail("rho_hat", num(rho))
                .detail("expected", num(expected))
                .setting("rho_tol", tol);
            r.witnesses.push(Witness::new(&[("expected", expected)], rho));
            r.children.push(estimate.clone());
            r
        }
        None => {
            let mut r = VerdictReport::new(check, Status::Inconclusive).note("no index estimate");
            r.children.push(estimate.clone());
            r
        }
    }
}

/// Start of the integrated tail: one past the last grid point `≤ 100` (step
/// 0.01) where `F_μ ≤ 0`, rounded up to an integer; `1` when there is none.
pub fn default_tail_start(mu: &SignedMeasure) -> f64 {
    let last = (1..=10_000)
        .map(|k| k as f64 * 0.01)
        .filter(|&t| mu.distribution(t) <= 0.0)
        .last();
    match last {
        Some(t) => t.ceil() + 1.0,
        None => 1.0,
    }
}

/// End-to-end check of the Tauberian theorem in either direction. Every step
/// is evaluated even if an earlier one fails; the report status is the
/// combination of all steps and `details.outcome` classifies hypotheses
/// against conclusions.
pub fn karamata_pipeline(mu: &SignedMeasure, direction: Direction, cfg: &TauberianConfig) -> VerdictReport {
    let (hyps, concl, rho_hat) = match direction {
        Direction::PsiToF => {
            let rv = rv_psi_report(mu, cfg);
            let rho_hat = rv.detail_f64("rho_hat");
            let mut hyps = vec![rv, condition_ratio_report(mu, cfg)];
            hyps.extend(cfg.window_points.iter().map(|&x| condition_window_report(mu, x, cfg)));
            let mut concl = Vec::new();
            match rho_hat {
                Some(rho) => {
                    let rescaled = rescaled_family(mu, |n| 1.0 / n as f64, Some(rho.max(0.0)))
                        .map(|seq| continuity_forward(&seq, 1.0, &cfg.rescale, false))
                        .unwrap_or_else(|e| VerdictReport::errored("continuity_forward", &e));
                    let mut rescaled = rescaled;
                    rescaled.check = "rescaled_convergence".into();
                    concl.push(rescaled);
                    concl.push(agreement("rv_index_F_agreement", &rv_f_report(mu, cfg), rho, cfg.rho_tol));
                    concl.push(asymptotic_ratio_report(mu, rho, cfg));
                }
                None => concl.push(VerdictReport::new("conclusion", Status::Inconclusive).note("no index estimate from Ψ")),
            }
            (hyps, concl, rho_hat)
        }
        Direction::FToPsi => {
            let rv = rv_f_report(mu, cfg);
            let rho_hat = rv.detail_f64("rho_hat");
            let hyps = vec![rv];
            let mut concl = Vec::new();
            match rho_hat {
                Some(rho) => {
                    let start = cfg.integrated_tail_start.unwrap_or_else(|| default_tail_start(mu));
                    let tail = match mu.integrated_tail(start) {
                        Ok(xi) => agreement("integrated_tail_index", &rv_f_report(&xi, cfg), rho + 1.0, cfg.rho_tol),
                        Err(e) => VerdictReport::errored("integrated_tail_index", &e),
                    };
                    concl.push(tail.setting("X", start));
                    concl.push(asymptotic_ratio_report(mu, rho, cfg));
                    concl.push(agreement("rv_index_psi_agreement", &rv_psi_report(mu, cfg), rho, cfg.rho_tol));
                }
                None => concl.push(VerdictReport::new("conclusion", Status::Inconclusive).note("no index estimate from F")),
            }
            (hyps, concl, rho_hat)
        }
    };
    let h = Status::all(hyps.iter().map(|r| r.status));
    let c = Status::all(concl.iter().map(|r| r.status));
    let outcome = match (h, c) {
        (Status::Pass, Status::Pass) => "theorem_confirmed",
        (Status::Pass, Status::Fail) => "theorem_violated",
        (Status::Fail, Status::Pass) => "hypothesis_fail_conclusion_pass",
        (Status::Fail, Status::Fail) => "hypothesis_fail_conclusion_fail",
        _ => "inconclusive",
    };
    let mut r = VerdictReport::new("karamata_pipeline", h.combine(c))
        .detail("outcome", outcome)
        .detail("rho_hat", rho_hat.map(num).unwrap_or(serde_json::Value::Null))
        .setting("direction", serde_json::to_value(direction).expect("serialisable"))
        .setting("tau_grid", json!([cfg.tau_grid.first(), cfg.tau_grid.last(), cfg.tau_grid.len()]))
        .setting("t_grid", json!([cfg.t_grid.first(), cfg.t_grid.last(), cfg.t_grid.len()]))
        .setting("ratio_floor", cfg.ratio_floor)
        .setting("window_ceiling", cfg.window_ceiling);
    r.children = hyps;
    r.children.extend(concl);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::Oscillation;

    fn example() -> SignedMeasure {
        SignedMeasure::with_density(
            0.0,
            None,
            Expression::new([
                Term::simple(0.5, 1.0, 0.0).unwrap(),
                Term::new(1.0, 1.0, 0.0, Oscillation::Cos(1.0)).unwrap(),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn index_from_transform() {
        let est = rv_index_psi(&example(), &default_points(), &default_tau_grid()).unwrap();
        assert!((est.rho_hat - 2.0).abs() < 1e-6);
        assert!(est.dispersion < 1e-6);
        let leb = rv_index_psi(&SignedMeasure::lebesgue(), &default_points(), &default_tau_grid()).unwrap();
        assert!((leb.rho_hat - 1.0).abs() < 1e-12);
        let d0 = rv_index_psi(&SignedMeasure::dirac(0.0, 1.0).unwrap(), &default_points(), &default_tau_grid()).unwrap();
        assert_eq!(d0.rho_hat, 0.0);
    }

    #[test]
    fn sign_change_near_zero_is_reported() {
        // Ψ(τ) = e^{-τ} − 2e^{-2τ} is negative near 0 and positive for τ > ln 2.
        let m = SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -2.0)]).unwrap();
        assert!(matches!(rv_index_psi(&m, &default_points(), &default_tau_grid()), Err(Error::SignChangeNearZero { .. })));
    }

    #[test]
    fn index_from_distribution() {
        let est = rv_index_f(&example(), &default_points(), &default_t_grid()).unwrap();
        assert!((est.rho_hat - 2.0).abs() < 0.05);
        let leb = rv_index_f(&SignedMeasure::lebesgue(), &default_points(), &default_t_grid()).unwrap();
        assert!((leb.rho_hat - 1.0).abs() < 1e-12);
        let nu = gamma_limit_measure(2.5).unwrap().realised;
        let est = rv_index_f(&nu, &default_points(), &default_t_grid()).unwrap();
        assert!((est.rho_hat - 2.5).abs() < 1e-12);
    }

    #[test]
    fn condition_ratio_cases() {
        let pos = tauberian_condition_ratio(&SignedMeasure::lebesgue(), &default_tau_grid()).unwrap();
        assert_eq!(pos.statistic, 1.0);
        let m = SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -0.5)]).unwrap();
        let c = tauberian_condition_ratio(&m, &default_tau_grid()).unwrap();
        assert!((c.statistic - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn condition_window_cases() {
        let c = tauberian_condition_window(&example(), 1.0, &default_h_grid(), &default_tau_grid()).unwrap();
        assert!(c.statistic < 1e-3, "{}", c.statistic);
        let d = tauberian_condition_window(&SignedMeasure::dirac(1.0, 1.0).unwrap(), 1.0, &default_h_grid(), &default_tau_grid()).unwrap();
        assert_eq!(d.statistic, 0.0);
        let pair = SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -1.0)]).unwrap();
        let p = tauberian_condition_window(&pair, 1.0, &default_h_grid(), &default_tau_grid()).unwrap();
        assert_eq!(p.statistic, 0.0);
    }

    #[test]
    fn asymptotic_ratio_cases() {
        let leb = asymptotic_ratio(&SignedMeasure::lebesgue(), 1.0, &default_t_grid()).unwrap();
        assert!(leb.table.iter().all(|(_, r)| (r - 1.0).abs() < 1e-14));
        let ex = asymptotic_ratio(&example(), 2.0, &default_t_grid()).unwrap();
        assert!((ex.window_mean - 1.0).abs() < 0.02);
        let nu = gamma_limit_measure(0.5).unwrap().realised;
        let g = asymptotic_ratio(&nu, 0.5, &default_t_grid()).unwrap();
        assert!(g.table.iter().all(|(_, r)| (r - 1.0).abs() < 1e-8));
    }

    #[test]
    fn gamma_limit_cases() {
        assert_eq!(gamma_limit_measure(0.0).unwrap().realised, SignedMeasure::dirac(0.0, 1.0).unwrap());
        let one = gamma_limit_measure(1.0).unwrap().realised;
        assert!((one.density_at(3.0) - 1.0).abs() < 1e-15);
        let two = gamma_limit_measure(2.0).unwrap().realised;
        assert!((two.distribution(3.0) - 4.5).abs() < 1e-12);
        assert!(gamma_limit_measure(-1.0).is_err());
    }

    #[test]
    fn rescaled_family_cases() {
        let leb = rescaled_family(&SignedMeasure::lebesgue(), |n| 1.0 / n as f64, Some(1.0)).unwrap();
        for n in [1, 7, 100] {
            assert!((leb.term(n).unwrap().eval_interval(0.5, Some(2.0), false).to_f64() - 1.5).abs() < 1e-12);
        }
        let x = SignedMeasure::with_density(0.0, None, Expression::monomial(1.0, 1.0).unwrap()).unwrap();
        let fam = rescaled_family(&x, |n| 1.0 / n as f64, Some(2.0)).unwrap();
        assert!((fam.term(9).unwrap().density_at(0.7) - 0.7).abs() < 1e-12);
        let zero = SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -1.0 * (1.0f64).exp())]).unwrap();
        let fam = rescaled_family(&zero, |_| 1.0, None).unwrap();
        assert!(matches!(fam.term(1), Err(Error::ZeroTransform { n: 1 })));
    }

    #[test]
    fn slow_variation_cases() {
        let leb = slow_variation_diagnostic(&SignedMeasure::lebesgue(), 1.0, &default_t_grid(), &default_points()).unwrap();
        assert!(leb.max_deviation() < 1e-14);
        let ex = slow_variation_diagnostic(&example(), 2.0, &default_t_grid(), &default_points()).unwrap();
        assert!(ex.max_deviation() < 0.01, "{}", ex.max_deviation());
        let nu = gamma_limit_measure(3.0).unwrap().realised;
        let g = slow_variation_diagnostic(&nu, 3.0, &default_t_grid(), &default_points()).unwrap();
        assert!(g.max_deviation() < 1e-12);
    }

    #[test]
    fn default_tail_start_for_example() {
        assert_eq!(default_tail_start(&example()), 6.0);
        assert_eq!(default_tail_start(&SignedMeasure::lebesgue()), 1.0);
    }

    #[test]
    fn pipeline_on_simple_measures() {
        let cfg = TauberianConfig::default();
        for dir in [Direction::PsiToF, Direction::FToPsi] {
            let r = karamata_pipeline(&SignedMeasure::lebesgue(), dir, &cfg);
            assert_eq!(r.status, Status::Pass, "{dir:?}: {r:#?}");
        }
        let nu = gamma_limit_measure(0.5).unwrap().realised;
        let r = karamata_pipeline(&nu, Direction::FToPsi, &cfg);
        assert_eq!(r.status, Status::Pass, "{r:#?}");
    }
}
