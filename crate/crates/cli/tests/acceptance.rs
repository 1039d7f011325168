//! Acceptance criteria. Runs without the libtest harness so each criterion's
//! PASS/FAIL line is always printed; exits nonzero if the set of failing
//! criteria differs from `KNOWN_UNATTAINABLE`.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use tauber_core::convergence::{
    bounded_laplace_test, continuity_forward, f_convergence_test, psi_convergence_test, right_equicontinuity_test,
    ConvergenceConfig, MeasureSequence,
};
use tauber_core::laplace::{psi, tilt_identity_residual};
use tauber_core::quadrature::integrate_pieces;
use tauber_core::tauberian::{
    asymptotic_ratio, default_points, default_tau_grid, gamma_limit_measure, rescaled_family, rv_index_psi,
    tauberian_condition_ratio,
};
use tauber_core::{Atom, DensitySegment, Expression, Oscillation, SignedMeasure, Status, Term};

const CLOSED_FORM_REL_TOL: f64 = 1e-8;
const CLOSED_FORM_BUDGET: Duration = Duration::from_secs(1);
const INDEX_DISPERSION_TOL: f64 = 0.05;
const INDEX_BUDGET: Duration = Duration::from_secs(5);
const CONDITION_RATIO_WINDOW: (f64, f64) = (0.30, 0.40);
const ASYMPTOTIC_RATIO_TOL: f64 = 0.02;
const COUNTEREXAMPLE_TOL: f64 = 1e-6;
const COUNTEREXAMPLE_BUDGET: Duration = Duration::from_secs(5);
const MOLLIFIED_TOL: f64 = 1e-3;
const TILT_RESIDUAL_TOL: f64 = 1e-10;
const PARTS_TOL: f64 = 1e-8;
const GAMMA_LIMIT_TOL: f64 = 1e-8;
const BRIDGE_TOL: f64 = 1e-10;
const PROPERTY_CASES: u32 = 100;
const PROPERTY_BUDGET: Duration = Duration::from_secs(60);

/// The condition-ratio window excludes the true limit of about 0.696.
const KNOWN_UNATTAINABLE: &[u32] = &[3];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn example_density() -> SignedMeasure {
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

/// Transform of `x(1/2 + cos x)` as stated in closed form.
fn reference_psi(tau: f64) -> f64 {
    (3.0 * tau.powi(4) + 1.0) / (2.0 * (tau.powi(3) + tau).powi(2))
}

/// `∫_0^t x(1/2 + cos x) dx`.
fn reference_f(t: f64) -> f64 {
    t * t / 4.0 + t * t.sin() + t.cos() - 1.0
}

fn criterion_1() -> Outcome {
    let mu = example_density();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..25 {
        let tau = 10f64.powf(-3.0 + 4.0 * k as f64 / 24.0);
        let v = psi(&mu, tau).unwrap();
        let want = reference_psi(tau);
        worst = worst.max(((v - want) / want).abs());
    }
    let elapsed = start.elapsed();
    Outcome {
        id: 1,
        title: "closed-form transform of x(1/2+cos x)",
        pass: worst <= CLOSED_FORM_REL_TOL && elapsed < CLOSED_FORM_BUDGET,
        detail: format!("max rel err {worst:.2e} over 25 points in {:.3} s", elapsed.as_secs_f64()),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let est = rv_index_psi(&example_density(), &default_points(), &default_tau_grid()).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        id: 2,
        title: "index of regular variation of the transform",
        pass: (est.rho_hat - 2.0).abs() <= INDEX_DISPERSION_TOL
            && est.dispersion <= INDEX_DISPERSION_TOL
            && elapsed < INDEX_BUDGET,
        detail: format!("rho_hat {:.10}, dispersion {:.2e}, {:.3} s", est.rho_hat, est.dispersion, elapsed.as_secs_f64()),
    }
}

fn criterion_3() -> Outcome {
    let c = tauberian_condition_ratio(&example_density(), &default_tau_grid()).unwrap();
    let (lo, hi) = CONDITION_RATIO_WINDOW;
    Outcome {
        id: 3,
        title: "Tauberian condition ratio in [0.30, 0.40]",
        pass: (lo..=hi).contains(&c.statistic),
        detail: format!("tail statistic {:.6}", c.statistic),
    }
}

fn criterion_4() -> Outcome {
    let mu = example_density();
    let ts: Vec<f64> = (0..=16).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
    let a = asymptotic_ratio(&mu, 2.0, &ts).unwrap();
    // Independent mean over the same 101 log-spaced points of [1e3, 1e4].
    let oracle = (0..101)
        .map(|i| 10f64.powf(3.0 + i as f64 / 100.0))
        .map(|t| reference_psi(1.0 / t) / (reference_f(t) * 2.0))
        .sum::<f64>()
        / 101.0;
    let agree = ((a.window_mean - oracle) / oracle).abs();
    Outcome {
        id: 4,
        title: "asymptotic ratio over t in [1e3, 1e4] within 2% of 1",
        pass: a.window == (1e3, 1e4) && (a.window_mean - 1.0).abs() <= ASYMPTOTIC_RATIO_TOL && agree <= 1e-8,
        detail: format!("window mean {:.8} (independent {:.8})", a.window_mean, oracle),
    }
}

fn escaping_pair() -> MeasureSequence {
    MeasureSequence::new(
        "escaping_pair",
        |n| SignedMeasure::from_atoms(&[(1.0, 1.0), (1.0 + 1.0 / n as f64, -1.0)]),
        SignedMeasure::zero(),
    )
}

fn criterion_5() -> Outcome {
    let cfg = ConvergenceConfig { n_max: 10_000, tol: COUNTEREXAMPLE_TOL, ..ConvergenceConfig::default() };
    let lambdas = [0.5, 1.0, 2.0];
    let seq = escaping_pair();
    let start = Instant::now();
    let conv = psi_convergence_test(&seq, &lambdas, &cfg);
    let bounded = bounded_laplace_test(&seq, &lambdas, &cfg);
    let equi = right_equicontinuity_test(&seq, 1.0, &cfg);
    let fconv = f_convergence_test(&seq, &[1.0], &cfg);
    let forward = continuity_forward(&seq, 1.0, &cfg, false);
    let elapsed = start.elapsed();

    let bound_err = bounded
        .witnesses
        .iter()
        .map(|w| (w.value - 2.0 * (-w.param("lambda").unwrap()).exp()).abs())
        .fold(0.0, f64::max);
    let equi_witnesses_ok = !equi.witnesses.is_empty()
        && equi.witnesses.iter().all(|w| {
            let (d, n) = (w.param("delta").unwrap(), w.param("n").unwrap());
            n >= 1.0 / d && w.value == 1.0
        });
    let f_gap = fconv.witnesses.first().map_or(f64::NAN, |w| w.value);
    let pattern = conv.status == Status::Pass
        && bounded.status == Status::Pass
        && bound_err <= COUNTEREXAMPLE_TOL
        && equi.status == Status::Fail
        && equi_witnesses_ok
        && fconv.status == Status::Fail
        && (f_gap - 1.0).abs() < 1e-12
        && forward.child("continuity_point").map(|c| c.status) == Some(Status::Pass);
    Outcome {
        id: 5,
        title: "escaping-pair counterexample verdict pattern",
        pass: pattern && elapsed < COUNTEREXAMPLE_BUDGET,
        detail: format!(
            "psi {}, bounded {} (err {:.1e}), equicontinuity {}, F {} (|F_n(1)| = {}), {:.2} s",
            conv.status.as_str(),
            bounded.status.as_str(),
            bound_err,
            equi.status.as_str(),
            fconv.status.as_str(),
            f_gap,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Outcome {
    let seq = MeasureSequence::new(
        "mollified",
        |n| {
            let n = n as f64;
            SignedMeasure::with_density(1.0, Some(1.0 + 1.0 / n), Expression::constant(n))
        },
        SignedMeasure::dirac(1.0, 1.0).unwrap(),
    );
    let cfg = ConvergenceConfig { tol: MOLLIFIED_TOL, ..ConvergenceConfig::default() };
    let full = continuity_forward(&seq, 2.0, &cfg, false);
    let skip = continuity_forward(&seq, 2.0, &cfg, true);
    let all_pass = |r: &tauber_core::VerdictReport| r.status == Status::Pass && r.children.iter().all(|c| c.status == Status::Pass);
    let confirmed = |r: &tauber_core::VerdictReport| r.details["outcome"] == "theorem_confirmed";
    let skipped = skip.child("right_equicontinuity").is_none() && skip.settings["skip_equicontinuity"] == true;
    Outcome {
        id: 6,
        title: "continuity theorem on the mollified delta at x = 2",
        pass: all_pass(&full) && all_pass(&skip) && confirmed(&full) && confirmed(&skip) && skipped,
        detail: format!(
            "full {} ({} checks), skip mode {} ({} checks)",
            full.details["outcome"],
            full.children.len(),
            skip.details["outcome"],
            skip.children.len()
        ),
    }
}

fn term() -> impl Strategy<Value = Term> {
    (
        prop_oneof![-2.0..-0.1f64, 0.1..2.0f64],
        prop::sample::select(&[0.0f64, 1.0, 2.0, 0.5][..]),
        0.2..2.0f64,
        0usize..3,
        0.2..3.0f64,
    )
        .prop_map(|(c, p, a, k, b)| {
            let (p, osc) = match k {
                0 => (p, Oscillation::None),
                1 => (p.floor(), Oscillation::Cos(b)),
                _ => (p.floor(), Oscillation::Sin(b)),
            };
            Term::new(c, p, a, osc).unwrap()
        })
}

fn measure() -> impl Strategy<Value = SignedMeasure> {
    (
        prop::collection::vec((0.0..5.0f64, prop_oneof![-2.0..-0.1f64, 0.1..2.0f64]), 0..3),
        0.5..4.0f64,
        prop::collection::vec(term(), 1..3),
        prop::collection::vec(term(), 1..3),
    )
        .prop_map(|(atoms, l, fin, unb)| {
            let atoms = atoms.into_iter().map(|(x, w)| Atom::new(x, w).unwrap()).collect();
            let segs = vec![
                DensitySegment::new(0.0, Some(l), Expression::new(fin)).unwrap(),
                DensitySegment::new(l, None, Expression::new(unb)).unwrap(),
            ];
            SignedMeasure::new(atoms, segs).unwrap()
        })
}

fn runner() -> TestRunner {
    let config = Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

/// Runs a property and returns the largest residual seen, or the failure.
fn property<S: Strategy>(
    strategy: S,
    tol: f64,
    f: impl Fn(S::Value) -> f64,
) -> Result<f64, String> {
    let worst = std::cell::Cell::new(0.0f64);
    runner()
        .run(&strategy, |v| {
            let r = f(v);
            worst.set(worst.get().max(r));
            prop_assert!(r <= tol, "residual {r:e} > {tol:e}");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(worst.get())
}

fn breakpoints(mu: &SignedMeasure, t: f64) -> Vec<f64> {
    let mut b = vec![0.0, t];
    b.extend(mu.atoms().iter().map(|a| a.location).filter(|&x| x > 0.0 && x < t));
    b.extend(mu.segments().iter().map(|s| s.lo()).filter(|&x| x > 0.0 && x < t));
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let results = [
        (
            "jordan domination",
            property((measure(), 0.0..6.0f64, 0.01..10.0f64), 0.0, |(mu, a, w)| {
                let v = mu.eval_interval(a, Some(a + w), false).to_f64().abs();
                let m = mu.total_variation().unwrap().eval_interval(a, Some(a + w), false).to_f64();
                (v - m - 1e-12 * m.max(1.0)).max(0.0)
            }),
        ),
        (
            "tilt semigroup",
            property((measure(), 0.0..2.0f64, 0.0..2.0f64, 0.0..8.0f64), 1e-13, |(mu, e1, e2, x)| {
                let (twice, once) = (mu.tilt(e1).tilt(e2), mu.tilt(e1 + e2));
                let size: f64 = once.segments().iter().filter(|s| s.contains(x)).map(|s| s.expression().envelope().eval(x)).sum();
                let atoms = twice
                    .atoms()
                    .iter()
                    .zip(once.atoms())
                    .map(|(p, q)| if p.location == q.location { ((p.weight - q.weight) / q.weight).abs() } else { 1.0 })
                    .fold(0.0, f64::max);
                atoms.max((twice.density_at(x) - once.density_at(x)).abs() / size.max(f64::MIN_POSITIVE))
            }),
        ),
        (
            "tilt identity",
            property((measure(), 0.01..3.0f64, 0.01..10.0f64), TILT_RESIDUAL_TOL, |(mu, eps, lam)| {
                tilt_identity_residual(&mu, eps, lam).unwrap()
            }),
        ),
        (
            "integration by parts",
            property((measure(), 0.01..2.0f64, 0.1..8.0f64), PARTS_TOL, |(mu, eps, t)| {
                let lhs = mu.tilt(eps).distribution(t);
                let q = integrate_pieces(|x| (-eps * x).exp() * mu.distribution(x), &breakpoints(&mu, t), 1e-12, 1e-13);
                let rhs = (-eps * t).exp() * mu.distribution(t) + eps * q.value;
                (lhs - rhs).abs() / lhs.abs().max(1.0)
            }),
        ),
        (
            "gamma-limit transform",
            property(
                (prop::sample::select(&[0.0, 0.5, 1.0, 2.0, 3.7][..]), prop::sample::select(&[0.1f64, 1.0, 10.0][..])),
                GAMMA_LIMIT_TOL,
                |(rho, lam)| {
                    let nu = gamma_limit_measure(rho).unwrap().realised;
                    let want = lam.powf(-rho);
                    ((psi(&nu, lam).unwrap() - want) / want).abs()
                },
            ),
        ),
        (
            "scale bridging",
            property((measure(), 1u64..50, 0.01..5.0f64), BRIDGE_TOL, |(mu, n, x)| {
                let p = psi(&mu, 1.0 / n as f64).unwrap();
                if p.abs() < 1e-6 {
                    return 0.0;
                }
                let fam = rescaled_family(&mu, |n| 1.0 / n as f64, None).unwrap();
                let lhs = fam.term(n).unwrap().distribution(x);
                let rhs = mu.distribution(x * n as f64) / p;
                (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
            }),
        ),
    ];
    let elapsed = start.elapsed();
    let mut parts = Vec::new();
    let mut pass = elapsed < PROPERTY_BUDGET;
    for (name, r) in &results {
        match r {
            Ok(worst) => parts.push(format!("{name} {worst:.1e}")),
            Err(e) => {
                pass = false;
                parts.push(format!("{name} FAILED: {e}"));
            }
        }
    }
    Outcome {
        id: 7,
        title: "property suites, 100 cases each",
        pass,
        detail: format!("{}; {:.2} s", parts.join(", "), elapsed.as_secs_f64()),
    }
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let scenarios = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut names: Vec<String> = std::fs::read_dir(&scenarios)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    let mut identical = Vec::new();
    for name in &names {
        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = dir.path().join(run);
            let status = Command::new(env!("CARGO_BIN_EXE_tauber"))
                .args(["run", "--quiet", "--format", "json", "--out"])
                .arg(&out)
                .arg(scenarios.join(name))
                .status()
                .unwrap();
            assert!(status.code().is_some());
            let stem = name.trim_end_matches(".json");
            outputs.push(std::fs::read(out.join(format!("{stem}.json"))).unwrap_or_default());
        }
        identical.push(!outputs[0].is_empty() && outputs[0] == outputs[1]);
    }
    Outcome {
        id: 8,
        title: "byte-identical reports across two runs",
        pass: !names.is_empty() && identical.iter().all(|&b| b),
        detail: names.iter().zip(&identical).map(|(n, b)| format!("{n} {}", if *b { "same" } else { "DIFFERENT" })).collect::<Vec<_>>().join(", "),
    }
}

fn main() {
    let outcomes = [criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(), criterion_6(), criterion_7(), criterion_8()];
    for o in &outcomes {
        let known = if !o.pass && KNOWN_UNATTAINABLE.contains(&o.id) { " (known unattainable)" } else { "" };
        println!("[{}] criterion {}: {}: {}{known}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
    }
    let failing: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if failing != KNOWN_UNATTAINABLE {
        eprintln!("failing criteria {failing:?} differ from the documented set {KNOWN_UNATTAINABLE:?}");
        std::process::exit(1);
    }
}
