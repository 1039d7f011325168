//! Laplace–Stieltjes transforms `Ψ_μ(λ) = ∫ e^{-λx} μ(dx)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DensitySegment, SignedMeasure};
use crate::quadrature;
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Backend {
    ClosedForm,
    Quadrature { rel_tol: f64, abs_tol: f64 },
}

impl Backend {
    pub fn quadrature() -> Self {
        Backend::Quadrature { rel_tol: 1e-12, abs_tol: 1e-10 }
    }
}

/// Transform evaluator for one measure, with a per-λ cache shared by readers.
#[derive(Debug)]
pub struct TransformEvaluator {
    measure: SignedMeasure,
    backend: Backend,
    abs: OnceLock<std::result::Result<Box<TransformEvaluator>, Error>>,
    cache: Mutex<HashMap<u64, (f64, f64)>>,
}

impl TransformEvaluator {
    pub fn new(measure: SignedMeasure, backend: Backend) -> Self {
        TransformEvaluator { measure, backend, abs: OnceLock::new(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn closed_form(measure: SignedMeasure) -> Self {
        TransformEvaluator::new(measure, Backend::ClosedForm)
    }

    pub fn measure(&self) -> &SignedMeasure {
        &self.measure
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// `(Ψ_μ(λ), error bound)`.
    pub fn psi_with_error(&self, lambda: f64) -> Result<(f64, f64)> {
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("λ = {lambda} is not finite")));
        }
        let key = lambda.to_bits();
        if let Some(&hit) = self.cache.lock().expect("cache lock poisoned").get(&key) {
            return Ok(hit);
        }
        let value = match self.backend {
            Backend::ClosedForm => self.measure.laplace(lambda)?,
            Backend::Quadrature { rel_tol, abs_tol } => quadrature_transform(&self.measure, lambda, rel_tol, abs_tol)?,
        };
        self.cache.lock().expect("cache lock poisoned").insert(key, value);
        Ok(value)
    }

    pub fn psi(&self, lambda: f64) -> Result<f64> {
        Ok(self.psi_with_error(lambda)?.0)
    }

    /// Evaluator of `|μ|` with the same backend.
    pub fn abs_evaluator(&self) -> Result<&TransformEvaluator> {
        let slot = self.abs.get_or_init(|| {
            self.measure
                .total_variation()
                .map(|tv| Box::new(TransformEvaluator::new(tv, self.backend)))
        });
        match slot {
            Ok(ev) => Ok(ev),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn psi_abs(&self, lambda: f64) -> Result<f64> {
        self.abs_evaluator()?.psi(lambda)
    }
}

/// `Ψ_μ(λ)` by closed forms.
pub fn psi(mu: &SignedMeasure, lambda: f64) -> Result<f64> {
    Ok(mu.laplace(lambda)?.0)
}

/// `Ψ_{|μ|}(λ)` by closed forms.
pub fn psi_abs(mu: &SignedMeasure, lambda: f64) -> Result<f64> {
    psi(&mu.total_variation()?, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: Membership,
    pub lambda: Option<f64>,
    pub evidence: String,
}

/// Whether `Ψ_μ(λ)` is finite for every `λ > 0`. Every term of the density
/// grammar is at most polynomial times a nonincreasing exponential, so every
/// representable measure qualifies.
pub fn check_membership(mu: &SignedMeasure) -> MembershipVerdict {
    let unbounded = mu.segments().iter().filter(|s| s.hi().is_none()).count();
    MembershipVerdict {
        status: Membership::Member,
        lambda: None,
        evidence: if unbounded == 0 {
            "bounded support".into()
        } else {
            format!("{unbounded} unbounded segment(s) with at most polynomial growth")
        },
    }
}

/// `|Ψ_μ(λ+ε) − Ψ_{μ^(ε)}(λ)|`.
pub fn tilt_identity_residual(mu: &SignedMeasure, eps: f64, lambda: f64) -> Result<f64> {
    if !(eps > 0.0 && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("tilt residual needs ε, λ > 0, got ε = {eps}, λ = {lambda}")));
    }
    Ok((psi(mu, lambda + eps)? - psi(&mu.tilt(eps), lambda)?).abs())
}

/// Numerical transform: atoms exactly, densities by adaptive Gauss–Kronrod on
/// `[lo, T]` with `T` chosen so the envelope tail is below `abs_tol / 2`.
pub fn quadrature_transform(mu: &SignedMeasure, lambda: f64, rel_tol: f64, abs_tol: f64) -> Result<(f64, f64)> {
    let mut acc: NeumaierSum = mu.atoms().iter().map(|a| a.weight * (-lambda * a.location).exp()).collect();
    let mut err = 0.0;
    let nseg = mu.segments().len().max(1) as f64;
    for seg in mu.segments() {
        let (hi, tail) = match seg.hi() {
            Some(h) => (h, 0.0),
            None => {
                let env = seg.expression().envelope();
                let target = 0.5 * abs_tol / nseg;
                let t = env.tail_cutoff(seg.lo(), lambda, target).ok_or(Error::DivergentTransform { lambda })?;
                (t, env.envelope_tail(t, lambda).unwrap_or(0.0))
            }
        };
        let r = segment_quadrature(seg, lambda, seg.lo(), hi, rel_tol, 0.5 * abs_tol / nseg);
        acc.add(r.value);
        err += r.error + tail;
    }
    Ok((acc.value(), err))
}

fn segment_quadrature(seg: &DensitySegment, lambda: f64, lo: f64, hi: f64, rel_tol: f64, abs_tol: f64) -> quadrature::QuadResult {
    let f = |x: f64| seg.density_at(x) * (-lambda * x).exp();
    let freq = seg.expression().max_frequency();
    let width = if freq > 0.0 { 2.0 * PI / freq } else { ((hi - lo) / 32.0).max(1.0) };
    let n = ((hi - lo) / width).ceil().clamp(1.0, 1e5) as usize;
    let mut breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    breaks[n] = hi;

    let p_min = seg.expression().min_power();
    let singular = lo == 0.0 && p_min < 0.0;
    if !singular {
        return quadrature::integrate_pieces(f, &breaks, abs_tol, rel_tol);
    }
    // x = u^m removes the x^p singularity at the origin on the first piece.
    let m = (2.0 / (1.0 + p_min)).ceil();
    let first_hi = breaks[1];
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = u.powf(m);
        seg.density_at(x) * (-lambda * x).exp() * m * u.powf(m - 1.0)
    };
    let head = quadrature::integrate(g, 0.0, first_hi.powf(1.0 / m), abs_tol / n as f64, rel_tol, 2000);
    let rest = quadrature::integrate_pieces(f, &breaks[1..], abs_tol * (n - 1) as f64 / n as f64, rel_tol);
    quadrature::QuadResult { value: head.value + rest.value, error: head.error + rest.error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::{Expression, Oscillation, Term};

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

    fn closed(tau: f64) -> f64 {
        (3.0 * tau.powi(4) + 1.0) / (2.0 * (tau.powi(3) + tau).powi(2))
    }

    #[test]
    fn example_transform_closed_form() {
        assert!((psi(&example(), 1.0).unwrap() - 0.5).abs() < 1e-14);
        for &tau in &[0.01, 0.3, 2.5] {
            let v = psi(&example(), tau).unwrap();
            assert!((v - closed(tau)).abs() < 1e-10 * closed(tau), "τ = {tau}");
        }
    }

    #[test]
    fn atom_pair_transform() {
        let (x, n) = (1.0, 4.0);
        let mu = SignedMeasure::from_atoms(&[(x, 1.0), (x + 1.0 / n, -1.0)]).unwrap();
        for &l in &[0.5, 1.0, 3.0] {
            let expect = (-l * x).exp() - (-l * (x + 1.0 / n)).exp();
            assert!((psi(&mu, l).unwrap() - expect).abs() < 1e-15);
            let expect_abs = (-l * x).exp() + (-l * (x + 1.0 / n)).exp();
            assert!((psi_abs(&mu, l).unwrap() - expect_abs).abs() < 1e-15);
        }
    }

    #[test]
    fn lebesgue_transform_and_divergence() {
        let leb = SignedMeasure::lebesgue();
        assert!((psi(&leb, 4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(psi(&leb, 0.0), Err(Error::DivergentTransform { .. })));
        assert!(matches!(psi(&leb, -1.0), Err(Error::DivergentTransform { .. })));
    }

    #[test]
    fn abs_transform_of_example_agrees_with_quadrature() {
        let ev = TransformEvaluator::closed_form(example());
        let q = TransformEvaluator::new(example(), Backend::quadrature());
        let a = ev.psi_abs(1.0).unwrap();
        let b = q.psi_abs(1.0).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        assert!((a - 0.694_11).abs() < 1e-5);
    }

    #[test]
    fn quadrature_handles_singular_power() {
        let mu = SignedMeasure::with_density(0.0, None, Expression::new([Term::simple(1.0, -0.5, 0.0).unwrap()])).unwrap();
        // ∫ x^{-1/2} e^{-x} dx = √π
        let (v, e) = quadrature_transform(&mu, 1.0, 1e-12, 1e-10).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-9, "{v}");
        assert!(e < 1e-8);
        assert!((psi(&mu, 1.0).unwrap() - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn membership_is_member_for_grammar_measures() {
        let x5 = SignedMeasure::with_density(0.0, None, Expression::monomial(1.0, 5.0).unwrap()).unwrap();
        for m in [SignedMeasure::lebesgue(), SignedMeasure::from_atoms(&[(1.0, 1.0), (2.0, -1.0)]).unwrap(), x5.clone()] {
            assert_eq!(check_membership(&m).status, Membership::Member);
        }
        assert!((psi(&x5, 2.0).unwrap() - 120.0 / 64.0).abs() < 1e-13);
    }

    #[test]
    fn tilt_residuals() {
        let d = SignedMeasure::dirac(1.0, 1.0).unwrap();
        assert!(tilt_identity_residual(&d, 1.0, 1.0).unwrap() < 1e-16);
        assert!(tilt_identity_residual(&example(), 0.5, 0.5).unwrap() < 1e-10);
        assert!(tilt_identity_residual(&SignedMeasure::lebesgue(), 0.3, 0.7).unwrap() < 1e-15);
    }

    #[test]
    fn cache_is_value_stable() {
        let ev = TransformEvaluator::closed_form(example());
        let a = ev.psi(0.37).unwrap();
        let b = ev.psi(0.37).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
