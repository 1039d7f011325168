//! Closed-form density expressions `Σ c·x^p·e^{-a x}·trig(b x)`.
//!
//! Every term has an explicit antiderivative against `e^{-λx}` (integer powers
//! through the complex-exponential reduction, real powers without oscillation
//! through the incomplete gamma function), which is what makes transforms and
//! distribution functions exact for measures built from these densities.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::power_exp_integral;
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oscillation {
    None,
    Cos(f64),
    Sin(f64),
}

impl Oscillation {
    pub fn frequency(&self) -> f64 {
        match *self {
            Oscillation::None => 0.0,
            Oscillation::Cos(b) | Oscillation::Sin(b) => b,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Oscillation::None => 0,
            Oscillation::Cos(_) => 1,
            Oscillation::Sin(_) => 2,
        }
    }
}

/// One term `coeff · x^power · e^{-decay·x} · osc(x)`.
///
/// `power` must exceed `-1`; oscillating terms need a nonnegative integer power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub power: f64,
    pub decay: f64,
    pub osc: Oscillation,
}

impl Term {
    pub fn new(coeff: f64, power: f64, decay: f64, osc: Oscillation) -> Result<Self> {
        if !coeff.is_finite() || !power.is_finite() || !decay.is_finite() {
            return Err(Error::InvalidArgument("term fields must be finite".into()));
        }
        if power <= -1.0 {
            return Err(Error::InvalidArgument(format!(
                "term power {power} is not locally integrable at 0"
            )));
        }
        if decay < 0.0 {
            return Err(Error::InvalidArgument(format!("term decay {decay} < 0")));
        }
        if !osc.frequency().is_finite() {
            return Err(Error::InvalidArgument("oscillation frequency must be finite".into()));
        }
        let term = Term { coeff, power, decay, osc };
        if osc != Oscillation::None && !term.has_integer_power() {
            return Err(Error::InvalidArgument(format!(
                "oscillating terms need a nonnegative integer power, got {power}"
            )));
        }
        Ok(term)
    }

    /// Shorthand for `c·x^k·e^{-a x}` without oscillation.
    pub fn simple(coeff: f64, power: f64, decay: f64) -> Result<Self> {
        Term::new(coeff, power, decay, Oscillation::None)
    }

    pub fn has_integer_power(&self) -> bool {
        self.power >= 0.0 && self.power.fract() == 0.0 && self.power <= 64.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pow = if self.has_integer_power() {
            x.powi(self.power as i32)
        } else {
            x.powf(self.power)
        };
        let damp = if self.decay == 0.0 { 1.0 } else { (-self.decay * x).exp() };
        let trig = match self.osc {
            Oscillation::None => 1.0,
            Oscillation::Cos(b) => (b * x).cos(),
            Oscillation::Sin(b) => (b * x).sin(),
        };
        self.coeff * pow * damp * trig
    }

    /// `∫_lo^hi e^{-extra·x} term(x) dx`; `hi = None` means `+∞`.
    ///
    /// Returns `None` if the integral diverges.
    pub fn integral(&self, lo: f64, hi: Option<f64>, extra: f64) -> Option<f64> {
        let d = self.decay + extra;
        if self.has_integer_power() {
            let z = Complex64::new(d, -self.osc.frequency());
            let val = int_power_exp(self.power as u32, z, lo, hi)?;
            let part = match self.osc {
                Oscillation::Sin(_) => val.im,
                _ => val.re,
            };
            Some(self.coeff * part)
        } else {
            if d < 0.0 {
                return None;
            }
            Some(self.coeff * power_exp_integral(self.power, d, lo, hi)?)
        }
    }

    fn key_cmp(&self, other: &Term) -> Ordering {
        self.power
            .total_cmp(&other.power)
            .then(self.decay.total_cmp(&other.decay))
            .then(self.osc.rank().cmp(&other.osc.rank()))
            .then(self.osc.frequency().total_cmp(&other.osc.frequency()))
    }

    fn same_key(&self, other: &Term) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }

    /// Normalise sign conventions of the oscillation; `None` if the term vanishes.
    fn canonical(mut self) -> Option<Term> {
        self.decay += 0.0;
        self.osc = match self.osc {
            Oscillation::Cos(b) if b == 0.0 => Oscillation::None,
            Oscillation::Cos(b) => Oscillation::Cos(b.abs()),
            Oscillation::Sin(b) if b == 0.0 => return None,
            Oscillation::Sin(b) if b < 0.0 => {
                self.coeff = -self.coeff;
                Oscillation::Sin(-b)
            }
            other => other,
        };
        (self.coeff != 0.0).then_some(self)
    }
}

/// `∫_lo^hi x^k e^{-z x} dx` for complex `z` with `Re z >= 0`.
///
/// Uses the shift `x = lo + u` and the binomial expansion of `(lo + u)^k`,
/// so each piece only involves `∫_0^h u^j e^{-z u} du`.
pub(crate) fn int_power_exp(k: u32, z: Complex64, lo: f64, hi: Option<f64>) -> Option<Complex64> {
    let k = k as usize;
    let js: Vec<Complex64> = match hi {
        None => {
            if z.re <= 0.0 {
                return None;
            }
            let mut out = Vec::with_capacity(k + 1);
            // j!/z^{j+1}
            let mut acc = Complex64::new(1.0, 0.0) / z;
            out.push(acc);
            for j in 1..=k {
                acc = acc * (j as f64) / z;
                out.push(acc);
            }
            out
        }
        Some(hi) => {
            let h = hi - lo;
            if h <= 0.0 {
                return Some(Complex64::new(0.0, 0.0));
            }
            partial_moments(k, z, h)
        }
    };
    let shift = if lo == 0.0 { Complex64::new(1.0, 0.0) } else { (-z * lo).exp() };
    if shift == Complex64::new(0.0, 0.0) {
        return Some(shift);
    }
    let mut binom = 1.0_f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, jm) in js.iter().enumerate() {
        if j > 0 {
            binom = binom * ((k - j + 1) as f64) / (j as f64);
        }
        sum += jm * (binom * lo.powi((k - j) as i32));
    }
    Some(shift * sum)
}

/// `J_j = ∫_0^h u^j e^{-z u} du` for `j = 0..=k`.
fn partial_moments(k: usize, z: Complex64, h: f64) -> Vec<Complex64> {
    let zh = z * h;
    let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
    if zh.norm() <= (k as f64).max(1.0) {
        // Power series in -z h; converges fast for |z h| of order k.
        let mut term = Complex64::new(1.0, 0.0);
        let mut sums = vec![Complex64::new(0.0, 0.0); k + 1];
        for m in 0..400usize {
            let mut small = true;
            for (j, s) in sums.iter_mut().enumerate() {
                let add = term / ((j + m + 1) as f64);
                *s += add;
                if add.norm() > 1e-18 * s.norm() {
                    small = false;
                }
            }
            if small && m > 0 {
                break;
            }
            term = term * (-zh) / ((m + 1) as f64);
        }
        let mut hp = h;
        for (j, s) in sums.into_iter().enumerate() {
            out[j] = s * hp;
            if j < k {
                hp *= h;
            }
        }
    } else {
        let e = (-zh).exp();
        out[0] = (Complex64::new(1.0, 0.0) - e) / z;
        let mut hp = 1.0;
        for j in 1..=k {
            hp *= h;
            out[j] = (out[j - 1] * (j as f64) - e * hp) / z;
        }
    }
    out
}

/// Canonical sum of terms: sorted by (power, decay, oscillation), duplicates
/// merged and zero coefficients dropped. The empty expression is `0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expression {
    terms: Vec<Term>,
}

impl Expression {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut terms: Vec<Term> = terms.into_iter().filter_map(Term::canonical).collect();
        terms.sort_by(|a, b| a.key_cmp(b));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.same_key(&t) => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Expression { terms: merged }
    }

    pub fn zero() -> Self {
        Expression::default()
    }

    pub fn constant(c: f64) -> Self {
        Expression::new([Term { coeff: c, power: 0.0, decay: 0.0, osc: Oscillation::None }])
    }

    /// `c·x^p` without decay or oscillation.
    pub fn monomial(c: f64, p: f64) -> Result<Self> {
        Ok(Expression::new([Term::simple(c, p, 0.0)?]))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `∫_lo^hi e^{-extra·x} f(x) dx`, `None` when divergent.
    pub fn integral(&self, lo: f64, hi: Option<f64>, extra: f64) -> Option<f64> {
        let mut acc = NeumaierSum::default();
        for t in &self.terms {
            acc.add(t.integral(lo, hi, extra)?);
        }
        Some(acc.value())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Expression::new(self.terms.iter().map(|t| Term { coeff: t.coeff * k, ..*t }))
    }

    pub fn plus(&self, other: &Expression) -> Self {
        Expression::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    /// Multiply by `e^{-eps·x}`.
    pub fn tilted(&self, eps: f64) -> Self {
        Expression::new(self.terms.iter().map(|t| Term { decay: t.decay + eps, ..*t }))
    }

    /// `x ↦ factor · f(t·x)`.
    pub fn rescaled(&self, t: f64, factor: f64) -> Self {
        Expression::new(self.terms.iter().map(|term| {
            let osc = match term.osc {
                Oscillation::None => Oscillation::None,
                Oscillation::Cos(b) => Oscillation::Cos(b * t),
                Oscillation::Sin(b) => Oscillation::Sin(b * t),
            };
            Term {
                coeff: term.coeff * factor * t.powf(term.power),
                power: term.power,
                decay: term.decay * t,
                osc,
            }
        }))
    }

    /// Multiply by the affine weight `alpha + beta·x`.
    pub fn times_affine(&self, alpha: f64, beta: f64) -> Self {
        Expression::new(self.terms.iter().flat_map(|t| {
            [
                Term { coeff: t.coeff * alpha, ..*t },
                Term { coeff: t.coeff * beta, power: t.power + 1.0, ..*t },
            ]
        }))
    }

    /// An antiderivative `G` with `G' = f`, expressed in the same grammar.
    pub fn antiderivative(&self) -> Result<Expression> {
        let mut out = Vec::new();
        for t in &self.terms {
            antiderivative_term(t, &mut out)?;
        }
        Ok(Expression::new(out))
    }

    /// Pointwise derivative. Terms with power below one produce a
    /// `x^{p-1}` factor outside the integrable grammar, so the result is
    /// meant for evaluation only.
    pub fn derivative(&self) -> Expression {
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            if t.power != 0.0 {
                out.push(Term { coeff: t.coeff * t.power, power: t.power - 1.0, ..*t });
            }
            if t.decay != 0.0 {
                out.push(Term { coeff: -t.coeff * t.decay, ..*t });
            }
            match t.osc {
                Oscillation::None => {}
                Oscillation::Cos(b) => out.push(Term { coeff: -t.coeff * b, osc: Oscillation::Sin(b), ..*t }),
                Oscillation::Sin(b) => out.push(Term { coeff: t.coeff * b, osc: Oscillation::Cos(b), ..*t }),
            }
        }
        Expression::new(out)
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.osc.frequency()).fold(0.0, f64::max)
    }

    pub fn min_power(&self) -> f64 {
        self.terms.iter().map(|t| t.power).fold(f64::INFINITY, f64::min)
    }

    /// True when some term fails to decay, so `∫_lo^∞ |f|` is infinite.
    pub fn has_nondecaying_term(&self) -> bool {
        self.terms.iter().any(|t| t.decay == 0.0)
    }

    /// Pointwise bound `|f(x)| <= Σ |c| x^p e^{-a x}`.
    pub fn envelope(&self) -> Expression {
        Expression::new(self.terms.iter().map(|t| Term {
            coeff: t.coeff.abs(),
            osc: Oscillation::None,
            ..*t
        }))
    }

    /// `∫_from^∞ e^{-extra·x} envelope(x) dx`; `None` if divergent.
    pub fn envelope_tail(&self, from: f64, extra: f64) -> Option<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            let d = t.decay + extra;
            if d <= 0.0 {
                return None;
            }
            acc += t.coeff.abs() * power_exp_integral(t.power, d, from, None)?;
        }
        Some(acc)
    }

    /// A point `T >= from` with `envelope_tail(T, extra) <= target`, close to
    /// the smallest such point; `None` if the envelope tail diverges.
    pub fn tail_cutoff(&self, from: f64, extra: f64, target: f64) -> Option<f64> {
        if self.envelope_tail(from, extra)? <= target {
            return Some(from);
        }
        let mut width = 1.0;
        while self.envelope_tail(from + width, extra)? > target {
            width *= 2.0;
            if !width.is_finite() {
                return None;
            }
        }
        let (mut a, mut b) = (from + 0.5 * width, from + width);
        for _ in 0..40 {
            let m = 0.5 * (a + b);
            if self.envelope_tail(m, extra)? > target {
                a = m;
            } else {
                b = m;
            }
        }
        Some(b)
    }

    /// A point `X >= lo` and the constant sign of `f` on `[X, ∞)`, when the
    /// dominant (slowest-decaying, highest-power) group of terms certifiably
    /// outweighs everything else. `None` means the sign may change forever.
    pub fn eventual_sign(&self, lo: f64) -> Option<(f64, i8)> {
        if self.is_zero() {
            return Some((lo, 0));
        }
        let a_dom = self.terms.iter().map(|t| t.decay).fold(f64::INFINITY, f64::min);
        let p_dom = self
            .terms
            .iter()
            .filter(|t| t.decay == a_dom)
            .map(|t| t.power)
            .fold(f64::NEG_INFINITY, f64::max);
        let (dominant, others): (Vec<&Term>, Vec<&Term>) =
            self.terms.iter().partition(|t| t.decay == a_dom && t.power == p_dom);
        let c0: f64 = dominant.iter().filter(|t| t.osc == Oscillation::None).map(|t| t.coeff).sum();
        let wiggle: f64 = dominant
            .iter()
            .filter(|t| t.osc != Oscillation::None)
            .map(|t| t.coeff.abs())
            .sum();
        let margin = c0.abs() - wiggle;
        if margin <= 0.0 {
            return None;
        }
        let sign = if c0 > 0.0 { 1 } else { -1 };
        // Each ratio |c| x^{Δp} e^{-Δa x} is nonincreasing past its turning point.
        let mut x = lo.max(1.0);
        for t in &others {
            let (da, dp) = (t.decay - a_dom, t.power - p_dom);
            if da > 0.0 && dp > 0.0 {
                x = x.max(dp / da);
            }
        }
        let ratio_sum = |x: f64| -> f64 {
            others
                .iter()
                .map(|t| {
                    let (da, dp) = (t.decay - a_dom, t.power - p_dom);
                    t.coeff.abs() * (dp * x.ln() - da * x).exp()
                })
                .sum()
        };
        for _ in 0..2000 {
            if ratio_sum(x) <= 0.5 * margin {
                return Some((x, sign));
            }
            x *= 2.0;
            if !x.is_finite() {
                break;
            }
        }
        None
    }
}

fn antiderivative_term(t: &Term, out: &mut Vec<Term>) -> Result<()> {
    if !t.has_integer_power() {
        if t.decay == 0.0 && t.osc == Oscillation::None {
            out.push(Term { coeff: t.coeff / (t.power + 1.0), power: t.power + 1.0, ..*t });
            return Ok(());
        }
        return Err(Error::UnrepresentableDensity(format!(
            "antiderivative of x^{} e^(-{} x) needs the incomplete gamma function",
            t.power, t.decay
        )));
    }
    let k = t.power as u32;
    let b = t.osc.frequency();
    if t.decay == 0.0 && b == 0.0 {
        out.push(Term { coeff: t.coeff / (k as f64 + 1.0), power: k as f64 + 1.0, ..*t });
        return Ok(());
    }
    // ∫ x^k e^{-z x} dx = -e^{-z x} Σ_j k!/(j! z^{k-j+1}) x^j with z = a - i b.
    let z = Complex64::new(t.decay, -b);
    let mut ratio = 1.0_f64; // k!/j!, built from j = k downward
    for j in (0..=k).rev() {
        if j < k {
            ratio *= (j + 1) as f64;
        }
        let w = -Complex64::new(ratio, 0.0) / z.powu(k - j + 1);
        let (u, v) = (w.re, w.im);
        let base = Term { coeff: 0.0, power: j as f64, decay: t.decay, osc: Oscillation::None };
        match t.osc {
            Oscillation::None => out.push(Term { coeff: t.coeff * u, ..base }),
            Oscillation::Cos(b) => {
                out.push(Term { coeff: t.coeff * u, osc: Oscillation::Cos(b), ..base });
                out.push(Term { coeff: -t.coeff * v, osc: Oscillation::Sin(b), ..base });
            }
            Oscillation::Sin(b) => {
                out.push(Term { coeff: t.coeff * v, osc: Oscillation::Cos(b), ..base });
                out.push(Term { coeff: t.coeff * u, osc: Oscillation::Sin(b), ..base });
            }
        }
    }
    Ok(())
}
