//! Generalised signed Radon measures on `[0, ∞)`.
//!
//! A [`SignedMeasure`] is a finite list of point masses plus density segments
//! carrying closed-form [`Expression`]s. Jordan parts of densities whose sign
//! changes infinitely often (for instance `x(1/2 + cos x)` on `[0, ∞)`) are
//! kept as clipped segments backed by a lazily scanned [`SignMap`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expression::{Expression, Oscillation, Term};
use crate::roots::SignMap;
use crate::sum::NeumaierSum;

/// Relative size of the neglected tail when an infinite range has to be cut.
pub const TAIL_REL_TOL: f64 = 1e-13;

/// Real number or `+∞`. Set evaluations follow the convention that the value
/// is `+∞` as soon as either Jordan part of the set has infinite mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(location: f64, weight: f64) -> Result<Self> {
        if !(location.is_finite() && location >= 0.0) {
            return Err(Error::InvalidArgument(format!("atom location {location} is not in [0, ∞)")));
        }
        if !weight.is_finite() {
            return Err(Error::InvalidArgument("atom weight must be finite".into()));
        }
        Ok(Atom { location, weight })
    }
}

/// Which function of the segment expression `g` is the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// `g`
    Whole,
    /// `max(g, 0)`
    Positive,
    /// `max(-g, 0)`
    Negative,
    /// `|g|`
    Abs,
}

/// Sign pattern shared between segments whose expressions are positive
/// multiples of each other; `scale` maps segment coordinates to map coordinates.
#[derive(Debug, Clone)]
struct SignSource {
    map: Arc<SignMap>,
    scale: f64,
}

/// Density `±part(g)` on `[lo, hi)`, `hi = None` meaning `+∞`.
#[derive(Debug, Clone)]
pub struct DensitySegment {
    lo: f64,
    hi: Option<f64>,
    density: Expression,
    part: Part,
    negated: bool,
    signs: Option<SignSource>,
}

impl PartialEq for DensitySegment {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo
            && self.hi == other.hi
            && self.density == other.density
            && self.part == other.part
            && self.negated == other.negated
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Weight {
    One,
    /// `e^{-λx}`
    Exp(f64),
    /// `α + βx`, nonnegative on the integration range
    Affine(f64, f64),
}

impl DensitySegment {
    pub fn new(lo: f64, hi: Option<f64>, density: Expression) -> Result<Self> {
        if !(lo.is_finite() && lo >= 0.0) {
            return Err(Error::InvalidArgument(format!("segment start {lo} is not in [0, ∞)")));
        }
        if let Some(h) = hi {
            if !(h > lo) || h.is_nan() {
                return Err(Error::InvalidArgument(format!("segment [{lo}, {h}) is empty")));
            }
            if h.is_infinite() {
                return DensitySegment::new(lo, None, density);
            }
        }
        Ok(DensitySegment { lo, hi, density, part: Part::Whole, negated: false, signs: None })
    }

    /// Segment with a clipped density; the sign pattern is scanned lazily.
    pub fn with_part(lo: f64, hi: Option<f64>, density: Expression, part: Part, negated: bool) -> Result<Self> {
        let mut seg = DensitySegment::new(lo, hi, density)?;
        if part != Part::Whole {
            let map = SignMap::new(seg.density.clone(), seg.lo, seg.hi)?;
            seg.signs = Some(SignSource { map: Arc::new(map), scale: 1.0 });
            seg.part = part;
            seg.negated = negated;
        } else if negated {
            seg.density = seg.density.scaled(-1.0);
        }
        Ok(seg)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> Option<f64> {
        self.hi
    }

    pub fn expression(&self) -> &Expression {
        &self.density
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    fn hi_or_inf(&self) -> f64 {
        self.hi.unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x < self.hi_or_inf()
    }

    pub fn density_at(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        let g = self.density.eval(x);
        let v = match self.part {
            Part::Whole => g,
            Part::Positive => g.max(0.0),
            Part::Negative => (-g).max(0.0),
            Part::Abs => g.abs(),
        };
        if self.negated {
            -v
        } else {
            v
        }
    }

    fn piece_factor(&self, sign: i8) -> f64 {
        let f = match self.part {
            Part::Whole => 1.0,
            Part::Positive => (sign > 0) as i32 as f64,
            Part::Negative => -((sign < 0) as i32 as f64),
            Part::Abs => sign as f64,
        };
        if self.negated {
            -f
        } else {
            f
        }
    }

    fn for_each_piece(&self, a: f64, b: f64, mut f: impl FnMut(f64, f64, i8)) -> Result<()> {
        let src = self.signs.as_ref().expect("clipped segment without sign map");
        let s = src.scale;
        src.map.for_each_piece(a * s, b * s, |l, r, sign| f(l / s, r / s, sign))
    }

    fn tail_sign(&self) -> Option<(f64, i8)> {
        let src = self.signs.as_ref()?;
        src.map.eventual_sign().map(|(x, s)| (x / src.scale, s))
    }

    /// `∫_{[a,b] ∩ segment} weight(x) density(x) dx` with a certified bound on
    /// any neglected tail. `None` signals divergence.
    pub(crate) fn integral(&self, a: f64, b: Option<f64>, weight: Weight) -> Result<Option<(f64, f64)>> {
        let lo = a.max(self.lo);
        let hi = match (b, self.hi) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) => Some(x),
            (None, y) => y,
        };
        if let Some(h) = hi {
            if h <= lo {
                return Ok(Some((0.0, 0.0)));
            }
        }
        let (expr, extra) = match weight {
            Weight::One => (self.density.clone(), 0.0),
            Weight::Exp(lam) => (self.density.clone(), lam),
            Weight::Affine(alpha, beta) => (self.density.times_affine(alpha, beta), 0.0),
        };
        if self.part == Part::Whole {
            return Ok(expr.integral(lo, hi, extra).map(|v| (v, 0.0)));
        }
        // Consecutive pieces share endpoints, so an antiderivative (when it
        // exists in closed form) costs one evaluation per piece.
        let anti = expr.tilted(extra).antiderivative().ok();
        let mut last: Option<(f64, f64)> = None;
        let mut acc = NeumaierSum::default();
        let mut piece_sum = |l: f64, r: f64, sign: i8| {
            let factor = self.piece_factor(sign);
            let v = match &anti {
                Some(g) => {
                    let gl = match last {
                        Some((x, gx)) if x == l => gx,
                        _ => g.eval(l),
                    };
                    let gr = g.eval(r);
                    last = Some((r, gr));
                    gr - gl
                }
                None => {
                    if factor == 0.0 {
                        return;
                    }
                    expr.integral(l, Some(r), extra).unwrap_or(0.0)
                }
            };
            if factor != 0.0 {
                acc.add(factor * v);
            }
        };
        match hi {
            Some(h) => {
                self.for_each_piece(lo, h, &mut piece_sum)?;
                Ok(Some((acc.value(), 0.0)))
            }
            None => {
                if let Some((x_tail, sign)) = self.tail_sign() {
                    let split = x_tail.max(lo);
                    self.for_each_piece(lo, split, &mut piece_sum)?;
                    let factor = self.piece_factor(sign);
                    let tail = if factor == 0.0 {
                        0.0
                    } else {
                        match expr.integral(split, None, extra) {
                            Some(v) => factor * v,
                            None => return Ok(None),
                        }
                    };
                    acc.add(tail);
                    return Ok(Some((acc.value(), 0.0)));
                }
                let total = match expr.envelope_tail(lo, extra) {
                    Some(t) => t,
                    None => return Ok(None),
                };
                let cut = match expr.tail_cutoff(lo, extra, TAIL_REL_TOL * total) {
                    Some(c) => c,
                    None => return Ok(None),
                };
                self.for_each_piece(lo, cut, &mut piece_sum)?;
                let bound = expr.envelope_tail(cut, extra).unwrap_or(0.0);
                Ok(Some((acc.value(), bound)))
            }
        }
    }

    fn tilted(&self, eps: f64) -> DensitySegment {
        DensitySegment { density: self.density.tilted(eps), ..self.clone() }
    }

    /// Segment of `ν` with `ν((a,b]) = μ((t a, t b]) / c`.
    fn rescaled(&self, t: f64, c: f64) -> DensitySegment {
        let hi = self.hi.map(|h| h / t);
        match self.part {
            Part::Whole => DensitySegment {
                lo: self.lo / t,
                hi,
                density: self.density.rescaled(t, t / c),
                part: Part::Whole,
                negated: false,
                signs: None,
            },
            _ => DensitySegment {
                lo: self.lo / t,
                hi,
                density: self.density.rescaled(t, t / c.abs()),
                part: self.part,
                negated: self.negated ^ (c < 0.0),
                signs: self.signs.as_ref().map(|s| SignSource { map: s.map.clone(), scale: s.scale * t }),
            },
        }
    }

    fn clipped(&self, lo: f64, hi: Option<f64>) -> Option<DensitySegment> {
        let new_lo = lo.max(self.lo);
        let new_hi = match (hi, self.hi) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) => Some(x),
            (None, y) => y,
        };
        if let Some(h) = new_hi {
            if h <= new_lo {
                return None;
            }
        }
        Some(DensitySegment { lo: new_lo, hi: new_hi, ..self.clone() })
    }

    /// Split into constant-sign pieces `(segment, sign)`, where each piece is a
    /// `Whole` segment except for lazily scanned infinite tails.
    fn sign_split(&self) -> Result<Vec<(DensitySegment, i8)>> {
        if self.part != Part::Whole {
            let sign = if self.negated { -1 } else { 1 };
            return Ok(vec![(self.clone(), sign)]);
        }
        let map = Arc::new(SignMap::new(self.density.clone(), self.lo, self.hi)?);
        let mut out = Vec::new();
        let whole = |l: f64, r: Option<f64>, s: i8, out: &mut Vec<(DensitySegment, i8)>| {
            if s != 0 && r.map_or(true, |r| r > l) {
                out.push((
                    DensitySegment { lo: l, hi: r, density: self.density.clone(), part: Part::Whole, negated: false, signs: None },
                    s,
                ));
            }
        };
        match (self.hi, map.eventual_sign()) {
            (Some(h), _) => {
                for (l, r, s) in map.pieces(self.lo, h)? {
                    whole(l, Some(r), s, &mut out);
                }
            }
            (None, Some((x, sign))) => {
                let split = x.max(self.lo);
                if split > self.lo {
                    for (l, r, s) in map.pieces(self.lo, split)? {
                        whole(l, Some(r), s, &mut out);
                    }
                }
                whole(split, None, sign, &mut out);
            }
            (None, None) => {
                // Infinitely many sign changes: keep the pattern lazy.
                let src = SignSource { map, scale: 1.0 };
                let mk = |part| DensitySegment {
                    lo: self.lo,
                    hi: None,
                    density: self.density.clone(),
                    part,
                    negated: false,
                    signs: Some(src.clone()),
                };
                out.push((mk(Part::Positive), 1));
                out.push((mk(Part::Negative), -1));
            }
        }
        Ok(out)
    }
}

/// A generalised signed Radon measure in canonical form: atoms sorted by
/// location with merged weights, density segments sorted and pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedMeasure {
    atoms: Vec<Atom>,
    segments: Vec<DensitySegment>,
}

impl SignedMeasure {
    pub fn new(atoms: Vec<Atom>, segments: Vec<DensitySegment>) -> Result<Self> {
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.location == a.location => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| a.weight != 0.0);

        let mut segs: Vec<DensitySegment> = segments.into_iter().filter(|s| !s.density.is_zero()).collect();
        segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in segs.windows(2) {
            if w[0].hi_or_inf() > w[1].lo {
                return Err(Error::OverlappingSegments { lo: w[1].lo, hi: w[0].hi_or_inf() });
            }
        }
        let mut joined: Vec<DensitySegment> = Vec::with_capacity(segs.len());
        for s in segs {
            match joined.last_mut() {
                Some(last)
                    if last.part == Part::Whole
                        && s.part == Part::Whole
                        && last.hi == Some(s.lo)
                        && last.density == s.density =>
                {
                    last.hi = s.hi;
                }
                _ => joined.push(s),
            }
        }
        Ok(SignedMeasure { atoms: merged, segments: joined })
    }

    pub fn zero() -> Self {
        SignedMeasure::default()
    }

    pub fn dirac(location: f64, weight: f64) -> Result<Self> {
        SignedMeasure::new(vec![Atom::new(location, weight)?], vec![])
    }

    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms = atoms.iter().map(|&(x, w)| Atom::new(x, w)).collect::<Result<Vec<_>>>()?;
        SignedMeasure::new(atoms, vec![])
    }

    /// Density `expr` on `[lo, hi)`.
    pub fn with_density(lo: f64, hi: Option<f64>, expr: Expression) -> Result<Self> {
        SignedMeasure::new(vec![], vec![DensitySegment::new(lo, hi, expr)?])
    }

    /// Lebesgue measure on `[0, ∞)`.
    pub fn lebesgue() -> Self {
        SignedMeasure::with_density(0.0, None, Expression::constant(1.0)).expect("valid segment")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[DensitySegment] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn has_atom_at(&self, x: f64) -> bool {
        self.atoms.iter().any(|a| a.location == x)
    }

    /// Whether any segment reaches `+∞`.
    pub fn has_unbounded_support(&self) -> bool {
        self.segments.iter().any(|s| s.hi.is_none())
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.segments.iter().map(|s| s.density_at(x)).sum()
    }

    /// `μ(I)` for `I = (a, b]` or `[a, b]`; `b = None` means `+∞` (and the
    /// right end is then open).
    pub fn eval_interval(&self, a: f64, b: Option<f64>, include_left: bool) -> ExtendedReal {
        match self.weighted(a, b, include_left, Weight::One) {
            Ok(Some((v, _))) => ExtendedReal::Finite(v),
            _ => ExtendedReal::PosInfinity,
        }
    }

    /// `F_μ(x)`: zero at the origin and `μ([0, x])` for `x > 0`.
    pub fn distribution(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.eval_interval(0.0, Some(x), true).to_f64()
    }

    /// `∫_{[a,b]} (α + βx) μ(dx)`, used for piecewise-linear test functions.
    pub fn integrate_affine(&self, a: f64, b: f64, alpha: f64, beta: f64, include_left: bool) -> Result<f64> {
        match self.weighted(a, Some(b), include_left, Weight::Affine(alpha, beta))? {
            Some((v, _)) => Ok(v),
            None => Err(Error::InvalidArgument("affine integral diverged on a bounded range".into())),
        }
    }

    /// `Ψ_μ(λ)` together with a bound on the neglected tail.
    pub fn laplace(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda > 0.0) {
            let divergent = self
                .segments
                .iter()
                .any(|s| s.hi.is_none() && s.density.terms().iter().any(|t| t.decay + lambda <= 0.0));
            if divergent || lambda.is_nan() {
                return Err(Error::DivergentTransform { lambda });
            }
        }
        match self.weighted(0.0, None, true, Weight::Exp(lambda))? {
            Some(v) => Ok(v),
            None => Err(Error::DivergentTransform { lambda }),
        }
    }

    fn weighted(&self, a: f64, b: Option<f64>, include_left: bool, weight: Weight) -> Result<Option<(f64, f64)>> {
        let mut acc = NeumaierSum::default();
        for atom in &self.atoms {
            let x = atom.location;
            let left_ok = if include_left { x >= a } else { x > a };
            if left_ok && b.map_or(true, |b| x <= b) {
                let w = match weight {
                    Weight::One => 1.0,
                    Weight::Exp(lam) => (-lam * x).exp(),
                    Weight::Affine(alpha, beta) => alpha + beta * x,
                };
                acc.add(atom.weight * w);
            }
        }
        let mut err = 0.0;
        for seg in &self.segments {
            match seg.integral(a, b, weight)? {
                Some((v, e)) => {
                    acc.add(v);
                    err += e;
                }
                None => return Ok(None),
            }
        }
        Ok(Some((acc.value(), err)))
    }

    /// Jordan decomposition `(μ⁺, μ⁻)`, both nonnegative.
    pub fn jordan(&self) -> Result<(SignedMeasure, SignedMeasure)> {
        let (mut pos_atoms, mut neg_atoms) = (Vec::new(), Vec::new());
        for a in &self.atoms {
            if a.weight > 0.0 {
                pos_atoms.push(*a);
            } else {
                neg_atoms.push(Atom { location: a.location, weight: -a.weight });
            }
        }
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for seg in &self.segments {
            for (piece, sign) in seg.sign_split()? {
                let (dest, flip) = if sign > 0 { (&mut pos, false) } else { (&mut neg, true) };
                dest.push(nonnegative_piece(piece, flip));
            }
        }
        Ok((SignedMeasure::new(pos_atoms, pos)?, SignedMeasure::new(neg_atoms, neg)?))
    }

    /// `|μ| = μ⁺ + μ⁻`.
    pub fn total_variation(&self) -> Result<SignedMeasure> {
        let atoms: Vec<Atom> = self.atoms.iter().map(|a| Atom { weight: a.weight.abs(), ..*a }).collect();
        let mut segs = Vec::new();
        for seg in &self.segments {
            let pieces = seg.sign_split()?;
            let lazy_pair = pieces.len() == 2
                && pieces[0].0.part == Part::Positive
                && pieces[1].0.part == Part::Negative
                && seg.part == Part::Whole;
            if lazy_pair {
                segs.push(DensitySegment { part: Part::Abs, ..pieces[0].0.clone() });
            } else {
                for (piece, sign) in pieces {
                    segs.push(nonnegative_piece(piece, sign < 0));
                }
            }
        }
        SignedMeasure::new(atoms, segs)
    }

    pub fn is_nonnegative(&self) -> Result<bool> {
        Ok(self.jordan()?.1.is_zero())
    }

    /// `e^{-εx} μ(dx)`.
    pub fn tilt(&self, eps: f64) -> SignedMeasure {
        SignedMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { weight: a.weight * (-eps * a.location).exp(), ..*a })
                .collect(),
            segments: self.segments.iter().map(|s| s.tilted(eps)).collect(),
        }
    }

    /// `ν` with `ν((a, b]) = μ((t a, t b]) / c`.
    pub fn scale_normalize(&self, t: f64, c: f64) -> Result<SignedMeasure> {
        if !(t > 0.0 && t.is_finite()) || c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("scale_normalize needs t > 0 and c ≠ 0, got t = {t}, c = {c}")));
        }
        let atoms = self.atoms.iter().map(|a| Atom { location: a.location / t, weight: a.weight / c }).collect();
        let segments = self.segments.iter().map(|s| s.rescaled(t, c)).collect();
        SignedMeasure::new(atoms, segments)
    }

    /// `μ|_{[0, T]}`.
    pub fn restrict(&self, t: f64) -> SignedMeasure {
        SignedMeasure {
            atoms: self.atoms.iter().copied().filter(|a| a.location <= t).collect(),
            segments: self.segments.iter().filter_map(|s| s.clipped(0.0, Some(t))).collect(),
        }
    }

    /// The measure `ξ` with density `1_{[X,∞)}(t) F_μ(t)`.
    pub fn integrated_tail(&self, x_start: f64) -> Result<SignedMeasure> {
        if !(x_start > 0.0 && x_start.is_finite()) {
            return Err(Error::InvalidArgument(format!("integrated tail needs X > 0, got {x_start}")));
        }
        let mut breaks = vec![x_start];
        breaks.extend(self.atoms.iter().map(|a| a.location).filter(|&x| x > x_start));
        for s in &self.segments {
            if s.part != Part::Whole && s.hi_or_inf() > x_start {
                return Err(Error::UnrepresentableDensity(
                    "distribution function of a clipped density has no closed form".into(),
                ));
            }
            breaks.extend([s.lo, s.hi_or_inf()].into_iter().filter(|&x| x > x_start && x.is_finite()));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut segs = Vec::new();
        for (i, &p) in breaks.iter().enumerate() {
            let q = breaks.get(i + 1).copied();
            let f_p = self.distribution(p);
            let covering = self.segments.iter().find(|s| s.contains(p));
            let expr = match covering {
                Some(s) => {
                    let g = s.density.antiderivative()?;
                    g.plus(&Expression::constant(f_p - g.eval(p)))
                }
                None => Expression::constant(f_p),
            };
            if !expr.is_zero() {
                segs.push(DensitySegment::new(p, q, expr)?);
            }
        }
        SignedMeasure::new(vec![], segs)
    }

    /// `α μ`.
    pub fn scaled(&self, alpha: f64) -> SignedMeasure {
        if alpha == 0.0 {
            return SignedMeasure::zero();
        }
        SignedMeasure {
            atoms: self.atoms.iter().map(|a| Atom { weight: a.weight * alpha, ..*a }).collect(),
            segments: self
                .segments
                .iter()
                .map(|s| match s.part {
                    Part::Whole => DensitySegment { density: s.density.scaled(alpha), ..s.clone() },
                    _ => DensitySegment {
                        density: s.density.scaled(alpha.abs()),
                        negated: s.negated ^ (alpha < 0.0),
                        ..s.clone()
                    },
                })
                .collect(),
        }
    }

    /// `μ + ν`. Overlapping `Whole` densities are summed on a common
    /// refinement; overlapping clipped densities are not representable.
    pub fn plus(&self, other: &SignedMeasure) -> Result<SignedMeasure> {
        let atoms: Vec<Atom> = self.atoms.iter().chain(other.atoms.iter()).copied().collect();
        let all: Vec<&DensitySegment> = self.segments.iter().chain(other.segments.iter()).collect();
        let mut breaks: Vec<f64> = all.iter().flat_map(|s| [s.lo, s.hi_or_inf()]).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut segs = Vec::new();
        for w in breaks.windows(2) {
            let (p, q) = (w[0], w[1]);
            let covering: Vec<&&DensitySegment> = all.iter().filter(|s| s.contains(p)).collect();
            match covering.len() {
                0 => {}
                1 => {
                    if let Some(c) = covering[0].clipped(p, q.is_finite().then_some(q)) {
                        segs.push(c);
                    }
                }
                _ => {
                    if covering.iter().any(|s| s.part != Part::Whole) {
                        return Err(Error::OverlappingSegments { lo: p, hi: q });
                    }
                    let expr = covering.iter().fold(Expression::zero(), |acc, s| acc.plus(&s.density));
                    segs.push(DensitySegment::new(p, q.is_finite().then_some(q), expr)?);
                }
            }
        }
        SignedMeasure::new(atoms, segs)
    }
}

fn nonnegative_piece(piece: DensitySegment, flip: bool) -> DensitySegment {
    match piece.part {
        Part::Whole if flip => DensitySegment { density: piece.density.scaled(-1.0), ..piece },
        Part::Whole => piece,
        _ => DensitySegment { negated: false, ..piece },
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"atoms":[{"x":1.0,"w":-1.0}],
//             "segments":[{"lo":0,"hi":null,"terms":[{"c":0.5,"k":1,"a":0,"osc":null}]}]}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscSpec {
    Cos(f64),
    Sin(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub c: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub osc: Option<OscSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: f64,
    pub w: f64,
}

fn is_whole(p: &Part) -> bool {
    *p == Part::Whole
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn whole() -> Part {
    Part::Whole
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub lo: f64,
    pub hi: Option<f64>,
    pub terms: Vec<TermSpec>,
    #[serde(default = "whole", skip_serializing_if = "is_whole")]
    pub part: Part,
    #[serde(default, skip_serializing_if = "is_false")]
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub segments: Vec<SegmentSpec>,
}

impl TermSpec {
    pub fn to_term(&self) -> Result<Term> {
        let osc = match self.osc {
            None => Oscillation::None,
            Some(OscSpec::Cos(b)) => Oscillation::Cos(b),
            Some(OscSpec::Sin(b)) => Oscillation::Sin(b),
        };
        Term::new(self.c, self.k, self.a, osc)
    }

    fn from_term(t: &Term) -> Self {
        TermSpec {
            c: t.coeff,
            k: t.power,
            a: t.decay,
            osc: match t.osc {
                Oscillation::None => None,
                Oscillation::Cos(b) => Some(OscSpec::Cos(b)),
                Oscillation::Sin(b) => Some(OscSpec::Sin(b)),
            },
        }
    }
}

impl TryFrom<MeasureSpec> for SignedMeasure {
    type Error = Error;

    fn try_from(spec: MeasureSpec) -> Result<Self> {
        let atoms = spec.atoms.iter().map(|a| Atom::new(a.x, a.w)).collect::<Result<Vec<_>>>()?;
        let mut segments = Vec::with_capacity(spec.segments.len());
        for s in &spec.segments {
            let terms = s.terms.iter().map(TermSpec::to_term).collect::<Result<Vec<_>>>()?;
            segments.push(DensitySegment::with_part(s.lo, s.hi, Expression::new(terms), s.part, s.negated)?);
        }
        SignedMeasure::new(atoms, segments)
    }
}

impl From<&SignedMeasure> for MeasureSpec {
    fn from(m: &SignedMeasure) -> Self {
        MeasureSpec {
            atoms: m.atoms.iter().map(|a| AtomSpec { x: a.location, w: a.weight }).collect(),
            segments: m
                .segments
                .iter()
                .map(|s| SegmentSpec {
                    lo: s.lo,
                    hi: s.hi,
                    terms: s.density.terms().iter().map(TermSpec::from_term).collect(),
                    part: s.part,
                    negated: s.negated,
                })
                .collect(),
        }
    }
}

impl Serialize for SignedMeasure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignedMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = MeasureSpec::deserialize(deserializer)?;
        SignedMeasure::try_from(spec).map_err(serde::de::Error::custom)
    }
}
