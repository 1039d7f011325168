//! Sign-change isolation for density expressions.
//!
//! Roots are bracketed by sampling on a fixed lattice `lo + i·step` and then
//! refined by Newton steps safeguarded by bisection. The lattice is
//! anchored at `lo`, so the root set does not depend on the order in which
//! ranges are requested; scanning is incremental and cached behind a lock.

use std::f64::consts::PI;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::expression::Expression;

/// Relative sampling resolution on bounded ranges.
pub const SAMPLE_FRACTION: f64 = 1e-3;
/// Absolute root tolerance.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug)]
struct ScanState {
    next_index: u64,
    scanned_to: f64,
    last_x: f64,
    last_v: f64,
    last_sign: i8,
    first_sign: i8,
    roots: Vec<f64>,
    complete: bool,
}

/// Lazily computed sign pattern of an expression on `[lo, hi)`.
#[derive(Debug)]
pub struct SignMap {
    expr: Expression,
    deriv: Expression,
    lo: f64,
    /// End of the region that needs scanning (`hi`, or the certified point
    /// past which the sign is constant); `None` means scan forever.
    scan_end: Option<f64>,
    tail_sign: Option<i8>,
    step: f64,
    state: RwLock<ScanState>,
}

impl SignMap {
    pub fn new(expr: Expression, lo: f64, hi: Option<f64>) -> Result<Self> {
        let freq = expr.max_frequency();
        let osc_step = if freq > 0.0 { PI / (4.0 * freq) } else { f64::INFINITY };
        let (scan_end, tail_sign) = match hi {
            Some(h) => (Some(h), None),
            None => match expr.eventual_sign(lo) {
                Some((x, s)) => (Some(x), Some(s)),
                None => (None, None),
            },
        };
        let step = match scan_end {
            Some(end) => {
                let len = (end - lo).max(f64::MIN_POSITIVE);
                (SAMPLE_FRACTION * len).min(osc_step)
            }
            None => osc_step,
        };
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::SignChangeIsolation { lo, hi: hi.unwrap_or(f64::INFINITY) });
        }
        Ok(SignMap {
            deriv: expr.derivative(),
            expr,
            lo,
            scan_end,
            tail_sign,
            step,
            state: RwLock::new(ScanState {
                next_index: 0,
                scanned_to: lo,
                last_x: lo,
                last_v: 0.0,
                last_sign: 0,
                first_sign: 0,
                roots: Vec::new(),
                complete: false,
            }),
        })
    }

    pub fn expression(&self) -> &Expression {
        &self.expr
    }

    /// Point past which the sign is certified constant (unbounded ranges only).
    pub fn eventual_sign(&self) -> Option<(f64, i8)> {
        Some((self.scan_end?, self.tail_sign?))
    }

    /// Whether the sign pattern is finite (bounded range or certified tail).
    pub fn is_finite_pattern(&self) -> bool {
        self.scan_end.is_some()
    }

    fn sample(&self, x: f64) -> Result<f64> {
        let v = self.expr.eval(x);
        if v.is_finite() {
            return Ok(v);
        }
        // Integrable singularity at the left end (negative real power at 0).
        let nudged = self.expr.eval(x + 1e-6 * self.step);
        if nudged.is_finite() {
            Ok(nudged)
        } else {
            Err(Error::SignChangeIsolation { lo: x, hi: x + self.step })
        }
    }

    fn ensure(&self, upto: f64) -> Result<()> {
        {
            let st = self.state.read().expect("sign map lock poisoned");
            if st.complete || st.scanned_to >= upto {
                return Ok(());
            }
        }
        let mut st = self.state.write().expect("sign map lock poisoned");
        while !st.complete && st.scanned_to < upto {
            let mut x = self.lo + st.next_index as f64 * self.step;
            if let Some(end) = self.scan_end {
                if x >= end {
                    x = end;
                    st.complete = true;
                }
            }
            st.next_index += 1;
            st.scanned_to = x;
            let v = self.sample(x)?;
            let s = sign_of(v);
            if s == 0 {
                continue;
            }
            if st.last_sign == 0 {
                st.first_sign = s;
            } else if s != st.last_sign {
                let root = self.refine(st.last_x, st.last_v, x, v)?;
                st.roots.push(root);
            }
            st.last_sign = s;
            st.last_x = x;
            st.last_v = v;
        }
        Ok(())
    }

    /// Root of the expression in `(a, b)`, given values of opposite sign at the ends.
    fn refine(&self, a: f64, fa: f64, b: f64, fb: f64) -> Result<f64> {
        let sign_a = sign_of(fa);
        let (mut a, mut b) = (a, b);
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        for iter in 0..200 {
            let tol = ROOT_TOL.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
            if b - a <= tol {
                break;
            }
            if iter % 8 == 7 {
                x = 0.5 * (a + b);
            }
            let fx = self.expr.eval(x);
            if !fx.is_finite() {
                return Err(Error::SignChangeIsolation { lo: a, hi: b });
            }
            if fx == 0.0 {
                return Ok(x);
            }
            if sign_of(fx) == sign_a {
                a = x;
            } else {
                b = x;
            }
            let d = self.deriv.eval(x);
            let step = fx / d;
            if step.abs() <= tol {
                return Ok(x);
            }
            let next = x - step;
            x = if next > a && next < b { next } else { 0.5 * (a + b) };
        }
        Ok(0.5 * (a + b))
    }

    /// Calls `f(piece_lo, piece_hi, sign)` for the maximal constant-sign pieces
    /// covering `[a, b]`, in increasing order.
    pub fn for_each_piece(&self, a: f64, b: f64, mut f: impl FnMut(f64, f64, i8)) -> Result<()> {
        if b <= a {
            return Ok(());
        }
        self.ensure(b)?;
        let st = self.state.read().expect("sign map lock poisoned");
        let start = st.roots.partition_point(|&r| r <= a);
        let mut sign = if start % 2 == 0 { st.first_sign } else { -st.first_sign };
        let mut left = a;
        for &r in &st.roots[start..] {
            if r >= b {
                break;
            }
            f(left, r, sign);
            left = r;
            sign = -sign;
        }
        f(left, b, sign);
        Ok(())
    }

    pub fn pieces(&self, a: f64, b: f64) -> Result<Vec<(f64, f64, i8)>> {
        let mut out = Vec::new();
        self.for_each_piece(a, b, |l, r, s| out.push((l, r, s)))?;
        Ok(out)
    }

    /// Sign-change points found so far inside `(a, b)`.
    pub fn roots_between(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        self.ensure(b)?;
        let st = self.state.read().expect("sign map lock poisoned");
        Ok(st.roots.iter().copied().filter(|&r| r > a && r < b).collect())
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::{Oscillation, Term};

    fn example() -> Expression {
        Expression::new([
            Term::simple(0.5, 1.0, 0.0).unwrap(),
            Term::new(1.0, 1.0, 0.0, Oscillation::Cos(1.0)).unwrap(),
        ])
    }

    #[test]
    fn isolates_cosine_roots() {
        let map = SignMap::new(example(), 0.0, Some(2.0 * PI)).unwrap();
        let roots = map.roots_between(0.0, 2.0 * PI).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 2.0 * PI / 3.0).abs() < 1e-11);
        assert!((roots[1] - 4.0 * PI / 3.0).abs() < 1e-11);
        let signs: Vec<i8> = map.pieces(0.0, 2.0 * PI).unwrap().iter().map(|p| p.2).collect();
        assert_eq!(signs, vec![1, -1, 1]);
    }

    #[test]
    fn lazy_unbounded_scan_is_order_independent() {
        let a = SignMap::new(example(), 0.0, None).unwrap();
        let b = SignMap::new(example(), 0.0, None).unwrap();
        assert!(!a.is_finite_pattern());
        a.ensure(50.0).unwrap();
        a.ensure(400.0).unwrap();
        b.ensure(400.0).unwrap();
        assert_eq!(a.roots_between(0.0, 400.0).unwrap(), b.roots_between(0.0, 400.0).unwrap());
        let k = 40.0;
        let r = a.roots_between(2.0 * PI * k, 2.0 * PI * (k + 1.0)).unwrap();
        assert!((r[0] - (2.0 * PI * k + 2.0 * PI / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn certified_tail_sign() {
        let e = Expression::new([
            Term::simple(1.0, 1.0, 0.0).unwrap(),
            Term::simple(-3.0, 0.0, 0.0).unwrap(),
        ]);
        let map = SignMap::new(e, 0.0, None).unwrap();
        let (_, s) = map.eventual_sign().unwrap();
        assert_eq!(s, 1);
        let roots = map.roots_between(0.0, 1e3).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 3.0).abs() < 1e-12);
    }
}
