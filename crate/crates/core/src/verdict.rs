//! Three-valued verdicts and finite-horizon surrogates for limits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Fraction of an index grid treated as its tail.
pub const TAIL_FRACTION: f64 = 0.25;
/// Relative band around a tolerance reported as inconclusive.
pub const BOUNDARY_BAND: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// `value ≤ tol`, inconclusive within the boundary band of a positive tolerance.
    pub fn at_most(value: f64, tol: f64) -> Status {
        if value.is_nan() {
            return Status::Inconclusive;
        }
        if tol > 0.0 && (value - tol).abs() < BOUNDARY_BAND * tol {
            return Status::Inconclusive;
        }
        if value <= tol {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// `value ≥ floor`, with the same boundary band.
    pub fn at_least(value: f64, floor: f64) -> Status {
        if value.is_nan() {
            return Status::Inconclusive;
        }
        if floor > 0.0 && (value - floor).abs() < BOUNDARY_BAND * floor {
            return Status::Inconclusive;
        }
        if value >= floor {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn all(iter: impl IntoIterator<Item = Status>) -> Status {
        iter.into_iter().fold(Status::Pass, Status::combine)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Serialises non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod float_repr {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("expected a number, got {other:?}"))),
            },
        }
    }
}

/// JSON value for a float, strings for non-finite values.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub params: BTreeMap<String, Value>,
    #[serde(with = "float_repr")]
    pub value: f64,
}

impl Witness {
    pub fn new(params: &[(&str, f64)], value: f64) -> Self {
        Witness { params: params.iter().map(|(k, v)| (k.to_string(), num(*v))).collect(), value }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    /// `k=v` pairs joined by `;`, for flat tables.
    pub fn label(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| match v.as_f64() {
                Some(f) => format!("{k}={f}"),
                None => format!("{k}={}", v.as_str().unwrap_or("?")),
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub check: String,
    pub status: Status,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    #[serde(default)]
    pub settings: BTreeMap<String, Value>,
    #[serde(default)]
    pub details: BTreeMap<String, Value>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub children: Vec<VerdictReport>,
}

impl VerdictReport {
    pub fn new(check: &str, status: Status) -> Self {
        VerdictReport {
            check: check.to_string(),
            status,
            witnesses: Vec::new(),
            settings: BTreeMap::new(),
            details: BTreeMap::new(),
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn setting(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.settings.insert(key.to_string(), value.into());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn child(&self, check: &str) -> Option<&VerdictReport> {
        self.children.iter().find(|c| c.check == check)
    }

    pub fn detail_f64(&self, key: &str) -> Option<f64> {
        self.details.get(key).and_then(Value::as_f64)
    }

    /// Report for a check that could not be evaluated.
    pub fn errored(check: &str, err: &dyn std::fmt::Display) -> Self {
        VerdictReport::new(check, Status::Inconclusive).detail("error", err.to_string())
    }
}

/// `⌈10^{k/10}⌉` for `k = 0, 1, …` up to `n_max`, deduplicated, ending at `n_max`.
pub fn index_grid(n_max: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let n = 10f64.powf(k as f64 / 10.0).ceil() as u64;
        if n >= n_max {
            break;
        }
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        k += 1;
    }
    grid.push(n_max.max(1));
    grid
}

/// The last quarter of a grid (at least two points when available).
pub fn tail_window<T: Copy>(grid: &[T]) -> Vec<T> {
    let len = grid.len();
    let take = ((len as f64 * TAIL_FRACTION).ceil() as usize).max(2).min(len);
    grid[len - take..].to_vec()
}

/// Finite surrogate for `lim_{n→∞} v(n)` from values on a tail window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub indices: Vec<u64>,
    pub values: Vec<f64>,
    /// Largest `|v(n) − target|` over the window.
    #[serde(with = "float_repr")]
    pub raw_deviation: f64,
    /// Index attaining `raw_deviation`.
    pub worst_index: u64,
    /// Richardson extrapolation assuming an `O(1/n)` error.
    pub extrapolated: Option<f64>,
    /// Largest distance from the last extrapolation to those of earlier
    /// consecutive pairs in the window.
    pub spread: Option<f64>,
}

impl TailEstimate {
    pub fn new(indices: Vec<u64>, values: Vec<f64>, target: f64) -> Self {
        let mut raw = 0.0;
        let mut worst = indices.last().copied().unwrap_or(0);
        for (&n, &v) in indices.iter().zip(&values) {
            let d = (v - target).abs();
            if !(d <= raw) {
                raw = d;
                worst = n;
            }
        }
        let (extrapolated, spread) = if values.iter().all(|&v| v == values[0]) {
            (Some(values[0]), Some(0.0))
        } else if values.len() >= 2 {
            let pairs: Vec<f64> = (1..values.len())
                .map(|i| richardson(indices[i - 1], values[i - 1], indices[i], values[i]))
                .collect();
            let last = *pairs.last().expect("nonempty");
            let spread = pairs.iter().map(|r| (r - last).abs()).fold(0.0, f64::max);
            (Some(last), (pairs.len() > 1).then_some(spread))
        } else {
            (None, None)
        };
        TailEstimate { indices, values, raw_deviation: raw, worst_index: worst, extrapolated, spread }
    }

    /// Deviation of the extrapolated limit from `target`, padded by the spread.
    pub fn extrapolated_deviation(&self, target: f64) -> Option<f64> {
        let e = self.extrapolated?;
        Some((e - target).abs() + self.spread.unwrap_or(0.0))
    }

    /// The statistic used for verdicts: the raw tail deviation, or the
    /// extrapolated one when enabled and smaller.
    pub fn deviation(&self, target: f64, extrapolate: bool) -> f64 {
        match (extrapolate, self.extrapolated_deviation(target)) {
            (true, Some(e)) => e.min(self.raw_deviation),
            _ => self.raw_deviation,
        }
    }

    pub fn max_value(&self) -> (u64, f64) {
        self.indices
            .iter()
            .zip(&self.values)
            .fold((0, f64::NEG_INFINITY), |acc, (&n, &v)| if v > acc.1 || v.is_nan() { (n, v) } else { acc })
    }

    pub fn summary(&self) -> Value {
        serde_json::json!({
            "n_from": self.indices.first(),
            "n_to": self.indices.last(),
            "points": self.indices.len(),
            "raw_deviation": num(self.raw_deviation),
            "extrapolated": self.extrapolated.map(num),
            "spread": self.spread.map(num),
        })
    }
}

/// `(n₂ v₂ − n₁ v₁)/(n₂ − n₁)`, exact for `v(n) = L + c/n`.
fn richardson(n1: u64, v1: f64, n2: u64, v2: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    (b * v2 - a * v1) / (b - a)
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
