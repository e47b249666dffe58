//! Concave fiber maps and the pair `{f0, f1}` that drives the skew product.
//!
//! Every built-in family has closed-form value, derivative, logarithmic
//! derivative slope and inverse, so the word compositions below never need
//! numerical differentiation. The formulas are valid on all of ℝ where the
//! Möbius denominator stays positive, which also provides the extensions used
//! by the bifurcation families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::word::Word;

/// Numerical tolerances shared by every operation on a pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bisection tolerance; also the slack for boundary ties.
    pub bisect: f64,
    /// Classifies parabolic vs hyperbolic fixed points.
    pub parab: f64,
    /// Slack for measure-level inequalities.
    pub meas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { bisect: 1e-12, parab: 1e-9, meas: 1e-9 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("bisect", self.bisect), ("parab", self.parab), ("meas", self.meas)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A concave increasing interval map given by a closed formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FiberMap {
    /// `x ↦ x + c·x(1−x)`.
    LogisticLike { c: f64 },
    /// `x ↦ A(x−d)/(1+B(x−d))`.
    Moebius { a: f64, b: f64, d: f64 },
    /// `x ↦ A(x−d)/(1+B(x−d)) + shift`.
    ShiftedMoebius { a: f64, b: f64, d: f64, shift: f64 },
}

impl FiberMap {
    pub fn logistic(c: f64) -> Self {
        FiberMap::LogisticLike { c }
    }

    pub fn moebius(a: f64, b: f64, d: f64) -> Self {
        FiberMap::Moebius { a, b, d }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            FiberMap::LogisticLike { .. } => "logistic",
            FiberMap::Moebius { .. } => "moebius",
            FiberMap::ShiftedMoebius { .. } => "shifted_moebius",
        }
    }

    /// `(A, B, d, shift)` for the Möbius families.
    fn moebius_params(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            FiberMap::LogisticLike { .. } => None,
            FiberMap::Moebius { a, b, d } => Some((a, b, d, 0.0)),
            FiberMap::ShiftedMoebius { a, b, d, shift } => Some((a, b, d, shift)),
        }
    }

    /// The same map translated vertically by `t`.
    pub fn shifted(&self, t: f64) -> Result<Self> {
        match self.moebius_params() {
            Some((a, b, d, s)) => Ok(FiberMap::ShiftedMoebius { a, b, d, shift: s + t }),
            None => Err(Error::InvalidParameter("only Möbius maps have built-in shift families".into())),
        }
    }

    /// Whether the closed formula is defined (finite, positive derivative) at `x`.
    pub fn is_defined_at(&self, x: f64) -> bool {
        match self.moebius_params() {
            Some((_, b, d, _)) => 1.0 + b * (x - d) > 0.0,
            None => true,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            FiberMap::LogisticLike { c } => x + c * x * (1.0 - x),
            _ => {
                let (a, b, d, s) = self.moebius_params().unwrap();
                let u = x - d;
                a * u / (1.0 + b * u) + s
            }
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            FiberMap::LogisticLike { c } => 1.0 + c - 2.0 * c * x,
            _ => {
                let (a, b, d, _) = self.moebius_params().unwrap();
                let q = 1.0 + b * (x - d);
                a / (q * q)
            }
        }
    }

    /// `d/dx log f'(x)`; non-positive for every built-in family.
    pub fn log_deriv_slope(&self, x: f64) -> f64 {
        match *self {
            FiberMap::LogisticLike { c } => -2.0 * c / (1.0 + c - 2.0 * c * x),
            _ => {
                let (_, b, d, _) = self.moebius_params().unwrap();
                -2.0 * b / (1.0 + b * (x - d))
            }
        }
    }

    /// Analytic inverse on ℝ; `None` where the formula has no preimage.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        match *self {
            FiberMap::LogisticLike { c } => {
                // c·x² − (1+c)·x + y = 0, smaller root in the stable form.
                let p = 1.0 + c;
                let disc = p * p - 4.0 * c * y;
                if disc < 0.0 {
                    return None;
                }
                Some(2.0 * y / (p + disc.sqrt()))
            }
            _ => {
                let (a, b, d, s) = self.moebius_params().unwrap();
                let v = y - s;
                let den = a - b * v;
                if den <= 0.0 {
                    return None;
                }
                Some(d + v / den)
            }
        }
    }

    /// Inverse by bisection on `[lo, hi]`, for maps without a usable closed form.
    pub fn inverse_by_bisection(&self, y: f64, lo: f64, hi: f64) -> Option<f64> {
        let (flo, fhi) = (self.eval(lo), self.eval(hi));
        if y < flo.min(fhi) || y > flo.max(fhi) {
            return None;
        }
        Some(bisect(|x| self.eval(x) - y, lo, hi))
    }
}

impl fmt::Display for FiberMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FiberMap::LogisticLike { c } => write!(f, "logistic(c={c})"),
            FiberMap::Moebius { a, b, d } => write!(f, "moebius(A={a}, B={b}, d={d})"),
            FiberMap::ShiftedMoebius { a, b, d, shift } => {
                write!(f, "shifted_moebius(A={a}, B={b}, d={d}, t={shift})")
            }
        }
    }
}

/// Parses the `Display` form, e.g. `logistic(c=0.5)` or `moebius(A=2, B=1, d=0.4)`.
impl FromStr for FiberMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("map `{s}`: {msg}"));
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(|| bad("expected name(key=value, ...)"))?;
        let body = rest.strip_suffix(')').ok_or_else(|| bad("missing closing parenthesis"))?;
        let mut params = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(&format!("`{}` is not a number", v.trim())))?;
            if params.insert(k.trim().to_string(), v).is_some() {
                return Err(bad(&format!("duplicate key {}", k.trim())));
            }
        }
        let keys: &[&str] = match name.trim() {
            "logistic" => &["c"],
            "moebius" => &["A", "B", "d"],
            "shifted_moebius" => &["A", "B", "d", "t"],
            other => return Err(bad(&format!("unknown family `{other}`"))),
        };
        let mut vals = Vec::with_capacity(keys.len());
        for k in keys {
            vals.push(params.remove(*k).ok_or_else(|| bad(&format!("missing parameter {k}")))?);
        }
        if let Some(k) = params.keys().next() {
            return Err(bad(&format!("unexpected parameter {k}")));
        }
        Ok(match *vals.as_slice() {
            [c] => FiberMap::LogisticLike { c },
            [a, b, d] => FiberMap::Moebius { a, b, d },
            [a, b, d, shift] => FiberMap::ShiftedMoebius { a, b, d, shift },
            _ => unreachable!(),
        })
    }
}

/// The two fiber maps: `f0` on `[0,1]` and `f1` on `[d,1]`, with a concavity
/// modulus `M` (an over-estimate is fine).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberPair {
    pub f0: FiberMap,
    pub f1: FiberMap,
    pub d: f64,
    pub modulus: f64,
    pub tol: Tolerances,
}

impl FiberPair {
    /// Builds a pair; `d` is the zero of `f1`.
    pub fn new(f0: FiberMap, f1: FiberMap, modulus: f64) -> Result<Self> {
        let d = f1
            .inverse(0.0)
            .ok_or_else(|| Error::InvalidParameter(format!("{f1} has no zero")))?;
        FiberPair::with_domain(f0, f1, d, modulus)
    }

    pub fn with_domain(f0: FiberMap, f1: FiberMap, d: f64, modulus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::InvalidParameter(format!("domain split d = {d} outside [0,1]")));
        }
        if !(modulus > 0.0) {
            return Err(Error::InvalidParameter(format!("modulus must be positive, got {modulus}")));
        }
        Ok(FiberPair { f0, f1, d, modulus, tol: Tolerances::default() })
    }

    /// The reference configuration: `f0 = logistic(c=0.5)`,
    /// `f1 = moebius(A=2, B=1, d=0.4)`, `M = 2`.
    pub fn reference() -> Self {
        FiberPair::new(FiberMap::logistic(0.5), FiberMap::moebius(2.0, 1.0, 0.4), 2.0)
            .expect("reference pair is well formed")
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn map(&self, symbol: u8) -> &FiberMap {
        if symbol == 0 { &self.f0 } else { &self.f1 }
    }

    /// Left end of the domain of `f_symbol`.
    pub fn domain_lo(&self, symbol: u8) -> f64 {
        if symbol == 0 { 0.0 } else { self.d }
    }

    /// Snaps `x` into the closed domain of `f_symbol` when it lies within the
    /// tie tolerance of a boundary; `None` if it is genuinely outside.
    pub fn snap(&self, symbol: u8, x: f64) -> Option<f64> {
        let lo = self.domain_lo(symbol);
        let tol = self.tol.bisect;
        if x < lo - tol || x > 1.0 + tol || x.is_nan() {
            None
        } else {
            Some(x.clamp(lo, 1.0))
        }
    }

    /// One step of the IFS, honoring the boundary tie rule.
    pub fn step(&self, symbol: u8, x: f64) -> Option<f64> {
        self.snap(symbol, x).map(|x| self.map(symbol).eval(x))
    }

    fn check_unit(&self, x: f64) -> Result<()> {
        let tol = self.tol.bisect;
        if x < -tol || x > 1.0 + tol || x.is_nan() {
            return Err(Error::InvalidParameter(format!("point {x} outside [0,1]")));
        }
        Ok(())
    }

    /// `f_[word](x)`, applying `word[0]` first.
    pub fn eval_word(&self, word: &Word, x: f64) -> Result<f64> {
        self.check_unit(x)?;
        let mut x = x.clamp(0.0, 1.0);
        for (k, &s) in word.symbols().iter().enumerate() {
            x = self.step(s, x).ok_or(Error::DomainEscape { step: k })?;
        }
        Ok(x)
    }

    /// `(f_[word])'(x)` by the chain rule.
    pub fn deriv_word(&self, word: &Word, x: f64) -> Result<f64> {
        Ok(self.log_deriv_word(word, x)?.exp())
    }

    /// `log (f_[word])'(x)`, accumulated as a sum to avoid under/overflow.
    pub fn log_deriv_word(&self, word: &Word, x: f64) -> Result<f64> {
        self.check_unit(x)?;
        let mut x = x.clamp(0.0, 1.0);
        let mut acc = 0.0;
        for (k, &s) in word.symbols().iter().enumerate() {
            let xs = self.snap(s, x).ok_or(Error::DomainEscape { step: k })?;
            let f = self.map(s);
            acc += f.deriv(xs).ln();
            x = f.eval(xs);
        }
        Ok(acc)
    }

    /// Value and derivative of `f_[word]` in one pass.
    pub fn eval_with_deriv(&self, word: &Word, x: f64) -> Result<(f64, f64)> {
        self.check_unit(x)?;
        let mut x = x.clamp(0.0, 1.0);
        let mut der = 1.0;
        for (k, &s) in word.symbols().iter().enumerate() {
            let xs = self.snap(s, x).ok_or(Error::DomainEscape { step: k })?;
            let f = self.map(s);
            der *= f.deriv(xs);
            x = f.eval(xs);
        }
        Ok((x, der))
    }

    /// The fiber orbit `x, f_{w0}(x), f_{w0 w1}(x), …` (length `|word|+1`).
    pub fn orbit(&self, word: &Word, x: f64) -> Result<Vec<f64>> {
        self.check_unit(x)?;
        let mut x = x.clamp(0.0, 1.0);
        let mut out = Vec::with_capacity(word.len() + 1);
        out.push(x);
        for (k, &s) in word.symbols().iter().enumerate() {
            x = self.step(s, x).ok_or(Error::DomainEscape { step: k })?;
            out.push(x);
        }
        Ok(out)
    }

    /// Preimage of `y` under `f_[word]`: inverses applied from the last
    /// symbol to the first.
    pub fn invert_word(&self, word: &Word, y: f64) -> Result<f64> {
        self.check_unit(y)?;
        let tol = self.tol.bisect;
        let mut y = y.clamp(0.0, 1.0);
        for (k, &s) in word.symbols().iter().enumerate().rev() {
            let x = self.map(s).inverse(y).ok_or(Error::DomainEscape { step: k })?;
            let lo = self.domain_lo(s);
            if x < lo - tol || x > 1.0 + tol || x.is_nan() {
                return Err(Error::DomainEscape { step: k });
            }
            y = x.clamp(lo, 1.0);
        }
        Ok(y)
    }
}

/// Where a hypothesis clause failed worst.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: String,
    pub location: f64,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h1_ok: bool,
    pub h2_ok: bool,
    pub h2plus_ok: bool,
    /// Sup over the grid of `|d/dx log f_i'|`.
    pub modulus_estimate: f64,
    /// Inf over the grid of `|d/dx log f_i'|`; (H2+) needs it `≥ 1/M`.
    pub modulus_lower_estimate: f64,
    pub worst_violation: Option<Violation>,
}

struct Checker {
    worst: Option<Violation>,
    ok: bool,
}

impl Checker {
    fn new() -> Self {
        Checker { worst: None, ok: true }
    }

    /// Records a failure when `margin < 0`; `margin` is how far inside the
    /// clause the sample lies.
    fn require(&mut self, clause: &str, location: f64, margin: f64) {
        if margin >= 0.0 && !margin.is_nan() {
            return;
        }
        self.ok = false;
        let magnitude = if margin.is_nan() { f64::INFINITY } else { -margin };
        if self.worst.as_ref().is_none_or(|w| magnitude > w.magnitude) {
            self.worst = Some(Violation { clause: clause.to_string(), location, magnitude });
        }
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// Grid verification of (H1), (H2) and (H2+) with the pair's modulus.
pub fn check_hypotheses(pair: &FiberPair, grid_n: usize) -> Result<HypothesisReport> {
    if grid_n < 2 {
        return Err(Error::InvalidParameter("grid_n must be at least 2".into()));
    }
    const SLACK: f64 = 1e-9;
    let (f0, f1, d) = (&pair.f0, &pair.f1, pair.d);

    let mut h1 = Checker::new();
    h1.require("f0(0)=0", 0.0, SLACK - f0.eval(0.0).abs());
    h1.require("f0(1)=1", 1.0, SLACK - (f0.eval(1.0) - 1.0).abs());
    h1.require("f0'(0)>1", 0.0, f0.deriv(0.0) - 1.0 - f64::EPSILON);
    h1.require("f0'(1)>0", 1.0, f0.deriv(1.0) - f64::EPSILON);
    h1.require("f0'(1)<1", 1.0, 1.0 - f0.deriv(1.0) - f64::EPSILON);
    h1.require("d in (0,1)", d, d.min(1.0 - d) - f64::EPSILON);
    h1.require("f1(d)=0", d, SLACK - f1.eval(d).abs());
    h1.require("f1'(1)>0", 1.0, f1.deriv(1.0) - f64::EPSILON);
    for x in grid(0.0, 1.0, grid_n) {
        h1.require("f0 defined", x, if f0.is_defined_at(x) { 0.0 } else { -1.0 });
        h1.require("f0 increasing", x, f0.deriv(x));
        h1.require("f0 into [0,1]", x, SLACK + f0.eval(x).min(1.0 - f0.eval(x)));
        if x > 0.0 && x < 1.0 {
            h1.require("f0(x)>x", x, f0.eval(x) - x);
        }
    }
    for x in grid(d, 1.0, grid_n) {
        h1.require("f1 defined", x, if f1.is_defined_at(x) { 0.0 } else { -1.0 });
        h1.require("f1 increasing", x, f1.deriv(x));
        h1.require("f1(x)<x", x, x - f1.eval(x));
        h1.require("f1 into [0,1]", x, SLACK + f1.eval(x).min(1.0 - f1.eval(x)));
    }

    let mut h2 = Checker::new();
    let mut prev: Option<f64> = None;
    for x in grid(0.0, 1.0, grid_n) {
        let v = f0.deriv(x);
        if let Some(p) = prev {
            h2.require("f0' strictly decreasing", x, p - v - f64::EPSILON * p.abs());
        }
        prev = Some(v);
    }
    prev = None;
    for x in grid(d, 1.0, grid_n) {
        let v = f1.deriv(x);
        if let Some(p) = prev {
            h2.require("f1' non-increasing", x, p - v + f64::EPSILON * p.abs());
        }
        prev = Some(v);
    }

    let mut sup = 0.0f64;
    let mut inf = f64::INFINITY;
    let mut plus = Checker::new();
    let m = pair.modulus;
    for (map, lo) in [(f0, 0.0), (f1, d)] {
        for x in grid(lo, 1.0, grid_n) {
            let s = map.log_deriv_slope(x).abs();
            sup = sup.max(s);
            inf = inf.min(s);
            plus.require("(H2+) upper", x, m * (1.0 + SLACK) - s);
            plus.require("(H2+) lower", x, s - 1.0 / m + SLACK);
        }
    }

    let h1_ok = h1.ok;
    let h2_ok = h2.ok;
    let h2plus_ok = h2_ok && plus.ok;
    let worst = [h1.worst, h2.worst, plus.worst]
        .into_iter()
        .flatten()
        .max_by(|a, b| a.magnitude.total_cmp(&b.magnitude));
    Ok(HypothesisReport {
        h1_ok,
        h2_ok,
        h2plus_ok,
        modulus_estimate: sup,
        modulus_lower_estimate: inf,
        worst_violation: worst,
    })
}
