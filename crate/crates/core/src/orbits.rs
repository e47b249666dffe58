//! Fixed points of word compositions, periodic spines, distortion and the
//! hyperbolic approximants of parabolic orbits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::FiberPair;
use crate::numeric::bisect;
use crate::symbolic::forward_endpoint;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    Expanding,
    Contracting,
    Parabolic,
}

/// A fiber fixed point of `f_[word]`, i.e. a periodic orbit of the skew product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub word: Word,
    pub point: f64,
    pub multiplier: f64,
    /// Fiber Lyapunov exponent `log(multiplier) / |word|`.
    pub exponent: f64,
    pub kind: OrbitKind,
}

impl PeriodicOrbit {
    fn at(pair: &FiberPair, word: &Word, point: f64) -> Result<Self> {
        let log_mult = pair.log_deriv_word(word, point)?;
        let multiplier = log_mult.exp();
        let kind = if multiplier > 1.0 + pair.tol.parab {
            OrbitKind::Expanding
        } else if multiplier < 1.0 - pair.tol.parab {
            OrbitKind::Contracting
        } else {
            OrbitKind::Parabolic
        };
        Ok(PeriodicOrbit {
            word: word.clone(),
            point,
            multiplier,
            exponent: log_mult / word.len() as f64,
            kind,
        })
    }

    /// Fiber points along the orbit, one per symbol.
    pub fn points(&self, pair: &FiberPair) -> Result<Vec<f64>> {
        let mut pts = pair.orbit(&self.word, self.point)?;
        pts.pop();
        Ok(pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum FixedPointResult {
    None,
    Parabolic(PeriodicOrbit),
    Pair { plus: PeriodicOrbit, minus: PeriodicOrbit },
}

impl FixedPointResult {
    pub fn variant_name(&self) -> &'static str {
        match self {
            FixedPointResult::None => "none",
            FixedPointResult::Parabolic(_) => "parabolic",
            FixedPointResult::Pair { .. } => "pair",
        }
    }
}

/// The fiber over a periodic sequence `word^Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spine {
    pub word: Word,
    pub lo: f64,
    pub hi: f64,
}

/// Classifies the fixed points of `g = f_[word]` on its forward interval.
pub fn fixed_points(pair: &FiberPair, word: &Word) -> Result<FixedPointResult> {
    if word.is_empty() {
        return Err(Error::InvalidParameter("fixed points of the empty word".into()));
    }
    let a = forward_endpoint(pair, word)?.a;
    if !word.contains_zero() {
        // f1 lies strictly below the diagonal, and so does every power of it
        return Ok(FixedPointResult::None);
    }
    let g = |x: f64| pair.eval_word(word, x).unwrap_or(f64::NEG_INFINITY);
    let dg = |x: f64| pair.deriv_word(word, x).unwrap_or(f64::INFINITY);
    let z = if dg(a) <= 1.0 {
        a
    } else if dg(1.0) >= 1.0 {
        1.0
    } else {
        bisect(|x| dg(x) - 1.0, a, 1.0)
    };
    let gap = g(z) - z;
    let tol = pair.tol;
    if gap < -tol.parab {
        return Ok(FixedPointResult::None);
    }
    if gap.abs() <= tol.parab {
        return Ok(FixedPointResult::Parabolic(PeriodicOrbit::at(pair, word, z)?));
    }
    let plus = if a.abs() <= tol.bisect { a } else { bisect(|x| g(x) - x, a, z) };
    let minus = if (g(1.0) - 1.0).abs() <= tol.bisect { 1.0 } else { bisect(|x| g(x) - x, z, 1.0) };
    Ok(FixedPointResult::Pair {
        plus: PeriodicOrbit::at(pair, word, plus)?,
        minus: PeriodicOrbit::at(pair, word, minus)?,
    })
}

/// The spine `[p⁺, p⁻]` over `word^Z` (degenerate at a parabolic orbit).
pub fn spine_periodic(pair: &FiberPair, word: &Word) -> Result<Spine> {
    match fixed_points(pair, word)? {
        FixedPointResult::None => Err(Error::NoFixedPoint { word: word.to_string() }),
        FixedPointResult::Parabolic(o) => Ok(Spine { word: word.clone(), lo: o.point, hi: o.point }),
        FixedPointResult::Pair { plus, minus } => Ok(Spine { word: word.clone(), lo: plus.point, hi: minus.point }),
    }
}

/// The monotone approximations `a_[word^m] ↑ lo` and `f_[word^m](1) ↓ hi`
/// of the spine endpoints.
pub fn spine_limits(pair: &FiberPair, word: &Word, m: usize) -> Result<(f64, f64)> {
    let long = word.repeat(m);
    let a = forward_endpoint(pair, &long)?.a;
    let b = pair.eval_word(&long, 1.0)?;
    Ok((a, b))
}

/// Normalized distortion of `f_[word]` between `x < y`: the log-derivative
/// drop divided by the summed orbit gaps.
pub fn distortion_ratio(pair: &FiberPair, word: &Word, x: f64, y: f64) -> Result<f64> {
    if x > y {
        return Err(Error::InvalidParameter(format!("need x < y, got {x} > {y}")));
    }
    if y - x < pair.tol.bisect {
        return Err(Error::DegenerateDenominator);
    }
    let ox = pair.orbit(word, x)?;
    let oy = pair.orbit(word, y)?;
    let num = pair.log_deriv_word(word, x)? - pair.log_deriv_word(word, y)?;
    let den: f64 = ox.iter().zip(&oy).take(word.len()).map(|(p, q)| q - p).sum();
    if den < pair.tol.bisect {
        return Err(Error::DegenerateDenominator);
    }
    Ok(num / den)
}

/// `h(ε) = ε / (e^{√ε/M} − 1) + √ε`, with `h(0) = 0`.
pub fn h_bound(eps: f64, modulus: f64) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    let r = eps.sqrt();
    eps / (r / modulus).exp_m1() + r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProximityCheck {
    pub eps: f64,
    pub bound: f64,
    pub distance: f64,
    pub ok: bool,
}

/// Compares the distance from `x` to the nearest fixed point of `f_[word]`
/// with `h(|g(x) − x|)`, using the pair's global modulus.
pub fn fixed_point_proximity_check(pair: &FiberPair, word: &Word, x: f64) -> Result<ProximityCheck> {
    let fixed: Vec<f64> = match fixed_points(pair, word)? {
        FixedPointResult::None => return Err(Error::NoFixedPoint { word: word.to_string() }),
        FixedPointResult::Parabolic(o) => vec![o.point],
        FixedPointResult::Pair { plus, minus } => vec![plus.point, minus.point],
    };
    let eps = (pair.eval_word(word, x)? - x).abs();
    let bound = h_bound(eps, pair.modulus);
    let distance = fixed.iter().map(|p| (p - x).abs()).fold(f64::INFINITY, f64::min);
    Ok(ProximityCheck { eps, bound, distance, ok: distance <= bound + pair.tol.bisect })
}

/// Least `k ≤ cap` with `(f0^k)'(x) < 1`.
pub fn minimal_zero_padding(pair: &FiberPair, x: f64, cap: usize) -> Result<usize> {
    let mut y = x;
    let mut log_der = 0.0;
    for k in 1..=cap {
        log_der += pair.f0.deriv(y).ln();
        y = pair.f0.eval(y);
        if log_der < 0.0 {
            return Ok(k);
        }
    }
    Err(Error::NonTerminating { cap })
}

/// The word `ω^ℓ 0^k ω^ℓ` used to approximate a parabolic orbit of `ω`.
pub fn approximant_word(omega: &Word, k: usize, ell: usize) -> Word {
    let block = omega.repeat(ell);
    block.concat(&Word::zeros(k)).concat(&block)
}

/// Contracting periodic orbit of `ω^ℓ 0^k ω^ℓ` near the parabolic orbit of `ω`.
pub fn approximate_parabolic(pair: &FiberPair, omega: &Word, k: usize, ell: usize) -> Result<PeriodicOrbit> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    let parabolic = match fixed_points(pair, omega)? {
        FixedPointResult::Parabolic(o) => o,
        _ => return Err(Error::NotParabolic { word: omega.to_string() }),
    };
    let derivative = pair.deriv_word(&Word::zeros(k), parabolic.point)?;
    if derivative >= 1.0 {
        return Err(Error::ZeroPaddingTooShort { k, derivative });
    }
    let word = approximant_word(omega, k, ell);
    match fixed_points(pair, &word) {
        Ok(FixedPointResult::Pair { minus, .. }) => Ok(minus),
        Ok(FixedPointResult::Parabolic(o)) => Ok(o),
        Ok(FixedPointResult::None) | Err(Error::EmptyInterval { .. }) => {
            Err(Error::NoFixedPoint { word: word.to_string() })
        }
        Err(e) => Err(e),
    }
}

/// Normalized middle gaps `(x₃ⁿ − x₂ⁿ)/(x₃ⁿ − x₁ⁿ)` for `x₁ = p⁺`,
/// `x₂ = (p⁺ + p⁻)/2`, `x₃ = p⁻` pushed forward by `f_[word]`, for
/// `n = 0..steps`.
pub fn rescaled_middle_gaps(pair: &FiberPair, word: &Word, steps: usize) -> Result<Vec<f64>> {
    let (plus, minus) = match fixed_points(pair, word)? {
        FixedPointResult::Pair { plus, minus } => (plus.point, minus.point),
        _ => return Err(Error::NotHyperbolicPair { word: word.to_string() }),
    };
    let (mut x1, mut x2, mut x3) = (plus, 0.5 * (plus + minus), minus);
    let mut out = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        out.push((x3 - x2) / (x3 - x1));
        if n < steps {
            x1 = pair.eval_word(word, x1)?;
            x2 = pair.eval_word(word, x2)?;
            x3 = pair.eval_word(word, x3)?;
        }
    }
    Ok(out)
}
