//! Shift families `f_{1,t} = f̃1 + t`, their distinguished parameters, the
//! entropy bound and parameter scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{FiberMap, FiberPair, Tolerances};
use crate::numeric::{binary_entropy, bisect, bisect_threshold};
use crate::orbits::{FixedPointResult, fixed_points};
use crate::symbolic::{language_counts, max_consecutive_ones};
use crate::word::Word;

/// How the family leaves the hypotheses at `t_c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExitCase {
    /// `f̃1'(1) > 1`: the exit point is 1.
    Ia,
    /// `f̃1'(0) < 1`: the exit point is 0.
    Ib,
    /// `f̃1'(c) = 1` for some `c ∈ [0,1]`.
    II,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifFamily {
    pub f0: FiberMap,
    pub f1_base: FiberMap,
    pub t_h: f64,
    pub t_c: f64,
    pub case: ExitCase,
    pub a_exit: f64,
    /// Lower bound for the modulus of every pair in the family.
    pub modulus: f64,
    pub tol: Tolerances,
}

pub fn make_family(f0: FiberMap, f1_base: FiberMap, modulus: f64) -> Result<BifFamily> {
    if !(0..=100).all(|i| f1_base.is_defined_at(i as f64 / 100.0) && f1_base.deriv(i as f64 / 100.0) > 0.0) {
        return Err(Error::NoExitCase);
    }
    // the shift must be available before anything else is computed
    f1_base.shifted(0.0)?;
    let (d0, d1) = (f1_base.deriv(0.0), f1_base.deriv(1.0));
    if !(d0.is_finite() && d1.is_finite()) || d1 > d0 * (1.0 + 1e-12) {
        return Err(Error::NoExitCase);
    }
    let (case, a_exit) = if d1 > 1.0 {
        (ExitCase::Ia, 1.0)
    } else if d0 < 1.0 {
        (ExitCase::Ib, 0.0)
    } else {
        (ExitCase::II, bisect(|x| f1_base.deriv(x) - 1.0, 0.0, 1.0))
    };
    Ok(BifFamily {
        f0,
        f1_base,
        t_h: -f1_base.eval(1.0),
        t_c: a_exit - f1_base.eval(a_exit),
        case,
        a_exit,
        modulus,
        tol: Tolerances::default(),
    })
}

impl BifFamily {
    pub fn f1_at(&self, t: f64) -> FiberMap {
        self.f1_base.shifted(t).expect("family base supports shifts")
    }

    /// `d_t = f_{1,t}^{-1}(0)`, if it exists.
    pub fn d_at(&self, t: f64) -> Option<f64> {
        self.f1_at(t).inverse(0.0)
    }

    /// The pair at parameter `t`; its modulus is the larger of the family
    /// modulus and a grid estimate on `[d_t, 1]`.
    pub fn pair_at(&self, t: f64) -> Result<FiberPair> {
        let f1 = self.f1_at(t);
        let mut d = self
            .d_at(t)
            .ok_or_else(|| Error::InvalidParameter(format!("f1 has no zero at t = {t}")))?;
        let tol = self.tol.bisect;
        if d > 1.0 && d <= 1.0 + tol {
            d = 1.0;
        }
        if d < 0.0 && d >= -tol {
            d = 0.0;
        }
        let grid = 200;
        let est = (0..=grid)
            .map(|i| i as f64 / grid as f64)
            .flat_map(|u| [self.f0.log_deriv_slope(u).abs(), f1.log_deriv_slope(d + (1.0 - d) * u).abs()])
            .fold(0.0f64, f64::max);
        Ok(FiberPair::with_domain(self.f0, f1, d, self.modulus.max(est))?.with_tolerances(self.tol))
    }

    /// `C(t) = |log f0'(1)| / log f_{1,t}'(1)` when the denominator is positive,
    /// otherwise infinity. Shift families have the same value for every `t`.
    pub fn jump_constant(&self, t: f64) -> f64 {
        let slope = self.f1_at(t).deriv(1.0);
        if slope > 1.0 { self.f0.deriv(1.0).ln().abs() / slope.ln() } else { f64::INFINITY }
    }

    /// `(p_t, ℋ(p_t))` with `p_t = min(1/2, C/(1+C))`.
    pub fn entropy_bound(&self, t: f64) -> (f64, f64) {
        let c = self.jump_constant(t);
        let p = if c.is_infinite() { 0.5 } else { (c / (1.0 + c)).min(0.5) };
        (p, binary_entropy(p))
    }

    /// `steps` equally spaced parameters in `(t_h, t_c]`.
    pub fn t_grid(&self, steps: usize) -> Vec<f64> {
        (1..=steps)
            .map(|i| if i == steps { self.t_c } else { self.t_h + (self.t_c - self.t_h) * i as f64 / steps as f64 })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub d_t: f64,
    pub c_t: f64,
    pub p_t: f64,
    pub h_p_t: f64,
    pub count_n: Option<u64>,
    pub entropy_upper_n: Option<f64>,
    /// `None` when the run of 1s never leaves the domain within the cap.
    pub k0_t: Option<usize>,
    pub error: Option<String>,
}

fn scan_row(family: &BifFamily, t: f64, n: usize, budget: u64, cap: usize) -> ScanRow {
    let (p_t, h_p_t) = family.entropy_bound(t);
    let mut row = ScanRow {
        t,
        d_t: family.d_at(t).unwrap_or(f64::NAN),
        c_t: family.jump_constant(t),
        p_t,
        h_p_t,
        count_n: None,
        entropy_upper_n: None,
        k0_t: None,
        error: None,
    };
    let pair = match family.pair_at(t) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    match language_counts(&pair, n, budget) {
        Ok(counts) => {
            let last = counts[n - 1];
            row.count_n = Some(last.count);
            row.entropy_upper_n = Some(last.entropy_upper);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.k0_t = max_consecutive_ones(&pair, cap).ok();
    row
}

/// One row per parameter; failures are recorded in the row.
pub fn scan(family: &BifFamily, t_grid: &[f64], n: usize, budget: u64, cap: usize) -> Result<Vec<ScanRow>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(t_grid.par_iter().map(|&t| scan_row(family, t, n, budget, cap)).collect())
}

/// Number of admissible words of length `n` at parameter `t`.
pub fn count_at(family: &BifFamily, t: f64, n: usize, budget: u64) -> Result<u64> {
    Ok(language_counts(&family.pair_at(t)?, n, budget)?[n - 1].count)
}

/// Least `t ∈ [t_h, t_c]` at which every word of length `n` is admissible.
pub fn full_cylinder_threshold(family: &BifFamily, n: usize, budget: u64) -> Result<f64> {
    if n == 0 || n > 40 {
        return Err(Error::InvalidParameter(format!("n = {n} outside 1..=40")));
    }
    let full = 1u64 << n;
    let is_full = |t: f64| count_at(family, t, n, budget).map(|c| c == full);
    if is_full(family.t_h)? {
        return Ok(family.t_h);
    }
    let mut failure = None;
    let t = bisect_threshold(
        |t| match is_full(t) {
            Ok(b) => b,
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        },
        family.t_h,
        family.t_c,
        1e-13,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(t),
    }
}

fn has_periodic_lift(family: &BifFamily, word: &Word, t: f64) -> bool {
    family
        .pair_at(t)
        .and_then(|p| fixed_points(&p, word))
        .is_ok_and(|r| !matches!(r, FixedPointResult::None))
}

/// Parameter in `[lo, hi]` at which the periodic orbit of `word` is born in a
/// saddle node; the returned value is on the side where it exists.
pub fn find_saddle_node_in(family: &BifFamily, word: &Word, lo: f64, hi: f64) -> Result<f64> {
    if has_periodic_lift(family, word, lo) || !has_periodic_lift(family, word, hi) {
        return Err(Error::NoSignChange { lo, hi });
    }
    Ok(bisect_threshold(|t| has_periodic_lift(family, word, t), lo, hi, 0.0))
}

/// Saddle-node parameter of `word` over the whole range `[t_h, t_c]`.
pub fn find_saddle_node(family: &BifFamily, word: &Word) -> Result<f64> {
    find_saddle_node_in(family, word, family.t_h, family.t_c)
}

/// The shift family through the reference pair.
pub fn reference_family() -> BifFamily {
    make_family(FiberMap::logistic(0.5), FiberMap::moebius(2.0, 1.0, 0.4), 2.0).expect("reference family")
}

/// A case Ia family with `C = 1/2`: `f̃1 = 9x/(1 + x/2)`.
pub fn case_ia_family() -> BifFamily {
    make_family(FiberMap::logistic(0.5), FiberMap::moebius(9.0, 0.5, 0.0), 2.0).expect("case Ia family")
}

/// A case II family: `f̃1 = 2x/(1 + x)`, exit point `√2 − 1`.
pub fn case_ii_family() -> BifFamily {
    make_family(FiberMap::logistic(0.5), FiberMap::moebius(2.0, 1.0, 0.0), 2.0).expect("case II family")
}
