//! Periodic orbit measures, twin pairs, exponent-gap constants and exact
//! optimal transport between finite uniform supports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::FiberPair;
use crate::numeric::x_over_one_minus_exp;
use crate::orbits::{FixedPointResult, PeriodicOrbit, fixed_points};
use crate::word::Word;

/// Uniform measure on a periodic orbit `(σ^i(word^Z), x_i)`, `i < |word|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitMeasure {
    pub word: Word,
    pub points: Vec<f64>,
    pub x_integral: f64,
    pub freq0: f64,
    pub freq1: f64,
}

impl OrbitMeasure {
    pub fn new(word: Word, points: Vec<f64>) -> Result<Self> {
        if word.is_empty() || points.len() != word.len() {
            return Err(Error::InvalidParameter(format!(
                "orbit measure needs one point per symbol ({} vs {})",
                points.len(),
                word.len()
            )));
        }
        let n = word.len() as f64;
        let x_integral = points.iter().sum::<f64>() / n;
        let freq1 = word.count(1) as f64 / n;
        Ok(OrbitMeasure { word, points, x_integral, freq0: 1.0 - freq1, freq1 })
    }

    pub fn from_orbit(pair: &FiberPair, orbit: &PeriodicOrbit) -> Result<Self> {
        OrbitMeasure::new(orbit.word.clone(), orbit.points(pair)?)
    }

    /// `∫ log f'_{ξ0}(x) dμ`.
    pub fn exponent(&self, pair: &FiberPair) -> f64 {
        let s: f64 = self
            .word
            .symbols()
            .iter()
            .zip(&self.points)
            .map(|(&s, &x)| pair.map(s).deriv(x).ln())
            .sum();
        s / self.word.len() as f64
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwinReport {
    pub word: Word,
    pub mu_plus: OrbitMeasure,
    pub mu_minus: OrbitMeasure,
    pub d: f64,
    pub chi_plus: f64,
    pub chi_minus: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `χ⁻ ≤ −κ1 < 0 < κ1 ≤ χ⁺`.
    pub lower_bounds_ok: bool,
    /// The full chain `−κ2 ≤ χ⁻ ≤ −κ1 < 0 < κ1 ≤ χ⁺ ≤ κ2`.
    pub bounds_ok: bool,
}

/// `(κ1(D), κ2(D))` for modulus `M`.
pub fn kappa(d: f64, modulus: f64) -> (f64, f64) {
    if d <= 0.0 {
        return (0.0, 0.0);
    }
    let a = d / 3.0;
    let c1 = x_over_one_minus_exp(a / modulus).ln();
    let c2 = x_over_one_minus_exp(a * modulus).ln();
    (a * c1, a * c2)
}

/// Twin measures of `word^Z` with the exponent-gap check at the pair's modulus.
pub fn twin_measures(pair: &FiberPair, word: &Word) -> Result<TwinReport> {
    let (plus, minus) = match fixed_points(pair, word)? {
        FixedPointResult::Pair { plus, minus } => (plus, minus),
        _ => return Err(Error::NotHyperbolicPair { word: word.to_string() }),
    };
    let mu_plus = OrbitMeasure::from_orbit(pair, &plus)?;
    let mu_minus = OrbitMeasure::from_orbit(pair, &minus)?;
    let d = mu_minus.x_integral - mu_plus.x_integral;
    let (kappa1, kappa2) = kappa(d, pair.modulus);
    let (chi_plus, chi_minus) = (plus.exponent, minus.exponent);
    let tol = pair.tol.meas;
    let lower_bounds_ok = kappa1 > 0.0 && chi_minus <= -kappa1 + tol && kappa1 <= chi_plus + tol;
    let bounds_ok = lower_bounds_ok && -kappa2 <= chi_minus + tol && chi_plus <= kappa2 + tol;
    Ok(TwinReport {
        word: word.clone(),
        mu_plus,
        mu_minus,
        d,
        chi_plus,
        chi_minus,
        kappa1,
        kappa2,
        lower_bounds_ok,
        bounds_ok,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Shift distance `e^{−n}` between `σ^i(u^Z)` and `σ^j(v^Z)`, where `n` is the
/// least `|k|` with differing symbols; 0 for equal sequences.
pub fn shift_distance(u: &Word, i: usize, v: &Word, j: usize) -> f64 {
    let horizon = lcm(u.len(), v.len()) as i64;
    let at = |w: &Word, off: usize, k: i64| w.periodic_at(off as i64 + k);
    for k in 0..=horizon {
        if at(u, i, k) != at(v, j, k) || at(u, i, -k) != at(v, j, -k) {
            return (-(k as f64)).exp();
        }
    }
    0.0
}

/// Cost matrix between the uniform atoms of two orbit measures, both
/// replicated to `lcm` of their periods.
pub fn cost_matrix(mu1: &OrbitMeasure, mu2: &OrbitMeasure) -> Vec<Vec<f64>> {
    let n = lcm(mu1.period(), mu2.period());
    (0..n)
        .map(|r| {
            let i = r % mu1.period();
            (0..n)
                .map(|c| {
                    let j = c % mu2.period();
                    let dx = (mu1.points[i] - mu2.points[j]).abs();
                    shift_distance(&mu1.word, i, &mu2.word, j).max(dx)
                })
                .collect()
        })
        .collect()
}

/// Minimum-cost perfect matching by trying every permutation (`n ≤ 10`).
pub fn assignment_exhaustive(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    assert!(n <= 10, "exhaustive assignment limited to n <= 10");
    fn go(cost: &[Vec<f64>], row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if row == cost.len() {
            *best = acc;
            return;
        }
        for c in 0..cost.len() {
            if !used[c] {
                used[c] = true;
                go(cost, row + 1, used, acc + cost[row][c], best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(cost, 0, &mut vec![false; n], 0.0, &mut best);
    if n == 0 { 0.0 } else { best }
}

/// Minimum-cost perfect matching by the Hungarian method with potentials.
pub fn assignment_hungarian(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    if n == 0 {
        return 0.0;
    }
    // 1-based arrays; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for c in 1..=n {
                if used[c] {
                    continue;
                }
                let cur = cost[r - 1][c - 1] - u[r] - v[c];
                if cur < minv[c] {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if minv[c] < delta {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for c in 0..=n {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|c| cost[owner[c] - 1][c - 1]).sum()
}

/// Exact `W1` between two periodic orbit measures of arbitrary periods.
pub fn wasserstein_orbits(mu1: &OrbitMeasure, mu2: &OrbitMeasure) -> f64 {
    let cost = cost_matrix(mu1, mu2);
    let n = cost.len();
    let total = if n <= 8 { assignment_exhaustive(&cost) } else { assignment_hungarian(&cost) };
    total / n as f64
}

/// `(formula, oracle)` for two measures on the same periodic sequence whose
/// fiber points are ordered pointwise.
pub fn wasserstein_periodic(mu1: &OrbitMeasure, mu2: &OrbitMeasure) -> Result<(f64, f64)> {
    if mu1.word != mu2.word {
        return Err(Error::CouplingHypothesisViolated);
    }
    if mu1.points.iter().zip(&mu2.points).any(|(x, y)| x > y) {
        return Err(Error::CouplingHypothesisViolated);
    }
    Ok((mu2.x_integral - mu1.x_integral, wasserstein_orbits(mu1, mu2)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBound {
    pub lhs: f64,
    pub ok: bool,
}

/// `ν([0])·log f0'(1) + ν([1])·log f1'(1)` for the periodic measure of `word`.
pub fn frequency_bound(pair: &FiberPair, word: &Word) -> FrequencyBound {
    let n = word.len().max(1) as f64;
    let f1 = word.count(1) as f64 / n;
    let lhs = (1.0 - f1) * pair.f0.deriv(1.0).ln() + f1 * pair.f1.deriv(1.0).ln();
    FrequencyBound { lhs, ok: lhs <= pair.tol.meas }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;
    use proptest::prelude::*;

    fn refp() -> FiberPair {
        FiberPair::reference()
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0.0, 2.0), (0.0, 0.0));
        let (k1, k2) = kappa(0.3, 2.0);
        // series: log(x/(1-e^-x)) = x/2 - x^2/24 + x^4/2880 - ...
        let x: f64 = 0.05;
        let series = x / 2.0 - x * x / 24.0 + x.powi(4) / 2880.0;
        assert!((k1 - 0.1 * series).abs() < 1e-12, "{k1}");
        assert!((k1 - 0.00249).abs() < 5e-6);
        assert!(k2 > k1);
        assert!(kappa(0.6, 2.0).0 > k1);
        assert!(kappa(1e-8, 2.0).1 < 1e-8);
    }

    #[test]
    fn twins_of_zero() {
        let r = twin_measures(&refp(), &w("0")).unwrap();
        assert_eq!(r.d, 1.0);
        assert!((r.chi_plus - 1.5f64.ln()).abs() < 1e-12);
        assert!((r.chi_minus - 0.5f64.ln()).abs() < 1e-12);
        assert!(r.lower_bounds_ok);
    }

    #[test]
    fn twins_recomputed_from_raw_orbits() {
        let p = refp();
        let r = twin_measures(&p, &w("1000")).unwrap();
        assert!(r.d > 0.0);
        assert!(r.lower_bounds_ok);
        // oracle: average log-derivatives along the raw orbit
        for (mu, chi) in [(&r.mu_plus, r.chi_plus), (&r.mu_minus, r.chi_minus)] {
            let mut x = mu.points[0];
            let mut acc = 0.0;
            for &s in w("1000").symbols() {
                acc += if s == 0 { (1.5 - x).ln() } else { (2.0 / (1.0 + x - 0.4).powi(2)).ln() };
                x = p.map(s).eval(x);
            }
            assert!((acc / 4.0 - chi).abs() < 1e-12);
            assert!((x - mu.points[0]).abs() < 1e-11);
        }
    }

    #[test]
    fn twins_reject_none() {
        assert!(matches!(twin_measures(&refp(), &w("10")), Err(Error::NotHyperbolicPair { .. })));
    }

    #[test]
    fn shift_distance_examples() {
        assert_eq!(shift_distance(&w("10"), 0, &w("10"), 0), 0.0);
        assert_eq!(shift_distance(&w("10"), 0, &w("10"), 1), 1.0);
        assert_eq!(shift_distance(&w("10"), 0, &w("1010"), 2), 0.0);
        // 1000 vs 10000 agree at positions -3..=3 and first differ at distance 4
        let d = shift_distance(&w("1000"), 0, &w("10000"), 0);
        assert!((d - (-4.0f64).exp()).abs() < 1e-15, "{d}");
    }

    #[test]
    fn wasserstein_trivial_cases() {
        let p = refp();
        let r = twin_measures(&p, &w("0")).unwrap();
        assert_eq!(wasserstein_periodic(&r.mu_plus, &r.mu_minus).unwrap(), (1.0, 1.0));
        assert_eq!(wasserstein_periodic(&r.mu_plus, &r.mu_plus).unwrap(), (0.0, 0.0));
        assert_eq!(wasserstein_periodic(&r.mu_minus, &r.mu_plus), Err(Error::CouplingHypothesisViolated));
        let r = twin_measures(&p, &w("1000")).unwrap();
        let (f, o) = wasserstein_periodic(&r.mu_plus, &r.mu_minus).unwrap();
        assert!((f - o).abs() < 1e-9);
    }

    #[test]
    fn hungarian_matches_exhaustive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            for _ in 0..20 {
                let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.r#gen::<f64>()).collect()).collect();
                assert!((assignment_hungarian(&cost) - assignment_exhaustive(&cost)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frequency_examples() {
        let p = refp();
        let f = frequency_bound(&p, &w("0"));
        assert!((f.lhs - 0.5f64.ln()).abs() < 1e-15 && f.ok);
        let f = frequency_bound(&p, &w("1000"));
        let oracle = 0.75 * 0.5f64.ln() + 0.25 * 0.78125f64.ln();
        assert!((f.lhs - oracle).abs() < 1e-15 && (f.lhs + 0.5815).abs() < 1e-4 && f.ok);
    }

    proptest! {
        #[test]
        fn kappa_increasing(d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, m in 1.0f64..5.0) {
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assume!(hi - lo > 1e-6);
            let (a1, a2) = kappa(lo, m);
            let (b1, b2) = kappa(hi, m);
            prop_assert!(b1 > a1 && b2 > a2 && a1 <= a2);
        }

        #[test]
        fn formula_matches_oracle(bits in any::<u64>(), n in 1usize..=10) {
            let p = refp();
            let word = Word::from_bits(bits & ((1 << n) - 1), n);
            let Ok(r) = twin_measures(&p, &word) else { return Ok(()) };
            let (f, o) = wasserstein_periodic(&r.mu_plus, &r.mu_minus).unwrap();
            prop_assert!((f - o).abs() <= 1e-9, "{} {} {}", word, f, o);
        }
    }
}
