//! The quantitative checks of the library, one function per criterion.
//!
//! Each check returns a [`CriterionResult`]; a few criteria have a companion
//! check that isolates the part of the statement that holds on its own.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifurcation::{BifFamily, case_ia_family, case_ii_family, count_at, find_saddle_node, reference_family};
use crate::error::Result;
use crate::maps::{FiberMap, FiberPair};
use crate::measures::{OrbitMeasure, frequency_bound, twin_measures, wasserstein_orbits, wasserstein_periodic};
use crate::orbits::{
    FixedPointResult, approximate_parabolic, distortion_ratio, fixed_points, minimal_zero_padding, spine_limits,
};
use crate::sft::{SftDescription, build_horseshoe, crossing_words, join_sfts, sample_block_strings, verify_join};
use crate::symbolic::{forward_endpoint, is_forward_admissible, list_admissible};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: &str, title: &str, passed: bool, detail: String) -> Self {
        CriterionResult { id: id.into(), title: title.into(), passed, detail }
    }

    fn from_error(id: &str, title: &str, e: crate::error::Error) -> Self {
        CriterionResult::new(id, title, false, format!("error: {e}"))
    }

    /// `PASS`/`FAIL` line for tables.
    pub fn line(&self) -> String {
        format!("[{}] {:<6} {} :: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title, self.detail)
    }
}

/// Budgets and seeds for the checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub node_budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 20240601, node_budget: crate::symbolic::DEFAULT_NODE_BUDGET }
    }
}

/// Admissible words of every length `1..=n`.
pub fn admissible_words_up_to(pair: &FiberPair, n: usize, budget: u64) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(list_admissible(pair, k, budget)?);
    }
    Ok(out)
}

pub fn criterion_1(cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "full-entropy endpoint: count(n, t_c) = 2^n for n <= 14 (cases Ia, II)";
    let start = Instant::now();
    let mut bad = Vec::new();
    for f in [case_ia_family(), case_ii_family()] {
        for n in 1..=14 {
            match count_at(&f, f.t_c, n, cfg.node_budget) {
                Ok(c) if c == 1 << n => {}
                Ok(c) => bad.push(format!("{:?} n={n} count={c}", f.case)),
                Err(e) => return CriterionResult::from_error("1", T, e),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = bad.is_empty() && secs < 10.0;
    CriterionResult::new("1", T, ok, format!("mismatches {bad:?}, entropy_upper = log 2, {secs:.2}s"))
}

pub fn criterion_2(cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "trivial-entropy endpoint: count(n, t_h) = n + 1 for n <= 14";
    let mut bad = Vec::new();
    for f in [case_ia_family(), case_ii_family(), reference_family()] {
        for n in 1..=14 {
            match count_at(&f, f.t_h, n, cfg.node_budget) {
                Ok(c) if c == n as u64 + 1 => {}
                Ok(c) => bad.push(format!("{:?} n={n} count={c}", f.case)),
                Err(e) => return CriterionResult::from_error("2", T, e),
            }
        }
    }
    CriterionResult::new("2", T, bad.is_empty(), format!("three families, mismatches {bad:?}"))
}

pub fn criterion_3(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "distortion ratio in [1/M, M] on 1000 random samples";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = pair.modulus;
    let (mut done, mut violations) = (0, 0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    while done < 1000 {
        let n = rng.gen_range(1..=10);
        let word = Word::from_bits(rng.gen_range(0..1u64 << n), n);
        let Ok(fi) = forward_endpoint(pair, &word) else { continue };
        let x = rng.gen_range(fi.a..1.0);
        let y = rng.gen_range(x..=1.0);
        let Ok(r) = distortion_ratio(pair, &word, x, y) else { continue };
        if r < 1.0 / m - 1e-9 || r > m + 1e-9 {
            violations += 1;
        }
        lo = lo.min(r);
        hi = hi.max(r);
        done += 1;
    }
    CriterionResult::new(
        "3",
        T,
        violations == 0,
        format!("{done} samples, {violations} violations, observed range [{lo:.4}, {hi:.4}]"),
    )
}

/// `(word, lower_ok, full_ok)` for every hyperbolic word up to length 12.
fn twin_scan(pair: &FiberPair, budget: u64) -> Result<Vec<(Word, bool, bool)>> {
    let words = admissible_words_up_to(pair, 12, budget)?;
    Ok(words
        .par_iter()
        .filter_map(|w| twin_measures(pair, w).ok().map(|r| (w.clone(), r.lower_bounds_ok, r.bounds_ok)))
        .collect())
}

pub fn criterion_4(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "exponent gap: -k2 <= chi- <= -k1 < 0 < k1 <= chi+ <= k2 for words <= 12";
    let start = Instant::now();
    match twin_scan(pair, cfg.node_budget) {
        Ok(rows) => {
            let bad: Vec<&Word> = rows.iter().filter(|r| !r.2).map(|r| &r.0).collect();
            let example = bad.first().and_then(|w| twin_measures(pair, w).ok()).map(|r| {
                format!(
                    "; e.g. {}: chi+ = {:.4}, chi- = {:.4}, k1 = {:.4}, k2 = {:.4}",
                    r.word, r.chi_plus, r.chi_minus, r.kappa1, r.kappa2
                )
            });
            CriterionResult::new(
                "4",
                T,
                bad.is_empty() && start.elapsed().as_secs() < 60,
                format!("{} of {} hyperbolic words violate the chain{}", bad.len(), rows.len(), example.unwrap_or_default()),
            )
        }
        Err(e) => CriterionResult::from_error("4", T, e),
    }
}

pub fn criterion_4_lower(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "exponent gap, lower half: chi- <= -k1 < 0 < k1 <= chi+ for words <= 12";
    match twin_scan(pair, cfg.node_budget) {
        Ok(rows) => {
            let bad = rows.iter().filter(|r| !r.1).count();
            CriterionResult::new("4.lower", T, bad == 0, format!("{bad} of {} hyperbolic words violate", rows.len()))
        }
        Err(e) => CriterionResult::from_error("4.lower", T, e),
    }
}

pub fn criterion_5(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "Wasserstein formula equals the transport oracle on twin pairs of period <= 10";
    let words = match admissible_words_up_to(pair, 10, cfg.node_budget) {
        Ok(w) => w,
        Err(e) => return CriterionResult::from_error("5", T, e),
    };
    let diffs: Vec<f64> = words
        .par_iter()
        .filter_map(|w| twin_measures(pair, w).ok())
        .map(|r| match wasserstein_periodic(&r.mu_plus, &r.mu_minus) {
            Ok((f, o)) => (f - o).abs(),
            Err(_) => f64::INFINITY,
        })
        .collect();
    let worst = diffs.iter().cloned().fold(0.0f64, f64::max);
    CriterionResult::new("5", T, worst <= 1e-9, format!("{} twin pairs, max |formula - oracle| = {worst:.3e}", diffs.len()))
}

pub fn criterion_6(pair: &FiberPair, _cfg: &VerifyConfig) -> CriterionResult {
    frequency_check(pair, "6", "frequency obstruction on words <= 14")
}

/// Same check on a pair with `f1'(1) > 1`, where part (b) has violating words.
/// For the reference pair both `log f'(1)` are negative and (b) is vacuous.
pub fn criterion_6_steep() -> CriterionResult {
    const T: &str = "frequency obstruction on words <= 14, steep pair logistic(0.5) / moebius(3, 1, 0.6)";
    match FiberPair::new(FiberMap::logistic(0.5), FiberMap::moebius(3.0, 1.0, 0.6), 2.0) {
        Ok(pair) => frequency_check(&pair, "6.steep", T),
        Err(e) => CriterionResult::from_error("6.steep", T, e),
    }
}

fn frequency_check(pair: &FiberPair, id: &str, title: &str) -> CriterionResult {
    let words: Vec<Word> = (1..=14).flat_map(|n| (0..1u64 << n).map(move |b| Word::from_bits(b, n))).collect();
    let rows: Vec<(bool, f64)> = words
        .par_iter()
        .map(|w| {
            let lift = fixed_points(pair, w).is_ok_and(|r| !matches!(r, FixedPointResult::None));
            (lift, frequency_bound(pair, w).lhs)
        })
        .collect();
    let periodic = rows.iter().filter(|r| r.0).count();
    let a_bad = rows.iter().filter(|r| r.0 && r.1 > 1e-12).count();
    let violating = rows.iter().filter(|r| r.1 > 0.02).count();
    let b_bad = rows.iter().filter(|r| r.0 && r.1 > 0.02).count();
    let max_lhs = rows.iter().filter(|r| r.0).map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    CriterionResult::new(
        id,
        title,
        a_bad == 0 && b_bad == 0,
        format!(
            "(a) {periodic} periodic-admissible words, {a_bad} with lhs > 1e-12 (max {max_lhs:.4}); (b) {violating} of {} binary words violate by > 0.02, {b_bad} of them lift",
            words.len()
        ),
    )
}

struct TrichotomyScan {
    words: usize,
    counts: [usize; 3],
    interior_bad: usize,
    spine_bad: Vec<(Word, f64)>,
    pairs: usize,
}

fn trichotomy_scan(pair: &FiberPair, budget: u64) -> Result<TrichotomyScan> {
    let words = admissible_words_up_to(pair, 12, budget)?;
    let rows: Vec<Result<(usize, bool, Option<f64>)>> = words
        .par_iter()
        .map(|w| {
            Ok(match fixed_points(pair, w)? {
                FixedPointResult::None => (0, true, None),
                FixedPointResult::Parabolic(o) => {
                    let (a, b) = spine_limits(pair, w, 20)?;
                    (1, true, Some((a - o.point).abs().max((b - o.point).abs())))
                }
                FixedPointResult::Pair { plus, minus } => {
                    let interior = (1..=10).all(|i| {
                        let x = plus.point + (minus.point - plus.point) * i as f64 / 11.0;
                        pair.eval_word(w, x).is_ok_and(|y| y > x)
                    });
                    let (a, b) = spine_limits(pair, w, 20)?;
                    (2, interior, Some((a - plus.point).abs().max((b - minus.point).abs())))
                }
            })
        })
        .collect();
    let mut scan = TrichotomyScan { words: words.len(), counts: [0; 3], interior_bad: 0, spine_bad: Vec::new(), pairs: 0 };
    for (w, row) in words.iter().zip(rows) {
        let (variant, interior, err) = row?;
        scan.counts[variant] += 1;
        if !interior {
            scan.interior_bad += 1;
        }
        if variant == 2 {
            scan.pairs += 1;
        }
        if let Some(e) = err.filter(|e| *e > 1e-8) {
            scan.spine_bad.push((w.clone(), e));
        }
    }
    Ok(scan)
}

pub fn criterion_7(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "trichotomy exhaustive on words <= 12 and spine limits at m = 20 within 1e-8";
    match trichotomy_scan(pair, cfg.node_budget) {
        Ok(s) => {
            let worst = s.spine_bad.iter().max_by(|a, b| a.1.total_cmp(&b.1));
            CriterionResult::new(
                "7",
                T,
                s.interior_bad == 0 && s.spine_bad.is_empty(),
                format!(
                    "{} words: none {}, parabolic {}, pair {}; {} spines off by > 1e-8{}",
                    s.words,
                    s.counts[0],
                    s.counts[1],
                    s.counts[2],
                    s.spine_bad.len(),
                    worst.map(|(w, e)| format!(" (worst {w}: {e:.2e})")).unwrap_or_default()
                ),
            )
        }
        Err(e) => CriterionResult::from_error("7", T, e),
    }
}

pub fn criterion_7_trichotomy(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "trichotomy exhaustive on words <= 12 (one variant each, g(x) > x inside pairs)";
    match trichotomy_scan(pair, cfg.node_budget) {
        Ok(s) => CriterionResult::new(
            "7.trich",
            T,
            s.interior_bad == 0 && s.counts.iter().sum::<usize>() == s.words,
            format!("{} words classified, {} pairs, {} interior failures", s.words, s.pairs, s.interior_bad),
        ),
        Err(e) => CriterionResult::from_error("7.trich", T, e),
    }
}

pub fn criterion_8(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "horseshoe from length-6 crossing words: contraction and admissible concatenations";
    let a = 0.45;
    let words = match crossing_words(pair, 6, a, cfg.node_budget) {
        Ok(ws) => ws,
        Err(e) => return CriterionResult::from_error("8", T, e),
    };
    match build_horseshoe(pair, &words, 0.1, 0.5, a) {
        Ok(h) => {
            let blocks = 60usize.div_ceil(h.k + h.s);
            let strings = sample_block_strings(&h, blocks, 100, cfg.seed);
            let admissible = strings.iter().filter(|s| is_forward_admissible(pair, s)).count();
            CriterionResult::new(
                "8",
                T,
                h.contraction_sup < 1.0 && admissible == strings.len(),
                format!(
                    "|W'| = {}, s = {}, p- = {:.4}, sup g' = {:.3e}, entropy = {:.4}, {admissible}/100 strings of length {} admissible",
                    words.len(),
                    h.s,
                    h.p_minus,
                    h.contraction_sup,
                    h.entropy,
                    blocks * (h.k + h.s)
                ),
            )
        }
        Err(e) => CriterionResult::from_error("8", T, e),
    }
}

pub fn criterion_9(pair: &FiberPair, cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "join of the 1000 and 10000 orbit SFTs";
    let s1 = SftDescription::periodic_orbit(&"1000".parse().unwrap()).unwrap();
    let s2 = SftDescription::periodic_orbit(&"10000".parse().unwrap()).unwrap();
    match join_sfts(pair, &s1, &s2) {
        Ok((s3, cert)) => {
            let v = verify_join(pair, [&s1, &s2], &s3, &cert, 200, 60, 50, cfg.seed);
            CriterionResult::new(
                "9",
                T,
                v.passed(),
                format!(
                    "N0 = {}, N1 = {}, {} windows; contains inputs {}, rejects 0^2N1 {}, {}/{} samples admissible, connector {} literal + {} graph bridge, {} failed",
                    cert.n0,
                    cert.n1,
                    s3.allowed.len(),
                    v.contains_inputs,
                    v.rejects_zero_block,
                    v.samples_admissible,
                    v.samples_checked,
                    v.connector_literal,
                    v.connector_fallback,
                    v.connector_failed
                ),
            )
        }
        Err(e) => CriterionResult::from_error("9", T, e),
    }
}

/// Per-`ℓ` data of the parabolic approximation at the saddle node of `10`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicApproxRow {
    pub ell: usize,
    pub multiplier: f64,
    pub wasserstein: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicApprox {
    pub t: f64,
    pub parabolic_point: f64,
    pub k: usize,
    pub rows: Vec<ParabolicApproxRow>,
}

/// Finds the saddle node of `omega` in `family`, then approximates the
/// parabolic orbit by `ω^ℓ 0^k ω^ℓ` for `ℓ = 1..=ells`.
pub fn parabolic_approximation(family: &BifFamily, omega: &Word, ells: usize) -> Result<ParabolicApprox> {
    let t = find_saddle_node(family, omega)?;
    let pair = family.pair_at(t)?;
    let parabolic = match fixed_points(&pair, omega)? {
        FixedPointResult::Parabolic(o) => o,
        _ => return Err(crate::error::Error::NotParabolic { word: omega.to_string() }),
    };
    let target = OrbitMeasure::from_orbit(&pair, &parabolic)?;
    let k = minimal_zero_padding(&pair, parabolic.point, 1000)?;
    let mut rows = Vec::new();
    for ell in 1..=ells {
        let orbit = approximate_parabolic(&pair, omega, k, ell)?;
        let mu = OrbitMeasure::from_orbit(&pair, &orbit)?;
        rows.push(ParabolicApproxRow { ell, multiplier: orbit.multiplier, wasserstein: wasserstein_orbits(&mu, &target) });
    }
    Ok(ParabolicApprox { t, parabolic_point: parabolic.point, k, rows })
}

fn saddle_node_of_ten() -> Result<ParabolicApprox> {
    parabolic_approximation(&reference_family(), &"10".parse().unwrap(), 6)
}

fn approx_summary(t: f64, k: usize, rows: &[ParabolicApproxRow]) -> (bool, bool, String) {
    let contracting = rows.iter().all(|r| r.multiplier < 1.0);
    let decreasing = rows.windows(2).all(|p| p[1].wasserstein < p[0].wasserstein);
    let ws: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.wasserstein)).collect();
    (contracting, decreasing, format!("t* = {t:.6}, k = {k}, W1 = [{}]", ws.join(", ")))
}

pub fn criterion_10() -> CriterionResult {
    const T: &str = "parabolic approximation: contracting, W1 decreasing, W1(6) < 0.05";
    match saddle_node_of_ten() {
        Ok(ParabolicApprox { t, k, rows, .. }) => {
            let (c, d, detail) = approx_summary(t, k, &rows);
            let last = rows.last().map_or(f64::INFINITY, |r| r.wasserstein);
            CriterionResult::new("10", T, c && d && last < 0.05, detail)
        }
        Err(e) => CriterionResult::from_error("10", T, e),
    }
}

pub fn criterion_10_monotone() -> CriterionResult {
    const T: &str = "parabolic approximation: contracting multipliers and W1 decreasing in l";
    match saddle_node_of_ten() {
        Ok(ParabolicApprox { t, k, rows, .. }) => {
            let (c, d, detail) = approx_summary(t, k, &rows);
            CriterionResult::new("10.mono", T, c && d, detail)
        }
        Err(e) => CriterionResult::from_error("10.mono", T, e),
    }
}

pub fn criterion_11(cfg: &VerifyConfig) -> CriterionResult {
    const T: &str = "entropy jump: H(p_tc) = H(1/3) < log 2 = enumerated entropy at t_c";
    let f = case_ia_family();
    let c = f.jump_constant(f.t_c);
    let (p, h) = f.entropy_bound(f.t_c);
    let n = 14;
    let enumerated = match count_at(&f, f.t_c, n, cfg.node_budget) {
        Ok(count) => (count as f64).ln() / n as f64,
        Err(e) => return CriterionResult::from_error("11", T, e),
    };
    let oracle = 3f64.ln() - 2.0 / 3.0 * 2f64.ln();
    let ok = (c - 0.5).abs() < 1e-12
        && (p - 1.0 / 3.0).abs() < 1e-12
        && (h - oracle).abs() < 1e-12
        && h < 2f64.ln()
        && (enumerated - 2f64.ln()).abs() < 1e-15;
    CriterionResult::new(
        "11",
        T,
        ok,
        format!("C(t_c) = {c:.6}, p = {p:.6}, H(p) = {h:.6}, enumerated entropy_upper(14) = {enumerated:.6}"),
    )
}

/// Every criterion, including the companion checks, in order.
pub fn run_all(pair: &FiberPair, cfg: &VerifyConfig) -> Vec<CriterionResult> {
    vec![
        criterion_1(cfg),
        criterion_2(cfg),
        criterion_3(pair, cfg),
        criterion_4_lower(pair, cfg),
        criterion_4(pair, cfg),
        criterion_5(pair, cfg),
        criterion_6(pair, cfg),
        criterion_6_steep(),
        criterion_7_trichotomy(pair, cfg),
        criterion_7(pair, cfg),
        criterion_8(pair, cfg),
        criterion_9(pair, cfg),
        criterion_10_monotone(),
        criterion_10(),
        criterion_11(cfg),
    ]
}
