//! Admissible words, interval endpoints and the language of the fibered shift.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::FiberPair;
use crate::word::Word;

/// Default cap on visited tree nodes for the enumerators.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 32;

/// Default iteration cap for [`max_consecutive_ones`].
pub const DEFAULT_ITERATION_CAP: usize = 100_000;

/// The forward interval `[a, 1]` of points at which `word` can be applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardInterval {
    pub word: Word,
    pub a: f64,
}

/// The backward interval `[0, b]` of points with a full preimage under `word`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackwardInterval {
    pub word: Word,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanguageCount {
    pub n: usize,
    pub count: u64,
    pub entropy_upper: f64,
}

impl LanguageCount {
    fn new(n: usize, count: u64) -> Self {
        let entropy_upper = if n == 0 { 0.0 } else { (count as f64).ln() / n as f64 };
        LanguageCount { n, count, entropy_upper }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerationMode {
    Count,
    List,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Enumeration {
    Count(LanguageCount),
    Words(Vec<Word>),
}

pub fn is_forward_admissible(pair: &FiberPair, word: &Word) -> bool {
    admissible_at(pair, word, 1.0)
}

pub fn admissible_at(pair: &FiberPair, word: &Word, x: f64) -> bool {
    (0.0..=1.0).contains(&x) && pair.eval_word(word, x).is_ok()
}

/// Left endpoint `a` with `f_[word](a) = 0`.
pub fn forward_endpoint(pair: &FiberPair, word: &Word) -> Result<ForwardInterval> {
    if !is_forward_admissible(pair, word) {
        return Err(Error::EmptyInterval { word: word.to_string() });
    }
    let a = pair
        .invert_word(word, 0.0)
        .map_err(|_| Error::EmptyInterval { word: word.to_string() })?;
    Ok(ForwardInterval { word: word.clone(), a })
}

/// Right endpoint `b = f_[word](1)`; `[0, b]` is the image of the forward interval.
pub fn backward_endpoint(pair: &FiberPair, word: &Word) -> Result<BackwardInterval> {
    let b = pair
        .eval_word(word, 1.0)
        .map_err(|_| Error::EmptyInterval { word: word.to_string() })?;
    Ok(BackwardInterval { word: word.clone(), b })
}

/// Length of the longest admissible run of 1s, i.e. the least `k` with
/// `f1^k(1) < d`.
pub fn max_consecutive_ones(pair: &FiberPair, cap: usize) -> Result<usize> {
    let mut x = 1.0;
    for k in 1..=cap {
        match pair.step(1, x) {
            Some(y) if pair.snap(1, y).is_some() => x = y,
            _ => return Ok(k),
        }
    }
    Err(Error::NonTerminating { cap })
}

/// Shared node accounting for the parallel walks.
struct Budget {
    limit: u64,
    used: AtomicU64,
    blown: AtomicBool,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { limit, used: AtomicU64::new(0), blown: AtomicBool::new(false) }
    }

    fn spend(&self, nodes: u64) -> bool {
        if self.used.fetch_add(nodes, Ordering::Relaxed) + nodes > self.limit {
            self.blown.store(true, Ordering::Relaxed);
        }
        !self.blown.load(Ordering::Relaxed)
    }

    fn check(&self) -> Result<()> {
        if self.blown.load(Ordering::Relaxed) {
            Err(Error::ResourceLimit { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Admissible prefixes of length `depth` with their images of 1, in
/// lexicographic order.
fn frontier(pair: &FiberPair, depth: usize) -> Vec<(Word, f64)> {
    let mut level = vec![(Word::empty(), 1.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (w, x) in &level {
            for s in [0u8, 1] {
                if let Some(y) = pair.step(s, *x) {
                    next.push((w.pushed(s), y));
                }
            }
        }
        level = next;
    }
    level
}

const SPLIT_DEPTH: usize = 10;
const CHUNK_NODES: u64 = 4096;

/// Depth-first walk below one frontier node, accumulating per-depth counts.
fn walk_counts(pair: &FiberPair, x: f64, depth: usize, n: usize, counts: &mut [u64], budget: &Budget) -> bool {
    let mut stack = vec![(x, depth)];
    let mut pending = 0u64;
    while let Some((x, k)) = stack.pop() {
        counts[k] += 1;
        pending += 1;
        if pending >= CHUNK_NODES {
            if !budget.spend(pending) {
                return false;
            }
            pending = 0;
        }
        if k == n {
            continue;
        }
        for s in [1u8, 0] {
            if let Some(y) = pair.step(s, x) {
                stack.push((y, k + 1));
            }
        }
    }
    budget.spend(pending)
}

/// Counts of admissible words of every length `1..=n`.
pub fn language_counts(pair: &FiberPair, n: usize, budget: u64) -> Result<Vec<LanguageCount>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let split = n.min(SPLIT_DEPTH);
    let budget = Budget::new(budget);
    let mut counts = vec![0u64; n + 1];
    for (k, c) in counts.iter_mut().enumerate().take(split) {
        *c = frontier(pair, k).len() as u64;
    }
    let front = frontier(pair, split);
    let merged = front
        .par_iter()
        .map(|(_, x)| {
            let mut c = vec![0u64; n + 1];
            walk_counts(pair, *x, split, n, &mut c, &budget);
            c
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    budget.check()?;
    for k in split..=n {
        counts[k] = merged[k];
    }
    Ok((1..=n).map(|k| LanguageCount::new(k, counts[k])).collect())
}

fn walk_list(pair: &FiberPair, prefix: &Word, x: f64, n: usize, out: &mut Vec<Word>, budget: &Budget) -> bool {
    if !budget.spend(1) {
        return false;
    }
    if prefix.len() == n {
        out.push(prefix.clone());
        return true;
    }
    for s in [0u8, 1] {
        if let Some(y) = pair.step(s, x) {
            if !walk_list(pair, &prefix.pushed(s), y, n, out, budget) {
                return false;
            }
        }
    }
    true
}

/// Admissible words of length `n` in lexicographic order.
pub fn list_admissible(pair: &FiberPair, n: usize, budget: u64) -> Result<Vec<Word>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let split = n.min(SPLIT_DEPTH);
    let budget = Budget::new(budget);
    let chunks: Vec<Vec<Word>> = frontier(pair, split)
        .par_iter()
        .map(|(w, x)| {
            let mut out = Vec::new();
            walk_list(pair, w, *x, n, &mut out, &budget);
            out
        })
        .collect();
    budget.check()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn enumerate_admissible(pair: &FiberPair, n: usize, mode: EnumerationMode, budget: u64) -> Result<Enumeration> {
    match mode {
        EnumerationMode::Count => {
            let counts = language_counts(pair, n, budget)?;
            Ok(Enumeration::Count(*counts.last().unwrap()))
        }
        EnumerationMode::List => list_admissible(pair, n, budget).map(Enumeration::Words),
    }
}

/// Candidates for heteroclinic words: admissible `τ` with `|τ| ≤ n` ending
/// in 1 and `f_[τ](1) ∈ [0, tol]`, with the residual `f_[τ](1)`.
///
/// Appending 0s to such a word keeps the value at 0, so only words ending in 1
/// are reported.
pub fn het_words(pair: &FiberPair, n: usize, tol: f64) -> Result<Vec<(Word, f64)>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let mut out = Vec::new();
    let mut stack = vec![(Word::empty(), 1.0f64)];
    while let Some((w, x)) = stack.pop() {
        if w.len() == n {
            continue;
        }
        for s in [1u8, 0] {
            if let Some(y) = pair.step(s, x) {
                let child = w.pushed(s);
                if s == 1 && (0.0..=tol).contains(&y) {
                    out.push((child.clone(), y));
                }
                stack.push((child, y));
            }
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::FiberMap;
    use crate::word::w;
    use proptest::prelude::*;

    fn refp() -> FiberPair {
        FiberPair::reference()
    }

    /// Per-word re-evaluation of admissibility from scratch.
    fn naive_count(pair: &FiberPair, n: usize) -> u64 {
        (0..1u64 << n)
            .filter(|&b| is_forward_admissible(pair, &Word::from_bits(b, n)))
            .count() as u64
    }

    #[test]
    fn forward_endpoint_examples() {
        let p = refp();
        assert_eq!(forward_endpoint(&p, &w("0")).unwrap().a, 0.0);
        assert!((forward_endpoint(&p, &w("1")).unwrap().a - 0.4).abs() < 1e-15);
        assert_eq!(forward_endpoint(&p, &w("1111")), Err(Error::EmptyInterval { word: "1111".into() }));
    }

    #[test]
    fn forward_endpoint_maps_to_zero() {
        let p = refp();
        for word in ["10", "110", "1011", "0101101"] {
            let a = forward_endpoint(&p, &w(word)).unwrap().a;
            assert!(p.eval_word(&w(word), a).unwrap().abs() < 1e-12, "{word}");
        }
    }

    #[test]
    fn backward_endpoint_is_image_of_one() {
        let p = refp();
        assert_eq!(backward_endpoint(&p, &w("0")).unwrap().b, 1.0);
        assert!((backward_endpoint(&p, &w("1")).unwrap().b - 0.75).abs() < 1e-15);
    }

    #[test]
    fn admissibility_examples() {
        let p = refp();
        assert!(is_forward_admissible(&p, &Word::zeros(50)));
        assert!(is_forward_admissible(&p, &w("111")));
        assert!(!is_forward_admissible(&p, &w("1111")));
        assert!(!admissible_at(&p, &w("1"), 0.39));
        assert!(admissible_at(&p, &w("1"), 0.4));
    }

    #[test]
    fn k0_reference() {
        // f1(1) = 0.75, f1(0.75) = 0.7/1.35, f1 of that < 0.4
        let f1 = |x: f64| 2.0 * (x - 0.4) / (1.0 + (x - 0.4));
        let x2 = f1(f1(1.0));
        assert!((x2 - 0.518_518_5).abs() < 1e-6 && f1(x2) < 0.4);
        assert_eq!(max_consecutive_ones(&refp(), 100).unwrap(), 3);
    }

    #[test]
    fn k0_one_when_f1_of_one_below_d() {
        let p = FiberPair::new(FiberMap::logistic(0.5), FiberMap::moebius(0.5, 1.0, 0.4), 2.0).unwrap();
        assert!(p.f1.eval(1.0) < p.d);
        assert_eq!(max_consecutive_ones(&p, 100).unwrap(), 1);
    }

    #[test]
    fn k0_cap_when_f1_has_fixed_point() {
        // f1(x) = 2x/(1+x) fixes 1, so the run of 1s never leaves the domain
        let f1 = FiberMap::moebius(2.0, 1.0, 0.0).shifted(0.0).unwrap();
        let p = FiberPair::with_domain(FiberMap::logistic(0.5), f1, 0.0, 2.0).unwrap();
        assert_eq!(max_consecutive_ones(&p, 50), Err(Error::NonTerminating { cap: 50 }));
    }

    #[test]
    fn reference_counts() {
        let counts = language_counts(&refp(), 8, DEFAULT_NODE_BUDGET).unwrap();
        let c: Vec<u64> = counts.iter().map(|c| c.count).collect();
        assert_eq!(c, vec![2, 4, 8, 15, 26, 47, 84, 144]);
        for n in 1..=12 {
            assert_eq!(language_counts(&refp(), n, DEFAULT_NODE_BUDGET).unwrap()[n - 1].count, naive_count(&refp(), n));
        }
    }

    #[test]
    fn counts_beyond_split_depth_match_naive() {
        let p = refp();
        let counts = language_counts(&p, 16, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(counts[15].count, naive_count(&p, 16));
        assert_eq!(counts[11].count, naive_count(&p, 12));
    }

    #[test]
    fn list_mode_matches_count_and_excludes_1111() {
        let words = list_admissible(&refp(), 4, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(words.len(), 15);
        assert!(!words.contains(&w("1111")));
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(sorted, words);
        let long = list_admissible(&refp(), 13, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(long.len() as u64, naive_count(&refp(), 13));
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            language_counts(&refp(), 20, 1000),
            Err(Error::ResourceLimit { budget: 1000 })
        );
        assert!(matches!(
            enumerate_admissible(&refp(), 14, EnumerationMode::List, 100),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn het_words_examples() {
        assert!(het_words(&refp(), 8, 1e-9).unwrap().is_empty());
        assert!(het_words(&refp(), 0, 1e-9).unwrap().is_empty());
        // A = 0.6 d / (1 - d) with B = 1 puts f1(1) exactly at d = 0.4
        let a = 0.4 * 1.6 / 0.6;
        let p = FiberPair::new(FiberMap::logistic(0.5), FiberMap::moebius(a, 1.0, 0.4), 2.0).unwrap();
        let h = het_words(&p, 2, 1e-9).unwrap();
        assert!(h.iter().any(|(w0, r)| *w0 == w("11") && r.abs() < 1e-15), "{h:?}");
    }

    fn arb_word(max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0u8..2, 0..max).prop_map(|v| Word::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn appending_one_raises_a_appending_zero_keeps_it(word in arb_word(14)) {
            let p = refp();
            prop_assume!(is_forward_admissible(&p, &word));
            let a = forward_endpoint(&p, &word).unwrap().a;
            let a0 = forward_endpoint(&p, &word.pushed(0)).unwrap().a;
            prop_assert!((a0 - a).abs() <= 1e-12);
            if let Ok(a1) = forward_endpoint(&p, &word.pushed(1)) {
                prop_assert!(a1.a > a);
            }
        }

        #[test]
        fn nesting_under_extension(word in arb_word(10), ext in arb_word(8)) {
            let p = refp();
            let long = word.concat(&ext);
            prop_assume!(is_forward_admissible(&p, &long));
            let a = forward_endpoint(&p, &word).unwrap().a;
            let b = forward_endpoint(&p, &long).unwrap().a;
            prop_assert!(b >= a - 1e-12);
            if ext.count(1) == 0 {
                prop_assert!((b - a).abs() <= 1e-12);
            } else {
                prop_assert!(b > a);
            }
        }

        #[test]
        fn zero_append_insert_exchange(word in arb_word(16), pos in 0usize..16) {
            let p = refp();
            prop_assume!(is_forward_admissible(&p, &word));
            prop_assert!(is_forward_admissible(&p, &word.pushed(0)));
            let s = word.symbols();
            if pos < s.len() && s[pos] == 1 {
                let mut inserted = s.to_vec();
                inserted.insert(pos, 0);
                prop_assert!(is_forward_admissible(&p, &Word::new(inserted).unwrap()));
                let mut exchanged = s.to_vec();
                exchanged[pos] = 0;
                prop_assert!(is_forward_admissible(&p, &Word::new(exchanged).unwrap()));
            }
        }

        #[test]
        fn admissible_at_matches_endpoint(word in arb_word(10), x in 0.0f64..=1.0) {
            let p = refp();
            prop_assume!(is_forward_admissible(&p, &word));
            let a = forward_endpoint(&p, &word).unwrap().a;
            prop_assume!((x - a).abs() > 1e-9);
            prop_assert_eq!(admissible_at(&p, &word, x), x > a);
        }
    }

    #[test]
    fn counts_grow_and_entropy_decreases() {
        let counts = language_counts(&refp(), 18, DEFAULT_NODE_BUDGET).unwrap();
        for win in counts.windows(2) {
            assert!(win[1].count >= win[0].count && win[1].count <= 2 * win[0].count);
            assert!(win[1].entropy_upper <= win[0].entropy_upper + 1e-15);
        }
    }
}
