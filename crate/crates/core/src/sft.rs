//! Subshifts of finite type inside the admissible shift: finite descriptions,
//! their languages and entropy, the transitive join of two SFTs and the
//! contracting horseshoe built from padded words.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::FiberPair;
use crate::numeric::bisect;
use crate::orbits::{FixedPointResult, fixed_points, spine_periodic};
use crate::symbolic::{admissible_at, is_forward_admissible, list_admissible};
use crate::word::Word;

/// Longest window length tried when searching for disjointness or a missing
/// zero block.
pub const LANGUAGE_HORIZON: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// Sequences are free concatenations of allowed blocks.
    Blockwise,
    /// Sequences whose every length-`window` factor is allowed.
    Windowed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SftDescription {
    pub window: usize,
    pub allowed: BTreeSet<Word>,
    pub semantics: Semantics,
}

impl SftDescription {
    pub fn new(window: usize, allowed: BTreeSet<Word>, semantics: Semantics) -> Result<Self> {
        if window == 0 || allowed.is_empty() {
            return Err(Error::InvalidParameter("an SFT needs a positive window and allowed words".into()));
        }
        if let Some(bad) = allowed.iter().find(|w| w.len() != window) {
            return Err(Error::InvalidParameter(format!("allowed word {bad} has length != {window}")));
        }
        Ok(SftDescription { window, allowed, semantics })
    }

    /// The full shift on two symbols.
    pub fn full_shift() -> Self {
        SftDescription::new(1, [Word::zeros(1), Word::ones(1)].into_iter().collect(), Semantics::Windowed).unwrap()
    }

    /// Windowed SFT of all sequences avoiding `forbidden` (words of one length).
    pub fn forbidding(forbidden: &[Word]) -> Result<Self> {
        let r = forbidden
            .first()
            .map(Word::len)
            .ok_or_else(|| Error::InvalidParameter("no forbidden words".into()))?;
        if r > 24 {
            return Err(Error::InvalidParameter("forbidden words longer than 24".into()));
        }
        let bad: HashSet<&Word> = forbidden.iter().collect();
        let allowed = (0..1u64 << r).map(|b| Word::from_bits(b, r)).filter(|w| !bad.contains(w)).collect();
        SftDescription::new(r, allowed, Semantics::Windowed)
    }

    /// The orbit of `word^Z` as a windowed SFT with window `|word| + 1`.
    pub fn periodic_orbit(word: &Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidParameter("empty orbit word".into()));
        }
        let r = word.len() + 1;
        let allowed = (0..word.len())
            .map(|i| Word::new((0..r).map(|k| word.periodic_at((i + k) as i64)).collect()).unwrap())
            .collect();
        SftDescription::new(r, allowed, Semantics::Windowed)
    }

    pub fn graph(&self) -> SftGraph {
        SftGraph::new(self)
    }
}

/// Labeled graph presentation of an SFT, restricted to states on bi-infinite paths.
#[derive(Clone, Debug)]
pub struct SftGraph {
    out: Vec<Vec<(usize, u8)>>,
    alive: Vec<bool>,
}

impl SftGraph {
    pub fn new(desc: &SftDescription) -> Self {
        let r = desc.window;
        let mut out: Vec<Vec<(usize, u8)>> = Vec::new();
        match desc.semantics {
            Semantics::Windowed => {
                let mut index: HashMap<Word, usize> = HashMap::new();
                let mut id = |w: Word, out: &mut Vec<Vec<(usize, u8)>>| {
                    *index.entry(w).or_insert_with(|| {
                        out.push(Vec::new());
                        out.len() - 1
                    })
                };
                for win in &desc.allowed {
                    let from = id(win.slice(0, r - 1), &mut out);
                    let to = id(win.slice(1, r), &mut out);
                    out[from].push((to, win.symbols()[r - 1]));
                }
            }
            Semantics::Blockwise => {
                let blocks: Vec<&Word> = desc.allowed.iter().collect();
                out = vec![Vec::new(); blocks.len() * r];
                for (b, block) in blocks.iter().enumerate() {
                    for p in 0..r - 1 {
                        out[b * r + p].push((b * r + p + 1, block.symbols()[p]));
                    }
                    for b2 in 0..blocks.len() {
                        out[b * r + r - 1].push((b2 * r, block.symbols()[r - 1]));
                    }
                }
            }
        }
        let mut g = SftGraph { alive: vec![true; out.len()], out };
        g.trim();
        g
    }

    fn trim(&mut self) {
        let n = self.out.len();
        loop {
            let mut has_in = vec![false; n];
            let mut has_out = vec![false; n];
            for s in 0..n {
                if !self.alive[s] {
                    continue;
                }
                for &(t, _) in &self.out[s] {
                    if self.alive[t] {
                        has_out[s] = true;
                        has_in[t] = true;
                    }
                }
            }
            let mut changed = false;
            for s in 0..n {
                if self.alive[s] && !(has_in[s] && has_out[s]) {
                    self.alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let alive = self.alive.clone();
        for edges in &mut self.out {
            edges.retain(|&(t, _)| alive[t]);
        }
        for (s, edges) in self.out.iter_mut().enumerate() {
            if !alive[s] {
                edges.clear();
            }
        }
    }

    pub fn alive_states(&self) -> Vec<usize> {
        (0..self.out.len()).filter(|&s| self.alive[s]).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.alive.iter().any(|&a| a)
    }

    fn step_set(&self, from: &[usize], sym: u8) -> Vec<usize> {
        let mut next: Vec<usize> = from
            .iter()
            .flat_map(|&s| self.out[s].iter().filter(move |e| e.1 == sym).map(|e| e.0))
            .collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    /// States reachable after reading `word` from some start state.
    fn read(&self, starts: Vec<usize>, word: &Word) -> Vec<usize> {
        word.symbols().iter().fold(starts, |cur, &s| if cur.is_empty() { cur } else { self.step_set(&cur, s) })
    }

    /// Whether `word` occurs in some sequence of the subshift.
    pub fn accepts(&self, word: &Word) -> bool {
        !self.is_empty() && !self.read(self.alive_states(), word).is_empty()
    }

    /// All words of length `len` occurring in the subshift.
    pub fn language(&self, len: usize) -> BTreeSet<Word> {
        let mut level: HashSet<(Word, usize)> = self.alive_states().into_iter().map(|s| (Word::empty(), s)).collect();
        for _ in 0..len {
            let mut next = HashSet::with_capacity(level.len() * 2);
            for (w, s) in &level {
                for &(t, sym) in &self.out[*s] {
                    next.insert((w.pushed(sym), t));
                }
            }
            level = next;
        }
        level.into_iter().map(|(w, _)| w).collect()
    }

    /// A random word of length `len` read along a uniformly chosen walk.
    pub fn sample(&self, len: usize, rng: &mut impl Rng) -> Option<Word> {
        let states = self.alive_states();
        if states.is_empty() {
            return None;
        }
        let mut s = states[rng.gen_range(0..states.len())];
        let mut w = Word::empty();
        for _ in 0..len {
            let (t, sym) = self.out[s][rng.gen_range(0..self.out[s].len())];
            w.push(sym);
            s = t;
        }
        Some(w)
    }

    /// Shortest `η` with `v η w` accepted, if any.
    pub fn bridge(&self, v: &Word, w: &Word) -> Option<Word> {
        let start = self.read(self.alive_states(), v);
        if start.is_empty() {
            return None;
        }
        let targets: HashSet<usize> =
            self.alive_states().into_iter().filter(|&s| !self.read(vec![s], w).is_empty()).collect();
        let mut prev: HashMap<usize, Option<(usize, u8)>> = start.iter().map(|&s| (s, None)).collect();
        let mut queue: VecDeque<usize> = start.into_iter().collect();
        while let Some(s) = queue.pop_front() {
            if targets.contains(&s) {
                let mut eta = Vec::new();
                let mut cur = s;
                while let Some(Some((p, sym))) = prev.get(&cur) {
                    eta.push(*sym);
                    cur = *p;
                }
                eta.reverse();
                return Some(Word::new(eta).unwrap());
            }
            for &(t, sym) in &self.out[s] {
                prev.entry(t).or_insert_with(|| {
                    queue.push_back(t);
                    Some((s, sym))
                });
            }
        }
        None
    }

    /// Spectral radius of the adjacency matrix by power iteration on `A + I`,
    /// which is aperiodic even when `A` is not.
    pub fn spectral_radius(&self) -> f64 {
        let states = self.alive_states();
        if states.is_empty() {
            return 0.0;
        }
        let n = self.out.len();
        let mut v = vec![0.0; n];
        for &s in &states {
            v[s] = 1.0;
        }
        let mut rho = 0.0;
        for _ in 0..1_000_000 {
            let mut next = v.clone();
            for &s in &states {
                for &(t, _) in &self.out[s] {
                    next[t] += v[s];
                }
            }
            let norm: f64 = next.iter().sum();
            let prev_norm: f64 = v.iter().sum();
            let est = norm / prev_norm;
            for x in &mut next {
                *x /= norm;
            }
            v = next;
            if (est - rho).abs() <= 1e-12 * est {
                rho = est;
                break;
            }
            rho = est;
        }
        (rho - 1.0).max(0.0)
    }
}

/// Whether `word` occurs in the subshift.
pub fn is_allowed_word(sft: &SftDescription, word: &Word) -> bool {
    sft.graph().accepts(word)
}

/// Words of length `len` occurring in the subshift.
pub fn language(sft: &SftDescription, len: usize) -> BTreeSet<Word> {
    sft.graph().language(len)
}

/// `count` random words of length `len`, deterministic in `seed`.
pub fn sample_words(sft: &SftDescription, len: usize, count: usize, seed: u64) -> Vec<Word> {
    let g = sft.graph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).filter_map(|_| g.sample(len, &mut rng)).collect()
}

/// Topological entropy of the subshift.
pub fn sft_entropy(sft: &SftDescription) -> f64 {
    match sft.semantics {
        Semantics::Blockwise => (sft.allowed.len() as f64).ln() / sft.window as f64,
        Semantics::Windowed => {
            let rho = sft.graph().spectral_radius();
            if rho <= 0.0 { 0.0 } else { rho.ln().max(0.0) }
        }
    }
}

/// Which of the four window classes of the join produced a window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub inherited: usize,
    pub zero_prefixed: usize,
    pub zero_suffixed: usize,
    pub zero_bridged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoinCertificate {
    pub n0: usize,
    pub n1: usize,
    pub a: f64,
    pub b: f64,
    /// Least length at which the input languages are disjoint.
    pub disjoint_from: usize,
    pub class_counts: ClassCounts,
    pub window: usize,
}

fn zero_free_from(g1: &SftGraph, g2: &SftGraph) -> Option<usize> {
    (1..=LANGUAGE_HORIZON).find(|&n| {
        let z = Word::zeros(n);
        !g1.accepts(&z) && !g2.accepts(&z)
    })
}

/// Transitive SFT containing two disjoint SFTs that avoid `0^Z`.
pub fn join_sfts(pair: &FiberPair, s1: &SftDescription, s2: &SftDescription) -> Result<(SftDescription, JoinCertificate)> {
    let (g1, g2) = (s1.graph(), s2.graph());
    let disjoint_from = (1..=LANGUAGE_HORIZON)
        .find(|&n| g1.language(n).is_disjoint(&g2.language(n)))
        .ok_or(Error::NotDisjoint { checked: LANGUAGE_HORIZON })?;
    let first_missing = zero_free_from(&g1, &g2).ok_or(Error::ContainsZeroSequence { checked: LANGUAGE_HORIZON })?;
    let n0 = (first_missing..=LANGUAGE_HORIZON)
        .find(|&n| {
            let word = Word::zeros(n - 1).pushed(1);
            matches!(fixed_points(pair, &word), Ok(FixedPointResult::Pair { .. } | FixedPointResult::Parabolic(_)))
        })
        .ok_or_else(|| Error::NoFixedPoint { word: format!("0^(n-1)1 for n <= {LANGUAGE_HORIZON}") })?;
    let spine = spine_periodic(pair, &Word::zeros(n0 - 1).pushed(1))?;
    let (a, b) = (spine.lo, spine.hi);

    let mut n1 = (2 * n0 + 1).max(s1.window).max(s2.window).max(disjoint_from);
    let mut x = a;
    for _ in 0..n1 {
        x = pair.f0.eval(x);
    }
    let mut guard = 0;
    while x <= b {
        x = pair.f0.eval(x);
        n1 += 1;
        guard += 1;
        if guard > 100_000 {
            return Err(Error::NonTerminating { cap: guard });
        }
    }

    let r = 2 * n1;
    let union = |len: usize| -> BTreeSet<Word> {
        let mut u = g1.language(len);
        u.extend(g2.language(len));
        u
    };
    let mut counts = ClassCounts::default();
    let mut allowed: BTreeSet<Word> = union(r);
    counts.inherited = allowed.len();
    for ell in 1..=n1 {
        for v in union(r - ell) {
            counts.zero_prefixed += 1;
            allowed.insert(Word::zeros(ell).concat(&v));
            counts.zero_suffixed += 1;
            allowed.insert(v.concat(&Word::zeros(ell)));
        }
    }
    let zeros = Word::zeros(n1);
    for j in 1..n1 {
        let right = union(n1 - j);
        for v in union(j) {
            for w in &right {
                counts.zero_bridged += 1;
                allowed.insert(v.concat(&zeros).concat(w));
            }
        }
    }
    let s3 = SftDescription::new(r, allowed, Semantics::Windowed)?;
    Ok((s3, JoinCertificate { n0, n1, a, b, disjoint_from, class_counts: counts, window: r }))
}

/// How a pair of words was connected inside the joined SFT.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub eta: Word,
    /// The zero-block recipe from the trailing/leading zero counts worked.
    pub literal: bool,
}

/// The zero-block connector `0^{max(0, N1 − ℓ − m)}` where `v` ends with
/// exactly `ℓ` zeros and `w` starts with exactly `m`.
pub fn literal_connector(n1: usize, v: &Word, w: &Word) -> Word {
    let ell = v.trailing(0);
    let m = w.leading(0);
    Word::zeros(n1.saturating_sub(ell + m))
}

/// Connects `v` to `w` inside `S3`: the zero-block recipe when it produces an
/// allowed word, otherwise the shortest bridge in the graph.
pub fn connect(graph: &SftGraph, n1: usize, v: &Word, w: &Word) -> Option<Connection> {
    let eta = literal_connector(n1, v, w);
    if graph.accepts(&v.concat(&eta).concat(w)) {
        return Some(Connection { eta, literal: true });
    }
    graph.bridge(v, w).map(|eta| Connection { eta, literal: false })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoinVerification {
    pub contains_inputs: bool,
    pub rejects_zero_block: bool,
    pub samples_checked: usize,
    pub samples_admissible: usize,
    pub connector_pairs: usize,
    pub connector_literal: usize,
    pub connector_fallback: usize,
    pub connector_failed: usize,
}

impl JoinVerification {
    pub fn passed(&self) -> bool {
        self.contains_inputs
            && self.rejects_zero_block
            && self.samples_admissible == self.samples_checked
            && self.connector_failed == 0
    }
}

/// Sampling checks of a join: inclusion of the inputs, exclusion of the long
/// zero block, admissibility of random words and the connector.
pub fn verify_join(
    pair: &FiberPair,
    inputs: [&SftDescription; 2],
    s3: &SftDescription,
    cert: &JoinCertificate,
    samples: usize,
    sample_len: usize,
    connector_pairs: usize,
    seed: u64,
) -> JoinVerification {
    let g3 = s3.graph();
    let contains_inputs = inputs.iter().all(|s| {
        let g = s.graph();
        [s.window, cert.window].iter().all(|&len| g.language(len).iter().all(|w| g3.accepts(w)))
    });
    let rejects_zero_block = !g3.accepts(&Word::zeros(2 * cert.n1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Word> = (0..samples).filter_map(|_| g3.sample(sample_len, &mut rng)).collect();
    let samples_admissible = words.par_iter().filter(|w| is_forward_admissible(pair, w)).count();
    let mut v = JoinVerification {
        contains_inputs,
        rejects_zero_block,
        samples_checked: samples,
        samples_admissible,
        connector_pairs,
        connector_literal: 0,
        connector_fallback: 0,
        connector_failed: 0,
    };
    for _ in 0..connector_pairs {
        let l1 = rng.gen_range(cert.n1 + 1..=3 * cert.n1);
        let l2 = rng.gen_range(cert.n1 + 1..=3 * cert.n1);
        let (Some(x), Some(y)) = (g3.sample(l1, &mut rng), g3.sample(l2, &mut rng)) else {
            v.connector_failed += 1;
            continue;
        };
        match connect(&g3, cert.n1, &x, &y) {
            Some(c) if c.literal => v.connector_literal += 1,
            Some(_) => v.connector_fallback += 1,
            None => v.connector_failed += 1,
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorseshoeBuild {
    pub words: Vec<Word>,
    pub k: usize,
    pub eps: f64,
    pub big_l: f64,
    pub a: f64,
    /// Left end of `Z = {z : f0'(z) ≤ e^{−L}}`.
    pub z_min: f64,
    pub ell: usize,
    pub ell_prime: usize,
    pub s: usize,
    pub padded: Vec<Word>,
    pub p_minus: f64,
    pub contraction_sup: f64,
    pub entropy: f64,
    pub sft: SftDescription,
}

/// Admissible words of length `k` defined at `a` that map `a` strictly to the right.
pub fn crossing_words(pair: &FiberPair, k: usize, a: f64, budget: u64) -> Result<Vec<Word>> {
    Ok(list_admissible(pair, k, budget)?
        .into_iter()
        .filter(|w| admissible_at(pair, w, a) && pair.eval_word(w, a).is_ok_and(|y| y > a))
        .collect())
}

/// Pads every crossing word with `0^s` and checks the resulting IFS contracts
/// on `[p⁻, 1]`.
pub fn build_horseshoe(pair: &FiberPair, words: &[Word], eps: f64, big_l: f64, a: f64) -> Result<HorseshoeBuild> {
    let k = words.first().map(Word::len).ok_or_else(|| Error::InvalidParameter("empty word set".into()))?;
    if k == 0 || words.iter().any(|w| w.len() != k) {
        return Err(Error::InvalidParameter("words must share a positive length".into()));
    }
    let top = -pair.f0.deriv(1.0).ln();
    if !(big_l > 0.0 && big_l < top) {
        return Err(Error::InvalidParameter(format!("L = {big_l} outside (0, {top})")));
    }
    if !(eps > 0.0) || !(0.0..1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!("need eps > 0 and a in [0,1), got {eps}, {a}")));
    }
    for w in words {
        let crosses = admissible_at(pair, w, a) && pair.eval_word(w, a)? > a;
        if !crosses {
            return Err(Error::CrossingViolated { word: w.to_string(), a });
        }
    }
    let target = (-big_l).exp();
    let z_min = if pair.f0.deriv(0.0) <= target { 0.0 } else { bisect(|z| pair.f0.deriv(z) - target, 0.0, 1.0) };
    let mut ell = 0;
    let mut x = a;
    while x < z_min {
        x = pair.f0.eval(x);
        ell += 1;
        if ell > 1_000_000 {
            return Err(Error::NonTerminating { cap: ell });
        }
    }
    let ell_prime = (2.0 * k as f64 * eps / big_l).ceil() as usize;
    let s = ell + ell_prime;
    let padding = Word::zeros(s);
    let padded: Vec<Word> = words.iter().map(|w| w.concat(&padding)).collect();

    let mut p_minus = f64::INFINITY;
    for g in &padded {
        match fixed_points(pair, g)? {
            FixedPointResult::Pair { minus, .. } => p_minus = p_minus.min(minus.point),
            FixedPointResult::Parabolic(o) => p_minus = p_minus.min(o.point),
            FixedPointResult::None => return Err(Error::NoFixedPoint { word: g.to_string() }),
        }
    }
    let grid = 1000;
    let contraction_sup = padded
        .par_iter()
        .map(|g| {
            (0..grid)
                .map(|i| {
                    let x = if i + 1 == grid { 1.0 } else { p_minus + (1.0 - p_minus) * i as f64 / (grid - 1) as f64 };
                    pair.deriv_word(g, x).unwrap_or(f64::INFINITY)
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    if !(contraction_sup < 1.0) {
        return Err(Error::NoContraction { sup: contraction_sup });
    }
    let distinct: BTreeSet<Word> = padded.iter().cloned().collect();
    let sft = SftDescription::new(k + s, distinct.clone(), Semantics::Blockwise)?;
    let entropy = sft_entropy(&sft);
    Ok(HorseshoeBuild {
        words: words.to_vec(),
        k,
        eps,
        big_l,
        a,
        z_min,
        ell,
        ell_prime,
        s,
        padded: distinct.into_iter().collect(),
        p_minus,
        contraction_sup,
        entropy,
        sft,
    })
}

/// Random concatenations of `blocks` padded blocks, deterministic in `seed`.
pub fn sample_block_strings(build: &HorseshoeBuild, blocks: usize, count: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..blocks).fold(Word::empty(), |acc, _| acc.concat(&build.padded[rng.gen_range(0..build.padded.len())]))
        })
        .collect()
}

/// Least `k ≤ k_max` such that `u 0^k v` is admissible at 1.
pub fn mixing_padding(pair: &FiberPair, u: &Word, v: &Word, k_max: usize) -> Option<usize> {
    let mut x = pair.eval_word(u, 1.0).ok()?;
    for k in 0..=k_max {
        if admissible_at(pair, v, x) {
            return Some(k);
        }
        x = pair.f0.eval(x);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{DEFAULT_NODE_BUDGET, list_admissible};
    use crate::word::w;

    fn refp() -> FiberPair {
        FiberPair::reference()
    }

    fn set(words: &[&str]) -> BTreeSet<Word> {
        words.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn entropy_examples() {
        assert!((sft_entropy(&SftDescription::full_shift()) - 2f64.ln()).abs() < 1e-10);
        let blocks = SftDescription::new(4, (0..15).map(|b| Word::from_bits(b, 4)).collect(), Semantics::Blockwise).unwrap();
        assert!((sft_entropy(&blocks) - 15f64.ln() / 4.0).abs() < 1e-15);
        assert!((sft_entropy(&blocks) - 0.6770).abs() < 1e-4);
        // golden mean: largest root of λ² − λ − 1
        let golden = SftDescription::forbidding(&[w("11")]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sft_entropy(&golden) - phi.ln()).abs() < 1e-9);
        let orbit = SftDescription::periodic_orbit(&w("1000")).unwrap();
        assert!(sft_entropy(&orbit).abs() < 1e-9);
    }

    #[test]
    fn orbit_sft_language() {
        let s = SftDescription::periodic_orbit(&w("1000")).unwrap();
        assert_eq!(language(&s, 2), set(&["00", "01", "10"]));
        assert_eq!(language(&s, 6).len(), 4);
        assert!(is_allowed_word(&s, &w("0001000")));
        assert!(!is_allowed_word(&s, &w("0000")));
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let g = SftDescription::forbidding(&[w("11")]).unwrap();
        let counts: Vec<usize> = (1..=8).map(|n| language(&g, n).len()).collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13, 21, 34, 55]);
    }

    #[test]
    fn trimming_drops_dead_ends() {
        // "01" can never be followed by anything
        let s = SftDescription::new(2, set(&["00", "01"]), Semantics::Windowed).unwrap();
        assert_eq!(language(&s, 3), set(&["000"]));
    }

    #[test]
    fn join_of_orbit_sfts() {
        let p = refp();
        let s1 = SftDescription::periodic_orbit(&w("1000")).unwrap();
        let s2 = SftDescription::periodic_orbit(&w("10000")).unwrap();
        let (s3, cert) = join_sfts(&p, &s1, &s2).unwrap();
        assert_eq!(cert.n0, 5);
        assert_eq!(cert.disjoint_from, 8);
        assert!(cert.n1 > 2 * cert.n0);
        assert!(0.0 < cert.a && cert.a <= cert.b && cert.b < 1.0);
        let mut x = cert.a;
        for _ in 0..cert.n1 {
            x = p.f0.eval(x);
        }
        assert!(x > cert.b);
        assert!(!is_allowed_word(&s3, &Word::zeros(2 * cert.n1)));
        let v = verify_join(&p, [&s1, &s2], &s3, &cert, 50, 60, 20, 11);
        assert!(v.passed(), "{v:?}");
    }

    #[test]
    fn join_errors() {
        let p = refp();
        let s1 = SftDescription::periodic_orbit(&w("1000")).unwrap();
        assert_eq!(join_sfts(&p, &s1, &s1).unwrap_err(), Error::NotDisjoint { checked: LANGUAGE_HORIZON });
        let zero = SftDescription::periodic_orbit(&w("0")).unwrap();
        assert_eq!(
            join_sfts(&p, &s1, &zero).unwrap_err(),
            Error::ContainsZeroSequence { checked: LANGUAGE_HORIZON }
        );
    }

    #[test]
    fn literal_connector_cases() {
        assert_eq!(literal_connector(11, &w("0101"), &w("1000")), Word::zeros(11));
        assert_eq!(literal_connector(11, &w("0101"), &w("0001")), Word::zeros(8));
        assert_eq!(literal_connector(11, &w("1000"), &w("0011")), Word::zeros(6));
        assert_eq!(literal_connector(4, &w("1000"), &w("0011")), Word::empty());
    }

    #[test]
    fn bridge_finds_shortest() {
        let g = SftDescription::periodic_orbit(&w("1000")).unwrap().graph();
        assert_eq!(g.bridge(&w("10"), &w("01")), Some(w("0")));
        assert_eq!(g.bridge(&w("1000"), &w("1000")), Some(Word::empty()));
        assert_eq!(g.bridge(&w("1000"), &w("11")), None);
    }

    #[test]
    fn horseshoe_on_length_six_words() {
        let p = refp();
        let words = crossing_words(&p, 6, 0.45, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(words.len(), 9);
        let h = build_horseshoe(&p, &words, 0.1, 0.5, 0.45).unwrap();
        assert_eq!((h.ell, h.ell_prime, h.s), (5, 3, 8));
        assert!(h.contraction_sup < 1.0);
        assert!((h.entropy * (h.k + h.s) as f64 - (words.len() as f64).ln()).abs() < 1e-12);
        for u in &h.padded {
            for v in &h.padded {
                assert!(is_forward_admissible(&p, &u.concat(v)));
            }
        }
        for s in sample_block_strings(&h, 10, 100, 5) {
            assert!(is_forward_admissible(&p, &s));
        }
    }

    #[test]
    fn one_word_horseshoe_has_zero_entropy() {
        let h = build_horseshoe(&refp(), &[w("1000")], 0.1, 0.5, 0.7).unwrap();
        assert_eq!(h.entropy, 0.0);
        assert!(h.contraction_sup < 1.0);
    }

    #[test]
    fn horseshoe_rejects_non_crossing() {
        assert_eq!(
            build_horseshoe(&refp(), &[w("1000")], 0.1, 0.5, 0.3).unwrap_err(),
            Error::CrossingViolated { word: "1000".into(), a: 0.3 }
        );
    }

    #[test]
    fn mixing_padding_short_words() {
        let p = refp();
        let words: Vec<Word> = (1..=5).flat_map(|n| list_admissible(&p, n, DEFAULT_NODE_BUDGET).unwrap()).collect();
        for u in &words {
            for v in &words {
                let k = mixing_padding(&p, u, v, 64).expect("connector exists");
                assert!(is_forward_admissible(&p, &u.concat(&Word::zeros(k)).concat(v)));
            }
        }
    }
}
