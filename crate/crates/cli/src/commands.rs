use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use concave_skew::bifurcation::{
    BifFamily, case_ia_family, case_ii_family, find_saddle_node, find_saddle_node_in, make_family, reference_family,
    scan,
};
use concave_skew::maps::{FiberPair, check_hypotheses};
use concave_skew::measures::{frequency_bound, twin_measures, wasserstein_periodic};
use concave_skew::orbits::{FixedPointResult, PeriodicOrbit, fixed_points, spine_limits};
use concave_skew::sft::{SftDescription, build_horseshoe, crossing_words, join_sfts, verify_join};
use concave_skew::symbolic::{forward_endpoint, is_forward_admissible, language_counts, list_admissible};
use concave_skew::verify::{VerifyConfig, admissible_words_up_to, parabolic_approximation, run_all};
use concave_skew::{Error, Word};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::output::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] Error),
}

/// A finished command; `failed` marks a failed verification.
pub struct Outcome {
    pub table: Table,
    pub failed: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, failed: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    /// Shift family through the configured pair.
    Config,
    Reference,
    CaseIa,
    CaseIi,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyName::Config)]
    family: FamilyName,
    /// Separate config whose `[maps]` section gives `f0` and the unshifted `f1`.
    #[arg(long)]
    family_config: Option<PathBuf>,
}

impl FamilyArgs {
    fn resolve(&self, cfg: &RunConfig) -> Result<BifFamily, CliError> {
        let mut family = match (&self.family_config, self.family) {
            (Some(path), _) => {
                let fc = RunConfig::load(path)?;
                make_family(fc.f0, fc.f1, fc.modulus)?
            }
            (None, FamilyName::Config) => make_family(cfg.f0, cfg.f1, cfg.modulus)?,
            (None, FamilyName::Reference) => reference_family(),
            (None, FamilyName::CaseIa) => case_ia_family(),
            (None, FamilyName::CaseIi) => case_ii_family(),
        };
        family.tol = cfg.tol;
        Ok(family)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grid check of the standing hypotheses on the configured pair.
    Hypotheses {
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Admissible words of length n with their left endpoints.
    Words {
        #[arg(long)]
        n: usize,
        /// List every binary word, admissible or not.
        #[arg(long)]
        all: bool,
    },
    /// Word counts and entropy upper bounds for lengths 1..=n.
    Entropy {
        #[arg(long)]
        n: usize,
    },
    /// Fiber fixed points of one word, with spine limits.
    Orbit {
        #[arg(long)]
        word: Word,
        /// Power used for the spine limits.
        #[arg(long, default_value_t = 20)]
        m: usize,
    },
    /// Twin measures, exponents and their bounds for hyperbolic words.
    Twins {
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Frequency bound against periodic lifts.
    Freq {
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },
    /// Padded horseshoe from the crossing words of length k at a.
    Horseshoe {
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 0.45)]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "L", default_value_t = 0.5)]
        big_l: f64,
    },
    /// Join of the orbit SFTs of two words, with verification.
    Join {
        #[arg(long, default_value = "1000")]
        s1: Word,
        #[arg(long, default_value = "10000")]
        s2: Word,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 60)]
        sample_len: usize,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
    },
    /// Entropy data across the parameter range of a shift family.
    Bifscan {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 50)]
        t_steps: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Parameter at which the periodic orbit of a word is born.
    SaddleNode {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "10")]
        word: Word,
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
    },
    /// Contracting approximants of the parabolic orbit at the saddle node.
    ParabolicApprox {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "10")]
        word: Word,
        #[arg(long, default_value_t = 6)]
        ells: usize,
    },
    /// Runs every acceptance check and prints a pass/fail table.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Hypotheses { .. } => "hypotheses",
            Command::Words { .. } => "words",
            Command::Entropy { .. } => "entropy",
            Command::Orbit { .. } => "orbit",
            Command::Twins { .. } => "twins",
            Command::Freq { .. } => "freq",
            Command::Horseshoe { .. } => "horseshoe",
            Command::Join { .. } => "join",
            Command::Bifscan { .. } => "bifscan",
            Command::SaddleNode { .. } => "saddle-node",
            Command::ParabolicApprox { .. } => "parabolic-approx",
            Command::Verify => "verify",
        }
    }

    /// Whether the configured pair must pass the hypothesis check first.
    /// `hypotheses` reports instead, and family commands may ignore the pair.
    pub fn needs_valid_pair(&self) -> bool {
        match self {
            Command::Hypotheses { .. } => false,
            Command::Bifscan { family, .. } | Command::SaddleNode { family, .. } | Command::ParabolicApprox { family, .. } => {
                family.family_config.is_none() && family.family == FamilyName::Config
            }
            _ => true,
        }
    }
}

fn orbit_row(word: &Word, variant: &str, branch: &str, o: &PeriodicOrbit, spine: f64) -> Vec<Cell> {
    vec![
        word.to_string().into(),
        variant.into(),
        branch.into(),
        o.point.into(),
        o.multiplier.into(),
        o.exponent.into(),
        format!("{:?}", o.kind).to_lowercase().into(),
        spine.into(),
    ]
}

pub fn run(cmd: &Command, cfg: &RunConfig, pair: &FiberPair) -> Result<Outcome, CliError> {
    let budget = cfg.node_budget;
    Ok(match cmd {
        Command::Hypotheses { grid } => {
            let r = check_hypotheses(pair, *grid)?;
            let mut t = Table::new(&[
                "h1_ok",
                "h2_ok",
                "h2plus_ok",
                "modulus",
                "modulus_estimate",
                "modulus_lower_estimate",
                "worst_clause",
                "worst_location",
                "worst_magnitude",
            ]);
            let v = r.worst_violation.as_ref();
            t.push(vec![
                r.h1_ok.into(),
                r.h2_ok.into(),
                r.h2plus_ok.into(),
                pair.modulus.into(),
                r.modulus_estimate.into(),
                r.modulus_lower_estimate.into(),
                v.map(|v| v.clause.clone()).into(),
                v.map(|v| v.location).into(),
                v.map(|v| v.magnitude).into(),
            ]);
            Outcome { table: t, failed: !(r.h1_ok && r.h2_ok && r.h2plus_ok) }
        }
        Command::Words { n, all } => {
            let mut t = Table::new(&["word", "admissible", "a_endpoint"]);
            let words = if *all {
                (0..1u64 << n).map(|b| Word::from_bits(b, *n)).collect()
            } else {
                list_admissible(pair, *n, budget)?
            };
            for w in words {
                let a = forward_endpoint(pair, &w).ok().map(|f| f.a);
                t.push(vec![w.to_string().into(), is_forward_admissible(pair, &w).into(), a.into()]);
            }
            t.into()
        }
        Command::Entropy { n } => {
            let mut t = Table::new(&["n", "count", "entropy_upper"]);
            for c in language_counts(pair, *n, budget)? {
                t.push(vec![c.n.into(), c.count.into(), c.entropy_upper.into()]);
            }
            t.into()
        }
        Command::Orbit { word, m } => {
            let mut t = Table::new(&[
                "word",
                "variant",
                "branch",
                "point",
                "multiplier",
                "exponent",
                "kind",
                "spine_limit",
            ]);
            let result = fixed_points(pair, word)?;
            match &result {
                FixedPointResult::None => {
                    t.warnings.push(format!("{word} has no fiber fixed point"));
                }
                FixedPointResult::Parabolic(o) => {
                    let (a, _) = spine_limits(pair, word, *m)?;
                    t.push(orbit_row(word, result.variant_name(), "parabolic", o, a));
                }
                FixedPointResult::Pair { plus, minus } => {
                    let (a, b) = spine_limits(pair, word, *m)?;
                    t.push(orbit_row(word, result.variant_name(), "plus", plus, a));
                    t.push(orbit_row(word, result.variant_name(), "minus", minus, b));
                }
            }
            t.into()
        }
        Command::Twins { max_len } => {
            let words = admissible_words_up_to(pair, *max_len, budget)?;
            let rows: Vec<Vec<Cell>> = words
                .par_iter()
                .filter_map(|w| twin_measures(pair, w).ok())
                .map(|r| {
                    let (formula, oracle) = match wasserstein_periodic(&r.mu_plus, &r.mu_minus) {
                        Ok((f, o)) => (Some(f), Some(o)),
                        Err(_) => (None, None),
                    };
                    vec![
                        r.word.to_string().into(),
                        r.d.into(),
                        r.chi_plus.into(),
                        r.chi_minus.into(),
                        r.kappa1.into(),
                        r.kappa2.into(),
                        r.lower_bounds_ok.into(),
                        r.bounds_ok.into(),
                        formula.into(),
                        oracle.into(),
                    ]
                })
                .collect();
            let mut t = Table::new(&[
                "word",
                "d",
                "chi_plus",
                "chi_minus",
                "kappa1",
                "kappa2",
                "lower_bounds_ok",
                "bounds_ok",
                "w1_formula",
                "w1_oracle",
            ]);
            t.rows = rows;
            t.into()
        }
        Command::Freq { max_len } => {
            let words = admissible_words_up_to(pair, *max_len, budget)?;
            let rows: Vec<Vec<Cell>> = words
                .par_iter()
                .map(|w| {
                    let fb = frequency_bound(pair, w);
                    let lift = fixed_points(pair, w).map_or("none", |r| r.variant_name());
                    vec![
                        w.to_string().into(),
                        (w.count(1) as f64 / w.len() as f64).into(),
                        fb.lhs.into(),
                        fb.ok.into(),
                        lift.into(),
                    ]
                })
                .collect();
            let mut t = Table::new(&["word", "freq1", "lhs", "ok", "lift"]);
            t.rows = rows;
            t.into()
        }
        Command::Horseshoe { k, a, eps, big_l } => {
            let words = crossing_words(pair, *k, *a, budget)?;
            let h = build_horseshoe(pair, &words, *eps, *big_l, *a)?;
            let mut t = Table::new(&[
                "k",
                "a",
                "eps",
                "L",
                "words",
                "z_min",
                "ell",
                "ell_prime",
                "s",
                "p_minus",
                "contraction_sup",
                "entropy",
            ]);
            let list: Vec<String> = h.words.iter().map(Word::to_string).collect();
            t.push(vec![
                h.k.into(),
                h.a.into(),
                h.eps.into(),
                h.big_l.into(),
                list.join(" ").into(),
                h.z_min.into(),
                h.ell.into(),
                h.ell_prime.into(),
                h.s.into(),
                h.p_minus.into(),
                h.contraction_sup.into(),
                h.entropy.into(),
            ]);
            Outcome { table: t, failed: h.contraction_sup >= 1.0 }
        }
        Command::Join { s1, s2, samples, sample_len, pairs } => {
            let d1 = SftDescription::periodic_orbit(s1)?;
            let d2 = SftDescription::periodic_orbit(s2)?;
            let (s3, cert) = join_sfts(pair, &d1, &d2)?;
            let v = verify_join(pair, [&d1, &d2], &s3, &cert, *samples, *sample_len, *pairs, cfg.seed);
            let c = &cert.class_counts;
            let mut t = Table::new(&[
                "n0",
                "n1",
                "a",
                "b",
                "disjoint_from",
                "window",
                "allowed",
                "inherited",
                "zero_prefixed",
                "zero_suffixed",
                "zero_bridged",
                "contains_inputs",
                "rejects_zero_block",
                "samples_admissible",
                "samples_checked",
                "connector_literal",
                "connector_fallback",
                "connector_failed",
            ]);
            t.push(vec![
                cert.n0.into(),
                cert.n1.into(),
                cert.a.into(),
                cert.b.into(),
                cert.disjoint_from.into(),
                cert.window.into(),
                s3.allowed.len().into(),
                c.inherited.into(),
                c.zero_prefixed.into(),
                c.zero_suffixed.into(),
                c.zero_bridged.into(),
                v.contains_inputs.into(),
                v.rejects_zero_block.into(),
                v.samples_admissible.into(),
                v.samples_checked.into(),
                v.connector_literal.into(),
                v.connector_fallback.into(),
                v.connector_failed.into(),
            ]);
            Outcome { table: t, failed: !v.passed() }
        }
        Command::Bifscan { family, t_steps, n } => {
            let family = family.resolve(cfg)?;
            let rows = scan(&family, &family.t_grid(*t_steps), *n, budget, cfg.iteration_cap)?;
            let mut t = Table::new(&[
                "t",
                "d_t",
                "c_t",
                "p_t",
                "h_p_t",
                "count_n",
                "entropy_upper_n",
                "k0_t",
                "error",
            ]);
            t.warnings.push(format!(
                "case {:?}, t_h = {}, t_c = {}",
                family.case,
                crate::output::fmt_f64(family.t_h),
                crate::output::fmt_f64(family.t_c)
            ));
            for r in rows {
                t.push(vec![
                    r.t.into(),
                    r.d_t.into(),
                    r.c_t.into(),
                    r.p_t.into(),
                    r.h_p_t.into(),
                    r.count_n.into(),
                    r.entropy_upper_n.into(),
                    r.k0_t.into(),
                    r.error.into(),
                ]);
            }
            t.into()
        }
        Command::SaddleNode { family, word, lo, hi } => {
            let family = family.resolve(cfg)?;
            let t_star = match (lo, hi) {
                (Some(lo), Some(hi)) => find_saddle_node_in(&family, word, *lo, *hi)?,
                _ => find_saddle_node(&family, word)?,
            };
            let at = family.pair_at(t_star)?;
            let mut t = Table::new(&["word", "t", "variant", "point", "multiplier"]);
            let result = fixed_points(&at, word)?;
            let orbit = match &result {
                FixedPointResult::Parabolic(o) => Some(o),
                FixedPointResult::Pair { plus, .. } => Some(plus),
                FixedPointResult::None => None,
            };
            t.push(vec![
                word.to_string().into(),
                t_star.into(),
                result.variant_name().into(),
                orbit.map(|o| o.point).into(),
                orbit.map(|o| o.multiplier).into(),
            ]);
            t.into()
        }
        Command::ParabolicApprox { family, word, ells } => {
            let family = family.resolve(cfg)?;
            let approx = parabolic_approximation(&family, word, *ells)?;
            let mut t = Table::new(&["t", "parabolic_point", "k", "ell", "period", "multiplier", "wasserstein"]);
            for r in &approx.rows {
                t.push(vec![
                    approx.t.into(),
                    approx.parabolic_point.into(),
                    approx.k.into(),
                    r.ell.into(),
                    (2 * r.ell * word.len() + approx.k).into(),
                    r.multiplier.into(),
                    r.wasserstein.into(),
                ]);
            }
            t.into()
        }
        Command::Verify => {
            let vc = VerifyConfig { seed: cfg.seed, node_budget: budget };
            let results = run_all(pair, &vc);
            let mut t = Table::new(&["id", "status", "title", "detail"]);
            let failed = results.iter().any(|r| !r.passed);
            for r in results {
                t.push(vec![
                    r.id.into(),
                    (if r.passed { "PASS" } else { "FAIL" }).into(),
                    r.title.into(),
                    r.detail.into(),
                ]);
            }
            Outcome { table: t, failed }
        }
    })
}
