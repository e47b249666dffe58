//! Public-API checks on the reference pair.

use concave_skew::maps::check_hypotheses;
use concave_skew::measures::{OrbitMeasure, wasserstein_orbits, wasserstein_periodic};
use concave_skew::orbits::{FixedPointResult, fixed_points};
use concave_skew::sft::{SftDescription, sft_entropy};
use concave_skew::symbolic::{DEFAULT_NODE_BUDGET, forward_endpoint, language_counts, max_consecutive_ones};
use concave_skew::{Error, FiberPair, w};

#[test]
fn word_counts_up_to_eight() {
    let p = FiberPair::reference();
    let counts: Vec<u64> = language_counts(&p, 8, DEFAULT_NODE_BUDGET).unwrap().iter().map(|c| c.count).collect();
    assert_eq!(counts, [2, 4, 8, 15, 26, 47, 84, 144]);
    assert_eq!(max_consecutive_ones(&p, 100).unwrap(), 3);
}

#[test]
fn endpoints_and_hypotheses() {
    let p = FiberPair::reference();
    assert_eq!(forward_endpoint(&p, &w("1")).unwrap().a, 0.4);
    assert!(matches!(forward_endpoint(&p, &w("1111")), Err(Error::EmptyInterval { .. })));
    let r = check_hypotheses(&p, 1000).unwrap();
    assert!(r.h1_ok && r.h2_ok && r.h2plus_ok);
    assert!((r.modulus_estimate - 2.0).abs() < 1e-12);
}

#[test]
fn twin_orbit_of_1000() {
    let p = FiberPair::reference();
    let (plus, minus) = match fixed_points(&p, &w("1000")).unwrap() {
        FixedPointResult::Pair { plus, minus } => (plus, minus),
        other => panic!("{other:?}"),
    };
    // independent check: both points are fixed by the word map
    for o in [&plus, &minus] {
        assert!((p.eval_word(&w("1000"), o.point).unwrap() - o.point).abs() < 1e-10);
    }
    assert!(plus.multiplier > 1.0 && minus.multiplier < 1.0);
    let mu_plus = OrbitMeasure::from_orbit(&p, &plus).unwrap();
    let mu_minus = OrbitMeasure::from_orbit(&p, &minus).unwrap();
    let (formula, oracle) = wasserstein_periodic(&mu_plus, &mu_minus).unwrap();
    assert!((formula - oracle).abs() < 1e-12);
    assert!((wasserstein_orbits(&mu_plus, &mu_minus) - oracle).abs() < 1e-12);
}

#[test]
fn orbit_sft_has_zero_entropy() {
    let s = SftDescription::periodic_orbit(&w("10000")).unwrap();
    assert!(sft_entropy(&s).abs() < 1e-9);
    assert!((sft_entropy(&SftDescription::full_shift()) - 2f64.ln()).abs() < 1e-9);
}
