//! Acceptance criteria at their stated tolerances, one test per criterion.
//! Each test prints a single `PASS`/`FAIL` line before asserting. The line
//! goes straight to the stdout handle so the harness does not swallow it for
//! passing tests.

use std::io::Write;

use concave_skew::FiberPair;
use concave_skew::verify::{self, CriterionResult, VerifyConfig};

fn report(r: CriterionResult) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", r.line()).unwrap();
    out.flush().unwrap();
    drop(out);
    assert!(r.passed, "criterion {} failed: {}", r.id, r.detail);
}

fn pair() -> FiberPair {
    FiberPair::reference()
}

#[test]
fn criterion_01_full_entropy_endpoint() {
    report(verify::criterion_1(&VerifyConfig::default()));
}

#[test]
fn criterion_02_trivial_entropy_endpoint() {
    report(verify::criterion_2(&VerifyConfig::default()));
}

#[test]
fn criterion_03_distortion_bounds() {
    report(verify::criterion_3(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_04_exponent_gap() {
    report(verify::criterion_4(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_04_exponent_gap_lower_half() {
    report(verify::criterion_4_lower(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_05_wasserstein_formula() {
    report(verify::criterion_5(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_06_frequency_obstruction() {
    report(verify::criterion_6(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_07_trichotomy_and_spines() {
    report(verify::criterion_7(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_07_trichotomy_only() {
    report(verify::criterion_7_trichotomy(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_08_horseshoe() {
    report(verify::criterion_8(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_09_sft_join() {
    report(verify::criterion_9(&pair(), &VerifyConfig::default()));
}

#[test]
fn criterion_10_parabolic_approximation() {
    report(verify::criterion_10());
}

#[test]
fn criterion_10_parabolic_approximation_monotone() {
    report(verify::criterion_10_monotone());
}

#[test]
fn criterion_11_entropy_jump() {
    report(verify::criterion_11(&VerifyConfig::default()));
}

#[test]
fn criterion_06_frequency_obstruction_steep_pair() {
    report(verify::criterion_6_steep());
}
