//! One test per acceptance criterion; each prints its verdict.

use std::sync::OnceLock;

use urnlab::acceptance::{criterion, SuiteContext};
use urnlab::IncrementForm;

fn ctx() -> &'static SuiteContext {
    static CTX: OnceLock<SuiteContext> = OnceLock::new();
    CTX.get_or_init(|| SuiteContext::new(IncrementForm::Exact, None))
}

fn gate(id: u32) {
    let v = criterion(id).evaluate(ctx());
    println!("{v}");
    assert!(v.pass(), "{}", v.line());
}

#[test]
fn criterion_01_exact_law_matches_simulation() {
    gate(1);
}

#[test]
fn criterion_02_martingale_increments_are_centered() {
    gate(2);
}

#[test]
fn criterion_03_opposite_limit_is_one_half() {
    gate(3);
}

#[test]
fn criterion_04_opposite_clt_variance() {
    gate(4);
}

#[test]
fn criterion_05_opposite_variance_of_white_count() {
    gate(5);
}

#[test]
fn criterion_06_two_law_opposite_limit_and_clt() {
    gate(6);
}

#[test]
fn criterion_07_two_law_profile_reduces_to_single_law() {
    gate(7);
}

#[test]
fn criterion_08_self_reinforcing_beta_limit() {
    gate(8);
}

#[test]
fn criterion_09_minority_growth_exponent() {
    gate(9);
}

#[test]
fn criterion_10_equal_mean_martingale_convergence() {
    gate(10);
}

#[test]
fn criterion_11_sa_decomposition_is_exact() {
    gate(11);
}

#[test]
fn criterion_12_reports_are_reproducible() {
    gate(12);
}
