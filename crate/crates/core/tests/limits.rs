//! Limit objects checked against the exact oracle and against simulation.

use num_traits::{ToPrimitive, Zero};
use urnlab::acceptance::xopp_config;
use urnlab::asymptotics::{mean_centered_variance_corrected, noise_var_at};
use urnlab::diagnostics::conditional_moments;
use urnlab::harness::{run_experiment, simulate, ExperimentConfig};
use urnlab::oracle::{check_martingale, exact_distributions, exact_moments, DEFAULT_BUDGET};
use urnlab::stats::{beta_cdf, ks_distance};
use urnlab::*;

fn law(v: &[u64]) -> DiscreteDist {
    DiscreteDist::uniform(v).unwrap()
}

fn model(kind: ModelKind, m: u64, x: &[u64], y: Option<&[u64]>) -> UrnModel {
    UrnModel::new(kind, m, law(x), y.map(law)).unwrap()
}

#[test]
fn exact_variance_of_white_count_decreases_toward_corrected_limit() {
    let m = model(ModelKind::XOpp, 2, &[1, 3], None);
    let ds = exact_distributions(&m, 2, 2, 14, DEFAULT_BUDGET).unwrap();
    let per_n: Vec<f64> = ds
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, d)| exact_moments(d).var_w.to_f64().unwrap() / n as f64)
        .collect();
    assert!(per_n.windows(2).all(|w| w[1] < w[0]), "{per_n:?}");
    let last = *per_n.last().unwrap();
    let corrected: f64 = mean_centered_variance_corrected(&ModelMoments::of(&m));
    assert!((corrected - 11.0 / 6.0).abs() < 1e-12);
    assert!(last > corrected && last < 1.9, "{last}");
}

#[test]
fn simulated_variance_of_white_count_matches_corrected_limit() {
    let r = run_experiment(&xopp_config(), None).unwrap();
    let c = r.checkpoint(10_000).unwrap();
    let v = c.var_w_over_n.unwrap();
    assert!((v - 11.0 / 6.0).abs() < 0.1 * 11.0 / 6.0, "{v}");
    let centered = c.clt_centered.as_ref().unwrap();
    assert!((centered.theory.unwrap() - 11.0 / 6.0).abs() < 1e-12);
    assert!((centered.theory_printed.unwrap() - 7.0 / 6.0).abs() < 1e-12);
    assert!(centered.ci_lo <= 11.0 / 6.0 && 11.0 / 6.0 <= centered.ci_hi);
}

#[test]
fn two_law_opposite_with_equal_laws_carries_extra_noise() {
    // same law, but X and Y drawn independently: noise exceeds the single-law
    // value by sigma^2 m (m - 1) / 8 = 1/4 here
    let m = model(ModelKind::XYOpp, 2, &[1, 3], Some(&[1, 3]));
    let p = Profile::of(&m);
    assert!((p.clt_var_scaled.unwrap() - 11.0 / 12.0).abs() < 1e-12);
    let cfg = ExperimentConfig {
        model: m,
        w0: 2,
        b0: 2,
        horizon: 5000,
        checkpoints: vec![],
        replicas: 5000,
        master_seed: 77,
    };
    let r = run_experiment(&cfg, None).unwrap();
    let clt = r.checkpoint(5000).unwrap().clt.clone().unwrap();
    assert!((clt.var - 11.0 / 12.0).abs() < 0.1 * 11.0 / 12.0, "{clt:?}");
    assert!(clt.ci_lo > 10.0 / 12.0, "{clt:?}");
}

#[test]
fn noise_formula_matches_plug_in_second_moment() {
    let models = [
        model(ModelKind::XOpp, 3, &[1, 2, 5], None),
        model(ModelKind::XSelf, 2, &[1, 3], None),
        model(ModelKind::XYOpp, 2, &[1, 2], Some(&[3, 5])),
        model(ModelKind::XYSelf, 3, &[2], Some(&[1, 4])),
    ];
    for m in &models {
        let mm = ModelMoments::of(m);
        for (w, b) in [(1u128, 3u128), (1, 1), (2, 1)] {
            let scale = 1_000_000;
            let state = UrnState::new(w * scale, b * scale);
            let (_, second) = conditional_moments::<f64>(&state, m, IncrementForm::Exact).unwrap();
            let expected = noise_var_at(m.kind(), &(w as f64 / (w + b) as f64), &mm);
            assert!(
                (second - expected).abs() <= 1e-5 * expected,
                "{} {w}:{b} {second} {expected}",
                m.kind()
            );
        }
    }
}

#[test]
fn scaled_self_reinforcing_counts_are_martingales() {
    for m in [
        model(ModelKind::XSelf, 2, &[1, 3], None),
        model(ModelKind::XYSelf, 2, &[1, 2], Some(&[3])),
    ] {
        let worst = check_martingale(&m, 2, 1, 4, DEFAULT_BUDGET, IncrementForm::Exact).unwrap();
        assert!(worst.is_zero(), "{}", m.kind());
    }
}

#[test]
fn polya_limit_has_white_count_as_first_beta_parameter() {
    let cfg = ExperimentConfig {
        model: model(ModelKind::XSelf, 1, &[1], None),
        w0: 2,
        b0: 1,
        horizon: 3000,
        checkpoints: vec![],
        replicas: 2000,
        master_seed: 3,
    };
    let ens = simulate(&cfg, None).unwrap();
    let z = ens.z_at(1);
    assert!(ks_distance(&z, beta_cdf(2.0, 1.0)) < 0.05);
    assert!(ks_distance(&z, beta_cdf(1.0, 2.0)) > 0.2);
}

#[test]
fn printed_increments_break_the_martingale_property() {
    for (kind, y) in [
        (ModelKind::XOpp, None),
        (ModelKind::XYOpp, Some(&[3u64][..])),
    ] {
        let m = model(kind, 2, &[1], y);
        let worst = check_martingale(&m, 2, 2, 3, DEFAULT_BUDGET, IncrementForm::Printed).unwrap();
        assert!(!worst.is_zero(), "{kind}");
    }
    for (kind, y) in [
        (ModelKind::XSelf, None),
        (ModelKind::XYSelf, Some(&[3u64][..])),
    ] {
        let m = model(kind, 2, &[1], y);
        let worst = check_martingale(&m, 2, 2, 3, DEFAULT_BUDGET, IncrementForm::Printed).unwrap();
        assert!(worst.is_zero(), "{kind}");
    }
}
