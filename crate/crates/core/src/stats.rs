//! Small sample statistics used by the harness.

use serde::Serialize;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};

use crate::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub var: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl VarianceEstimate {
    pub fn covers(&self, v: f64) -> bool {
        self.ci_lo <= v && v <= self.ci_hi
    }
}

pub const MIN_VARIANCE_SAMPLES: usize = 30;

/// Sample variance with the chi-square 95% interval `(n-1) s^2 / q`.
pub fn estimate_clt_variance(samples: &[f64]) -> Result<VarianceEstimate> {
    if samples.len() < MIN_VARIANCE_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need: MIN_VARIANCE_SAMPLES,
        });
    }
    let var = sample_variance(samples);
    let dof = (samples.len() - 1) as f64;
    let chi = ChiSquared::new(dof).expect("positive degrees of freedom");
    let ss = dof * var;
    Ok(VarianceEstimate {
        var,
        ci_lo: ss / chi.inverse_cdf(0.975),
        ci_hi: ss / chi.inverse_cdf(0.025),
    })
}

/// `sup_x |F_n(x) - F(x)|`, evaluated on both sides of every sample point.
pub fn ks_distance(samples: &[f64], reference_cdf: impl Fn(f64) -> f64) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = reference_cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Ordinary least squares `y = a + b x`; returns `(b, a)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

/// Slope of `log v` against `log n`.
pub fn log_log_slope(ns: &[f64], values: &[f64]) -> Result<f64> {
    if ns.len() < 3 || ns.len() != values.len() {
        return Err(Error::TooFewSamples {
            got: ns.len().min(values.len()),
            need: 3,
        });
    }
    if ns.iter().chain(values).any(|v| *v <= 0.0) {
        return Err(Error::InvalidConfig(
            "log-log regression needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&lx, &ly).0)
}

pub fn normal_cdf(var: f64) -> impl Fn(f64) -> f64 {
    let d = Normal::new(0.0, var.sqrt()).expect("positive variance");
    move |x| d.cdf(x)
}

pub fn beta_cdf(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    let d = Beta::new(a, b).expect("positive shape parameters");
    move |x| d.cdf(x.clamp(0.0, 1.0))
}
