//! Replicated Monte Carlo experiments.
//!
//! Replica `i` runs on stream `i` of the master seed, and every aggregate is a
//! fold in replica-index order after all workers finish, so a report depends
//! only on its configuration.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{AsymptoticProfile, ModelMoments, StableZero};
use crate::stats::{self, VarianceEstimate};
use crate::urn::{Count, ModelKind, Recording, UrnModel, UrnState};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: UrnModel,
    pub w0: Count,
    pub b0: Count,
    pub horizon: u64,
    /// Strictly increasing, within `[1, horizon]`.
    pub checkpoints: Vec<u64>,
    pub replicas: u64,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas < 2 {
            return Err(Error::InvalidConfig(format!(
                "replicas must be at least 2, got {}",
                self.replicas
            )));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        if let Some(&c) = self
            .checkpoints
            .iter()
            .find(|&&c| c == 0 || c > self.horizon)
        {
            return Err(Error::InvalidConfig(format!(
                "checkpoint {c} is outside [1, {}]",
                self.horizon
            )));
        }
        self.model.check_state(&UrnState::new(self.w0, self.b0))
    }

    /// Steps at which states are kept: 0, the checkpoints and the horizon.
    pub fn recorded_steps(&self) -> Vec<u64> {
        let mut steps = vec![0];
        steps.extend(&self.checkpoints);
        steps.push(self.horizon);
        steps.sort_unstable();
        steps.dedup();
        steps
    }
}

/// Checkpoint states of every replica, indexed `[replica][checkpoint]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub steps: Vec<u64>,
    pub states: Vec<Vec<UrnState>>,
}

impl Ensemble {
    pub fn column(&self, k: usize) -> impl Iterator<Item = &UrnState> + '_ {
        self.states.iter().map(move |r| &r[k])
    }

    pub fn position(&self, n: u64) -> Option<usize> {
        self.steps.binary_search(&n).ok()
    }

    pub fn z_at(&self, k: usize) -> Vec<f64> {
        self.column(k).map(UrnState::z).collect()
    }
}

/// Runs every replica; `workers = None` uses all available cores.
pub fn simulate(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Ensemble> {
    cfg.validate()?;
    let steps = cfg.recorded_steps();
    let initial = UrnState::new(cfg.w0, cfg.b0);
    let run = || -> Vec<Result<Vec<UrnState>>> {
        (0..cfg.replicas)
            .into_par_iter()
            .map(|i| {
                cfg.model
                    .run_stream(
                        initial,
                        cfg.horizon,
                        cfg.master_seed,
                        i,
                        Recording::Checkpoints(steps.clone()),
                    )
                    .map(|t| t.checkpoints)
                    .map_err(|e| Error::Replica {
                        index: i,
                        source: Box::new(e),
                    })
            })
            .collect()
    };
    let results = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    let states = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { steps, states })
}

/// Median over replicas of `|Z_{2n} - Z_n|`.
pub fn as_limit_check(z_n: &[f64], z_2n: &[f64]) -> f64 {
    let d: Vec<f64> = z_n.iter().zip(z_2n).map(|(a, b)| (b - a).abs()).collect();
    stats::median(&d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub target: f64,
    pub window_lo: u64,
    pub window_hi: u64,
    pub points: usize,
}

/// Mean per-replica log-log slope of the minority colour over `[horizon/100, horizon]`.
pub fn estimate_growth_exponent(cfg: &ExperimentConfig, ens: &Ensemble) -> Result<GrowthEstimate> {
    let mm = ModelMoments::of(&cfg.model);
    if cfg.model.kind() != ModelKind::XYSelf {
        return Err(Error::UnsupportedStatistic {
            model: cfg.model.kind(),
            statistic: "growth exponent",
        });
    }
    let target = crate::asymptotics::growth_exponent::<f64>(&mm)?;
    let blue_minority = mm.mu_y.as_ref().is_some_and(|mu_y| mm.mu_x > *mu_y);
    let lo = (cfg.horizon / 100).max(1);
    let window: Vec<usize> = (0..ens.steps.len())
        .filter(|&k| ens.steps[k] >= lo && ens.steps[k] <= cfg.horizon)
        .collect();
    if window.len() < 3 {
        return Err(Error::TooFewSamples {
            got: window.len(),
            need: 3,
        });
    }
    let ns: Vec<f64> = window.iter().map(|&k| ens.steps[k] as f64).collect();
    let slopes = ens
        .states
        .iter()
        .map(|r| {
            let counts: Vec<f64> = window
                .iter()
                .map(|&k| if blue_minority { r[k].blue } else { r[k].white } as f64)
                .collect();
            stats::log_log_slope(&ns, &counts)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GrowthEstimate {
        slope: stats::mean(&slopes),
        stderr: (stats::sample_variance(&slopes) / slopes.len() as f64).sqrt(),
        target,
        window_lo: lo,
        window_hi: cfg.horizon,
        points: window.len(),
    })
}

/// Empirical variance of a CLT statistic next to its limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltSummary {
    pub statistic: &'static str,
    pub centering: &'static str,
    pub var: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub theory: Option<f64>,
    /// The value as printed, where it differs from `theory`.
    pub theory_printed: Option<f64>,
    /// KS distance of the statistic against `N(0, theory)`.
    pub ks_normal: Option<f64>,
}

impl CltSummary {
    fn build(
        statistic: &'static str,
        centering: &'static str,
        samples: &[f64],
        theory: Option<f64>,
        theory_printed: Option<f64>,
    ) -> Option<Self> {
        let VarianceEstimate { var, ci_lo, ci_hi } = stats::estimate_clt_variance(samples).ok()?;
        let ks_normal = theory
            .filter(|v| *v > 0.0)
            .map(|v| stats::ks_distance(samples, stats::normal_cdf(v)));
        Some(Self {
            statistic,
            centering,
            var,
            ci_lo,
            ci_hi,
            theory,
            theory_printed,
            ks_normal,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointSummary {
    pub n: u64,
    pub mean_z: f64,
    pub var_z: f64,
    pub mean_t_over_n: Option<f64>,
    pub mean_w_over_n: Option<f64>,
    pub var_w_over_n: Option<f64>,
    /// Median of `|Z_n - z*|` when the limit is a point.
    pub median_dist_to_limit: Option<f64>,
    /// `(W_n - z* T_n) / sqrt(n)`.
    pub clt: Option<CltSummary>,
    /// `(W_n - mean W_n) / sqrt(n)`, single-law opposite regime only.
    pub clt_centered: Option<CltSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsLimitSummary {
    pub n: u64,
    pub median_abs_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub model: ModelKind,
    pub m: u64,
    pub x: crate::DiscreteDist,
    pub y: Option<crate::DiscreteDist>,
    pub w0: Count,
    pub b0: Count,
    pub horizon: u64,
    pub replicas: u64,
    pub master_seed: u64,
    pub checkpoints: Vec<CheckpointSummary>,
    /// One entry per recorded pair `(n, 2n)`.
    pub as_limit: Vec<AsLimitSummary>,
    pub growth: Option<GrowthEstimate>,
    pub theory: AsymptoticProfile<f64>,
    pub notes: Vec<&'static str>,
}

impl ExperimentReport {
    pub fn summarize(cfg: &ExperimentConfig, ens: &Ensemble) -> Self {
        let mm = ModelMoments::of(&cfg.model);
        let theory = AsymptoticProfile::<f64>::evaluate(cfg.model.kind(), &mm);
        let z_star = theory.stable_zero.point();
        let checkpoints = (0..ens.steps.len())
            .map(|k| checkpoint_summary(cfg, ens, k, &theory, z_star))
            .collect();
        let as_limit = ens
            .steps
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .filter_map(|(k, &n)| {
                let k2 = ens.position(2 * n)?;
                Some(AsLimitSummary {
                    n,
                    median_abs_change: as_limit_check(&ens.z_at(k), &ens.z_at(k2)),
                })
            })
            .collect();
        let growth = match theory.stable_zero {
            StableZero::Point(_) if cfg.model.kind() == ModelKind::XYSelf => {
                estimate_growth_exponent(cfg, ens).ok()
            }
            _ => None,
        };
        Self {
            model: cfg.model.kind(),
            m: cfg.model.m(),
            x: cfg.model.x().clone(),
            y: cfg.model.y().cloned(),
            w0: cfg.w0,
            b0: cfg.b0,
            horizon: cfg.horizon,
            replicas: cfg.replicas,
            master_seed: cfg.master_seed,
            checkpoints,
            as_limit,
            growth,
            theory,
            notes: vec![
                "clt is centered at the theoretical stable zero",
                "clt_centered is centered at the cross-replica mean of W_n",
                "variances are unbiased with chi-square 95% intervals",
            ],
        }
    }

    pub fn checkpoint(&self, n: u64) -> Option<&CheckpointSummary> {
        self.checkpoints.iter().find(|c| c.n == n)
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// `n,mean_Z,var_Z,clt_var,clt_ci_lo,clt_ci_hi,ks`; the CLT columns follow
    /// `clt`, falling back to `clt_centered`, and are empty when neither applies.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("n,mean_Z,var_Z,clt_var,clt_ci_lo,clt_ci_hi,ks\n");
        for c in &self.checkpoints {
            let clt = c.clt.as_ref().or(c.clt_centered.as_ref());
            let (v, lo, hi, ks) = match clt {
                Some(s) => (
                    s.var.to_string(),
                    s.ci_lo.to_string(),
                    s.ci_hi.to_string(),
                    s.ks_normal.map(|k| k.to_string()).unwrap_or_default(),
                ),
                None => Default::default(),
            };
            let _ = writeln!(out, "{},{},{},{v},{lo},{hi},{ks}", c.n, c.mean_z, c.var_z);
        }
        out
    }
}

fn checkpoint_summary(
    cfg: &ExperimentConfig,
    ens: &Ensemble,
    k: usize,
    theory: &AsymptoticProfile<f64>,
    z_star: Option<f64>,
) -> CheckpointSummary {
    let n = ens.steps[k];
    let zs = ens.z_at(k);
    let ws: Vec<f64> = ens.column(k).map(|s| s.white as f64).collect();
    let ts: Vec<f64> = ens.column(k).map(|s| s.total() as f64).collect();
    let per_n = |v: f64| (n > 0).then(|| v / n as f64);
    let root_n = (n as f64).sqrt();

    let clt = match z_star {
        Some(z) if n > 0 => {
            let samples: Vec<f64> = ws
                .iter()
                .zip(&ts)
                .map(|(w, t)| (w - z * t) / root_n)
                .collect();
            CltSummary::build(
                "(W_n - z* T_n) / sqrt(n)",
                "theoretical z*",
                &samples,
                theory.clt_var_scaled,
                theory.paper_g_over_3,
            )
        }
        _ => None,
    };
    let clt_centered = if cfg.model.kind() == ModelKind::XOpp && n > 0 {
        let mw = stats::mean(&ws);
        let samples: Vec<f64> = ws.iter().map(|w| (w - mw) / root_n).collect();
        CltSummary::build(
            "(W_n - mean W_n) / sqrt(n)",
            "cross-replica mean",
            &samples,
            theory.clt_var_centered_corrected,
            theory.clt_var_centered,
        )
    } else {
        None
    };

    CheckpointSummary {
        n,
        mean_z: stats::mean(&zs),
        var_z: stats::sample_variance(&zs),
        mean_t_over_n: per_n(stats::mean(&ts)),
        mean_w_over_n: per_n(stats::mean(&ws)),
        var_w_over_n: per_n(stats::sample_variance(&ws)),
        median_dist_to_limit: z_star.map(|z| {
            let d: Vec<f64> = zs.iter().map(|v| (v - z).abs()).collect();
            stats::median(&d)
        }),
        clt,
        clt_centered,
    }
}

/// Simulates and summarizes.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentReport> {
    let ens = simulate(cfg, workers)?;
    Ok(ExperimentReport::summarize(cfg, &ens))
}
