//! The acceptance suite: every criterion returns a [`Verdict`] holding the
//! measured values, their targets and tolerances.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::asymptotics::{noise_var_limit, AsymptoticProfile, ModelMoments, StableZero};
use crate::diagnostics::{conditional_moments, decompose, IncrementForm};
use crate::harness::{
    self, as_limit_check, estimate_growth_exponent, ExperimentConfig, ExperimentReport,
};
use crate::oracle::{check_martingale, exact_distribution, DEFAULT_BUDGET};
use crate::stats;
use crate::urn::{Count, ModelKind, Recording, UrnModel, UrnState};
use crate::{DiscreteDist, Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// `|measured - target| < tol`
    Abs(f64),
    /// `|measured - target| <= tol |target|`
    Rel(f64),
    /// `measured < target`
    Below,
    /// `lo <= target <= hi`
    Covers { lo: f64, hi: f64 },
    /// Exact equality, checked in rational arithmetic.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl Check {
    pub fn abs(label: &str, measured: f64, target: f64, tol: f64) -> Self {
        Self::make(
            label,
            measured,
            target,
            Tolerance::Abs(tol),
            (measured - target).abs() < tol,
        )
    }

    pub fn rel(label: &str, measured: f64, target: f64, tol: f64) -> Self {
        let pass = (measured - target).abs() <= tol * target.abs();
        Self::make(label, measured, target, Tolerance::Rel(tol), pass)
    }

    pub fn below(label: &str, measured: f64, bound: f64) -> Self {
        Self::make(label, measured, bound, Tolerance::Below, measured < bound)
    }

    pub fn covers(label: &str, lo: f64, hi: f64, target: f64) -> Self {
        Self::make(
            label,
            0.5 * (lo + hi),
            target,
            Tolerance::Covers { lo, hi },
            lo <= target && target <= hi,
        )
    }

    pub fn exact_zero(label: &str, measured: &Rational) -> Self {
        let m = measured.to_f64().unwrap_or(f64::NAN);
        Self::make(label, m, 0.0, Tolerance::Exact, measured.is_zero())
    }

    fn make(label: &str, measured: f64, target: f64, tolerance: Tolerance, pass: bool) -> Self {
        Self {
            label: label.to_string(),
            measured,
            target,
            tolerance,
            pass: pass && measured.is_finite(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tol = match self.tolerance {
            Tolerance::Abs(t) => format!("within {t:e}"),
            Tolerance::Rel(t) => format!("within {}%", t * 100.0),
            Tolerance::Below => "below target".to_string(),
            Tolerance::Covers { lo, hi } => format!("interval [{lo:.6}, {hi:.6}] covers target"),
            Tolerance::Exact => "exactly".to_string(),
        };
        write!(
            f,
            "{} {}: measured {:.6e}, target {:.6e}, {tol}",
            if self.pass { "ok  " } else { "FAIL" },
            self.label,
            self.measured,
            self.target
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub id: u32,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    pub checks: Vec<Check>,
    /// Reported values that are not gated.
    pub info: BTreeMap<String, f64>,
    pub error: Option<String>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// One summary line.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} ({}): {}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.tags.join(","),
            self.name
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.line())?;
        if let Some(e) = &self.error {
            writeln!(f, "    error: {e}")?;
        }
        for c in &self.checks {
            writeln!(f, "    {c}")?;
        }
        for (k, v) in &self.info {
            writeln!(f, "    info {k}: {v:.6e}")?;
        }
        Ok(())
    }
}

/// Shared settings plus the cached single-law opposite experiment used by
/// several criteria.
#[derive(Debug, Default)]
pub struct SuiteContext {
    pub form: IncrementForm,
    pub workers: Option<usize>,
    xopp: OnceLock<std::result::Result<ExperimentReport, Error>>,
}

impl SuiteContext {
    pub fn new(form: IncrementForm, workers: Option<usize>) -> Self {
        Self {
            form,
            workers,
            xopp: OnceLock::new(),
        }
    }

    fn xopp_report(&self) -> Result<&ExperimentReport> {
        self.xopp
            .get_or_init(|| harness::run_experiment(&xopp_config(), self.workers))
            .as_ref()
            .map_err(Clone::clone)
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    run: fn(&SuiteContext, &mut Verdict) -> Result<()>,
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        self.id.to_string() == filter || self.tags.iter().any(|t| t.eq_ignore_ascii_case(filter))
    }

    pub fn evaluate(&self, ctx: &SuiteContext) -> Verdict {
        let mut v = Verdict {
            id: self.id,
            name: self.name,
            tags: self.tags,
            checks: Vec::new(),
            info: BTreeMap::new(),
            error: None,
        };
        if let Err(e) = (self.run)(ctx, &mut v) {
            v.error = Some(e.to_string());
        }
        v
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            name: "exact law matches simulated frequencies",
            tags: &["oracle", "exactness"],
            run: c1_oracle_vs_simulation,
        },
        Criterion {
            id: 2,
            name: "martingale increments have zero conditional mean",
            tags: &["oracle", "martingale"],
            run: c2_martingale,
        },
        Criterion {
            id: 3,
            name: "opposite proportion converges to 1/2",
            tags: &["thm1"],
            run: c3_xopp_limit,
        },
        Criterion {
            id: 4,
            name: "CLT variance of (W_n - T_n/2)/sqrt(n)",
            tags: &["thm1", "clt"],
            run: c4_xopp_clt,
        },
        Criterion {
            id: 5,
            name: "Var(W_n)/n against (m nu + m^2 sigma^2)/12",
            tags: &["thm1", "variance"],
            run: c5_xopp_variance,
        },
        Criterion {
            id: 6,
            name: "two-law opposite limit, total growth and CLT",
            tags: &["thm3", "clt"],
            run: c6_xyopp,
        },
        Criterion {
            id: 7,
            name: "two-law opposite profile reduces to single-law profile",
            tags: &["thm3", "reduction"],
            run: c7_reduction,
        },
        Criterion {
            id: 8,
            name: "self-reinforcing proportion converges to a Beta law",
            tags: &["thm2", "beta"],
            run: c8_xself,
        },
        Criterion {
            id: 9,
            name: "minority colour grows like n^(muY/muX)",
            tags: &["thm4", "growth"],
            run: c9_growth,
        },
        Criterion {
            id: 10,
            name: "equal-mean self-reinforcing proportion is a converging martingale",
            tags: &["thm4", "martingale"],
            run: c10_xyself_equal,
        },
        Criterion {
            id: 11,
            name: "stochastic-approximation decomposition is exact",
            tags: &["sa"],
            run: c11_sa,
        },
        Criterion {
            id: 12,
            name: "experiment reports are reproducible",
            tags: &["determinism"],
            run: c12_determinism,
        },
    ]
}

/// Runs every criterion, or those whose id or tag equals `only`.
pub fn run_suite(ctx: &SuiteContext, only: Option<&str>) -> Vec<Verdict> {
    criteria()
        .iter()
        .filter(|c| only.is_none_or(|f| c.matches(f)))
        .map(|c| c.evaluate(ctx))
        .collect()
}

pub fn criterion(id: u32) -> Criterion {
    criteria()
        .into_iter()
        .find(|c| c.id == id)
        .expect("known criterion")
}

fn law(values: &[u64]) -> DiscreteDist {
    DiscreteDist::uniform(values).expect("catalog law")
}

fn model(kind: ModelKind, m: u64, x: &[u64], y: Option<&[u64]>) -> UrnModel {
    UrnModel::new(kind, m, law(x), y.map(law)).expect("catalog model")
}

fn experiment(
    model: UrnModel,
    w0: Count,
    b0: Count,
    horizon: u64,
    checkpoints: Vec<u64>,
    replicas: u64,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        model,
        w0,
        b0,
        horizon,
        checkpoints,
        replicas,
        master_seed: seed,
    }
}

const N: u64 = 10_000;

pub fn xopp_config() -> ExperimentConfig {
    experiment(
        model(ModelKind::XOpp, 2, &[1, 3], None),
        2,
        2,
        N,
        vec![N],
        5000,
        20_240_301,
    )
}

fn c1_oracle_vs_simulation(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let cfg = experiment(
        model(ModelKind::XOpp, 2, &[1, 3], None),
        2,
        2,
        6,
        vec![6],
        200_000,
        11,
    );
    let exact = exact_distribution(&cfg.model, 2, 2, 6, DEFAULT_BUDGET)?;
    let ens = harness::simulate(&cfg, ctx.workers)?;
    let k = ens.position(6).expect("horizon is recorded");
    let mut freq: BTreeMap<(Count, Count), f64> = BTreeMap::new();
    for s in ens.column(k) {
        *freq.entry((s.white, s.blue)).or_default() += 1.0 / cfg.replicas as f64;
    }
    let mut tv = 0.0;
    for (key, p) in &exact.mass {
        tv += (p.to_f64().unwrap_or(f64::NAN) - freq.get(key).copied().unwrap_or(0.0)).abs();
    }
    tv += freq
        .iter()
        .filter(|(key, _)| !exact.mass.contains_key(key))
        .map(|(_, f)| f)
        .sum::<f64>();
    v.checks
        .push(Check::below("total variation at n=6", 0.5 * tv, 0.01));
    v.info
        .insert("exact support size".into(), exact.len() as f64);
    Ok(())
}

fn c2_martingale(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    for kind in ModelKind::ALL {
        let y = kind.uses_y().then_some(&[3u64][..]);
        let m = model(kind, 2, &[1], y);
        let worst = check_martingale(&m, 2, 2, 3, DEFAULT_BUDGET, ctx.form)?;
        v.checks.push(Check::exact_zero(
            &format!("{kind} max |E[dM | F_n]|"),
            &worst,
        ));
        if ctx.form == IncrementForm::Exact {
            let printed = check_martingale(&m, 2, 2, 3, DEFAULT_BUDGET, IncrementForm::Printed)?;
            v.info.insert(
                format!("{kind} printed-variant defect"),
                printed.to_f64().unwrap_or(f64::NAN),
            );
        }
    }
    Ok(())
}

fn c3_xopp_limit(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let r = ctx.xopp_report()?;
    let c = r.checkpoint(N).expect("horizon is recorded");
    let var_limit = r
        .theory
        .clt_var_proportion
        .ok_or(Error::RandomLimit(r.model))?;
    v.checks.push(Check::abs("mean Z_n", c.mean_z, 0.5, 0.005));
    v.checks
        .push(Check::below("var Z_n", c.var_z, 2.0 * var_limit / N as f64));
    v.info
        .insert("theoretical var Z_n".into(), var_limit / N as f64);
    Ok(())
}

fn c4_xopp_clt(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let r = ctx.xopp_report()?;
    let c = r.checkpoint(N).expect("horizon is recorded");
    let clt = c
        .clt
        .as_ref()
        .ok_or(Error::TooFewSamples { got: 0, need: 30 })?;
    let target = 10.0 / 12.0;
    v.checks.push(Check::rel("variance", clt.var, target, 0.10));
    v.checks
        .push(Check::covers("95% interval", clt.ci_lo, clt.ci_hi, target));
    let samples_ks = clt.ks_normal.unwrap_or(f64::NAN);
    v.checks
        .push(Check::below("KS vs N(0, 10/12)", samples_ks, 0.05));
    v.info.insert(
        "implementation clt_var_scaled".into(),
        r.theory.clt_var_scaled.unwrap_or(f64::NAN),
    );
    Ok(())
}

fn c5_xopp_variance(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let r = ctx.xopp_report()?;
    let c = r.checkpoint(N).expect("horizon is recorded");
    let measured = c.var_w_over_n.unwrap_or(f64::NAN);
    v.checks
        .push(Check::rel("Var(W_n)/n", measured, 7.0 / 6.0, 0.15));
    v.info.insert("m nu/12 + m^2 sigma^2/4".into(), 11.0 / 6.0);
    v.info.insert(
        "relative gap to m nu/12 + m^2 sigma^2/4".into(),
        (measured - 11.0 / 6.0).abs() / (11.0 / 6.0),
    );
    Ok(())
}

fn c6_xyopp(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let m = model(ModelKind::XYOpp, 2, &[1], Some(&[3, 5]));
    let mm = ModelMoments::of(&m);
    let noise: f64 = noise_var_limit(ModelKind::XYOpp, &mm)?;
    // z* = 1/3 is exact at W : B = 1 : 2
    let mut gap: f64 = 0.0;
    for scale in [100_000u128, 1_000_000, 10_000_000] {
        let (_, second) =
            conditional_moments::<f64>(&UrnState::new(scale, 2 * scale), &m, ctx.form)?;
        gap = gap.max((second - noise).abs() / noise);
    }
    v.checks.push(Check::below(
        "noise limit vs plug-in second moment, relative gap",
        gap,
        0.01,
    ));

    let cfg = experiment(m, 2, 2, N, vec![N], 5000, 30_303);
    let r = harness::run_experiment(&cfg, ctx.workers)?;
    let c = r.checkpoint(N).expect("horizon is recorded");
    v.checks
        .push(Check::abs("mean Z_n", c.mean_z, 1.0 / 3.0, 0.01));
    v.checks.push(Check::rel(
        "mean T_n/n",
        c.mean_t_over_n.unwrap_or(f64::NAN),
        4.0,
        0.02,
    ));
    let clt = c
        .clt
        .as_ref()
        .ok_or(Error::TooFewSamples { got: 0, need: 30 })?;
    v.checks.push(Check::rel(
        "variance of (W_n - z T_n)/sqrt(n)",
        clt.var,
        noise / 3.0,
        0.10,
    ));
    v.info.insert(
        "printed G(z)/3".into(),
        r.theory.paper_g_over_3.unwrap_or(f64::NAN),
    );
    v.info.insert("95% interval lo".into(), clt.ci_lo);
    v.info.insert("95% interval hi".into(), clt.ci_hi);
    Ok(())
}

fn shared_fields(p: &AsymptoticProfile<f64>) -> [Option<f64>; 6] {
    let z = match p.stable_zero {
        StableZero::Point(z) => Some(z),
        StableZero::RandomLimit => None,
    };
    [
        z,
        Some(p.total_rate),
        p.gamma_hat,
        p.noise_var,
        p.clt_var_proportion,
        p.clt_var_scaled,
    ]
}

fn c7_reduction(_: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let catalog = [
        DiscreteDist::point_mass(1)?,
        law(&[1, 3]),
        DiscreteDist::new(vec![
            (1, Rational::new(1.into(), 3.into())),
            (4, Rational::new(2.into(), 3.into())),
        ])?,
    ];
    for m in [1, 2] {
        for (i, d) in catalog.iter().enumerate() {
            let single =
                AsymptoticProfile::<f64>::of(&UrnModel::new(ModelKind::XOpp, m, d.clone(), None)?);
            let double = AsymptoticProfile::<f64>::of(&UrnModel::new(
                ModelKind::XYOpp,
                m,
                d.clone(),
                Some(d.clone()),
            )?);
            let mut worst: f64 = 0.0;
            for (a, b) in shared_fields(&single)
                .into_iter()
                .zip(shared_fields(&double))
            {
                worst = worst.max(match (a, b) {
                    (Some(a), Some(b)) => (a - b).abs(),
                    (None, None) => 0.0,
                    _ => f64::INFINITY,
                });
            }
            v.checks.push(Check::below(
                &format!("m={m}, law {} max field difference", i + 1),
                worst,
                1e-12,
            ));
            // independent X and Y add sigma^2 m (m - 1) / 8 to the noise at z = 1/2
            let sigma2 = d.moments().variance.to_f64().unwrap_or(f64::NAN);
            let m = m as f64;
            v.info.insert(
                format!("m={m}, law {} expected noise gap", i + 1),
                sigma2 * m * (m - 1.0) / 8.0,
            );
        }
    }
    Ok(())
}

fn c8_xself(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let cfg = experiment(
        model(ModelKind::XSelf, 1, &[1], None),
        1,
        1,
        5000,
        vec![2000, 4000],
        2000,
        80_808,
    );
    let ens = harness::simulate(&cfg, ctx.workers)?;
    let at = |n| ens.position(n).expect("checkpoint is recorded");
    // Beta(W0/C, B0/C) with C = 1 is uniform
    let ks = stats::ks_distance(&ens.z_at(at(5000)), stats::beta_cdf(1.0, 1.0));
    v.checks
        .push(Check::below("KS of Z_5000 vs Uniform(0,1)", ks, 0.05));
    let med = as_limit_check(&ens.z_at(at(2000)), &ens.z_at(at(4000)));
    v.checks
        .push(Check::below("median |Z_4000 - Z_2000|", med, 0.02));

    let cfg = experiment(
        model(ModelKind::XSelf, 1, &[1, 2], None),
        1,
        1,
        4000,
        vec![2000],
        2000,
        80_809,
    );
    let ens = harness::simulate(&cfg, ctx.workers)?;
    let med = as_limit_check(&ens.z_at(1), &ens.z_at(2));
    v.checks.push(Check::below(
        "random X: median |Z_4000 - Z_2000|",
        med,
        0.03,
    ));
    Ok(())
}

fn c9_growth(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let horizon = 100_000;
    let checkpoints = vec![1000, 2000, 5000, 10_000, 20_000, 50_000, horizon];
    let cfg = experiment(
        model(ModelKind::XYSelf, 1, &[2], Some(&[1])),
        1,
        1,
        horizon,
        checkpoints,
        200,
        90_909,
    );
    let ens = harness::simulate(&cfg, ctx.workers)?;
    let g = estimate_growth_exponent(&cfg, &ens)?;
    v.checks
        .push(Check::abs("mean log-log slope of B_n", g.slope, 0.5, 0.05));
    let r = ExperimentReport::summarize(&cfg, &ens);
    let c = r.checkpoint(horizon).expect("horizon is recorded");
    v.checks.push(Check::rel(
        "mean T_n/n",
        c.mean_t_over_n.unwrap_or(f64::NAN),
        2.0,
        0.02,
    ));
    v.checks.push(Check::rel(
        "mean W_n/n",
        c.mean_w_over_n.unwrap_or(f64::NAN),
        2.0,
        0.02,
    ));
    v.info.insert("slope standard error".into(), g.stderr);
    Ok(())
}

fn c10_xyself_equal(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let (w0, b0) = (10, 10);
    let cfg = experiment(
        model(ModelKind::XYSelf, 1, &[1], Some(&[1])),
        w0,
        b0,
        4000,
        vec![2000],
        2000,
        101_010,
    );
    let ens = harness::simulate(&cfg, ctx.workers)?;
    let med = as_limit_check(&ens.z_at(1), &ens.z_at(2));
    v.checks
        .push(Check::below("median |Z_4000 - Z_2000|", med, 0.02));
    let mean = stats::mean(&ens.z_at(2));
    v.checks.push(Check::abs(
        "mean Z_4000",
        mean,
        w0 as f64 / (w0 + b0) as f64,
        0.01,
    ));
    Ok(())
}

fn c11_sa(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let models = [
        model(ModelKind::XOpp, 2, &[1, 3], None),
        model(ModelKind::XSelf, 2, &[1, 3], None),
        model(ModelKind::XYOpp, 2, &[1], Some(&[3, 5])),
        model(ModelKind::XYSelf, 2, &[1, 3], Some(&[2])),
    ];
    for (i, m) in models.iter().enumerate() {
        let t = m.run(UrnState::new(2, 2), N, 1100 + i as u64, Recording::Full)?;
        let d = decompose(&t, &ModelMoments::of(m), ctx.form)?;
        v.checks.push(Check::below(
            &format!("{} max residual", m.kind()),
            d.max_abs_residual(),
            1e-12,
        ));
    }
    for m in &models[..] {
        if m.kind().is_opposite() {
            let g = crate::asymptotics::gamma_hat::<f64>(m.kind(), &ModelMoments::of(m))?;
            v.checks.push(Check::abs(
                &format!("{} gamma_hat", m.kind()),
                g,
                2.0,
                1e-12,
            ));
        }
    }
    Ok(())
}

fn c12_determinism(ctx: &SuiteContext, v: &mut Verdict) -> Result<()> {
    let first = ctx.xopp_report()?.to_json();
    let second = harness::run_experiment(&xopp_config(), ctx.workers)?.to_json();
    let differing = first
        .bytes()
        .zip(second.bytes())
        .filter(|(a, b)| a != b)
        .count()
        + first.len().abs_diff(second.len());
    v.checks.push(Check::abs(
        "differing report bytes",
        differing as f64,
        0.0,
        0.5,
    ));
    v.info.insert("report bytes".into(), first.len() as f64);
    Ok(())
}
