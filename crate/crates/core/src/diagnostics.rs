//! Stochastic-approximation form of the white proportion,
//! `Z_{n+1} - Z_n = gamma_{n+1} (f(Z_n) + dM_{n+1})`, and empirical
//! counterparts of the step-size, noise, drift and bias conditions.

use std::fmt::Write as _;

use num_traits::Float;
use serde::Serialize;

use crate::asymptotics::{drift, printed_drift};
use crate::urn::{ModelKind, Trajectory, UrnModel, UrnState};
use crate::{Error, ModelMoments, Result, Scalar};

/// Which martingale increment to use.
///
/// `Printed` reproduces two misprinted increments: the single-law opposite
/// regime's `x (m - xi - m Z) - mu m (1 - Z)` and the two-law opposite regime's
/// `xi (Z (x - y) - x) + m x` paired with its printed drift. Neither has zero
/// conditional mean. The self-reinforcing regimes are unaffected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum IncrementForm {
    #[default]
    Exact,
    Printed,
}

/// `D_{n+1} = T_{n+1} (Z_{n+1} - Z_n)` as a function of the draw.
pub fn increment_numerator<S: Scalar>(
    kind: ModelKind,
    z: &S,
    xi: u64,
    x: u64,
    y: Option<u64>,
    m: u64,
) -> S {
    let one = S::one();
    let xi = S::from_count(xi as u128);
    let x = S::from_count(x as u128);
    let y = S::from_count(y.unwrap_or(0) as u128);
    let m = S::from_count(m as u128);
    let z = z.clone();
    match kind {
        ModelKind::XOpp => x * (m.clone() - xi - m * z),
        ModelKind::XSelf => x.clone() * xi - z * m * x,
        ModelKind::XYOpp => xi * (z.clone() * (x.clone() - y) - x.clone()) + m * x * (one - z),
        ModelKind::XYSelf => xi * (z.clone() * (y.clone() - x.clone()) + x) - m * z * y,
    }
}

/// Drift paired with `form`.
pub fn drift_for<S: Scalar>(kind: ModelKind, form: IncrementForm, z: &S, mm: &ModelMoments) -> S {
    match form {
        IncrementForm::Exact => drift(kind, z, mm),
        IncrementForm::Printed => printed_drift(kind, z, mm),
    }
}

/// `dM_{n+1}` for the draw `(xi, x, y)` taken at proportion `z`.
pub fn martingale_increment<S: Scalar>(
    kind: ModelKind,
    form: IncrementForm,
    z: &S,
    xi: u64,
    x: u64,
    y: Option<u64>,
    mm: &ModelMoments,
) -> S {
    match (form, kind) {
        (IncrementForm::Printed, ModelKind::XOpp) => {
            let m = S::from_count(mm.m as u128);
            let mu = S::from_rational(&mm.mu_x);
            increment_numerator(kind, z, xi, x, y, mm.m) - mu * m * (S::one() - z.clone())
        }
        (IncrementForm::Printed, ModelKind::XYOpp) => {
            let m = S::from_count(mm.m as u128);
            let printed = increment_numerator(kind, z, xi, x, y, mm.m)
                + m * S::from_count(x as u128) * z.clone();
            printed - printed_drift(kind, z, mm)
        }
        _ => increment_numerator(kind, z, xi, x, y, mm.m) - drift(kind, z, mm),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaStep {
    /// Index of the new state, `n + 1`.
    pub n: u64,
    /// `1 / T_{n+1}`
    pub gamma: f64,
    /// `f(Z_n)`
    pub drift_val: f64,
    pub delta_m: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaDecomposition {
    pub steps: Vec<SaStep>,
}

impl SaDecomposition {
    pub fn max_abs_residual(&self) -> f64 {
        self.steps
            .iter()
            .fold(0.0, |acc, s| acc.max(s.residual.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,gamma,f,dm,residual\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.n, s.gamma, s.drift_val, s.delta_m, s.residual
            );
        }
        out
    }
}

/// Splits every recorded step into step size, drift and martingale noise.
pub fn decompose(
    traj: &Trajectory,
    mm: &ModelMoments,
    form: IncrementForm,
) -> Result<SaDecomposition> {
    if !traj.is_full() {
        return Err(Error::ThinTrajectory);
    }
    let kind = traj.model;
    let steps = traj
        .records
        .iter()
        .map(|r| {
            let after = r.after();
            let z0 = r.before.z();
            let z1 = after.z();
            let gamma = 1.0 / after.total() as f64;
            let f = drift_for(kind, form, &z0, mm);
            let dm = martingale_increment(kind, form, &z0, r.xi, r.x, r.y, mm);
            SaStep {
                n: after.step,
                gamma,
                drift_val: f,
                delta_m: dm,
                residual: (z1 - z0) - gamma * (f + dm),
            }
        })
        .collect();
    Ok(SaDecomposition { steps })
}

/// Exact `(E[dM | state], E[dM^2 | state])` by enumerating the draw and the additions.
pub fn conditional_moments<S: Scalar>(
    state: &UrnState,
    model: &UrnModel,
    form: IncrementForm,
) -> Result<(S, S)> {
    let mm = ModelMoments::of(model);
    conditional_moments_with(state, model, &mm, form)
}

fn conditional_moments_with<S: Scalar>(
    state: &UrnState,
    model: &UrnModel,
    mm: &ModelMoments,
    form: IncrementForm,
) -> Result<(S, S)> {
    let z: S = state.proportion();
    let mut mean = S::zero();
    let mut second = S::zero();
    for t in model.transitions::<S>(state)? {
        let dm = martingale_increment(model.kind(), form, &z, t.xi, t.x, t.y, mm);
        mean = mean + t.prob.clone() * dm.clone();
        second = second + t.prob * dm.clone() * dm;
    }
    Ok((mean, second))
}

/// Empirical constants for the step-size, noise, drift and bias conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenlundReport {
    pub steps: u64,
    /// min / max of `n gamma_n` with `gamma_n = 1 / T_n`.
    pub c_l_hat: f64,
    pub c_u_hat: f64,
    /// Same with the pre-addition indexing `gamma_{n+1} = 1 / T_n`.
    pub c_l_hat_pre: f64,
    pub c_u_hat_pre: f64,
    /// max `E[dM^2 | F_n]` along the path.
    pub k_u_hat: f64,
    /// max `|f(Z_n)|`.
    pub k_f_hat: f64,
    /// max `gamma_n |E[dM_{n+1} | F_n]|`.
    pub k_e_hat: f64,
    /// max `|E[gamma_{n+1} dM_{n+1} | F_n]| / gamma_n^2`, with the random
    /// post-addition step size inside the expectation.
    pub k_e_ratio_hat: f64,
}

pub fn renlund_conditions(
    traj: &Trajectory,
    model: &UrnModel,
    form: IncrementForm,
) -> Result<RenlundReport> {
    if !traj.is_full() {
        return Err(Error::ThinTrajectory);
    }
    if traj.model != model.kind() || traj.m != model.m() {
        return Err(Error::InvalidConfig(
            "trajectory was produced by a different model".into(),
        ));
    }
    let mm = ModelMoments::of(model);
    let kind = model.kind();
    let mut rep = RenlundReport {
        steps: traj.records.len() as u64,
        c_l_hat: f64::INFINITY,
        c_u_hat: 0.0,
        c_l_hat_pre: f64::INFINITY,
        c_u_hat_pre: 0.0,
        k_u_hat: 0.0,
        k_f_hat: 0.0,
        k_e_hat: 0.0,
        k_e_ratio_hat: 0.0,
    };
    for r in &traj.records {
        let before = r.before;
        let after = r.after();
        let n = after.step as f64;
        let t0 = before.total() as f64;
        let post = n / after.total() as f64;
        let pre = n / t0;
        rep.c_l_hat = rep.c_l_hat.min(post);
        rep.c_u_hat = rep.c_u_hat.max(post);
        rep.c_l_hat_pre = rep.c_l_hat_pre.min(pre);
        rep.c_u_hat_pre = rep.c_u_hat_pre.max(pre);

        let z = before.z();
        rep.k_f_hat = rep.k_f_hat.max(Float::abs(drift_for(kind, form, &z, &mm)));
        let (mean, second) = conditional_moments_with::<f64>(&before, model, &mm, form)?;
        rep.k_u_hat = rep.k_u_hat.max(second);
        rep.k_e_hat = rep.k_e_hat.max(Float::abs(mean) / t0);
        let weighted: f64 = model
            .transitions::<f64>(&before)?
            .iter()
            .map(|t| {
                let dm = martingale_increment(kind, form, &z, t.xi, t.x, t.y, &mm);
                t.prob * dm / (before.total() + t.w_added + t.b_added) as f64
            })
            .sum();
        rep.k_e_ratio_hat = rep.k_e_ratio_hat.max(Float::abs(weighted) * t0 * t0);
    }
    if traj.records.is_empty() {
        rep.c_l_hat = 0.0;
        rep.c_l_hat_pre = 0.0;
    }
    Ok(rep)
}

/// `prod_{k=0}^{n-1} T_k / (T_k + rate)` for `n = 0..=horizon`.
///
/// With `rate = m mu` of the colour's own law, the product times that
/// colour's count is a martingale in the self-reinforcing regimes.
pub fn martingale_scale_factors(traj: &Trajectory, rate: f64) -> Result<Vec<f64>> {
    if !traj.is_full() {
        return Err(Error::ThinTrajectory);
    }
    let mut out = Vec::with_capacity(traj.records.len() + 1);
    let mut acc = 1.0;
    out.push(acc);
    for r in &traj.records {
        let t = r.before.total() as f64;
        acc *= t / (t + rate);
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DiscreteDist;
    use crate::urn::Recording;
    use crate::Rational;
    use approx::assert_abs_diff_eq;

    fn point(v: u64) -> DiscreteDist {
        DiscreteDist::point_mass(v).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn models() -> Vec<UrnModel> {
        let x = DiscreteDist::uniform(&[1, 3]).unwrap();
        let y = DiscreteDist::uniform(&[2, 5]).unwrap();
        ModelKind::ALL
            .into_iter()
            .map(|k| UrnModel::new(k, 2, x.clone(), k.uses_y().then(|| y.clone())).unwrap())
            .collect()
    }

    #[test]
    fn residual_is_rounding_only() {
        for model in models() {
            let mm = ModelMoments::of(&model);
            let t = model
                .run(UrnState::new(3, 2), 10_000, 17, Recording::Full)
                .unwrap();
            let d = decompose(&t, &mm, IncrementForm::Exact).unwrap();
            assert_eq!(d.steps.len(), 10_000);
            assert!(
                d.max_abs_residual() < 1e-12,
                "{}: {}",
                model.kind(),
                d.max_abs_residual()
            );
        }
    }

    #[test]
    fn printed_increments_break_the_identity() {
        for model in models().into_iter().filter(|m| m.kind().is_opposite()) {
            let mm = ModelMoments::of(&model);
            let t = model
                .run(UrnState::new(3, 2), 200, 17, Recording::Full)
                .unwrap();
            let d = decompose(&t, &mm, IncrementForm::Printed).unwrap();
            assert!(d.max_abs_residual() > 1e-6, "{}", model.kind());
        }
    }

    #[test]
    fn xself_has_no_drift() {
        let model = &models()[1];
        let t = model
            .run(UrnState::new(1, 1), 100, 3, Recording::Full)
            .unwrap();
        let d = decompose(&t, &ModelMoments::of(model), IncrementForm::Exact).unwrap();
        assert!(d.steps.iter().all(|s| s.drift_val == 0.0));
    }

    #[test]
    fn xopp_unit_increment_values() {
        let model = UrnModel::new(ModelKind::XOpp, 1, point(1), None).unwrap();
        let mm = ModelMoments::of(&model);
        let half = q(1, 2);
        let dm0: Rational = martingale_increment(
            ModelKind::XOpp,
            IncrementForm::Exact,
            &half,
            0,
            1,
            None,
            &mm,
        );
        let dm1: Rational = martingale_increment(
            ModelKind::XOpp,
            IncrementForm::Exact,
            &half,
            1,
            1,
            None,
            &mm,
        );
        assert_eq!((dm0, dm1), (q(1, 2), q(-1, 2)));
    }

    #[test]
    fn thin_trajectory_rejected() {
        let model = &models()[0];
        let t = model
            .run(UrnState::new(1, 1), 10, 3, Recording::Checkpoints(vec![10]))
            .unwrap();
        assert_eq!(
            decompose(&t, &ModelMoments::of(model), IncrementForm::Exact),
            Err(Error::ThinTrajectory)
        );
    }

    #[test]
    fn conditional_moment_examples() {
        let model = UrnModel::new(ModelKind::XOpp, 1, point(1), None).unwrap();
        let (mean, second) =
            conditional_moments::<Rational>(&UrnState::new(1, 1), &model, IncrementForm::Exact)
                .unwrap();
        assert_eq!((mean, second), (q(0, 1), q(1, 4)));
        let (mean, second) =
            conditional_moments::<Rational>(&UrnState::new(2, 2), &model, IncrementForm::Exact)
                .unwrap();
        assert_eq!((mean, second), (q(0, 1), q(1, 4)));
    }

    #[test]
    fn conditional_mean_is_exactly_zero() {
        for model in models() {
            for (w, b) in [(2, 2), (5, 1), (1, 7), (13, 4)] {
                let (mean, _) = conditional_moments::<Rational>(
                    &UrnState::new(w, b),
                    &model,
                    IncrementForm::Exact,
                )
                .unwrap();
                assert_eq!(mean, q(0, 1), "{} at ({w},{b})", model.kind());
            }
        }
    }

    #[test]
    fn renlund_unit_xopp() {
        let model = UrnModel::new(ModelKind::XOpp, 1, point(1), None).unwrap();
        let t = model
            .run(UrnState::new(1, 1), 5_000, 8, Recording::Full)
            .unwrap();
        let rep = renlund_conditions(&t, &model, IncrementForm::Exact).unwrap();
        // T_n = 2 + n, so n / T_n increases to 1 from below
        assert_abs_diff_eq!(rep.c_l_hat, 1.0 / 3.0, epsilon = 1e-15);
        assert!(rep.c_u_hat < 1.0 && rep.c_u_hat > 0.999);
        assert!(rep.c_l_hat <= rep.c_u_hat);
        assert!(rep.k_f_hat <= 3.0);
        assert!(rep.k_e_hat < 1e-15);
        // T_{n+1} is deterministic here, so only roundoff remains
        assert!(rep.k_e_ratio_hat < 1e-9);
        assert!(rep.k_u_hat <= 0.25 + 1e-12);
    }

    #[test]
    fn renlund_bounds_are_finite_for_every_model() {
        for model in models() {
            let t = model
                .run(UrnState::new(2, 3), 2_000, 5, Recording::Full)
                .unwrap();
            let rep = renlund_conditions(&t, &model, IncrementForm::Exact).unwrap();
            let mm = ModelMoments::of(&model);
            for v in [
                rep.c_l_hat,
                rep.c_u_hat,
                rep.k_u_hat,
                rep.k_f_hat,
                rep.k_e_hat,
                rep.k_e_ratio_hat,
            ] {
                assert!(v.is_finite() && v >= 0.0);
            }
            assert!(rep.k_e_hat < 1e-12);
            if model.kind() == ModelKind::XOpp {
                let mu: f64 = Scalar::from_rational(&mm.mu_x);
                assert!(rep.k_f_hat <= 3.0 * 2.0 * mu);
            }
        }
    }

    #[test]
    fn scale_factor_examples() {
        let model = UrnModel::new(ModelKind::XSelf, 1, point(1), None).unwrap();
        let t = model
            .run(UrnState::new(1, 1), 3, 0, Recording::Full)
            .unwrap();
        let f = martingale_scale_factors(&t, 1.0).unwrap();
        assert_eq!(f[0], 1.0);
        assert_abs_diff_eq!(f[1], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f[3], 0.4, epsilon = 1e-15);
    }
}
