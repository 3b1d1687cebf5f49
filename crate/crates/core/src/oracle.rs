//! Exact finite-horizon law of the urn, by pushing rational mass forward
//! over reachable `(W, B)` states.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::diagnostics::{martingale_increment, IncrementForm};
use crate::distributions::ser_rational;
use crate::urn::{Count, ModelKind, UrnModel, UrnState};
use crate::{Error, ModelMoments, Rational, Result};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Law of `(W_n, B_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDist {
    pub horizon: u64,
    pub mass: BTreeMap<(Count, Count), Rational>,
}

impl StateDist {
    pub fn total_mass(&self) -> Rational {
        self.mass.values().sum()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// `W,B,prob_num,prob_den`, states in ascending order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("W,B,prob_num,prob_den\n");
        for ((w, b), p) in &self.mass {
            let _ = writeln!(out, "{w},{b},{},{}", p.numer(), p.denom());
        }
        out
    }
}

fn push_forward(model: &UrnModel, dist: &StateDist, budget: usize) -> Result<StateDist> {
    let mut next: BTreeMap<(Count, Count), Rational> = BTreeMap::new();
    for (&(w, b), p) in &dist.mass {
        let state = UrnState::new(w, b);
        for t in model.transitions::<Rational>(&state)? {
            let key = (
                w.checked_add(t.w_added).ok_or(Error::Overflow)?,
                b.checked_add(t.b_added).ok_or(Error::Overflow)?,
            );
            *next.entry(key).or_insert_with(Rational::zero) += p * &t.prob;
        }
        if next.len() > budget {
            return Err(Error::BudgetExceeded {
                reachable: next.len(),
                budget,
            });
        }
    }
    Ok(StateDist {
        horizon: dist.horizon + 1,
        mass: next,
    })
}

fn start(model: &UrnModel, w0: Count, b0: Count) -> Result<StateDist> {
    model.check_state(&UrnState::new(w0, b0))?;
    Ok(StateDist {
        horizon: 0,
        mass: BTreeMap::from([((w0, b0), Rational::one())]),
    })
}

/// Exact law after `n` steps. Fails rather than truncates once more than
/// `budget` states are reachable.
pub fn exact_distribution(
    model: &UrnModel,
    w0: Count,
    b0: Count,
    n: u64,
    budget: usize,
) -> Result<StateDist> {
    let mut dist = start(model, w0, b0)?;
    for _ in 0..n {
        dist = push_forward(model, &dist, budget)?;
    }
    Ok(dist)
}

/// Laws at every horizon `0..=n`.
pub fn exact_distributions(
    model: &UrnModel,
    w0: Count,
    b0: Count,
    n: u64,
    budget: usize,
) -> Result<Vec<StateDist>> {
    let mut out = vec![start(model, w0, b0)?];
    for _ in 0..n {
        let next = push_forward(model, out.last().expect("nonempty"), budget)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactMoments {
    #[serde(serialize_with = "ser_rational")]
    pub mean_w: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub var_w: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub mean_z: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub var_z: Rational,
}

pub fn exact_moments(sd: &StateDist) -> ExactMoments {
    let mut ew = Rational::zero();
    let mut ew2 = Rational::zero();
    let mut ez = Rational::zero();
    let mut ez2 = Rational::zero();
    for (&(w, b), p) in &sd.mass {
        let wr = Rational::from_integer(w.into());
        let z = Rational::new(w.into(), (w + b).into());
        ew += p * &wr;
        ew2 += p * &wr * &wr;
        ez += p * &z;
        ez2 += p * &z * &z;
    }
    ExactMoments {
        var_w: &ew2 - &ew * &ew,
        var_z: &ez2 - &ez * &ez,
        mean_w: ew,
        mean_z: ez,
    }
}

/// Largest conditional-mean defect over every state reachable in steps `0..n`.
///
/// Checks `E[dM | state] = 0` for the chosen increment form and, for the
/// self-reinforcing regimes, that `prod T_k/(T_k + m mu) * W_n` (and the blue
/// analogue) keeps its conditional mean. The path product is positive and
/// known at time `n`, so the second defect is reported per unit of it:
/// `E[W_{n+1} | state] * T / (T + m mu) - W`.
pub fn check_martingale(
    model: &UrnModel,
    w0: Count,
    b0: Count,
    n: u64,
    budget: usize,
    form: IncrementForm,
) -> Result<Rational> {
    let mm = ModelMoments::of(model);
    let kind = model.kind();
    let m = Rational::from_integer(model.m().into());
    let rate_w = &m * &mm.mu_x;
    let rate_b = &m * mm.mu_y.as_ref().unwrap_or(&mm.mu_x);
    let mut worst = Rational::zero();
    let dists = exact_distributions(model, w0, b0, n.saturating_sub(1), budget)?;
    for dist in dists.iter().take(n as usize) {
        for &(w, b) in dist.mass.keys() {
            let state = UrnState::new(w, b);
            let z: Rational = state.proportion();
            let ts = model.transitions::<Rational>(&state)?;
            let mean_dm: Rational = ts
                .iter()
                .map(|t| &t.prob * martingale_increment(kind, form, &z, t.xi, t.x, t.y, &mm))
                .sum();
            worst = worst.max(mean_dm.abs());
            if matches!(kind, ModelKind::XSelf | ModelKind::XYSelf) {
                let total = Rational::from_integer((w + b).into());
                let ew: Rational = ts
                    .iter()
                    .map(|t| &t.prob * Rational::from_integer((w + t.w_added).into()))
                    .sum();
                let eb: Rational = ts
                    .iter()
                    .map(|t| &t.prob * Rational::from_integer((b + t.b_added).into()))
                    .sum();
                let dw = ew * &total / (&total + &rate_w) - Rational::from_integer(w.into());
                let db = eb * &total / (&total + &rate_b) - Rational::from_integer(b.into());
                worst = worst.max(dw.abs()).max(db.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DiscreteDist;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn point(v: u64) -> DiscreteDist {
        DiscreteDist::point_mass(v).unwrap()
    }

    #[test]
    fn single_polya_step() {
        let model = UrnModel::new(ModelKind::XSelf, 1, point(1), None).unwrap();
        let sd = exact_distribution(&model, 1, 1, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            sd.mass,
            BTreeMap::from([((2, 1), q(1, 2)), ((1, 2), q(1, 2))])
        );
        assert_eq!(sd.to_csv(), "W,B,prob_num,prob_den\n1,2,1,2\n2,1,1,2\n");
    }

    #[test]
    fn horizon_zero_is_a_point_mass() {
        let model = UrnModel::new(ModelKind::XOpp, 2, point(3), None).unwrap();
        let sd = exact_distribution(&model, 4, 5, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(sd.mass, BTreeMap::from([((4, 5), q(1, 1))]));
        assert_eq!(exact_moments(&sd).var_w, q(0, 1));
    }

    #[test]
    fn forced_draw() {
        let model = UrnModel::new(ModelKind::XOpp, 2, point(1), None).unwrap();
        let sd = exact_distribution(&model, 1, 1, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(sd.mass, BTreeMap::from([((2, 2), q(1, 1))]));
    }

    #[test]
    fn classical_polya_mean() {
        let model = UrnModel::new(ModelKind::XSelf, 1, point(1), None).unwrap();
        for n in 0..6u64 {
            let sd = exact_distribution(&model, 1, 1, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(exact_moments(&sd).mean_w, q(n as i64 + 2, 2));
        }
    }

    #[test]
    fn symmetric_opposite_mean() {
        let model = UrnModel::new(ModelKind::XOpp, 1, point(1), None).unwrap();
        let sd = exact_distribution(&model, 1, 1, 2, DEFAULT_BUDGET).unwrap();
        let mo = exact_moments(&sd);
        assert_eq!(mo.mean_w, q(2, 1));
        assert_eq!(mo.mean_z, q(1, 2));
    }

    #[test]
    fn budget_is_enforced() {
        let model = UrnModel::new(
            ModelKind::XYOpp,
            2,
            DiscreteDist::uniform(&[1, 2, 3]).unwrap(),
            Some(DiscreteDist::uniform(&[4, 5, 7]).unwrap()),
        )
        .unwrap();
        let err = exact_distribution(&model, 2, 2, 6, 50).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 50, .. }));
    }

    #[test]
    fn insufficient_initial_balls() {
        let model = UrnModel::new(ModelKind::XOpp, 3, point(1), None).unwrap();
        assert!(matches!(
            exact_distribution(&model, 1, 1, 1, DEFAULT_BUDGET),
            Err(Error::InsufficientBalls { .. })
        ));
    }
}
