//! Closed-form limits: drift, stable zeros, growth rate of the total,
//! normalized drift slope, limiting noise variance and CLT variances.
//!
//! Everything that is a rational function of the moments is generic over
//! [`Scalar`]; quantities involving square roots require [`Float`].

use num_traits::Float;
use serde::{Serialize, Serializer};

use crate::distributions::{cross_sq_diff, ser_rational};
use crate::urn::{ModelKind, UrnModel};
use crate::{Error, Rational, Result, Scalar};

/// Every moment symbol the limit formulas consume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelMoments {
    pub m: u64,
    #[serde(serialize_with = "ser_rational")]
    pub mu_x: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub var_x: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub nu_x: Rational,
    #[serde(serialize_with = "ser_opt_rational")]
    pub mu_y: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub var_y: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub nu_y: Option<Rational>,
    /// `E(X - Y)^2`
    #[serde(serialize_with = "ser_opt_rational")]
    pub e_sq_diff: Option<Rational>,
}

fn ser_opt_rational<S: Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_rational(r, s),
        None => s.serialize_none(),
    }
}

impl ModelMoments {
    pub fn of(model: &UrnModel) -> Self {
        let mx = model.x().moments();
        let my = model.y().map(|d| d.moments());
        Self {
            m: model.m(),
            mu_x: mx.mean,
            var_x: mx.variance,
            nu_x: mx.second_moment,
            mu_y: my.as_ref().map(|v| v.mean.clone()),
            var_y: my.as_ref().map(|v| v.variance.clone()),
            nu_y: my.map(|v| v.second_moment),
            e_sq_diff: model.y().map(|y| cross_sq_diff(model.x(), y)),
        }
    }

    fn get<S: Scalar>(r: &Rational) -> S {
        S::from_rational(r)
    }

    fn y_or_missing<S: Scalar>(r: &Option<Rational>) -> Result<S> {
        r.as_ref()
            .map(Self::get)
            .ok_or_else(|| Error::InvalidConfig("Y moments are required".into()))
    }

    fn m_<S: Scalar>(&self) -> S {
        S::from_count(self.m as u128)
    }

    // Y moments default to X's for X-only regimes, where they never enter.
    fn mu_y_<S: Scalar>(&self) -> S {
        Self::get(self.mu_y.as_ref().unwrap_or(&self.mu_x))
    }

    fn nu_y_<S: Scalar>(&self) -> S {
        Self::get(self.nu_y.as_ref().unwrap_or(&self.nu_x))
    }

    fn e_sq_diff_<S: Scalar>(&self) -> S {
        self.e_sq_diff.as_ref().map(Self::get).unwrap_or_else(|| {
            // X against an independent copy: 2 Var X
            let v: S = Self::get(&self.var_x);
            v.clone() + v
        })
    }

    fn mu_relation(&self) -> std::cmp::Ordering {
        self.mu_y
            .as_ref()
            .map_or(std::cmp::Ordering::Equal, |mu_y| self.mu_x.cmp(mu_y))
    }
}

/// Limit of the white proportion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StableZero<F> {
    Point(F),
    /// The limit is a non-degenerate random variable.
    RandomLimit,
}

impl<F: Copy> StableZero<F> {
    pub fn point(&self) -> Option<F> {
        match self {
            Self::Point(z) => Some(*z),
            Self::RandomLimit => None,
        }
    }
}

impl<F: Serialize> Serialize for StableZero<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Point(z) => z.serialize(s),
            Self::RandomLimit => s.serialize_str("random-limit"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CltStatistic {
    /// `(W_n - z* T_n) / sqrt(n)`
    ProportionScaled,
    /// `(W_n - E W_n) / sqrt(n)`
    MeanCentered,
}

impl CltStatistic {
    pub fn name(self) -> &'static str {
        match self {
            Self::ProportionScaled => "proportion-scaled",
            Self::MeanCentered => "mean-centered",
        }
    }
}

/// Mean increment of the white proportion, per unit step size.
pub fn drift<S: Scalar>(kind: ModelKind, x: &S, mm: &ModelMoments) -> S {
    let m: S = mm.m_();
    let mu_x: S = ModelMoments::get(&mm.mu_x);
    let mu_y: S = mm.mu_y_();
    let one = S::one();
    let two = one.clone() + one.clone();
    match kind {
        ModelKind::XOpp => mu_x * m * (one - two * x.clone()),
        ModelKind::XSelf => S::zero(),
        ModelKind::XYOpp => {
            m.clone() * (mu_x.clone() - mu_y) * x.clone() * x.clone()
                - two * mu_x.clone() * m.clone() * x.clone()
                + mu_x * m
        }
        ModelKind::XYSelf => m * (mu_x - mu_y) * x.clone() * (one - x.clone()),
    }
}

/// Derivative of [`drift`] in the proportion.
pub fn drift_derivative<S: Scalar>(kind: ModelKind, x: &S, mm: &ModelMoments) -> S {
    let m: S = mm.m_();
    let mu_x: S = ModelMoments::get(&mm.mu_x);
    let mu_y: S = mm.mu_y_();
    let one = S::one();
    let two = one.clone() + one.clone();
    match kind {
        ModelKind::XOpp => -(two * mu_x * m),
        ModelKind::XSelf => S::zero(),
        ModelKind::XYOpp => {
            two.clone() * m.clone() * (mu_x.clone() - mu_y) * x.clone() - two * mu_x * m
        }
        ModelKind::XYSelf => m * (mu_x - mu_y) * (one - two * x.clone()),
    }
}

/// Drift as printed for the random-addition opposite regime, whose quadratic
/// coefficient has the opposite sign of the exact conditional increment mean.
/// Identical to [`drift`] for the other regimes.
pub fn printed_drift<S: Scalar>(kind: ModelKind, x: &S, mm: &ModelMoments) -> S {
    match kind {
        ModelKind::XYOpp => {
            let m: S = mm.m_();
            let mu_x: S = ModelMoments::get(&mm.mu_x);
            let mu_y: S = mm.mu_y_();
            let two = S::one() + S::one();
            m.clone() * (mu_y - mu_x.clone()) * x.clone() * x.clone()
                - two * mu_x.clone() * m.clone() * x.clone()
                + mu_x * m
        }
        _ => drift(kind, x, mm),
    }
}

pub fn stable_zero<F: Float + Scalar>(kind: ModelKind, mm: &ModelMoments) -> StableZero<F> {
    use std::cmp::Ordering::*;
    match kind {
        ModelKind::XOpp => StableZero::Point(F::half()),
        ModelKind::XSelf => StableZero::RandomLimit,
        ModelKind::XYOpp => {
            let a = Float::sqrt(ModelMoments::get::<F>(&mm.mu_x));
            let b = Float::sqrt(mm.mu_y_::<F>());
            StableZero::Point(a / (a + b))
        }
        ModelKind::XYSelf => match mm.mu_relation() {
            Greater => StableZero::Point(F::one()),
            Less => StableZero::Point(F::zero()),
            Equal => StableZero::RandomLimit,
        },
    }
}

/// `lim T_n / n`.
pub fn total_rate<F: Float + Scalar>(kind: ModelKind, mm: &ModelMoments) -> F {
    let m: F = mm.m_();
    let mu_x: F = ModelMoments::get(&mm.mu_x);
    let mu_y: F = mm.mu_y_();
    match kind {
        ModelKind::XOpp | ModelKind::XSelf => m * mu_x,
        ModelKind::XYOpp => m * Float::sqrt(mu_x * mu_y),
        ModelKind::XYSelf => m * Float::max(mu_x, mu_y),
    }
}

fn point_zero<F: Float + Scalar>(kind: ModelKind, mm: &ModelMoments) -> Result<F> {
    stable_zero::<F>(kind, mm)
        .point()
        .ok_or(Error::RandomLimit(kind))
}

/// `-f'(z*) / lim(T_n / n)`.
pub fn gamma_hat<F: Float + Scalar>(kind: ModelKind, mm: &ModelMoments) -> Result<F> {
    let z = point_zero::<F>(kind, mm)?;
    Ok(-drift_derivative(kind, &z, mm) / total_rate::<F>(kind, mm))
}

/// `lim E[dM^2 | F_n]` along states with white proportion `z` as `T_n -> inf`,
/// i.e. with `E[xi^2] = m z (1 - z) + m^2 z^2`.
pub fn noise_var_at<S: Scalar>(kind: ModelKind, z: &S, mm: &ModelMoments) -> S {
    let m: S = mm.m_();
    let mu_x: S = ModelMoments::get(&mm.mu_x);
    let nu_x: S = ModelMoments::get(&mm.nu_x);
    let mu_y: S = mm.mu_y_();
    let nu_y: S = mm.nu_y_();
    let one = S::one();
    let two = one.clone() + one.clone();
    let z = z.clone();
    let zc = one.clone() - z.clone();
    let e_xi = m.clone() * z.clone();
    let e_xi2 = m.clone() * z.clone() * zc.clone() + m.clone() * m.clone() * z.clone() * z.clone();
    let f = drift(kind, &z, mm);
    match kind {
        ModelKind::XOpp => {
            let lin = m.clone() * (one - two * z.clone());
            let e_u2 = m.clone() * z.clone() * zc + lin.clone() * lin.clone();
            nu_x * e_u2 - mu_x.clone() * mu_x * lin.clone() * lin
        }
        ModelKind::XSelf => nu_x * m * z * zc,
        ModelKind::XYOpp => {
            let cross = nu_x.clone() - mu_x * mu_y;
            let e_a2 = z.clone() * z.clone() * mm.e_sq_diff_::<S>()
                - two.clone() * z.clone() * cross.clone()
                + nu_x.clone();
            let e_ax = z * cross - nu_x.clone();
            e_xi2 * e_a2
                + two * m.clone() * zc.clone() * e_xi * e_ax
                + m.clone() * m * zc.clone() * zc * nu_x
                - f.clone() * f
        }
        ModelKind::XYSelf => {
            let e_c2 = zc.clone() * zc.clone() * nu_x
                + two.clone() * z.clone() * zc.clone() * mu_x.clone() * mu_y.clone()
                + z.clone() * z.clone() * nu_y.clone();
            let e_cy = zc * mu_x * mu_y + z.clone() * nu_y.clone();
            e_xi2 * e_c2 - two * m.clone() * z.clone() * e_xi * e_cy
                + m.clone() * m * z.clone() * z * nu_y
                - f.clone() * f
        }
    }
}

/// [`noise_var_at`] evaluated at the point stable zero.
pub fn noise_var_limit<F: Float + Scalar>(kind: ModelKind, mm: &ModelMoments) -> Result<F> {
    let z = point_zero::<F>(kind, mm)?;
    Ok(noise_var_at(kind, &z, mm))
}

/// The degree-four polynomial printed for the opposite random-addition regime,
/// evaluated verbatim. Comparison only: with `m = 1` and `X = Y = 1` it gives
/// `1/2` at `z = 1/2` where the noise is `1/4`.
pub fn paper_g<S: Scalar>(x: &S, mm: &ModelMoments) -> Result<S> {
    let m: S = mm.m_();
    let one = S::one();
    let two = one.clone() + one.clone();
    let three = two.clone() + one.clone();
    let nu_x: S = ModelMoments::get(&mm.nu_x);
    let mu_x: S = ModelMoments::get(&mm.mu_x);
    let mu_y: S = ModelMoments::y_or_missing(&mm.mu_y)?;
    let e: S = ModelMoments::y_or_missing(&mm.e_sq_diff)?;
    let mm1 = m.clone() - one.clone();
    let a = [
        m.clone() * m.clone() * nu_x.clone(),
        m.clone() * (one - two.clone() * m.clone()) * nu_x.clone(),
        three * m.clone() * mm1.clone() * nu_x.clone()
            - two.clone() * m.clone() * mm1.clone() * mu_x.clone() * mu_y.clone(),
        m.clone() * e.clone() - two * (m.clone() * m.clone() - m.clone()) * (nu_x - mu_x * mu_y),
        m * mm1 * e,
    ];
    // Horner
    Ok(a.iter()
        .rev()
        .fold(S::zero(), |acc, c| acc * x.clone() + c.clone()))
}

/// Limiting variance of the requested CLT statistic.
///
/// The mean-centered value is the printed one, `(m nu + m^2 sigma^2) / 12`;
/// see [`mean_centered_variance_corrected`].
pub fn clt_variance<F: Float + Scalar>(
    kind: ModelKind,
    mm: &ModelMoments,
    statistic: CltStatistic,
) -> Result<F> {
    match statistic {
        CltStatistic::ProportionScaled => {
            let g = gamma_hat::<F>(kind, mm)?;
            let noise = noise_var_limit::<F>(kind, mm)?;
            let two = F::one() + F::one();
            Ok(noise / (two * g - F::one()))
        }
        CltStatistic::MeanCentered => {
            if kind != ModelKind::XOpp {
                return Err(Error::UnsupportedStatistic {
                    model: kind,
                    statistic: statistic.name(),
                });
            }
            let m: F = mm.m_();
            let nu: F = ModelMoments::get(&mm.nu_x);
            let var: F = ModelMoments::get(&mm.var_x);
            Ok((m * nu + m * m * var) / F::from_count(12))
        }
    }
}

/// `lim Var(W_n) / n` for the single-law opposite regime.
///
/// `W_n = T_n / 2 + (W_n - T_n / 2)`: the second term contracts with slope 2 and
/// carries `m nu / 12`, while `T_n` is a plain i.i.d. sum contributing
/// `m^2 sigma^2 / 4` and asymptotically uncorrelated with it.
pub fn mean_centered_variance_corrected<S: Scalar>(mm: &ModelMoments) -> S {
    let m: S = mm.m_();
    let nu: S = ModelMoments::get(&mm.nu_x);
    let var: S = ModelMoments::get(&mm.var_x);
    m.clone() * nu / S::from_count(12) + m.clone() * m * var / S::from_count(4)
}

/// Exponent of the minority colour in the self-reinforcing two-law regime.
pub fn growth_exponent<S: Scalar>(mm: &ModelMoments) -> Result<S> {
    let mu_y = mm
        .mu_y
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("Y moments are required".into()))?;
    if *mu_y == mm.mu_x {
        return Err(Error::UndefinedExponent);
    }
    let (lo, hi) = if mm.mu_x > *mu_y {
        (mu_y, &mm.mu_x)
    } else {
        (&mm.mu_x, mu_y)
    };
    Ok(S::from_rational(&(lo / hi)))
}

/// Snapshot of every limit object for one model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticProfile<F> {
    pub model: ModelKind,
    pub stable_zero: StableZero<F>,
    pub total_rate: F,
    pub gamma_hat: Option<F>,
    /// `lim E[dM^2 | F_n]`
    pub noise_var: Option<F>,
    /// Variance of `sqrt(n) (Z_n - z*)`.
    pub clt_var_proportion: Option<F>,
    /// Variance of `(W_n - z* T_n) / sqrt(n)`.
    pub clt_var_scaled: Option<F>,
    /// Printed variance of `(W_n - E W_n) / sqrt(n)`.
    pub clt_var_centered: Option<F>,
    pub clt_var_centered_corrected: Option<F>,
    /// Printed `G(z) / 3`, reported next to `clt_var_scaled`.
    pub paper_g_over_3: Option<F>,
    pub growth_exponent: Option<F>,
}

impl<F: Float + Scalar> AsymptoticProfile<F> {
    pub fn evaluate(kind: ModelKind, mm: &ModelMoments) -> Self {
        let stable_zero = stable_zero::<F>(kind, mm);
        let rate = total_rate::<F>(kind, mm);
        let gamma_hat = gamma_hat::<F>(kind, mm).ok();
        let noise_var = noise_var_limit::<F>(kind, mm).ok();
        let two = F::one() + F::one();
        let half = F::half();
        // The CLT needs gamma_hat > 1/2 and a non-degenerate noise.
        let clt_var_scaled = match (gamma_hat, noise_var) {
            (Some(g), Some(v)) if g > half && v > F::zero() => Some(v / (two * g - F::one())),
            _ => None,
        };
        let clt_var_proportion = clt_var_scaled.map(|v| v / (rate * rate));
        let centered = (kind == ModelKind::XOpp)
            .then(|| clt_variance::<F>(kind, mm, CltStatistic::MeanCentered).ok())
            .flatten();
        let centered_corrected =
            (kind == ModelKind::XOpp).then(|| mean_centered_variance_corrected::<F>(mm));
        let paper_g_over_3 = match (kind, stable_zero) {
            (ModelKind::XYOpp, StableZero::Point(z)) => {
                paper_g(&z, mm).ok().map(|g| g / F::from_count(3))
            }
            _ => None,
        };
        let growth_exponent = (kind == ModelKind::XYSelf)
            .then(|| growth_exponent::<F>(mm).ok())
            .flatten();
        Self {
            model: kind,
            stable_zero,
            total_rate: rate,
            gamma_hat,
            noise_var,
            clt_var_proportion,
            clt_var_scaled,
            clt_var_centered: centered,
            clt_var_centered_corrected: centered_corrected,
            paper_g_over_3,
            growth_exponent,
        }
    }

    pub fn of(model: &UrnModel) -> Self {
        Self::evaluate(model.kind(), &ModelMoments::of(model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DiscreteDist;
    use approx::assert_abs_diff_eq;

    fn model(kind: ModelKind, m: u64, x: &[u64], y: Option<&[u64]>) -> UrnModel {
        UrnModel::new(
            kind,
            m,
            DiscreteDist::uniform(x).unwrap(),
            y.map(|y| DiscreteDist::uniform(y).unwrap()),
        )
        .unwrap()
    }

    fn mm(kind: ModelKind, m: u64, x: &[u64], y: Option<&[u64]>) -> ModelMoments {
        ModelMoments::of(&model(kind, m, x, y))
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn drift_examples() {
        let a = mm(ModelKind::XOpp, 2, &[2], None);
        assert_eq!(drift(ModelKind::XOpp, &q(1, 2), &a), q(0, 1));
        assert_eq!(drift(ModelKind::XOpp, &q(0, 1), &a), q(4, 1));
        let b = mm(ModelKind::XYOpp, 1, &[1], Some(&[4]));
        assert_eq!(drift(ModelKind::XYOpp, &q(1, 3), &b), q(0, 1));
        assert_eq!(
            drift(
                ModelKind::XSelf,
                &q(1, 5),
                &mm(ModelKind::XSelf, 3, &[1, 2], None)
            ),
            q(0, 1)
        );
    }

    #[test]
    fn printed_xyopp_drift_misses_the_zero() {
        let b = mm(ModelKind::XYOpp, 1, &[1], Some(&[4]));
        assert_ne!(printed_drift(ModelKind::XYOpp, &q(1, 3), &b), q(0, 1));
        let s = mm(ModelKind::XYSelf, 2, &[3], Some(&[1]));
        assert_eq!(
            printed_drift(ModelKind::XYSelf, &q(2, 7), &s),
            drift(ModelKind::XYSelf, &q(2, 7), &s)
        );
    }

    #[test]
    fn stable_zero_examples() {
        let sym = mm(ModelKind::XYOpp, 2, &[3], Some(&[3]));
        assert_eq!(
            stable_zero::<f64>(ModelKind::XYOpp, &sym),
            StableZero::Point(0.5)
        );
        let b = mm(ModelKind::XYOpp, 1, &[1], Some(&[4]));
        let z = stable_zero::<f64>(ModelKind::XYOpp, &b).point().unwrap();
        assert_abs_diff_eq!(z, 1.0 / 3.0, epsilon = 1e-15);
        let s = mm(ModelKind::XYSelf, 1, &[2], Some(&[1]));
        assert_eq!(
            stable_zero::<f64>(ModelKind::XYSelf, &s),
            StableZero::Point(1.0)
        );
        let s = mm(ModelKind::XYSelf, 1, &[1], Some(&[2]));
        assert_eq!(
            stable_zero::<f64>(ModelKind::XYSelf, &s),
            StableZero::Point(0.0)
        );
        let s = mm(ModelKind::XYSelf, 1, &[1], Some(&[1]));
        assert_eq!(
            stable_zero::<f64>(ModelKind::XYSelf, &s),
            StableZero::RandomLimit
        );
        assert_eq!(
            stable_zero::<f64>(ModelKind::XSelf, &mm(ModelKind::XSelf, 1, &[1], None)),
            StableZero::RandomLimit
        );
    }

    #[test]
    fn total_rate_examples() {
        assert_abs_diff_eq!(
            total_rate::<f64>(ModelKind::XOpp, &mm(ModelKind::XOpp, 2, &[1, 2], None)),
            3.0
        );
        assert_abs_diff_eq!(
            total_rate::<f64>(ModelKind::XYOpp, &mm(ModelKind::XYOpp, 2, &[1], Some(&[4]))),
            4.0
        );
        assert_abs_diff_eq!(
            total_rate::<f64>(
                ModelKind::XYSelf,
                &mm(ModelKind::XYSelf, 1, &[2], Some(&[1]))
            ),
            2.0
        );
    }

    #[test]
    fn gamma_hat_is_two_for_opposite_regimes() {
        let a = mm(ModelKind::XOpp, 3, &[1, 5], None);
        assert_abs_diff_eq!(
            gamma_hat::<f64>(ModelKind::XOpp, &a).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        let b = mm(ModelKind::XYOpp, 3, &[1], Some(&[4]));
        assert_abs_diff_eq!(
            gamma_hat::<f64>(ModelKind::XYOpp, &b).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            gamma_hat::<f64>(ModelKind::XSelf, &mm(ModelKind::XSelf, 1, &[1], None)),
            Err(Error::RandomLimit(ModelKind::XSelf))
        ));
    }

    #[test]
    fn noise_limit_examples() {
        let a = mm(ModelKind::XOpp, 1, &[1], None);
        assert_abs_diff_eq!(noise_var_limit::<f64>(ModelKind::XOpp, &a).unwrap(), 0.25);
        let b = mm(ModelKind::XYOpp, 1, &[1], Some(&[1]));
        assert_abs_diff_eq!(
            noise_var_limit::<f64>(ModelKind::XYOpp, &b).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        // exact rational evaluation at z = 1/2
        assert_eq!(noise_var_at(ModelKind::XYOpp, &q(1, 2), &b), q(1, 4));
    }

    #[test]
    fn paper_g_examples() {
        let b = mm(ModelKind::XYOpp, 1, &[1], Some(&[1]));
        assert_eq!(paper_g(&q(1, 2), &b).unwrap(), q(1, 2));
        // a4 vanishes for m = 1: G is cubic, so G(x) - G(0) is at most cubic
        let c = mm(ModelKind::XYOpp, 1, &[1, 2], Some(&[3, 5]));
        let g = |x: i64| paper_g(&q(x, 1), &c).unwrap();
        // fourth finite difference of a cubic is 0
        assert_eq!(
            g(4) - q(4, 1) * g(3) + q(6, 1) * g(2) - q(4, 1) * g(1) + g(0),
            q(0, 1)
        );
        // a4 vanishes for identical constants
        let d = mm(ModelKind::XYOpp, 3, &[2], Some(&[2]));
        let g = |x: i64| paper_g(&q(x, 1), &d).unwrap();
        assert_eq!(
            g(4) - q(4, 1) * g(3) + q(6, 1) * g(2) - q(4, 1) * g(1) + g(0),
            q(0, 1)
        );
        assert!(paper_g(&q(1, 2), &mm(ModelKind::XOpp, 1, &[1], None)).is_err());
    }

    #[test]
    fn clt_variance_examples() {
        let a = mm(ModelKind::XOpp, 1, &[1], None);
        let ps = clt_variance::<f64>(ModelKind::XOpp, &a, CltStatistic::ProportionScaled).unwrap();
        assert_abs_diff_eq!(ps, 1.0 / 12.0, epsilon = 1e-15);
        let mc = clt_variance::<f64>(ModelKind::XOpp, &a, CltStatistic::MeanCentered).unwrap();
        assert_abs_diff_eq!(mc, 1.0 / 12.0, epsilon = 1e-15);
        let b = mm(ModelKind::XOpp, 2, &[1, 3], None);
        let mc = clt_variance::<f64>(ModelKind::XOpp, &b, CltStatistic::MeanCentered).unwrap();
        assert_abs_diff_eq!(mc, 7.0 / 6.0, epsilon = 1e-15);
        assert_eq!(mean_centered_variance_corrected::<Rational>(&b), q(11, 6));
        let err = clt_variance::<f64>(
            ModelKind::XYOpp,
            &mm(ModelKind::XYOpp, 1, &[1], Some(&[2])),
            CltStatistic::MeanCentered,
        );
        assert!(matches!(err, Err(Error::UnsupportedStatistic { .. })));
    }

    #[test]
    fn growth_exponent_examples() {
        let e = |x, y| growth_exponent::<Rational>(&mm(ModelKind::XYSelf, 1, &[x], Some(&[y])));
        assert_eq!(e(2, 1).unwrap(), q(1, 2));
        assert_eq!(e(1, 2).unwrap(), q(1, 2));
        assert_eq!(e(3, 1).unwrap(), q(1, 3));
        assert_eq!(e(2, 2), Err(Error::UndefinedExponent));
    }

    #[test]
    fn profile_works_in_single_precision() {
        let p = crate::Profile32::of(&model(ModelKind::XOpp, 1, &[1], None));
        assert!((p.clt_var_scaled.unwrap() - 1.0 / 12.0).abs() < 1e-6);
    }

    #[test]
    fn profile_json_marks_random_limits() {
        let p = crate::Profile::of(&model(ModelKind::XYSelf, 1, &[1], Some(&[1])));
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["stable_zero"], "random-limit");
        assert!(v["clt_var_scaled"].is_null());
    }
}
