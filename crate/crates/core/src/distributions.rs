//! Finite, strictly positive integer laws for the addition variables `X` and `Y`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;
use crate::{Error, Rational, Result};

/// A single support point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub value: u64,
    pub prob: Rational,
}

/// Discrete law on positive integers with exact probabilities.
///
/// Atoms are sorted by value, distinct, with probabilities in `(0, 1]`
/// summing exactly to one. Supports are finite by construction.
#[derive(Clone, Debug)]
pub struct DiscreteDist {
    atoms: Vec<Atom>,
    // floating CDF, computed once for inverse-CDF sampling
    cdf: Vec<f64>,
}

impl PartialEq for DiscreteDist {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentSet {
    #[serde(serialize_with = "ser_rational")]
    pub mean: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub variance: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub second_moment: Rational,
}

impl DiscreteDist {
    pub fn new(mut atoms: Vec<(u64, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        atoms.sort_by_key(|(v, _)| *v);
        let mut total = Rational::zero();
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate value {}",
                    w[0].0
                )));
            }
        }
        for (v, p) in &atoms {
            if *v == 0 {
                return Err(Error::InvalidDistribution(
                    "values must be positive integers".into(),
                ));
            }
            if !p.is_positive() || *p > Rational::one() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} of value {v} outside (0, 1]"
                )));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = Rational::zero();
        let mut cdf = Vec::with_capacity(atoms.len());
        for (_, p) in &atoms {
            acc += p;
            cdf.push(acc.to_f64().unwrap_or(1.0));
        }
        *cdf.last_mut().expect("nonempty") = 1.0;
        let atoms = atoms
            .into_iter()
            .map(|(value, prob)| Atom { value, prob })
            .collect();
        Ok(Self { atoms, cdf })
    }

    pub fn point_mass(value: u64) -> Result<Self> {
        Self::new(vec![(value, Rational::one())])
    }

    /// Equal weights on the given distinct values.
    pub fn uniform(values: &[u64]) -> Result<Self> {
        let p = Rational::new(BigInt::one(), BigInt::from(values.len().max(1)));
        Self::new(values.iter().map(|&v| (v, p.clone())).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn min_value(&self) -> u64 {
        self.atoms[0].value
    }

    pub fn max_value(&self) -> u64 {
        self.atoms[self.atoms.len() - 1].value
    }

    pub fn is_deterministic(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn moments(&self) -> MomentSet {
        let mut mean = Rational::zero();
        let mut second = Rational::zero();
        for a in &self.atoms {
            let v = Rational::from_integer(BigInt::from(a.value));
            mean += &v * &a.prob;
            second += &v * &v * &a.prob;
        }
        let variance = &second - &mean * &mean;
        MomentSet {
            mean,
            variance,
            second_moment: second,
        }
    }

    /// Inverse-CDF draw with a single uniform.
    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        if self.atoms.len() == 1 {
            return self.atoms[0].value;
        }
        let u = rng.uniform();
        let idx = self.cdf.partition_point(|&c| c <= u);
        self.atoms[idx.min(self.atoms.len() - 1)].value
    }
}

/// `E(X - Y)^2` for independent `X ~ dx`, `Y ~ dy`.
pub fn cross_sq_diff(dx: &DiscreteDist, dy: &DiscreteDist) -> Rational {
    let mx = dx.moments();
    let my = dy.moments();
    let two = Rational::from_integer(2.into());
    &mx.second_moment + &my.second_moment - two * &mx.mean * &my.mean
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.125"` into an exact rational.
pub fn parse_probability(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidDistribution(format!("cannot parse probability {s:?}"));
    if s.contains('/') {
        return Rational::from_str(s).map_err(|_| bad());
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty())
        || !digits_ok(int_part)
        || !digits_ok(frac_part)
    {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer =
        BigInt::from_str(if joined.is_empty() { "0" } else { &joined }).map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(Rational::new(numer, denom))
}

pub(crate) fn ser_rational<S: Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl fmt::Display for DiscreteDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", a.value, a.prob)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for DiscreteDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Atoms<'a>(&'a [Atom]);
        impl Serialize for Atoms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for a in self.0 {
                    seq.serialize_element(&(a.value, a.prob.to_string()))?;
                }
                seq.end()
            }
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            atoms: Atoms<'a>,
        }
        Repr {
            atoms: Atoms(&self.atoms),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProbRepr {
    Text(String),
    Int(u64),
    Float(f64),
}

impl ProbRepr {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            ProbRepr::Text(s) => parse_probability(s),
            ProbRepr::Int(v) => Ok(Rational::from_integer(BigInt::from(*v))),
            // shortest round-trip decimal text of the float
            ProbRepr::Float(v) => parse_probability(&format!("{v}")),
        }
    }
}

impl<'de> Deserialize<'de> for DiscreteDist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            atoms: Vec<(u64, ProbRepr)>,
        }
        let repr = Repr::deserialize(d)?;
        let atoms = repr
            .atoms
            .iter()
            .map(|(v, p)| p.to_rational().map(|p| (*v, p)))
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        DiscreteDist::new(atoms).map_err(de::Error::custom)
    }
}
