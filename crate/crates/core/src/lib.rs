//! Multi-drawing two-colour urn with random addition.
//!
//! At every step a sample of `m` balls is drawn without replacement, and the
//! urn receives a random number of balls driven by i.i.d. integer laws `X`
//! (and `Y`) according to one of four replacement regimes ([`ModelKind`]).
//!
//! The crate provides
//! - exact discrete laws and their moments ([`distributions`]),
//! - the urn recursion and seeded simulation ([`urn`]),
//! - closed-form limits and CLT variances ([`asymptotics`]),
//! - the stochastic-approximation decomposition of the white proportion ([`diagnostics`]),
//! - an exact finite-horizon dynamic program in rational arithmetic ([`oracle`]),
//! - a replicated Monte Carlo harness ([`harness`]) and the acceptance suite ([`acceptance`]).
//!
//! Formulas that only need field operations are generic over [`Scalar`], so the
//! same code evaluates in `f32`, `f64` or exact [`Rational`] arithmetic.

pub mod acceptance;
pub mod asymptotics;
pub mod config;
pub mod diagnostics;
pub mod distributions;
mod error;
pub mod harness;
pub mod oracle;
pub mod rng;
mod scalar;
pub mod stats;
pub mod urn;

pub use asymptotics::{AsymptoticProfile, CltStatistic, ModelMoments, StableZero};
pub use diagnostics::{IncrementForm, RenlundReport, SaDecomposition};
pub use distributions::{DiscreteDist, MomentSet};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentReport};
pub use oracle::StateDist;
pub use rng::RngStream;
pub use scalar::Scalar;
pub use urn::{Count, ModelKind, StepRecord, Trajectory, UrnModel, UrnState};

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Asymptotic profile evaluated in double precision.
pub type Profile = AsymptoticProfile<f64>;
/// Asymptotic profile evaluated in single precision.
pub type Profile32 = AsymptoticProfile<f32>;
