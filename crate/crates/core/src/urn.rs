//! Urn state and the one-step recursion for the four replacement regimes.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::DiscreteDist;
use crate::rng::RngStream;
use crate::{Error, Result, Scalar};

/// Ball counter. 128 bits so that no horizon reachable in practice can overflow.
pub type Count = u128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UrnState {
    pub white: Count,
    pub blue: Count,
    pub step: u64,
}

impl UrnState {
    pub fn new(white: Count, blue: Count) -> Self {
        Self {
            white,
            blue,
            step: 0,
        }
    }

    pub fn total(&self) -> Count {
        self.white + self.blue
    }

    /// White proportion `W / T`.
    pub fn proportion<S: Scalar>(&self) -> S {
        S::from_count(self.white) / S::from_count(self.total())
    }

    pub fn z(&self) -> f64 {
        self.white as f64 / self.total() as f64
    }
}

/// Replacement regime. With `xi` white balls in a sample of `m`, the urn gains
///
/// | model  | white         | blue          |
/// |--------|---------------|---------------|
/// | XOpp   | `X (m - xi)`  | `X xi`        |
/// | XSelf  | `X xi`        | `X (m - xi)`  |
/// | XYOpp  | `X (m - xi)`  | `Y xi`        |
/// | XYSelf | `X xi`        | `Y (m - xi)`  |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    XOpp,
    XSelf,
    XYOpp,
    XYSelf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [Self::XOpp, Self::XSelf, Self::XYOpp, Self::XYSelf];

    pub fn uses_y(self) -> bool {
        matches!(self, Self::XYOpp | Self::XYSelf)
    }

    pub fn is_opposite(self) -> bool {
        matches!(self, Self::XOpp | Self::XYOpp)
    }

    /// `(white added, blue added)`; `y` is ignored by the X-only regimes.
    pub fn additions(self, m: u64, xi: u64, x: u64, y: u64) -> Option<(Count, Count)> {
        let (m, xi, x, y) = (m as Count, xi as Count, x as Count, y as Count);
        let rest = m - xi;
        Some(match self {
            Self::XOpp => (x.checked_mul(rest)?, x.checked_mul(xi)?),
            Self::XSelf => (x.checked_mul(xi)?, x.checked_mul(rest)?),
            Self::XYOpp => (x.checked_mul(rest)?, y.checked_mul(xi)?),
            Self::XYSelf => (x.checked_mul(xi)?, y.checked_mul(rest)?),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::XOpp => "XOpp",
            Self::XSelf => "XSelf",
            Self::XYOpp => "XYOpp",
            Self::XYSelf => "XYSelf",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown model {s:?}; valid models are XOpp, XSelf, XYOpp, XYSelf"
                ))
            })
    }
}

/// What happened during one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub before: UrnState,
    /// White balls in the sample.
    pub xi: u64,
    pub x: u64,
    pub y: Option<u64>,
    pub w_added: Count,
    pub b_added: Count,
}

impl StepRecord {
    pub fn after(&self) -> UrnState {
        UrnState {
            white: self.before.white + self.w_added,
            blue: self.before.blue + self.b_added,
            step: self.before.step + 1,
        }
    }

    pub fn z_before<S: Scalar>(&self) -> S {
        self.before.proportion()
    }

    pub fn z_after<S: Scalar>(&self) -> S {
        self.after().proportion()
    }
}

/// `P[xi = k]` when drawing `m` balls without replacement from `w` white and `b` blue.
pub fn hypergeom_pmf<S: Scalar>(w: Count, b: Count, m: u64, k: u64) -> Result<S> {
    let total = w + b;
    if m as Count > total {
        return Err(Error::InsufficientBalls { total, m });
    }
    if k > m || k as Count > w || (m - k) as Count > b {
        return Ok(S::zero());
    }
    Ok(
        binomial::<S>(w, k as Count) * binomial::<S>(b, (m - k) as Count)
            / binomial::<S>(total, m as Count),
    )
}

fn binomial<S: Scalar>(n: Count, k: Count) -> S {
    let k = k.min(n - k);
    (0..k).fold(S::one(), |acc, i| {
        acc * S::from_count(n - i) / S::from_count(i + 1)
    })
}

/// Number of white balls among `m` sequential uniform picks without replacement.
pub fn draw_sample(state: &UrnState, m: u64, rng: &mut RngStream) -> Result<u64> {
    let total = state.total();
    if (m as Count) > total {
        return Err(Error::InsufficientBalls { total, m });
    }
    let mut white_left = state.white;
    let mut left = total;
    let mut xi = 0;
    for _ in 0..m {
        if rng.below(left) < white_left {
            white_left -= 1;
            xi += 1;
        }
        left -= 1;
    }
    Ok(xi)
}

/// One exact outcome of a step, with its probability.
#[derive(Clone, Debug)]
pub struct Transition<S> {
    pub xi: u64,
    pub x: u64,
    pub y: Option<u64>,
    pub w_added: Count,
    pub b_added: Count,
    pub prob: S,
}

/// A fully specified urn: regime, sample size and addition laws.
#[derive(Clone, Debug, PartialEq)]
pub struct UrnModel {
    kind: ModelKind,
    m: u64,
    x: DiscreteDist,
    y: Option<DiscreteDist>,
}

impl UrnModel {
    pub fn new(kind: ModelKind, m: u64, x: DiscreteDist, y: Option<DiscreteDist>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig(
                "sample size m must be at least 1".into(),
            ));
        }
        if kind.uses_y() != y.is_some() {
            return Err(Error::ModelLaws {
                model: kind,
                needs_y: kind.uses_y(),
            });
        }
        Ok(Self { kind, m, x, y })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn x(&self) -> &DiscreteDist {
        &self.x
    }

    pub fn y(&self) -> Option<&DiscreteDist> {
        self.y.as_ref()
    }

    pub fn check_state(&self, state: &UrnState) -> Result<()> {
        if state.total() < self.m as Count {
            return Err(Error::InsufficientBalls {
                total: state.total(),
                m: self.m,
            });
        }
        Ok(())
    }

    /// Draw, sample the additions, apply the regime.
    pub fn step(&self, state: &UrnState, rng: &mut RngStream) -> Result<(UrnState, StepRecord)> {
        let xi = draw_sample(state, self.m, rng)?;
        let x = self.x.sample(rng);
        let y = self.y.as_ref().map(|d| d.sample(rng));
        let (w_added, b_added) = self
            .kind
            .additions(self.m, xi, x, y.unwrap_or(0))
            .ok_or(Error::Overflow)?;
        let next = UrnState {
            white: state.white.checked_add(w_added).ok_or(Error::Overflow)?,
            blue: state.blue.checked_add(b_added).ok_or(Error::Overflow)?,
            step: state.step + 1,
        };
        let record = StepRecord {
            before: *state,
            xi,
            x,
            y,
            w_added,
            b_added,
        };
        Ok((next, record))
    }

    /// Every outcome `(xi, x, y)` reachable from `state` with its exact probability.
    pub fn transitions<S: Scalar>(&self, state: &UrnState) -> Result<Vec<Transition<S>>> {
        self.check_state(state)?;
        let ys: Vec<(Option<u64>, S)> = match &self.y {
            Some(d) => d
                .atoms()
                .iter()
                .map(|a| (Some(a.value), S::from_rational(&a.prob)))
                .collect(),
            None => vec![(None, S::one())],
        };
        let mut out = Vec::new();
        for xi in 0..=self.m {
            let p_xi: S = hypergeom_pmf(state.white, state.blue, self.m, xi)?;
            if p_xi == S::zero() {
                continue;
            }
            for ax in self.x.atoms() {
                let p_x = p_xi.clone() * S::from_rational(&ax.prob);
                for (y, p_y) in &ys {
                    let (w_added, b_added) = self
                        .kind
                        .additions(self.m, xi, ax.value, y.unwrap_or(0))
                        .ok_or(Error::Overflow)?;
                    out.push(Transition {
                        xi,
                        x: ax.value,
                        y: *y,
                        w_added,
                        b_added,
                        prob: p_x.clone() * p_y.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn run(
        &self,
        initial: UrnState,
        horizon: u64,
        seed: u64,
        recording: Recording,
    ) -> Result<Trajectory> {
        self.run_stream(initial, horizon, seed, 0, recording)
    }

    /// Runs on stream `stream` of `seed` (see [`RngStream::derive`]).
    pub fn run_stream(
        &self,
        initial: UrnState,
        horizon: u64,
        seed: u64,
        stream: u64,
        recording: Recording,
    ) -> Result<Trajectory> {
        self.check_state(&initial)?;
        let mut rng = RngStream::derive(seed, stream);
        let mut traj = Trajectory {
            initial,
            m: self.m,
            model: self.kind,
            seed,
            stream,
            records: Vec::new(),
            checkpoints: Vec::new(),
            final_state: initial,
        };
        let mut marks = match &recording {
            Recording::Full => {
                traj.records.reserve(horizon as usize);
                Vec::new()
            }
            Recording::Checkpoints(c) => {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                c
            }
        }
        .into_iter()
        .peekable();
        let full = matches!(recording, Recording::Full);
        let mut state = initial;
        let note = |state: &UrnState,
                    marks: &mut std::iter::Peekable<std::vec::IntoIter<u64>>,
                    cps: &mut Vec<UrnState>| {
            if full {
                cps.push(*state);
            } else if marks.peek() == Some(&state.step) {
                cps.push(*state);
                marks.next();
            }
        };
        note(&state, &mut marks, &mut traj.checkpoints);
        for _ in 0..horizon {
            let (next, record) = self.step(&state, &mut rng)?;
            if full {
                traj.records.push(record);
            }
            state = next;
            note(&state, &mut marks, &mut traj.checkpoints);
        }
        traj.final_state = state;
        Ok(traj)
    }
}

/// What a run keeps in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recording {
    /// Every state and every [`StepRecord`].
    Full,
    /// Only the states at the listed step indices.
    Checkpoints(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub initial: UrnState,
    pub m: u64,
    pub model: ModelKind,
    pub seed: u64,
    pub stream: u64,
    pub records: Vec<StepRecord>,
    pub checkpoints: Vec<UrnState>,
    pub final_state: UrnState,
}

impl Trajectory {
    pub fn is_full(&self) -> bool {
        self.records.len() as u64 == self.final_state.step - self.initial.step
    }

    /// `n,W,B,T,Z` at each recorded checkpoint.
    pub fn checkpoint_csv(&self) -> String {
        let mut out = String::from("n,W,B,T,Z\n");
        for s in &self.checkpoints {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.step,
                s.white,
                s.blue,
                s.total(),
                s.z()
            );
        }
        out
    }

    /// Per-step rows including the draw; row `n = 0` has empty draw columns.
    pub fn full_csv(&self) -> Result<String> {
        if !self.is_full() {
            return Err(Error::ThinTrajectory);
        }
        let mut out = String::from("n,W,B,T,Z,xi,x,y,w_added,b_added\n");
        let s = self.initial;
        let _ = writeln!(
            out,
            "{},{},{},{},{},,,,,",
            s.step,
            s.white,
            s.blue,
            s.total(),
            s.z()
        );
        for r in &self.records {
            let s = r.after();
            let y = r.y.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                s.step,
                s.white,
                s.blue,
                s.total(),
                s.z(),
                r.xi,
                r.x,
                y,
                r.w_added,
                r.b_added
            );
        }
        Ok(out)
    }
}
