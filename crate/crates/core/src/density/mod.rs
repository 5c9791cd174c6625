//! Asymptotic density measurements.
//!
//! The density of a set of programs at `n` is the fraction of all `n`-state
//! programs in it. It is measured either exactly, by enumerating every
//! program, or by Monte Carlo over uniformly sampled programs with a
//! Wilson score interval.

mod sets;

pub use sets::{
    oscillating_count, oscillating_density, oscillating_marker, oscillating_set_membership, prefix_density, stretch_set,
};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decider::{classify, finite_domain_witness, first_event, has_halt_transition, Classification};
use crate::machine::{count_programs, run, MachineError, Outcome, Program, State, TapeGeometry};
use crate::sampler::{
    derive_trial_seed, guarded_count, program_at, sample_program, trial_stream, SamplerError, DEFAULT_GUARD,
};
use crate::stats::{Proportion, Z_95};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("event {event} needs a one-way tape that the head can fall off")]
    IncompatibleModel { event: EventId },
    #[error("state grid must be nonempty and strictly increasing")]
    BadGrid,
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Step budget for [`EventId::HaltsWithinBudget`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepBudget {
    Fixed(u64),
    /// A multiple of the state count.
    PerState(u64),
}

impl StepBudget {
    pub fn resolve(self, n: State) -> u64 {
        match self {
            StepBudget::Fixed(t) => t,
            StepBudget::PerState(m) => m * u64::from(n),
        }
    }
}

impl Default for StepBudget {
    fn default() -> Self {
        StepBudget::PerState(10)
    }
}

/// A decidable property of a single program, evaluated from the all-0
/// tape unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventId {
    InB,
    HaltsBeforeRepeat,
    FallsOffBeforeRepeat,
    RepeatsState,
    NoHaltTransition,
    /// No state is re-entered within the first `k` steps. Halting or
    /// falling off earlier counts as satisfying it.
    NoRepeatWithin(u64),
    /// Neither a state repeat nor a halt within the first `k` steps.
    /// Falling off before either counts as satisfying it.
    NoRepeatNoHaltWithin(u64),
    /// Reaches the halt state within the budget. Stands in for membership
    /// in the halting set, which cannot be decided.
    HaltsWithinBudget(StepBudget),
    /// Falls off before halting or repeating a state on the all-1 tape.
    InBUnary,
}

impl EventId {
    /// Events defined through falling off the left edge.
    pub fn needs_fall_off(self) -> bool {
        matches!(
            self,
            EventId::InB
                | EventId::HaltsBeforeRepeat
                | EventId::FallsOffBeforeRepeat
                | EventId::RepeatsState
                | EventId::InBUnary
        )
    }

    pub fn check_model(self, geometry: TapeGeometry) -> Result<(), DensityError> {
        if self.needs_fall_off() && geometry != TapeGeometry::OneWayFallOff {
            return Err(DensityError::IncompatibleModel { event: self });
        }
        Ok(())
    }

    /// Evaluates the event. Callers must have checked the model.
    pub fn holds(self, program: &Program, geometry: TapeGeometry) -> bool {
        match self {
            EventId::InB => classify(program, 0).in_b(),
            EventId::HaltsBeforeRepeat => {
                matches!(classify(program, 0), Classification::HaltsBeforeRepeat { .. })
            }
            EventId::FallsOffBeforeRepeat => {
                matches!(classify(program, 0), Classification::FallsOffBeforeRepeat { .. })
            }
            EventId::RepeatsState => matches!(classify(program, 0), Classification::RepeatsState { .. }),
            EventId::NoHaltTransition => !has_halt_transition(program),
            EventId::NoRepeatWithin(k) => !matches!(
                first_event(program, 0, geometry, k),
                Some(Classification::RepeatsState { .. })
            ),
            EventId::NoRepeatNoHaltWithin(k) => matches!(
                first_event(program, 0, geometry, k),
                None | Some(Classification::FallsOffBeforeRepeat { .. })
            ),
            EventId::HaltsWithinBudget(budget) => matches!(
                run(program, 0, geometry, budget.resolve(program.states())).outcome,
                Outcome::Halted { .. }
            ),
            EventId::InBUnary => finite_domain_witness(program).is_some(),
        }
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventId::InB => f.write_str("in-b"),
            EventId::HaltsBeforeRepeat => f.write_str("halts-before-repeat"),
            EventId::FallsOffBeforeRepeat => f.write_str("falls-off"),
            EventId::RepeatsState => f.write_str("repeats-state"),
            EventId::NoHaltTransition => f.write_str("no-halt-transition"),
            EventId::NoRepeatWithin(k) => write!(f, "no-repeat-within:{k}"),
            EventId::NoRepeatNoHaltWithin(k) => write!(f, "no-repeat-no-halt-within:{k}"),
            EventId::HaltsWithinBudget(StepBudget::Fixed(t)) => write!(f, "halts-within:{t}"),
            EventId::HaltsWithinBudget(StepBudget::PerState(m)) => write!(f, "halts-within:{m}n"),
            EventId::InBUnary => f.write_str("in-b-unary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown event `{0}`")]
pub struct UnknownEvent(pub String);

impl FromStr for EventId {
    type Err = UnknownEvent;

    fn from_str(s: &str) -> Result<Self, UnknownEvent> {
        let unknown = || UnknownEvent(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        let steps = |arg: Option<&str>| -> Result<u64, UnknownEvent> {
            arg.ok_or_else(unknown)?.parse().map_err(|_| unknown())
        };
        let event = match (name, arg) {
            ("in-b", None) => EventId::InB,
            ("halts-before-repeat", None) => EventId::HaltsBeforeRepeat,
            ("falls-off" | "falls-off-before-repeat", None) => EventId::FallsOffBeforeRepeat,
            ("repeats-state", None) => EventId::RepeatsState,
            ("no-halt-transition", None) => EventId::NoHaltTransition,
            ("no-repeat-within", arg) => EventId::NoRepeatWithin(steps(arg)?),
            ("no-repeat-no-halt-within", arg) => EventId::NoRepeatNoHaltWithin(steps(arg)?),
            ("halts-within", None) => EventId::HaltsWithinBudget(StepBudget::default()),
            ("halts-within", Some(arg)) => match arg.strip_suffix('n') {
                Some(m) => EventId::HaltsWithinBudget(StepBudget::PerState(m.parse().map_err(|_| unknown())?)),
                None => EventId::HaltsWithinBudget(StepBudget::Fixed(arg.parse().map_err(|_| unknown())?)),
            },
            ("in-b-unary", None) => EventId::InBUnary,
            _ => return Err(unknown()),
        };
        Ok(event)
    }
}

impl Serialize for EventId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EventId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Monte Carlo density estimate with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub event: EventId,
    pub model: TapeGeometry,
    pub a: u32,
    pub n: State,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub master_seed: u64,
}

impl DensityEstimate {
    fn new(event: EventId, model: TapeGeometry, a: u32, n: State, master_seed: u64, proportion: Proportion) -> Self {
        let (ci_lo, ci_hi) = proportion.wilson(Z_95);
        Self {
            event,
            model,
            a,
            n,
            trials: proportion.trials,
            hits: proportion.hits,
            p_hat: proportion.p_hat(),
            ci_lo,
            ci_hi,
            master_seed,
        }
    }

    pub fn proportion(&self) -> Proportion {
        Proportion::new(self.trials, self.hits)
    }
}

/// Estimates several events on one shared sample: trial `i` evaluates
/// every event on the program drawn from stream `(master_seed, i)`.
pub fn estimate_events(
    events: &[EventId],
    n: State,
    a: u32,
    geometry: TapeGeometry,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<DensityEstimate>, DensityError> {
    for event in events {
        event.check_model(geometry)?;
    }
    if trials == 0 {
        return Err(DensityError::NoTrials);
    }
    count_programs(n, a)?;
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            let program = sample_program(n, a, &mut trial_stream(master_seed, i)).expect("validated parameters");
            events
                .iter()
                .map(|e| u64::from(e.holds(&program, geometry)))
                .collect::<Vec<u64>>()
        })
        .reduce(
            || vec![0; events.len()],
            |mut acc, row| {
                acc.iter_mut().zip(row).for_each(|(a, b)| *a += b);
                acc
            },
        );
    Ok(events
        .iter()
        .zip(hits)
        .map(|(&event, h)| DensityEstimate::new(event, geometry, a, n, master_seed, Proportion::new(trials, h)))
        .collect())
}

pub fn estimate_density(
    event: EventId,
    n: State,
    a: u32,
    geometry: TapeGeometry,
    trials: u64,
    master_seed: u64,
) -> Result<DensityEstimate, DensityError> {
    Ok(estimate_events(&[event], n, a, geometry, trials, master_seed)?.remove(0))
}

/// Density over every program, on the one-way tape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDensity {
    pub event: EventId,
    pub a: u32,
    pub n: State,
    pub count: u64,
    pub hits: u64,
    #[serde(skip)]
    pub density: BigRational,
}

impl ExactDensity {
    pub fn value(&self) -> f64 {
        self.density.to_f64().expect("finite")
    }
}

pub fn exact_density(event: EventId, n: State, a: u32) -> Result<ExactDensity, DensityError> {
    exact_density_with_guard(event, n, a, DEFAULT_GUARD)
}

pub fn exact_density_with_guard(event: EventId, n: State, a: u32, guard: u64) -> Result<ExactDensity, DensityError> {
    let geometry = TapeGeometry::OneWayFallOff;
    let count = guarded_count(n, a, guard)?;
    let hits = (0..count)
        .into_par_iter()
        .filter(|&i| event.holds(&program_at(n, a, i).expect("index in range"), geometry))
        .count() as u64;
    Ok(ExactDensity {
        event,
        a,
        n,
        count,
        hits,
        density: BigRational::new(hits.into(), count.into()),
    })
}

/// Fraction of binary `n`-state programs with no transition into the halt
/// state: `(4n)^(2n) / (4(n+1))^(2n) = (n/(n+1))^(2n)`. The float is
/// computed in log space so it stays accurate for large `n`.
pub fn nohalt_exact_fraction(n: State) -> Result<(BigRational, f64), MachineError> {
    let all = count_programs(n, 2)?;
    let halt_free = BigUint::from(4 * u64::from(n)).pow(2 * n);
    let exact = BigRational::new(halt_free.into(), all.into());
    let n = f64::from(n);
    let float = (2.0 * n * (-1.0 / (n + 1.0)).ln_1p()).exp();
    Ok((exact, float))
}

/// One density experiment over a grid of state counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub event: EventId,
    pub model: TapeGeometry,
    pub a: u32,
    pub n_grid: Vec<State>,
    pub trials: u64,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), DensityError> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] == 0 {
            return Err(DensityError::BadGrid);
        }
        if self.trials == 0 {
            return Err(DensityError::NoTrials);
        }
        self.event.check_model(self.model)?;
        count_programs(1, self.a)?;
        Ok(())
    }

    /// Master seed of grid row `index`.
    pub fn row_seed(&self, index: usize) -> u64 {
        derive_trial_seed(self.master_seed, index as u64)
    }
}

/// One estimate per grid point, in grid order. Row `i` is sampled with
/// master seed `derive_trial_seed(spec.master_seed, i)`.
pub fn convergence_table(spec: &ExperimentSpec) -> Result<Vec<DensityEstimate>, DensityError> {
    spec.validate()?;
    spec.n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| estimate_density(spec.event, n, spec.a, spec.model, spec.trials, spec.row_seed(i)))
        .collect()
}
