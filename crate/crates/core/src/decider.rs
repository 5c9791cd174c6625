//! Polynomial-time decisions on the generic set.
//!
//! A program is in the generic set when, started in state 1 on the all-0
//! one-way tape, it halts or falls off the tape before re-entering a state
//! it has already achieved. Since the start state is achieved at time 0,
//! `n` completed steps would achieve `n + 1` states among `n`, so one of
//! the three outcomes always occurs within `n` steps.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::machine::{Configuration, Program, State, StepResult, Symbol, Tape, TapeGeometry, Target};
use crate::sampler::uniform_below;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Classification {
    HaltsBeforeRepeat { step: u64 },
    FallsOffBeforeRepeat { step: u64, visited_cells: usize },
    RepeatsState { step: u64, state: State },
}

impl Classification {
    pub fn step(&self) -> u64 {
        match *self {
            Classification::HaltsBeforeRepeat { step }
            | Classification::FallsOffBeforeRepeat { step, .. }
            | Classification::RepeatsState { step, .. } => step,
        }
    }

    /// Membership certificate for the generic set.
    pub fn in_b(&self) -> bool {
        !matches!(self, Classification::RepeatsState { .. })
    }
}

/// The first of halt, fall-off or state repeat occurring within `horizon`
/// steps, or `None` if the machine is still running without having
/// repeated a state.
pub fn first_event(program: &Program, fill: Symbol, geometry: TapeGeometry, horizon: u64) -> Option<Classification> {
    let mut config = Configuration::initial(program, fill);
    while config.steps() < horizon {
        match config.step(program, geometry) {
            StepResult::Halted => return Some(Classification::HaltsBeforeRepeat { step: config.steps() }),
            StepResult::FellOff => {
                return Some(Classification::FallsOffBeforeRepeat {
                    step: config.steps(),
                    visited_cells: config.tape().visited(),
                })
            }
            StepResult::Continue { revisit: true } => {
                return Some(Classification::RepeatsState {
                    step: config.steps(),
                    state: config.state(),
                })
            }
            StepResult::Continue { revisit: false } => {}
        }
    }
    None
}

/// Runs at most `n` steps on the one-way tape filled with `fill`.
pub fn classify(program: &Program, fill: Symbol) -> Classification {
    let n = u64::from(program.states());
    let verdict =
        first_event(program, fill, TapeGeometry::OneWayFallOff, n).expect("some state repeats within n steps");
    assert!(verdict.step() <= n);
    verdict
}

pub fn in_b(program: &Program) -> bool {
    classify(program, 0).in_b()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HaltingOnB {
    Halts,
    DoesNotHalt,
    NotInB,
}

/// Decides halting from the all-0 tape for programs in the generic set.
/// A computation that fell off never reaches the halt state.
pub fn decide_halting_on_b(program: &Program) -> HaltingOnB {
    match classify(program, 0) {
        Classification::HaltsBeforeRepeat { .. } => HaltingOnB::Halts,
        Classification::FallsOffBeforeRepeat { .. } => HaltingOnB::DoesNotHalt,
        Classification::RepeatsState { .. } => HaltingOnB::NotInB,
    }
}

pub fn has_halt_transition(program: &Program) -> bool {
    program.table().iter().any(|t| t.target == Target::Halt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "reason")]
pub enum NonHaltingReason {
    /// No entry targets halt, so no computation can halt on any model.
    NoHaltTransition,
    /// The head fell off a one-way tape.
    FellOff { step: u64 },
    /// The configuration after `from_step` steps recurs `period` steps later.
    ConfigurationCycle { from_step: u64, period: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum HaltingVerdict {
    Halts { step: u64 },
    NonHalting(NonHaltingReason),
    Unknown { budget: u64 },
}

/// Halting from the all-0 tape, answered only when certified.
///
/// Cycles are found with Brent's method: a saved configuration is compared
/// against every later one and replaced at power-of-two distances, so the
/// first match gives the exact period while only two configurations are
/// held in memory. Comparison is on exact state, head and tape content.
pub fn conservative_halting(program: &Program, geometry: TapeGeometry, budget: u64) -> HaltingVerdict {
    if !has_halt_transition(program) {
        return HaltingVerdict::NonHalting(NonHaltingReason::NoHaltTransition);
    }
    let mut hare = Configuration::initial(program, 0);
    let mut tortoise = hare.clone();
    let mut power = 1u64;
    let mut distance = 0u64;
    while hare.steps() < budget {
        match hare.step(program, geometry) {
            StepResult::Halted => return HaltingVerdict::Halts { step: hare.steps() },
            StepResult::FellOff => return HaltingVerdict::NonHalting(NonHaltingReason::FellOff { step: hare.steps() }),
            StepResult::Continue { .. } => {}
        }
        distance += 1;
        if hare.same_situation(&tortoise) {
            return HaltingVerdict::NonHalting(NonHaltingReason::ConfigurationCycle {
                from_step: tortoise.steps(),
                period: distance,
            });
        }
        if distance == power {
            tortoise = hare.clone();
            power *= 2;
            distance = 0;
        }
    }
    HaltingVerdict::Unknown { budget }
}

/// Independently re-checks a cycle certificate: runs `from_step` steps from
/// the all-0 tape, then `period` more, and compares the two configurations.
pub fn replay_cycle(program: &Program, geometry: TapeGeometry, from_step: u64, period: u64) -> bool {
    let mut config = Configuration::initial(program, 0);
    for _ in 0..from_step {
        if !matches!(config.step(program, geometry), StepResult::Continue { .. }) {
            return false;
        }
    }
    let anchor = config.clone();
    for _ in 0..period {
        if !matches!(config.step(program, geometry), StepResult::Continue { .. }) {
            return false;
        }
    }
    period > 0 && config.same_situation(&anchor)
}

/// Classifies on the all-1 tape; if the program falls off before halting or
/// repeating a state, returns the number of cells it read. On any unary
/// input with at least that many leading 1s the computation is identical,
/// so the program diverges on all large inputs.
pub fn finite_domain_witness(program: &Program) -> Option<usize> {
    match classify(program, 1) {
        Classification::FallsOffBeforeRepeat { visited_cells, .. } => Some(visited_cells),
        _ => None,
    }
}

/// One executed step: state, head position and the symbol read.
pub type TraceStep = (State, i64, Symbol);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    /// How the last step ended; `None` if the horizon was reached first.
    pub end: Option<StepResult>,
}

/// Records every step on `tape` until the run stops or `horizon` steps pass.
pub fn trace(program: &Program, tape: Tape, geometry: TapeGeometry, horizon: u64) -> Trace {
    let mut config = Configuration::on_tape(program, tape);
    let mut steps = Vec::new();
    while config.steps() < horizon {
        steps.push((config.state(), config.head(), config.tape().peek(config.head())));
        match config.step(program, geometry) {
            StepResult::Continue { .. } => {}
            end => return Trace { steps, end: Some(end) },
        }
    }
    Trace { steps, end: None }
}

/// Re-simulates on `suffix_trials` tapes that hold 1 in cells `0..witness`
/// and random symbols everywhere else, and checks each trace against the
/// all-1 trace. Returns false if any trial diverges or fails to fall off.
pub fn check_trace_stability<R: RngCore + ?Sized>(
    program: &Program,
    witness: usize,
    suffix_trials: usize,
    rng: &mut R,
) -> bool {
    let geometry = TapeGeometry::OneWayFallOff;
    let horizon = u64::from(program.states());
    let reference = trace(program, Tape::new(1), geometry, horizon);
    if reference.end != Some(StepResult::FellOff) {
        return false;
    }
    let a = u64::from(program.alphabet());
    // The head cannot get past cell `steps`, so a suffix of that length
    // followed by a random fill is indistinguishable from an arbitrary tape.
    let span = reference.steps.len() + 1;
    (0..suffix_trials).all(|_| {
        let mut input = vec![1 as Symbol; witness];
        input.extend((witness..span.max(witness)).map(|_| uniform_below(rng, a) as Symbol));
        let fill = uniform_below(rng, a) as Symbol;
        trace(program, Tape::with_input(fill, input), geometry, horizon) == reference
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run, Move::*, Outcome, Transition};
    use crate::sampler::{sample_program, trial_stream};

    const ONE_WAY: TapeGeometry = TapeGeometry::OneWayFallOff;
    const TWO_WAY: TapeGeometry = TapeGeometry::TwoWayInfinite;

    /// One-state binary program from its two entries.
    fn one_state(on0: Transition, on1: Transition) -> Program {
        Program::new(1, 2, vec![on0, on1]).unwrap()
    }

    fn halter() -> Program {
        one_state(Transition::halt(0, Right), Transition::halt(0, Right))
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&halter(), 0), Classification::HaltsBeforeRepeat { step: 1 });

        let marcher = one_state(Transition::goto(1, 1, Right), Transition::halt(0, Right));
        assert_eq!(
            classify(&marcher, 0),
            Classification::RepeatsState { step: 1, state: 1 }
        );

        let two = Program::from_fn(2, 2, |q, s| match (q, s) {
            (1, 0) => Transition::goto(2, 1, Right),
            (2, 0) => Transition::halt(0, Right),
            _ => Transition::goto(1, 0, Left),
        })
        .unwrap();
        assert_eq!(classify(&two, 0), Classification::HaltsBeforeRepeat { step: 2 });
    }

    #[test]
    fn fall_off_counts_read_cells() {
        let p = one_state(Transition::goto(1, 1, Left), Transition::halt(0, Right));
        assert_eq!(
            classify(&p, 0),
            Classification::FallsOffBeforeRepeat {
                step: 1,
                visited_cells: 1
            }
        );
    }

    #[test]
    fn membership_and_halting_examples() {
        let falls = one_state(Transition::goto(1, 1, Left), Transition::halt(0, Right));
        let marcher = one_state(Transition::goto(1, 1, Right), Transition::halt(0, Right));
        let falling_halt = one_state(Transition::halt(1, Left), Transition::halt(0, Right));
        assert!(in_b(&halter()));
        assert!(in_b(&falls));
        assert!(!in_b(&marcher));
        assert_eq!(decide_halting_on_b(&halter()), HaltingOnB::Halts);
        assert_eq!(decide_halting_on_b(&falling_halt), HaltingOnB::DoesNotHalt);
        assert_eq!(decide_halting_on_b(&marcher), HaltingOnB::NotInB);
    }

    #[test]
    fn halt_transition_scan() {
        assert!(has_halt_transition(&halter()));
        let loops = one_state(Transition::goto(1, 1, Right), Transition::goto(1, 0, Left));
        assert!(!has_halt_transition(&loops));
        let late = Program::from_fn(5, 2, |q, s| {
            if (q, s) == (5, 1) {
                Transition::halt(0, Left)
            } else {
                Transition::goto(q, s, Right)
            }
        })
        .unwrap();
        assert!(has_halt_transition(&late));
    }

    #[test]
    fn conservative_examples() {
        let halt_free = Program::from_fn(2, 2, |q, _| Transition::goto(3 - q, 1, Right)).unwrap();
        assert_eq!(
            conservative_halting(&halt_free, TWO_WAY, 0),
            HaltingVerdict::NonHalting(NonHaltingReason::NoHaltTransition)
        );

        let runner = one_state(Transition::goto(1, 0, Right), Transition::halt(0, Right));
        assert_eq!(
            conservative_halting(&runner, TWO_WAY, 10_000),
            HaltingVerdict::Unknown { budget: 10_000 }
        );

        assert_eq!(
            conservative_halting(&halter(), ONE_WAY, 10),
            HaltingVerdict::Halts { step: 1 }
        );

        let falls = one_state(Transition::goto(1, 1, Left), Transition::halt(0, Right));
        assert_eq!(
            conservative_halting(&falls, ONE_WAY, 10),
            HaltingVerdict::NonHalting(NonHaltingReason::FellOff { step: 1 })
        );
    }

    #[test]
    fn detects_bouncing_cycle() {
        // q1: 0 -> q2 0 R; q2: 0 -> q1 0 L; 1 -> H. Bounces between cells 0 and 1.
        let p = Program::from_fn(2, 2, |q, s| match (q, s) {
            (1, 0) => Transition::goto(2, 0, Right),
            (2, 0) => Transition::goto(1, 0, Left),
            _ => Transition::halt(0, Right),
        })
        .unwrap();
        for geometry in [ONE_WAY, TWO_WAY] {
            match conservative_halting(&p, geometry, 100) {
                HaltingVerdict::NonHalting(NonHaltingReason::ConfigurationCycle { from_step, period }) => {
                    assert_eq!(period, 2);
                    assert!(replay_cycle(&p, geometry, from_step, period));
                    assert!(!replay_cycle(&p, geometry, from_step, 1));
                }
                other => panic!("expected a cycle, got {other:?}"),
            }
        }
    }

    #[test]
    fn cycle_needs_identical_tape() {
        // Marches right over fresh 0s writing 1s: never a cycle.
        let p = one_state(Transition::goto(1, 1, Right), Transition::halt(1, Right));
        assert_eq!(
            conservative_halting(&p, TWO_WAY, 500),
            HaltingVerdict::Unknown { budget: 500 }
        );
    }

    #[test]
    fn witness_examples() {
        let p = one_state(Transition::halt(0, Right), Transition::goto(1, 1, Left));
        assert_eq!(finite_domain_witness(&p), Some(1));
        let p = one_state(Transition::halt(0, Right), Transition::halt(1, Right));
        assert_eq!(finite_domain_witness(&p), None);
        let p = one_state(Transition::halt(0, Right), Transition::goto(1, 0, Right));
        assert_eq!(finite_domain_witness(&p), None);
    }

    #[test]
    fn all_zero_suffix_keeps_trace() {
        let mut rng = trial_stream(11, 0);
        let mut checked = 0;
        for _ in 0..500 {
            let p = sample_program(30, 2, &mut rng).unwrap();
            let Some(v) = finite_domain_witness(&p) else { continue };
            let reference = trace(&p, Tape::new(1), ONE_WAY, 30);
            let suffixed = trace(&p, Tape::with_input(0, vec![1; v]), ONE_WAY, 30);
            assert_eq!(reference, suffixed);
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn corrupted_witness_is_caught() {
        let mut rng = trial_stream(12, 0);
        let mut caught = 0;
        for _ in 0..200 {
            let p = sample_program(40, 2, &mut rng).unwrap();
            let Some(v) = finite_domain_witness(&p) else { continue };
            assert!(check_trace_stability(&p, v, 10, &mut rng));
            // Cell v - 1 is read and now random: each suffix survives with probability 1/2.
            if !check_trace_stability(&p, v - 1, 40, &mut rng) {
                caught += 1;
            } else {
                panic!("witness {} accepted for a program that reads cell {}", v - 1, v - 1);
            }
        }
        assert!(caught > 0);
    }

    #[test]
    fn classify_agrees_with_long_run() {
        let mut rng = trial_stream(13, 0);
        for i in 0..2000 {
            let n = 1 + (i % 60) as u32;
            let p = sample_program(n, 2, &mut rng).unwrap();
            let verdict = classify(&p, 0);
            let record = run(&p, 0, ONE_WAY, 10 * u64::from(n));
            match verdict {
                Classification::HaltsBeforeRepeat { step } => {
                    assert_eq!(record.outcome, Outcome::Halted { step })
                }
                Classification::FallsOffBeforeRepeat { step, visited_cells } => {
                    assert_eq!(record.outcome, Outcome::FellOff { step });
                    assert_eq!(record.visited_cells, visited_cells);
                }
                Classification::RepeatsState { step, .. } => assert!(step <= u64::from(n)),
            }
        }
    }
}
