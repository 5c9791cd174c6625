//! Single-tape Turing machines over a finite alphabet.
//!
//! A program with `n` states over an `a`-symbol alphabet is a total table
//! from `(state, symbol)` to a [`Transition`]. State 1 is the start state;
//! the halt state is a separate target and is not one of the `n` states.
//!
//! On a one-way tape, a left move from cell 0 makes the head fall off and
//! the computation ceases. The step that falls off does not complete: the
//! state it targets is not entered, even when that target is halt.

mod format;
mod tape;

pub use format::{ParseError, ParseErrorKind, ProgramJson, TransitionJson};
pub use tape::Tape;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A tape symbol, `0..a`.
pub type Symbol = u8;

/// A (non-halt) state, `1..=n`.
pub type State = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("a program needs at least one state")]
    NoStates,
    #[error("alphabet size {0} is outside 2..=256")]
    BadAlphabet(u32),
    #[error("table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("entry (q{state}, {symbol}) targets q{target}, outside 1..={states}")]
    StateOutOfRange {
        state: State,
        symbol: Symbol,
        target: State,
        states: State,
    },
    #[error("entry (q{state}, {symbol}) writes {write}, outside 0..{alphabet}")]
    SymbolOutOfRange {
        state: State,
        symbol: Symbol,
        write: Symbol,
        alphabet: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TapeGeometry {
    /// Cells `0, 1, 2, ...`; moving left from cell 0 falls off.
    #[serde(rename = "one-way")]
    OneWayFallOff,
    /// Cells indexed by all integers.
    #[serde(rename = "two-way")]
    TwoWayInfinite,
}

impl TapeGeometry {
    pub fn label(self) -> &'static str {
        match self {
            TapeGeometry::OneWayFallOff => "one-way",
            TapeGeometry::TwoWayInfinite => "two-way",
        }
    }
}

impl fmt::Display for TapeGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Tape geometry plus alphabet size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MachineModel {
    pub geometry: TapeGeometry,
    pub alphabet: u32,
}

impl MachineModel {
    pub fn new(geometry: TapeGeometry, alphabet: u32) -> Result<Self, MachineError> {
        check_alphabet(alphabet)?;
        Ok(Self { geometry, alphabet })
    }

    /// The binary one-way model.
    pub fn standard() -> Self {
        Self {
            geometry: TapeGeometry::OneWayFallOff,
            alphabet: 2,
        }
    }
}

fn check_alphabet(a: u32) -> Result<(), MachineError> {
    if (2..=256).contains(&a) {
        Ok(())
    } else {
        Err(MachineError::BadAlphabet(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    State(State),
    Halt,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::State(q) => write!(f, "q{q}"),
            Target::Halt => f.write_str("H"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub target: Target,
    pub write: Symbol,
    pub dir: Move,
}

impl Transition {
    pub fn new(target: Target, write: Symbol, dir: Move) -> Self {
        Self { target, write, dir }
    }

    pub fn goto(state: State, write: Symbol, dir: Move) -> Self {
        Self::new(Target::State(state), write, dir)
    }

    pub fn halt(write: Symbol, dir: Move) -> Self {
        Self::new(Target::Halt, write, dir)
    }

    /// Number of distinct transitions available to an `n`-state program
    /// over an `a`-symbol alphabet: `2·a·(n+1)`.
    pub fn choices(n: State, a: u32) -> u64 {
        2 * u64::from(a) * (u64::from(n) + 1)
    }

    /// Position of this transition in the canonical ordering used for
    /// enumeration: target `q1..qn` then `H`, then write symbol, then
    /// `L` before `R`.
    pub fn digit(&self, n: State, a: u32) -> u64 {
        let target = match self.target {
            Target::State(q) => u64::from(q) - 1,
            Target::Halt => u64::from(n),
        };
        let dir = match self.dir {
            Move::Left => 0,
            Move::Right => 1,
        };
        (target * u64::from(a) + u64::from(self.write)) * 2 + dir
    }

    /// Inverse of [`Transition::digit`]; `digit` must be below
    /// [`Transition::choices`].
    pub fn from_digit(digit: u64, n: State, a: u32) -> Self {
        debug_assert!(digit < Self::choices(n, a));
        let dir = if digit.is_multiple_of(2) {
            Move::Left
        } else {
            Move::Right
        };
        let rest = digit / 2;
        let write = (rest % u64::from(a)) as Symbol;
        let target = rest / u64::from(a);
        let target = if target == u64::from(n) {
            Target::Halt
        } else {
            Target::State(target as State + 1)
        };
        Self { target, write, dir }
    }
}

/// A total transition table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    states: State,
    alphabet: u32,
    table: Vec<Transition>,
}

impl Program {
    /// Builds a program from its table, entries ordered by state then symbol.
    pub fn new(states: State, alphabet: u32, table: Vec<Transition>) -> Result<Self, MachineError> {
        if states == 0 {
            return Err(MachineError::NoStates);
        }
        check_alphabet(alphabet)?;
        let expected = states as usize * alphabet as usize;
        if table.len() != expected {
            return Err(MachineError::TableSize {
                expected,
                got: table.len(),
            });
        }
        for (i, t) in table.iter().enumerate() {
            let state = (i / alphabet as usize) as State + 1;
            let symbol = (i % alphabet as usize) as Symbol;
            if let Target::State(q) = t.target {
                if q == 0 || q > states {
                    return Err(MachineError::StateOutOfRange {
                        state,
                        symbol,
                        target: q,
                        states,
                    });
                }
            }
            if u32::from(t.write) >= alphabet {
                return Err(MachineError::SymbolOutOfRange {
                    state,
                    symbol,
                    write: t.write,
                    alphabet,
                });
            }
        }
        Ok(Self {
            states,
            alphabet,
            table,
        })
    }

    pub fn from_fn(
        states: State,
        alphabet: u32,
        mut entry: impl FnMut(State, Symbol) -> Transition,
    ) -> Result<Self, MachineError> {
        check_alphabet(alphabet)?;
        let table = (1..=states)
            .flat_map(|q| (0..alphabet).map(move |s| (q, s as Symbol)))
            .map(|(q, s)| entry(q, s))
            .collect();
        Self::new(states, alphabet, table)
    }

    /// Builds a program from per-entry digits in canonical order.
    pub fn from_digits(states: State, alphabet: u32, digits: &[u64]) -> Result<Self, MachineError> {
        let table = digits
            .iter()
            .map(|&d| Transition::from_digit(d, states, alphabet))
            .collect();
        Self::new(states, alphabet, table)
    }

    pub fn states(&self) -> State {
        self.states
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn get(&self, state: State, symbol: Symbol) -> Transition {
        self.table[(state as usize - 1) * self.alphabet as usize + symbol as usize]
    }

    pub fn table(&self) -> &[Transition] {
        &self.table
    }

    /// `((state, symbol), transition)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = ((State, Symbol), Transition)> + '_ {
        let a = self.alphabet as usize;
        self.table
            .iter()
            .enumerate()
            .map(move |(i, &t)| (((i / a) as State + 1, (i % a) as Symbol), t))
    }

    pub fn digits(&self) -> Vec<u64> {
        self.table.iter().map(|t| t.digit(self.states, self.alphabet)).collect()
    }

    /// Rank of this program in the mixed-radix enumeration order, with the
    /// `(q1, 0)` entry as the most significant digit.
    pub fn index(&self) -> BigUint {
        let base = BigUint::from(Transition::choices(self.states, self.alphabet));
        self.digits()
            .into_iter()
            .fold(BigUint::from(0u32), |acc, d| acc * &base + d)
    }
}

/// Number of `n`-state programs over an `a`-symbol alphabet,
/// `(2·a·(n+1))^(a·n)`.
pub fn count_programs(n: State, a: u32) -> Result<BigUint, MachineError> {
    if n == 0 {
        return Err(MachineError::NoStates);
    }
    check_alphabet(a)?;
    Ok(BigUint::from(Transition::choices(n, a)).pow(n * a))
}

/// How a falling-off step treats its own write. The outcome of a run does
/// not depend on this; it exists so that claim can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FallOffWrite {
    #[default]
    Record,
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepResult {
    /// The step completed and entered a state; `revisit` is true when that
    /// state had already been achieved earlier in the run.
    Continue {
        revisit: bool,
    },
    Halted,
    FellOff,
}

/// A live machine: state, head, tape and achieved-state history.
#[derive(Debug, Clone)]
pub struct Configuration {
    state: State,
    head: i64,
    tape: Tape,
    achieved: Vec<bool>,
    distinct: usize,
    steps: u64,
    live: bool,
}

impl Configuration {
    /// State 1 at cell 0 on a tape filled with `fill`.
    pub fn initial(program: &Program, fill: Symbol) -> Self {
        Self::on_tape(program, Tape::new(fill))
    }

    pub fn on_tape(program: &Program, tape: Tape) -> Self {
        debug_assert!(u32::from(tape.fill()) < program.alphabet());
        let mut achieved = vec![false; program.states() as usize];
        achieved[0] = true;
        Self {
            state: 1,
            head: 0,
            tape,
            achieved,
            distinct: 1,
            steps: 0,
            live: true,
        }
    }

    pub fn state(&self) -> State {
        self.state
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_live(&self) -> bool {
        self.live
    }

    pub fn achieved(&self, state: State) -> bool {
        self.achieved[state as usize - 1]
    }

    /// Number of distinct states achieved so far, the start state included.
    pub fn distinct_states(&self) -> usize {
        self.distinct
    }

    /// Whether two configurations describe the same machine situation:
    /// state, head position and full tape content. History is ignored.
    pub fn same_situation(&self, other: &Configuration) -> bool {
        self.state == other.state && self.head == other.head && self.tape.same_content(&other.tape)
    }

    pub fn step(&mut self, program: &Program, geometry: TapeGeometry) -> StepResult {
        self.step_with(program, geometry, FallOffWrite::Record)
    }

    /// Executes one transition: read, write, move, then enter the target.
    /// A move off the left edge of a one-way tape cancels entry into the
    /// target, so such a step never halts.
    pub fn step_with(&mut self, program: &Program, geometry: TapeGeometry, convention: FallOffWrite) -> StepResult {
        debug_assert!(self.live, "step on a ceased configuration");
        let read = self.tape.read(self.head);
        let t = program.get(self.state, read);
        self.steps += 1;

        let next = self.head + t.dir.delta();
        if next < 0 && geometry == TapeGeometry::OneWayFallOff {
            if convention == FallOffWrite::Record {
                self.tape.write(self.head, t.write);
            }
            self.live = false;
            return StepResult::FellOff;
        }
        self.tape.write(self.head, t.write);
        self.head = next;

        match t.target {
            Target::Halt => {
                self.live = false;
                StepResult::Halted
            }
            Target::State(q) => {
                self.state = q;
                let flag = &mut self.achieved[q as usize - 1];
                let revisit = *flag;
                if !revisit {
                    *flag = true;
                    self.distinct += 1;
                }
                StepResult::Continue { revisit }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Halted { step: u64 },
    FellOff { step: u64 },
    OutOfBudget { budget: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub outcome: Outcome,
    pub steps_executed: u64,
    /// Distinct states achieved, the start state included.
    pub states_used: usize,
    pub visited_cells: usize,
    /// Head position after the last completed step; absent after falling off.
    pub final_head: Option<i64>,
}

/// Runs `program` from state 1 on a tape filled with `fill` for at most
/// `budget` steps.
pub fn run(program: &Program, fill: Symbol, geometry: TapeGeometry, budget: u64) -> RunRecord {
    run_from(
        Configuration::initial(program, fill),
        program,
        geometry,
        budget,
        FallOffWrite::Record,
    )
}

pub fn run_from(
    mut config: Configuration,
    program: &Program,
    geometry: TapeGeometry,
    budget: u64,
    convention: FallOffWrite,
) -> RunRecord {
    let start = config.steps();
    let outcome = loop {
        if config.steps() - start >= budget {
            break Outcome::OutOfBudget { budget };
        }
        match config.step_with(program, geometry, convention) {
            StepResult::Continue { .. } => {}
            StepResult::Halted => break Outcome::Halted { step: config.steps() },
            StepResult::FellOff => break Outcome::FellOff { step: config.steps() },
        }
    };
    RunRecord {
        outcome,
        steps_executed: config.steps() - start,
        states_used: config.distinct_states(),
        visited_cells: config.tape().visited(),
        final_head: match outcome {
            Outcome::FellOff { .. } => None,
            _ => Some(config.head()),
        },
    }
}
