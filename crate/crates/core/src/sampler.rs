//! Uniform program sampling, exhaustive enumeration and trial seeds.
//!
//! Every trial of an experiment owns an independent random stream derived
//! from `(master_seed, trial_index)`:
//!
//! 1. the trial seed is output number `trial_index + 1` of a splitmix64
//!    generator started at `master_seed`;
//! 2. that seed initializes a xoshiro256** stream (state words expanded
//!    from the seed by splitmix64);
//! 3. bounded integers are drawn by rejection, discarding raw outputs below
//!    `2^64 mod bound` so every residue is equally likely.
//!
//! These choices are fixed so that results replay bit-for-bit.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

use crate::machine::{count_programs, MachineError, Program, State, Transition};

/// Default ceiling on exhaustive enumeration.
pub const DEFAULT_GUARD: u64 = 100_000_000;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("{count} programs exceed the enumeration guard of {guard}")]
    TooManyPrograms { count: BigUint, guard: u64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// The random stream type handed to every trial.
pub type TrialStream = Xoshiro256StarStar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn seed(&self) -> u64 {
        derive_trial_seed(self.master_seed, self.trial_index)
    }

    pub fn stream(&self) -> TrialStream {
        TrialStream::seed_from_u64(self.seed())
    }
}

fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Output number `trial_index + 1` of splitmix64 seeded at `master_seed`.
/// Splitmix64 advances its state by a fixed odd increment, so any output
/// can be computed directly.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    let state = master_seed.wrapping_add(trial_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    splitmix64_finalize(state)
}

pub fn trial_stream(master_seed: u64, trial_index: u64) -> TrialStream {
    SeedSpec::new(master_seed, trial_index).stream()
}

/// Uniform integer in `0..bound` by rejection sampling.
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    // Values below `threshold` would over-represent the low residues.
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % bound;
        }
    }
}

/// Parses a seed written in decimal or as `0x`-prefixed hex.
pub fn parse_seed(text: &str) -> Result<u64, std::num::ParseIntError> {
    let text = text.trim();
    match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    }
}

/// Draws each of the `n·a` table entries independently and uniformly from
/// the `2·a·(n+1)` possible transitions.
pub fn sample_program<R: RngCore + ?Sized>(n: State, a: u32, rng: &mut R) -> Result<Program, MachineError> {
    if n == 0 {
        return Err(MachineError::NoStates);
    }
    let choices = Transition::choices(n, a);
    Program::from_fn(n, a, |_, _| Transition::from_digit(uniform_below(rng, choices), n, a))
}

/// The program at position `index` of the enumeration order.
pub fn program_at(n: State, a: u32, index: u64) -> Result<Program, MachineError> {
    let base = Transition::choices(n, a);
    let entries = n as usize * a as usize;
    let mut digits = vec![0u64; entries];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = rest % base;
        rest /= base;
    }
    debug_assert_eq!(rest, 0, "index past the end of the enumeration");
    Program::from_digits(n, a, &digits)
}

/// Every `n`-state program, in mixed-radix order with the `(q1, 0)` entry
/// as the most significant digit.
#[derive(Debug, Clone)]
pub struct ProgramEnumeration {
    n: State,
    a: u32,
    base: u64,
    digits: Vec<u64>,
    remaining: u64,
}

impl ProgramEnumeration {
    pub fn total(&self) -> u64 {
        self.remaining
    }
}

impl Iterator for ProgramEnumeration {
    type Item = Program;

    fn next(&mut self) -> Option<Program> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let program = Program::from_digits(self.n, self.a, &self.digits).expect("digits in range");
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                break;
            }
            *d = 0;
        }
        Some(program)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for ProgramEnumeration {}

/// Number of `n`-state programs, provided it does not exceed `guard`.
pub fn guarded_count(n: State, a: u32, guard: u64) -> Result<u64, SamplerError> {
    let count = count_programs(n, a)?;
    match count.to_u64() {
        Some(c) if c <= guard => Ok(c),
        _ => Err(SamplerError::TooManyPrograms { count, guard }),
    }
}

pub fn enumerate_programs(n: State, a: u32, guard: u64) -> Result<ProgramEnumeration, SamplerError> {
    let total = guarded_count(n, a, guard)?;
    Ok(ProgramEnumeration {
        n,
        a,
        base: Transition::choices(n, a),
        digits: vec![0; n as usize * a as usize],
        remaining: total,
    })
}
