//! A laboratory for the halting behaviour of randomly chosen Turing machines.
//!
//! - [`machine`]: programs, configurations and exact execution semantics.
//! - [`sampler`]: uniform sampling, exhaustive enumeration and seed derivation.
//! - [`decider`]: polynomial-time classification and certified halting verdicts.
//! - [`walk`]: exact and simulated fall-off probabilities of random walks.
//! - [`density`]: exact and Monte Carlo asymptotic density estimates.

pub mod decider;
pub mod density;
pub mod machine;
pub mod sampler;
pub mod stats;
pub mod walk;

pub use decider::{
    check_trace_stability, classify, conservative_halting, decide_halting_on_b, finite_domain_witness,
    has_halt_transition, in_b, Classification, HaltingOnB, HaltingVerdict, NonHaltingReason,
};
pub use density::{
    convergence_table, estimate_density, exact_density, nohalt_exact_fraction, DensityError, DensityEstimate, EventId,
    ExperimentSpec, StepBudget,
};
pub use machine::{
    count_programs, run, MachineModel, Move, Outcome, Program, RunRecord, TapeGeometry, Target, Transition,
};
pub use sampler::{derive_trial_seed, enumerate_programs, sample_program, trial_stream, SeedSpec};
