//! Fall-off probabilities of simple random walks on bounded-below grids.
//!
//! A symmetric walk starting on cell 0 of a one-way tape falls off when it
//! first steps to cell -1. Two exact routes are provided for its
//! distribution: dynamic programming over positions, and the closed form
//! `P(first fall-off at step 2m + 1) = Catalan(m) / 2^(2m+1)`. Monte Carlo
//! estimates cover the 1D tape and the 2D quarter-plane.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand_core::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::trial_stream;
use crate::stats::{Proportion, Z_95};

/// Largest horizon evaluated with exact rational arithmetic by
/// [`falloff_cdf_exact`].
pub const EXACT_HORIZON_LIMIT: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("unsupported walk dimension {0} (expected 1 or 2)")]
    Dimension(u32),
    #[error("a Monte Carlo estimate needs at least one trial")]
    NoTrials,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub dimension: u32,
    pub steps: u64,
    pub trials: u64,
    pub master_seed: u64,
}

impl WalkSpec {
    pub fn new(dimension: u32, steps: u64, trials: u64, master_seed: u64) -> Result<Self, WalkError> {
        if !(1..=2).contains(&dimension) {
            return Err(WalkError::Dimension(dimension));
        }
        if trials == 0 {
            return Err(WalkError::NoTrials);
        }
        Ok(Self {
            dimension,
            steps,
            trials,
            master_seed,
        })
    }
}

/// Probability of having fallen off within a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FalloffProbability {
    pub horizon: u64,
    /// Present for horizons up to [`EXACT_HORIZON_LIMIT`].
    pub exact: Option<BigRational>,
    pub value: f64,
    /// Bound on `|value - true probability|`.
    pub error_bound: f64,
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("probability is finite")
}

/// Exact probability that the walk falls off within `k` steps, by counting
/// surviving paths position by position.
pub fn falloff_cdf_rational(k: u64) -> BigRational {
    // paths[p] = number of length-s paths that never fell off and end at p.
    let mut paths: Vec<BigUint> = vec![BigUint::one()];
    for _ in 0..k {
        let mut next = vec![BigUint::zero(); paths.len() + 1];
        for (p, count) in paths.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            next[p + 1] += count;
            if p > 0 {
                next[p - 1] += count;
            }
        }
        paths = next;
    }
    let survivors: BigUint = paths.iter().sum();
    let total = BigUint::one() << k;
    ratio(&total - survivors, total)
}

/// Floating-point version of [`falloff_cdf_rational`]; each step adds at
/// most one rounding error per position, bounded overall by `k·2^-50`.
pub fn falloff_cdf_float(k: u64) -> f64 {
    let mut mass = vec![1.0f64];
    for _ in 0..k {
        let mut next = vec![0.0f64; mass.len() + 1];
        for (p, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            next[p + 1] += 0.5 * m;
            if p > 0 {
                next[p - 1] += 0.5 * m;
            }
        }
        mass = next;
    }
    let survival: f64 = mass.iter().sum();
    (1.0 - survival).clamp(0.0, 1.0)
}

/// Probability that the walk falls off within `k` steps: exact up to
/// [`EXACT_HORIZON_LIMIT`], floating-point beyond.
pub fn falloff_cdf_exact(k: u64) -> FalloffProbability {
    if k <= EXACT_HORIZON_LIMIT {
        let exact = falloff_cdf_rational(k);
        let value = to_f64(&exact);
        FalloffProbability {
            horizon: k,
            exact: Some(exact),
            value,
            error_bound: 0.0,
        }
    } else {
        FalloffProbability {
            horizon: k,
            exact: None,
            value: falloff_cdf_float(k),
            error_bound: k as f64 * 2f64.powi(-50),
        }
    }
}

pub fn catalan(m: u64) -> BigUint {
    // C(j+1) = C(j) * 2(2j+1) / (j+2), exact at every step.
    (0..m).fold(BigUint::one(), |c, j| c * (2 * (2 * j + 1)) / (j + 2))
}

/// Probability that the first fall-off happens at step `2m + 1`.
pub fn first_passage(m: u64) -> BigRational {
    ratio(catalan(m), BigUint::one() << (2 * m + 1))
}

/// A Monte Carlo fall-off estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkEstimate {
    pub spec: WalkSpec,
    pub proportion: Proportion,
}

impl WalkEstimate {
    pub fn p_hat(&self) -> f64 {
        self.proportion.p_hat()
    }

    /// 95% Wilson interval.
    pub fn interval(&self) -> (f64, f64) {
        self.proportion.wilson(Z_95)
    }
}

/// Streams single random bits, lowest bit of each word first.
struct Bits<'a, R: RngCore> {
    rng: &'a mut R,
    word: u64,
    left: u32,
}

impl<'a, R: RngCore> Bits<'a, R> {
    fn new(rng: &'a mut R) -> Self {
        Self { rng, word: 0, left: 0 }
    }

    fn take(&mut self, width: u32) -> u64 {
        if self.left < width {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let out = self.word & ((1 << width) - 1);
        self.word >>= width;
        self.left -= width;
        out
    }
}

/// Whether a 1D walk falls off within `k` steps. Bit 1 moves right.
fn walk_1d_falls<R: RngCore>(rng: &mut R, k: u64) -> bool {
    let mut bits = Bits::new(rng);
    let mut pos: u64 = 0;
    for _ in 0..k {
        if bits.take(1) == 1 {
            pos += 1;
        } else if pos == 0 {
            return true;
        } else {
            pos -= 1;
        }
    }
    false
}

/// Whether a quarter-plane walk from the corner leaves it within `k` steps.
/// Two bits per step select +x, -x, +y, -y.
fn walk_2d_falls<R: RngCore>(rng: &mut R, k: u64) -> bool {
    let mut bits = Bits::new(rng);
    let (mut x, mut y): (u64, u64) = (0, 0);
    for _ in 0..k {
        match bits.take(2) {
            0 => x += 1,
            1 if x == 0 => return true,
            1 => x -= 1,
            2 => y += 1,
            _ if y == 0 => return true,
            _ => y -= 1,
        }
    }
    false
}

fn estimate(spec: WalkSpec, falls: fn(&mut crate::sampler::TrialStream, u64) -> bool) -> WalkEstimate {
    let hits = (0..spec.trials)
        .into_par_iter()
        .filter(|&i| falls(&mut trial_stream(spec.master_seed, i), spec.steps))
        .count() as u64;
    WalkEstimate {
        spec,
        proportion: Proportion::new(spec.trials, hits),
    }
}

pub fn falloff_mc(spec: WalkSpec) -> Result<WalkEstimate, WalkError> {
    match spec.dimension {
        1 => Ok(estimate(spec, walk_1d_falls)),
        d => Err(WalkError::Dimension(d)),
    }
}

pub fn falloff2d_mc(spec: WalkSpec) -> Result<WalkEstimate, WalkError> {
    match spec.dimension {
        2 => Ok(estimate(spec, walk_2d_falls)),
        d => Err(WalkError::Dimension(d)),
    }
}

/// Dispatches on `spec.dimension`.
pub fn walk_mc(spec: WalkSpec) -> Result<WalkEstimate, WalkError> {
    match spec.dimension {
        1 => falloff_mc(spec),
        2 => falloff2d_mc(spec),
        d => Err(WalkError::Dimension(d)),
    }
}
