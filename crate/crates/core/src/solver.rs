//! QUBO minimization: exhaustive enumeration (the ground-truth oracle) and
//! Metropolis simulated annealing.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::QuboModel;
use crate::scalar::Scalar;

/// Name of the generator recorded in sample metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = restart index";

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 26;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("model has {dimension} bits; exhaustive search is capped at {cap}")]
    DimensionTooLarge { dimension: usize, cap: usize },
    #[error("invalid annealing schedule: {0}")]
    InvalidSchedule(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample<T> {
    pub bits: Vec<bool>,
    pub energy: T,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverInfo {
    pub solver: String,
    pub rng: Option<String>,
    pub seed: Option<u64>,
    pub states_evaluated: u128,
}

/// Samples in ascending energy, ties broken by the lexicographically
/// smallest bitstring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet<T> {
    pub records: Vec<Sample<T>>,
    pub info: SolverInfo,
}

fn order<T: Scalar>(a: &(T, Vec<bool>), b: &(T, Vec<bool>)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.1.cmp(&b.1))
}

impl<T: Scalar> SampleSet<T> {
    /// Merges raw `(energy, bits)` observations, counting duplicates.
    pub fn from_observations(mut obs: Vec<(T, Vec<bool>)>, info: SolverInfo) -> Self {
        obs.sort_by(order);
        let mut records: Vec<Sample<T>> = Vec::new();
        for (energy, bits) in obs {
            match records.last_mut() {
                Some(last) if last.bits == bits => last.occurrences += 1,
                _ => records.push(Sample {
                    bits,
                    energy,
                    occurrences: 1,
                }),
            }
        }
        Self { records, info }
    }

    pub fn best(&self) -> Option<&Sample<T>> {
        self.records.first()
    }

    /// Number of observations (across duplicates) whose energy equals `energy`.
    pub fn count_at(&self, energy: T) -> usize {
        self.records
            .iter()
            .filter(|r| r.energy == energy)
            .map(|r| r.occurrences)
            .sum()
    }

    pub fn total_occurrences(&self) -> usize {
        self.records.iter().map(|r| r.occurrences).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveConfig {
    pub max_dimension: usize,
    /// How many of the lowest states to keep.
    pub keep: usize,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        Self {
            max_dimension: DEFAULT_EXHAUSTIVE_CAP,
            keep: 16,
        }
    }
}

/// Bounded list of the lowest `(energy, lexicographic key)` states.
struct Lowest<T> {
    keep: usize,
    items: Vec<(T, u64, u64)>,
}

impl<T: Scalar> Lowest<T> {
    fn new(keep: usize) -> Self {
        Self {
            keep,
            items: Vec::with_capacity(keep + 1),
        }
    }

    fn cmp(a: &(T, u64, u64), b: &(T, u64, u64)) -> Ordering {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    }

    #[inline]
    fn offer(&mut self, energy: T, key: u64, state: u64) {
        if self.items.len() == self.keep {
            let worst = self.items.last().expect("keep >= 1");
            if energy > worst.0 || (energy == worst.0 && key >= worst.1) {
                return;
            }
        }
        let item = (energy, key, state);
        let at = self
            .items
            .partition_point(|x| Self::cmp(x, &item) == Ordering::Less);
        self.items.insert(at, item);
        self.items.truncate(self.keep);
    }
}

fn bits_of(state: u64, n: usize) -> Vec<bool> {
    (0..n).map(|p| state >> p & 1 == 1).collect()
}

/// Key whose integer order is the lexicographic order of the bitstring
/// (bit 0 most significant).
fn lex_key(state: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        state.reverse_bits() >> (64 - n)
    }
}

const SPLIT_BITS: usize = 6;

/// Enumerates all `2^n` states in Gray-code order with incremental energy
/// updates. Deterministic regardless of thread count.
pub fn solve_exhaustive<T: Scalar>(
    model: &QuboModel<T>,
    config: &ExhaustiveConfig,
) -> Result<SampleSet<T>, SolverError> {
    let n = model.dimension;
    let cap = config.max_dimension.min(63);
    if n > cap {
        return Err(SolverError::DimensionTooLarge { dimension: n, cap });
    }
    let keep = config.keep.max(1);
    let (linear, neighbours) = model.adjacency();
    let split = n.min(SPLIT_BITS);
    let low = n - split;

    let chunks: Vec<Vec<(T, u64, u64)>> = (0u64..1 << split)
        .into_par_iter()
        .map(|chunk| {
            let mut state = chunk << low;
            let mut field: Vec<T> = linear.clone();
            for p in 0..n {
                for &(q, c) in &neighbours[p] {
                    if state >> q & 1 == 1 {
                        field[p] += c;
                    }
                }
            }
            let mut energy = model.offset();
            for p in (0..n).filter(|&p| state >> p & 1 == 1) {
                energy += linear[p];
                for &(q, c) in &neighbours[p] {
                    if q < p && state >> q & 1 == 1 {
                        energy += c;
                    }
                }
            }
            let mut best = Lowest::new(keep);
            best.offer(energy, lex_key(state, n), state);
            for g in 1u64..1 << low {
                let p = g.trailing_zeros() as usize;
                let was_on = state >> p & 1 == 1;
                state ^= 1 << p;
                if was_on {
                    energy -= field[p];
                    for &(q, c) in &neighbours[p] {
                        field[q] -= c;
                    }
                } else {
                    energy += field[p];
                    for &(q, c) in &neighbours[p] {
                        field[q] += c;
                    }
                }
                best.offer(energy, lex_key(state, n), state);
            }
            best.items
        })
        .collect();

    let mut merged = Lowest::new(keep);
    for items in chunks {
        for (e, key, state) in items {
            merged.offer(e, key, state);
        }
    }
    let records = merged
        .items
        .into_iter()
        .map(|(energy, _, state)| Sample {
            bits: bits_of(state, n),
            energy,
            occurrences: 1,
        })
        .collect();
    Ok(SampleSet {
        records,
        info: SolverInfo {
            solver: "exhaustive".into(),
            rng: None,
            seed: None,
            states_evaluated: 1u128 << n,
        },
    })
}

/// Geometric cooling from `initial_temperature` to `final_temperature`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    pub final_temperature: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl AnnealSchedule {
    pub const DEFAULT_FINAL_TEMPERATURE: f64 = 0.1;
    pub const DEFAULT_SWEEPS: usize = 2_000;
    pub const DEFAULT_RESTARTS: usize = 20;

    /// Default schedule: start at the largest coefficient magnitude so early
    /// single flips are accepted almost always.
    pub fn for_model<T: Scalar>(model: &QuboModel<T>, seed: u64) -> Self {
        let hottest = model.max_abs_coefficient().to_f64_lossy();
        Self {
            initial_temperature: hottest.max(Self::DEFAULT_FINAL_TEMPERATURE),
            final_temperature: Self::DEFAULT_FINAL_TEMPERATURE,
            sweeps: Self::DEFAULT_SWEEPS,
            restarts: Self::DEFAULT_RESTARTS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidSchedule(m.to_string()));
        // is_finite also rejects NaN
        if !self.final_temperature.is_finite() || self.final_temperature <= 0.0 {
            return bad("final temperature must be positive");
        }
        if !self.initial_temperature.is_finite()
            || self.initial_temperature < self.final_temperature
        {
            return bad("initial temperature must be at least the final temperature");
        }
        if self.sweeps == 0 {
            return bad("sweeps must be at least 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        Ok(())
    }

    pub fn temperature(&self, sweep: usize) -> f64 {
        if self.sweeps <= 1 {
            return self.final_temperature;
        }
        let t = sweep as f64 / (self.sweeps - 1) as f64;
        self.initial_temperature * (self.final_temperature / self.initial_temperature).powf(t)
    }
}

fn anneal_chain<T: Scalar>(
    model: &QuboModel<T>,
    linear: &[T],
    neighbours: &[Vec<(usize, T)>],
    schedule: &AnnealSchedule,
    chain: usize,
) -> (T, Vec<bool>) {
    let n = model.dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    rng.set_stream(chain as u64);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut field: Vec<T> = linear.to_vec();
    for p in 0..n {
        for &(q, c) in &neighbours[p] {
            if bits[q] {
                field[p] += c;
            }
        }
    }
    let mut energy = model.terms.evaluate(&bits);
    let mut best = (energy, bits.clone());
    let mut order: Vec<usize> = (0..n).collect();
    for sweep in 0..schedule.sweeps {
        let temperature = schedule.temperature(sweep);
        order.shuffle(&mut rng);
        for &p in &order {
            let delta = if bits[p] { -field[p] } else { field[p] };
            let accept = delta <= T::zero()
                || rng.random::<f64>() < (-delta.to_f64_lossy() / temperature).exp();
            if !accept {
                continue;
            }
            let on = !bits[p];
            bits[p] = on;
            energy += delta;
            for &(q, c) in &neighbours[p] {
                if on {
                    field[q] += c;
                } else {
                    field[q] -= c;
                }
            }
            if energy < best.0 {
                best = (energy, bits.clone());
            }
        }
    }
    // re-evaluate so float models report drift-free energies
    let exact = model.terms.evaluate(&best.1);
    (exact, best.1)
}

/// Runs `restarts` independent Metropolis chains and returns the lowest
/// state each one visited.
pub fn solve_simulated_annealing<T: Scalar>(
    model: &QuboModel<T>,
    schedule: &AnnealSchedule,
) -> Result<SampleSet<T>, SolverError> {
    schedule.validate()?;
    let (linear, neighbours) = model.adjacency();
    let observations: Vec<(T, Vec<bool>)> = (0..schedule.restarts)
        .into_par_iter()
        .map(|chain| anneal_chain(model, &linear, &neighbours, schedule, chain))
        .collect();
    Ok(SampleSet::from_observations(
        observations,
        SolverInfo {
            solver: "simulated-annealing".into(),
            rng: Some(RNG_ALGORITHM.into()),
            seed: Some(schedule.seed),
            states_evaluated: (schedule.restarts * schedule.sweeps * model.dimension) as u128,
        },
    ))
}
