//! Seeded synthetic workloads for tests and benchmarks.

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dynamizer::{UpdateSequence, UpdateStep};
use crate::error::{Error, Result};
use crate::setsystem::{ElementId, SetId, SetSystem};

/// Shape of a random set system. Each element joins between `min_freq` and
/// `max_freq` distinct sets; set `i` is picked with weight `(i + 1)^-skew`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub elements: usize,
    pub sets: usize,
    pub min_freq: usize,
    pub max_freq: usize,
    pub skew: f64,
}

impl SynthConfig {
    /// Frequency range around `ln n`, mild skew.
    pub fn high_frequency(elements: usize, sets: usize) -> Self {
        let f = ((elements.max(2) as f64).ln().ceil() as usize).clamp(2, sets.max(2));
        SynthConfig {
            elements,
            sets,
            min_freq: f.min(sets),
            max_freq: (2 * f).min(sets),
            skew: 0.8,
        }
    }
}

fn below(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

pub fn random_system(cfg: &SynthConfig, seed: u64) -> Result<SetSystem> {
    if cfg.elements == 0 {
        return Err(Error::NoElements);
    }
    if cfg.sets == 0 || cfg.min_freq == 0 || cfg.min_freq > cfg.max_freq || cfg.max_freq > cfg.sets
    {
        return Err(Error::Invariant(format!(
            "bad synthetic shape: {} sets, frequency {}..={}",
            cfg.sets, cfg.min_freq, cfg.max_freq
        )));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut cumulative = Vec::with_capacity(cfg.sets);
    let mut total = 0.0;
    for i in 0..cfg.sets {
        total += ((i + 1) as f64).powf(-cfg.skew);
        cumulative.push(total);
    }
    let mut incidence = Vec::with_capacity(cfg.elements);
    for _ in 0..cfg.elements {
        let f = cfg.min_freq + below(&mut rng, cfg.max_freq - cfg.min_freq + 1);
        let mut sets: Vec<SetId> = Vec::with_capacity(f);
        while sets.len() < f {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * total;
            let s = cumulative.partition_point(|&c| c <= u).min(cfg.sets - 1) as SetId;
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
        sets.sort_unstable();
        incidence.push(sets);
    }
    SetSystem::from_incidence(cfg.sets, incidence)
}

/// A valid update sequence of `steps` operations that keeps at most `n_cap`
/// elements active. Elements may be reinserted after deletion.
/// Inserts with probability `insert_bias` whenever both moves are legal.
pub fn random_walk(
    num_elements: usize,
    n_cap: usize,
    steps: usize,
    insert_bias: f64,
    seed: u64,
) -> UpdateSequence {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let n_cap = n_cap.clamp(1, num_elements.max(1));
    let mut active: Vec<ElementId> = Vec::new();
    let mut inactive: Vec<ElementId> = (0..num_elements as ElementId).collect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let can_insert = active.len() < n_cap && !inactive.is_empty();
        let insert = if active.is_empty() {
            true
        } else if !can_insert {
            false
        } else {
            ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64) < insert_bias
        };
        if insert {
            let e = inactive.swap_remove(below(&mut rng, inactive.len()));
            active.push(e);
            out.push(UpdateStep::insert(e));
        } else {
            let e = active.swap_remove(below(&mut rng, active.len()));
            inactive.push(e);
            out.push(UpdateStep::delete(e));
        }
    }
    UpdateSequence {
        x: num_elements,
        n_cap,
        seed,
        steps: out,
    }
}
