use std::sync::Arc;

use setcover::synth::{random_system, random_walk, SynthConfig};
use setcover::{Algorithm, SetSystem};

fn systems(count: u64) -> Vec<Arc<SetSystem>> {
    (0..count)
        .map(|seed| {
            let elements = 8 + (seed as usize * 7) % 40;
            let sets = 4 + (seed as usize * 5) % 16;
            let cfg = SynthConfig {
                elements,
                sets,
                min_freq: 1,
                max_freq: 4.min(sets),
                skew: 0.5 + (seed % 3) as f64 * 0.5,
            };
            Arc::new(random_system(&cfg, seed).unwrap())
        })
        .collect()
}

fn replay(algo: Algorithm, beta: f64, count: u64, steps: usize) {
    for (i, sys) in systems(count).into_iter().enumerate() {
        let n = sys.num_elements();
        let cap = (n / 2).max(1);
        let seq = random_walk(n, cap, steps, 0.6, 100 + i as u64);
        let mut algo_state = algo.build(Arc::clone(&sys), beta, cap).unwrap();
        algo_state.set_audit(true);
        for (k, &step) in seq.steps.iter().enumerate() {
            let rep = algo_state
                .update(step)
                .unwrap_or_else(|e| panic!("{algo} beta {beta} system {i} step {k}: {e}"));
            assert_eq!(rep.cover_size, algo_state.cover_size());
            if let Err(msg) = algo_state.check() {
                panic!("{algo} beta {beta} system {i} step {k}: {msg}");
            }
        }
    }
}

#[test]
fn local_holds_invariants() {
    for beta in [1.2, 1.9, 2.5] {
        replay(Algorithm::Local, beta, 20, 300);
    }
}

#[test]
fn partial_holds_invariants() {
    for beta in [1.2, 1.99, 3.0] {
        replay(Algorithm::Partial, beta, 20, 300);
    }
}

#[test]
fn global_holds_invariants() {
    for beta in [1.1, 1.25, 1.495, 2.0] {
        replay(Algorithm::Global, beta, 20, 300);
    }
}

#[test]
fn robust_and_naive_cover() {
    for beta in [1.1, 1.5, 1.99] {
        replay(Algorithm::Robust, beta, 20, 300);
        replay(Algorithm::Naive, beta, 10, 200);
    }
}
