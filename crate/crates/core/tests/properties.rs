use std::sync::Arc;

use proptest::prelude::*;

use setcover::oracle::exhaustive_opt;
use setcover::synth::random_walk;
use setcover::{
    dynamize, opt_cover, static_greedy, validate_sequence, Algorithm, ElementId, LevelState,
    OracleBudget, SetSystem, UpdateSequence,
};

/// A system over `n` elements whose sets are arbitrary, plus singleton sets
/// for any element no set reaches.
fn system() -> impl Strategy<Value = SetSystem> {
    (2usize..16).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n as ElementId, 1..=n), 1..10)
            .prop_map(move |sets| {
                let mut sets: Vec<Vec<ElementId>> =
                    sets.into_iter().map(|s| s.into_iter().collect()).collect();
                for e in 0..n as ElementId {
                    if !sets.iter().any(|s| s.contains(&e)) {
                        sets.push(vec![e]);
                    }
                }
                SetSystem::from_sets(n, &sets).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_cover_is_valid(sys in system(), beta in 1.05f64..3.0) {
        let n = sys.num_elements();
        let all: Vec<ElementId> = (0..n as ElementId).collect();
        let mut state = LevelState::new(&sys, beta, n).unwrap();
        let out = static_greedy(&sys, &all, None, &mut state).unwrap();
        prop_assert!(state.validate(&sys).is_ok());
        prop_assert!(state.check_properties(0, 0).passed);
        for e in 0..n as ElementId {
            prop_assert!(sys.sets_of(e).iter().any(|s| out.cover.contains(s)));
        }
        let opt = opt_cover(&sys, &all, OracleBudget { elements: 16, sets: 40 }).unwrap();
        prop_assert!(opt <= out.cover.len());
    }

    #[test]
    fn branch_and_bound_matches_enumeration(sys in system()) {
        let all: Vec<ElementId> = (0..sys.num_elements() as ElementId).collect();
        let budget = OracleBudget { elements: 16, sets: 40 };
        if let Ok(brute) = exhaustive_opt(&sys, &all) {
            prop_assert_eq!(opt_cover(&sys, &all, budget).unwrap(), brute);
        }
    }

    #[test]
    fn dynamized_sequences_validate(sys in system(), seed in any::<u64>()) {
        let seq = dynamize(&sys, seed).unwrap();
        prop_assert_eq!(validate_sequence(&seq, &sys), Ok(()));
        prop_assert_eq!(UpdateSequence::parse(&seq.to_text()).unwrap(), seq);
    }

    #[test]
    fn maintainers_cover_random_walks(
        sys in system(),
        algo in prop::sample::select(vec![
            Algorithm::Robust,
            Algorithm::Local,
            Algorithm::Partial,
            Algorithm::Global,
        ]),
        beta in 1.1f64..1.9,
        seed in any::<u64>(),
    ) {
        let sys = Arc::new(sys);
        let n = sys.num_elements();
        let cap = n.div_ceil(2);
        let seq = random_walk(n, cap, 60, 0.6, seed);
        let mut engine = algo.build(Arc::clone(&sys), beta, cap).unwrap();
        for &step in &seq.steps {
            engine.update(step).unwrap();
            prop_assert_eq!(engine.check(), Ok(()));
        }
    }
}
