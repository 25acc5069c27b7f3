//! Ground truth for small instances: an exact minimum cover and a baseline
//! that reruns the static greedy after every update.

use std::sync::Arc;

use crate::algo::{check_coverage, symmetric_difference, Algorithm, DynamicCover, StepReport};
use crate::dynamizer::{Op, UpdateStep};
use crate::error::{Error, Result};
use crate::greedy::static_greedy;
use crate::levels::LevelState;
use crate::setsystem::{ElementId, SetId, SetSystem};

/// Hard limits for [`opt_cover`]; exceeding one is an error, never an
/// approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub elements: usize,
    pub sets: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            elements: 20,
            sets: 24,
        }
    }
}

/// The universe as bit positions and every set meeting it as a mask.
fn masks(sys: &SetSystem, universe: &[ElementId]) -> Result<(u64, Vec<u64>)> {
    let mut universe = universe.to_vec();
    universe.sort_unstable();
    universe.dedup();
    if universe.len() > 64 {
        return Err(Error::BudgetExceeded(format!(
            "{} elements exceed the 64-bit mask width",
            universe.len()
        )));
    }
    let mut by_set: Vec<(SetId, u64)> = Vec::new();
    for (bit, &e) in universe.iter().enumerate() {
        if e as usize >= sys.num_elements() {
            return Err(Error::UnknownElement(e, sys.num_elements()));
        }
        for &s in sys.sets_of(e) {
            match by_set.iter_mut().find(|(t, _)| *t == s) {
                Some((_, m)) => *m |= 1 << bit,
                None => by_set.push((s, 1 << bit)),
            }
        }
    }
    let full = if universe.len() == 64 {
        u64::MAX
    } else {
        (1u64 << universe.len()) - 1
    };
    Ok((full, by_set.into_iter().map(|(_, m)| m).collect()))
}

fn greedy_bound(full: u64, sets: &[u64]) -> usize {
    let mut covered = 0u64;
    let mut used = 0;
    while covered != full {
        let best = sets
            .iter()
            .map(|&m| m & !covered)
            .max_by_key(|m| m.count_ones())
            .unwrap_or(0);
        covered |= best;
        used += 1;
    }
    used
}

struct Search<'a> {
    full: u64,
    sets: &'a [u64],
    /// `containing[bit]`: indices of sets holding that element.
    containing: Vec<Vec<usize>>,
    max_size: u32,
    best: usize,
}

impl Search<'_> {
    fn run(&mut self, covered: u64, depth: usize) {
        if covered == self.full {
            self.best = self.best.min(depth);
            return;
        }
        let left = (self.full & !covered).count_ones();
        if depth + left.div_ceil(self.max_size) as usize >= self.best {
            return;
        }
        // Branch on the uncovered element with the fewest options.
        let mut pick = usize::MAX;
        let mut options = usize::MAX;
        let mut rest = self.full & !covered;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.containing[bit].len() < options {
                options = self.containing[bit].len();
                pick = bit;
            }
        }
        let mut branches = self.containing[pick].clone();
        branches.sort_by_key(|&i| std::cmp::Reverse((self.sets[i] & !covered).count_ones()));
        for i in branches {
            self.run(covered | self.sets[i], depth + 1);
        }
    }
}

/// Exact minimum number of sets covering `universe`.
pub fn opt_cover(sys: &SetSystem, universe: &[ElementId], budget: OracleBudget) -> Result<usize> {
    let mut distinct = universe.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() > budget.elements {
        return Err(Error::BudgetExceeded(format!(
            "{} elements, budget allows {}",
            distinct.len(),
            budget.elements
        )));
    }
    let (full, sets) = masks(sys, &distinct)?;
    let n = full.count_ones() as usize;
    if sets.len() > budget.sets {
        return Err(Error::BudgetExceeded(format!(
            "{} candidate sets, budget allows {}",
            sets.len(),
            budget.sets
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let mut containing = vec![Vec::new(); n];
    for (i, &m) in sets.iter().enumerate() {
        let mut rest = m;
        while rest != 0 {
            containing[rest.trailing_zeros() as usize].push(i);
            rest &= rest - 1;
        }
    }
    let mut search = Search {
        full,
        sets: &sets,
        containing,
        max_size: sets.iter().map(|m| m.count_ones()).max().unwrap_or(1),
        best: greedy_bound(full, &sets),
    };
    search.run(0, 0);
    Ok(search.best)
}

/// Minimum cover by enumerating every subset of the candidate sets. Meant
/// for cross-checking [`opt_cover`]; refuses more than 20 candidates.
pub fn exhaustive_opt(sys: &SetSystem, universe: &[ElementId]) -> Result<usize> {
    let (full, sets) = masks(sys, universe)?;
    if sets.len() > 20 {
        return Err(Error::BudgetExceeded(format!(
            "{} candidate sets, enumeration allows 20",
            sets.len()
        )));
    }
    let mut best = usize::MAX;
    for pick in 0u32..(1 << sets.len()) {
        let size = pick.count_ones() as usize;
        if size >= best {
            continue;
        }
        let mut covered = 0;
        let mut rest = pick;
        while rest != 0 {
            covered |= sets[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        if covered == full {
            best = size;
        }
    }
    Ok(best)
}

/// Reruns the static greedy on the whole active universe after each update.
pub struct NaiveCover {
    sys: Arc<SetSystem>,
    state: LevelState,
    cover: Vec<SetId>,
    active: Vec<ElementId>,
}

impl NaiveCover {
    pub fn new(sys: Arc<SetSystem>, beta: f64, n_cap: usize) -> Result<Self> {
        let state = LevelState::new(&sys, beta, n_cap)?;
        Ok(NaiveCover {
            sys,
            state,
            cover: Vec::new(),
            active: Vec::new(),
        })
    }

    pub fn state(&self) -> &LevelState {
        &self.state
    }
}

impl DynamicCover for NaiveCover {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Naive
    }

    fn system(&self) -> &SetSystem {
        &self.sys
    }

    fn update(&mut self, step: UpdateStep) -> Result<StepReport> {
        let sys = Arc::clone(&self.sys);
        let e = step.element;
        match step.op {
            Op::Insert => {
                if e as usize >= sys.num_elements() {
                    return Err(Error::UnknownElement(e, sys.num_elements()));
                }
                if self.state.is_active(e) {
                    return Err(Error::DuplicateInsert(e));
                }
                if self.active.len() >= self.state.capacity() {
                    return Err(Error::CapacityExceeded(self.state.capacity()));
                }
                self.active.push(e);
            }
            Op::Delete => {
                self.state.check_deletable(e)?;
                let pos = self.active.iter().position(|&x| x == e).unwrap();
                self.active.remove(pos);
            }
        }
        self.state.reset(&sys);
        let outcome = static_greedy(&sys, &self.active, None, &mut self.state)?;
        let recourse = symmetric_difference(&self.cover, &outcome.cover);
        self.cover = outcome.cover;
        Ok(StepReport {
            cover_size: self.cover.len(),
            recourse,
            elapsed_ns: 0,
            rebuild_fired: true,
        })
    }

    fn cover(&self) -> Vec<SetId> {
        self.cover.clone()
    }

    fn cover_size(&self) -> usize {
        self.cover.len()
    }

    fn check(&self) -> Result<(), String> {
        self.state.validate(&self.sys)?;
        check_coverage(&self.sys, self.active.iter().copied(), |s| {
            self.cover.binary_search(&s).is_ok()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::{del, ins};
    use crate::setsystem::fixtures::fix1;

    #[test]
    fn fix1_optimum() {
        let sys = fix1();
        let b = OracleBudget::default();
        assert_eq!(opt_cover(&sys, &[0, 1, 2, 3], b).unwrap(), 2);
        assert_eq!(opt_cover(&sys, &[], b).unwrap(), 0);
        assert_eq!(opt_cover(&sys, &[3], b).unwrap(), 1);
        assert_eq!(exhaustive_opt(&sys, &[0, 1, 2, 3]).unwrap(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let sets: Vec<Vec<ElementId>> = (0..30).map(|e| vec![e]).collect();
        let sys = SetSystem::from_sets(30, &sets).unwrap();
        let all: Vec<ElementId> = (0..30).collect();
        let err = opt_cover(&sys, &all, OracleBudget::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
        let few: Vec<ElementId> = (0..10).collect();
        assert_eq!(opt_cover(&sys, &few, OracleBudget::default()).unwrap(), 10);
        let tight = OracleBudget {
            elements: 20,
            sets: 5,
        };
        assert!(opt_cover(&sys, &few, tight).is_err());
    }

    #[test]
    fn naive_follows_greedy() {
        let sys = Arc::new(fix1());
        let mut nc = NaiveCover::new(Arc::clone(&sys), 2.0, 4).unwrap();
        for e in 0..4 {
            nc.update(ins(e)).unwrap();
            let mut fresh = LevelState::new(&sys, 2.0, 4).unwrap();
            let prefix: Vec<ElementId> = (0..=e).collect();
            let out = static_greedy(&sys, &prefix, None, &mut fresh).unwrap();
            assert_eq!(nc.cover(), out.cover);
            nc.check().unwrap();
        }
        assert_eq!(nc.cover(), vec![0, 1]);
        let rep = nc.update(del(3)).unwrap();
        assert_eq!(nc.cover(), vec![0]);
        assert_eq!(rep.recourse, 1);
        for e in 0..3 {
            nc.update(del(e)).unwrap();
        }
        assert!(nc.cover().is_empty());
        assert_eq!(nc.update(del(0)), Err(Error::PhantomDelete(0)));
    }
}
