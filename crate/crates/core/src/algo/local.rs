//! Per-set relaxation: after every update no covering set is negative dirty
//! (`|cov(s)| < beta^(lev(s)-1)`) and no set is `j`-positive dirty
//! (`|N_j(s)| >= beta^(j+1)`). Insertions start a rising phase over the
//! sets containing the element, deletions a falling phase on its owner; the
//! two phases alternate until both conditions hold everywhere.

use std::sync::Arc;

use super::{check_coverage, Algorithm, DynamicCover, StepReport};
use crate::dynamizer::{Op, UpdateStep};
use crate::error::{Error, Result};
use crate::levels::LevelState;
use crate::setsystem::{SetId, SetSystem};

/// What the last update's cleanup did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhaseTrace {
    /// Rising and falling phases run, in total.
    pub phases: usize,
    /// Highest level `j` at which some set rose, one entry per rising phase
    /// that actually raised something.
    pub rising_levels: Vec<i32>,
}

pub struct LocalCover {
    sys: Arc<SetSystem>,
    level: LevelState,
    trace: PhaseTrace,
}

impl LocalCover {
    pub fn new(sys: Arc<SetSystem>, beta: f64, n_cap: usize) -> Result<Self> {
        let level = LevelState::new(&sys, beta, n_cap)?;
        Ok(LocalCover {
            sys,
            level,
            trace: PhaseTrace::default(),
        })
    }

    pub fn state(&self) -> &LevelState {
        &self.level
    }

    pub fn last_trace(&self) -> &PhaseTrace {
        &self.trace
    }

    /// Raises every positive-dirty set in `sets`, highest `j` first; returns
    /// the former owners of reassigned elements.
    pub fn rising_phase(&mut self, sets: &[SetId]) -> Vec<SetId> {
        let sys = Arc::clone(&self.sys);
        let mut sets = sets.to_vec();
        sets.sort_unstable();
        sets.dedup();
        self.trace.phases += 1;
        let mut losers = Vec::new();
        let mut top_rise = None;
        // Rising only removes elements from low levels, so a set's highest
        // dirty level never grows during the scan and the scan can jump
        // straight to the next level where anything is dirty.
        let mut bound = i32::MAX;
        loop {
            let j = sets
                .iter()
                .filter_map(|&s| self.level.pd_level(s, 1))
                .filter(|&j| j < bound)
                .max();
            let Some(j) = j else { break };
            for &s in &sets {
                if self.level.pd_level(s, 1) == Some(j) {
                    let out = self.level.rise(&sys, s, j);
                    losers.extend(out.losers.into_iter().filter(|&t| t != s));
                    top_rise = top_rise.max(Some(j));
                }
            }
            bound = j;
        }
        if let Some(j) = top_rise {
            self.trace.rising_levels.push(j);
        }
        losers.sort_unstable();
        losers.dedup();
        losers
    }

    /// Drops every negative-dirty set in `sets` to the level its `cov`
    /// supports; returns all sets containing an element that moved down.
    pub fn falling_phase(&mut self, sets: &[SetId]) -> Vec<SetId> {
        let sys = Arc::clone(&self.sys);
        let mut sets = sets.to_vec();
        sets.sort_unstable();
        sets.dedup();
        self.trace.phases += 1;
        let mut next = Vec::new();
        for s in sets {
            if !self.level.is_nd(s, 1) {
                continue;
            }
            let target = self.level.scale().level_of(self.level.cov(s).len() as u64);
            self.level.relevel(&sys, s, target);
            for &e in self.level.cov(s) {
                next.extend_from_slice(sys.sets_of(e));
            }
        }
        next.sort_unstable();
        next.dedup();
        next
    }

    fn settle(&mut self, mut rising: Option<Vec<SetId>>, mut falling: Option<Vec<SetId>>) -> Result<()> {
        // Every rising phase lowers the highest possible dirty level, so the
        // alternation is bounded by the number of levels.
        let limit = 2 * (self.level.level_cap() as usize + 3);
        loop {
            if let Some(sets) = rising.take() {
                let out = self.rising_phase(&sets);
                if out.is_empty() {
                    return Ok(());
                }
                falling = Some(out);
            }
            if let Some(sets) = falling.take() {
                let out = self.falling_phase(&sets);
                if out.is_empty() {
                    return Ok(());
                }
                rising = Some(out);
            }
            if self.trace.phases > limit {
                return Err(Error::Invariant(format!(
                    "cleanup did not settle after {} phases",
                    self.trace.phases
                )));
            }
        }
    }
}

impl DynamicCover for LocalCover {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Local
    }

    fn system(&self) -> &SetSystem {
        &self.sys
    }

    fn update(&mut self, step: UpdateStep) -> Result<StepReport> {
        let sys = Arc::clone(&self.sys);
        let e = step.element;
        self.trace = PhaseTrace::default();
        self.level.begin_step();
        match step.op {
            Op::Insert => {
                self.level.insert_at_highest(&sys, e)?;
                self.settle(Some(sys.sets_of(e).to_vec()), None)?;
            }
            Op::Delete => {
                self.level.check_deletable(e)?;
                let (owner, _) = self.level.detach(&sys, e);
                self.level.deactivate(e);
                self.settle(None, Some(vec![owner]))?;
            }
        }
        Ok(StepReport {
            cover_size: self.level.cover_size(),
            recourse: self.level.step_recourse(),
            elapsed_ns: 0,
            rebuild_fired: false,
        })
    }

    fn cover(&self) -> Vec<SetId> {
        self.level.cover()
    }

    fn cover_size(&self) -> usize {
        self.level.cover_size()
    }

    fn check(&self) -> Result<(), String> {
        self.level.validate(&self.sys)?;
        let report = self.level.check_properties(1, 1);
        if let Some(&(s, c, l)) = report.property1_violations.first() {
            return Err(format!("set {} is negative dirty: |cov| = {c} at level {l}", s + 1));
        }
        if let Some(&(s, j, c)) = report.property2_violations.first() {
            return Err(format!("set {} is {j}-positive dirty: |N_{j}| = {c}", s + 1));
        }
        check_coverage(&self.sys, self.level.active_elements(), |s| self.level.in_cover(s))
    }
}
