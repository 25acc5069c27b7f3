//! Interval-based maintainer: patch insertions with any containing set and
//! recompute the whole cover with the static greedy every
//! `(beta - 1) * |C|` steps.

use std::sync::Arc;

use super::{check_coverage, symmetric_difference, Algorithm, DynamicCover, StepReport};
use crate::dynamizer::{Op, UpdateStep};
use crate::error::{Error, Result};
use crate::greedy::static_greedy;
use crate::levels::LevelState;
use crate::setsystem::{ElementId, SetId, SetSystem};

pub struct RobustCover {
    sys: Arc<SetSystem>,
    /// Assignment produced by the last rebuild; stale in between.
    base: LevelState,
    in_cover: Vec<bool>,
    cover: Vec<SetId>,
    active: Vec<bool>,
    active_list: Vec<ElementId>,
    active_pos: Vec<u32>,
    countdown: usize,
    last_interval: usize,
    beta: f64,
}

impl RobustCover {
    pub fn new(sys: Arc<SetSystem>, beta: f64, n_cap: usize) -> Result<Self> {
        Algorithm::Robust.check_beta(beta)?;
        let base = LevelState::new(&sys, beta, n_cap)?;
        let n = sys.num_elements();
        let m = sys.num_sets();
        Ok(RobustCover {
            base,
            in_cover: vec![false; m],
            cover: Vec::new(),
            active: vec![false; n],
            active_list: Vec::new(),
            active_pos: vec![0; n],
            countdown: 1,
            last_interval: 1,
            beta,
            sys,
        })
    }

    /// Steps left before the next rebuild.
    pub fn countdown(&self) -> usize {
        self.countdown
    }

    /// Length of the interval set by the most recent rebuild.
    pub fn last_interval(&self) -> usize {
        self.last_interval
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `max(1, ceil((beta - 1) * cover_size))`.
    pub fn interval_for(beta: f64, cover_size: usize) -> usize {
        let x = (beta - 1.0) * cover_size as f64;
        let r = x.round();
        let len = if (x - r).abs() <= 1e-9 * x.max(1.0) {
            r
        } else {
            x.ceil()
        };
        (len as usize).max(1)
    }

    fn add_to_cover(&mut self, s: SetId) {
        self.in_cover[s as usize] = true;
        self.cover.push(s);
    }

    fn rebuild(&mut self) -> Result<()> {
        let sys = Arc::clone(&self.sys);
        self.base.reset(&sys);
        let outcome = static_greedy(&sys, &self.active_list, None, &mut self.base)?;
        for &s in &self.cover {
            self.in_cover[s as usize] = false;
        }
        for &s in &outcome.cover {
            self.in_cover[s as usize] = true;
        }
        self.cover = outcome.cover;
        Ok(())
    }
}

impl DynamicCover for RobustCover {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Robust
    }

    fn system(&self) -> &SetSystem {
        &self.sys
    }

    fn update(&mut self, step: UpdateStep) -> Result<StepReport> {
        let e = step.element;
        let ei = e as usize;
        if ei >= self.active.len() {
            return Err(Error::UnknownElement(e, self.active.len()));
        }
        let mut recourse = 0;
        match step.op {
            Op::Insert => {
                if self.active[ei] {
                    return Err(Error::DuplicateInsert(e));
                }
                if self.active_list.len() >= self.base.capacity() {
                    return Err(Error::CapacityExceeded(self.base.capacity()));
                }
                self.active[ei] = true;
                self.active_pos[ei] = self.active_list.len() as u32;
                self.active_list.push(e);
                let sets = self.sys.sets_of(e);
                if !sets.iter().any(|&s| self.in_cover[s as usize]) {
                    self.add_to_cover(sets[0]);
                    recourse += 1;
                }
            }
            Op::Delete => {
                if !self.active[ei] {
                    return Err(Error::PhantomDelete(e));
                }
                self.active[ei] = false;
                let pos = self.active_pos[ei] as usize;
                self.active_list.swap_remove(pos);
                if let Some(&moved) = self.active_list.get(pos) {
                    self.active_pos[moved as usize] = pos as u32;
                }
            }
        }
        self.countdown -= 1;
        let mut rebuild_fired = false;
        if self.countdown == 0 {
            // An insertion patch and the rebuild in the same step can cancel;
            // measure the step as a whole.
            let before: Vec<SetId> = if recourse > 0 {
                self.cover[..self.cover.len() - 1].to_vec()
            } else {
                self.cover.clone()
            };
            self.rebuild()?;
            rebuild_fired = true;
            recourse = symmetric_difference(&before, &self.cover);
            self.last_interval = Self::interval_for(self.beta, self.cover.len());
            self.countdown = self.last_interval;
        }
        Ok(StepReport {
            cover_size: self.cover.len(),
            recourse,
            elapsed_ns: 0,
            rebuild_fired,
        })
    }

    fn cover(&self) -> Vec<SetId> {
        let mut c = self.cover.clone();
        c.sort_unstable();
        c
    }

    fn cover_size(&self) -> usize {
        self.cover.len()
    }

    fn check(&self) -> Result<(), String> {
        if self.countdown == 0 {
            return Err("interval countdown reached zero without a rebuild".into());
        }
        let counted = self.in_cover.iter().filter(|&&b| b).count();
        if counted != self.cover.len() {
            return Err("cover list and membership flags disagree".into());
        }
        check_coverage(
            &self.sys,
            self.active_list.iter().copied(),
            |s| self.in_cover[s as usize],
        )
    }
}
