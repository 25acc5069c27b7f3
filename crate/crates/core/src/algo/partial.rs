//! No positive-dirty sets, with negative dirt tracked globally.
//!
//! Every element leaving a `cov` at level `l` charges `beta^(-l)` to the dirt
//! counter of level `l`. Once the total dirt `D` reaches
//! `((beta - 1) / beta) * |C|`, the elements below a critical level are
//! re-covered with the static greedy and the counters up to that level are
//! cleared.
//!
//! Dirt is kept as integer event counts per level; `D` is evaluated from them
//! on demand.

use std::sync::Arc;

use super::{check_coverage, Algorithm, DynamicCover, StepReport};
use crate::dynamizer::{Op, UpdateStep};
use crate::error::Result;
use crate::levels::LevelState;
use crate::setsystem::{ElementId, SetId, SetSystem};

/// What one partial rebuild did; kept only while auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct RebuildRecord {
    pub i_crit: i32,
    pub dirt_before: Vec<u64>,
    pub dirt_after: Vec<u64>,
    pub elements_rebuilt: usize,
}

pub struct PartialCover {
    sys: Arc<SetSystem>,
    level: LevelState,
    dirt: Vec<u64>,
    weights: Vec<f64>,
    audit: bool,
    rebuilds: Vec<RebuildRecord>,
    audit_failures: Vec<String>,
}

/// `argmax_i (sum_{j<=i} dirt_j beta^-j) / (1 + |{s in C : lev(s) <= i}|)`,
/// ties towards the highest `i`.
///
/// `dirt[j]` is the number of dirt events at level `j` and
/// `sets_per_level[l]` the number of covering sets at level `l`.
pub fn find_critical_level(dirt: &[u64], sets_per_level: &[usize], beta: f64) -> i32 {
    let mut cumulative = 0.0;
    let mut sets = 0usize;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, &d) in dirt.iter().enumerate() {
        cumulative += d as f64 * beta.powi(-(i as i32));
        sets += sets_per_level.get(i).copied().unwrap_or(0);
        let ratio = cumulative / (1 + sets) as f64;
        if ratio >= best.0 {
            best = (ratio, i as i32);
        }
    }
    best.1
}

impl PartialCover {
    pub fn new(sys: Arc<SetSystem>, beta: f64, n_cap: usize) -> Result<Self> {
        let level = LevelState::new(&sys, beta, n_cap)?;
        let levels = level.scale().num_levels();
        let weights = (0..levels as i32).map(|l| level.scale().inverse_power(l)).collect();
        Ok(PartialCover {
            sys,
            level,
            dirt: vec![0; levels],
            weights,
            audit: false,
            rebuilds: Vec::new(),
            audit_failures: Vec::new(),
        })
    }

    pub fn state(&self) -> &LevelState {
        &self.level
    }

    /// Dirt event counts per level.
    pub fn dirt_counts(&self) -> &[u64] {
        &self.dirt
    }

    /// Total dirt `D = sum_j c_j beta^(-j)`.
    pub fn total_dirt(&self) -> f64 {
        self.dirt
            .iter()
            .zip(&self.weights)
            .map(|(&c, &w)| c as f64 * w)
            .sum()
    }

    /// `D >= ((beta - 1) / beta) |C|` with `D > 0`.
    pub fn threshold_reached(&self) -> bool {
        let d = self.total_dirt();
        let beta = self.level.beta();
        d > 0.0 && d >= (beta - 1.0) / beta * self.level.cover_size() as f64
    }

    pub fn critical_level(&self) -> i32 {
        let per_level: Vec<usize> = (0..self.dirt.len() as i32)
            .map(|l| self.level.sets_at_level(l).len())
            .collect();
        find_critical_level(&self.dirt, &per_level, self.level.beta())
    }

    /// Rebuild records since the last update (auditing only).
    pub fn last_rebuilds(&self) -> &[RebuildRecord] {
        &self.rebuilds
    }

    fn rise_dirty_containing(&mut self, e: ElementId) {
        let sys = Arc::clone(&self.sys);
        loop {
            let mut pick: Option<(i32, SetId)> = None;
            for &s in sys.sets_of(e) {
                if let Some(j) = self.level.pd_level(s, 1) {
                    if pick.map_or(true, |(bj, _)| j > bj) {
                        pick = Some((j, s));
                    }
                }
            }
            let Some((j, s)) = pick else { return };
            let out = self.level.rise(&sys, s, j);
            for (_, prev) in out.changed {
                self.dirt[prev as usize] += 1;
            }
        }
    }

    fn rebuild_until_clean(&mut self) -> Result<bool> {
        let sys = Arc::clone(&self.sys);
        let mut fired = false;
        // Each round clears at least one nonzero counter and adds no dirt.
        while self.threshold_reached() {
            let i_crit = self.critical_level();
            let snapshot = self.audit.then(|| self.snapshot_above(i_crit));
            let dirt_before = self.dirt.clone();
            let report = self.level.rebuild_below(&sys, i_crit)?;
            for c in &mut self.dirt[..=i_crit as usize] {
                *c = 0;
            }
            fired = true;
            if let Some(before) = snapshot {
                for (e, s, l) in before {
                    if self.level.asn(e) != Some(s) || self.level.elem_level(e) != l {
                        self.audit_failures.push(format!(
                            "rebuild below {i_crit} moved element {} from set {} level {l}",
                            e + 1,
                            s + 1
                        ));
                    }
                }
                self.rebuilds.push(RebuildRecord {
                    i_crit,
                    dirt_before,
                    dirt_after: self.dirt.clone(),
                    elements_rebuilt: report.elements_rebuilt(),
                });
            }
        }
        Ok(fired)
    }

    fn snapshot_above(&self, i_crit: i32) -> Vec<(ElementId, SetId, i32)> {
        self.level
            .active_elements()
            .filter(|&e| self.level.elem_level(e) > i_crit)
            .map(|e| (e, self.level.asn(e).unwrap(), self.level.elem_level(e)))
            .collect()
    }
}

impl DynamicCover for PartialCover {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Partial
    }

    fn system(&self) -> &SetSystem {
        &self.sys
    }

    fn update(&mut self, step: UpdateStep) -> Result<StepReport> {
        let sys = Arc::clone(&self.sys);
        let e = step.element;
        self.level.begin_step();
        self.rebuilds.clear();
        match step.op {
            Op::Insert => {
                self.level.insert_at_highest(&sys, e)?;
                self.rise_dirty_containing(e);
            }
            Op::Delete => {
                self.level.check_deletable(e)?;
                let (_, level) = self.level.detach(&sys, e);
                self.level.deactivate(e);
                self.dirt[level as usize] += 1;
            }
        }
        let rebuild_fired = self.rebuild_until_clean()?;
        Ok(StepReport {
            cover_size: self.level.cover_size(),
            recourse: self.level.step_recourse(),
            elapsed_ns: 0,
            rebuild_fired,
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
        let report = self.level.check_properties(0, 1);
        if let Some(&(s, j, c)) = report.property2_violations.first() {
            return Err(format!("set {} is {j}-positive dirty: |N_{j}| = {c}", s + 1));
        }
        if self.threshold_reached() {
            return Err(format!(
                "total dirt {} reached the rebuild threshold for |C| = {}",
                self.total_dirt(),
                self.level.cover_size()
            ));
        }
        if let Some(msg) = self.audit_failures.first() {
            return Err(msg.clone());
        }
        for r in &self.rebuilds {
            let cut = r.i_crit as usize;
            if r.dirt_after[..=cut].iter().any(|&c| c != 0)
                || r.dirt_after[cut + 1..] != r.dirt_before[cut + 1..]
            {
                return Err(format!("rebuild below {} cleared the wrong counters", r.i_crit));
            }
        }
        check_coverage(&self.sys, self.level.active_elements(), |s| self.level.in_cover(s))
    }

    fn set_audit(&mut self, on: bool) {
        self.audit = on;
    }
}

impl PartialCover {
    /// Test hook: error out if the recorded audit found anything.
    pub fn audit_failures(&self) -> &[String] {
        &self.audit_failures
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::{del, ins};
    use crate::error::Error;
    use crate::setsystem::fixtures::fix1;

    #[test]
    fn deletion_triggers_rebuild() {
        let mut pc = PartialCover::new(Arc::new(fix1()), 2.0, 4).unwrap();
        pc.set_audit(true);
        pc.update(ins(3)).unwrap();
        pc.update(ins(2)).unwrap();
        assert_eq!(pc.state().set_level(1), 0);
        let mut cov = pc.state().cov(1).to_vec();
        cov.sort();
        assert_eq!(cov, vec![2, 3]);
        assert_eq!(pc.total_dirt(), 0.0);

        let rep = pc.update(del(2)).unwrap();
        assert!(rep.rebuild_fired);
        assert_eq!(pc.state().cov(1), &[3]);
        assert_eq!(pc.dirt_counts()[0], 0);
        assert_eq!(pc.total_dirt(), 0.0);
        let r = &pc.last_rebuilds()[0];
        assert_eq!(r.dirt_before[0], 1);
        pc.check().unwrap();
    }

    #[test]
    fn clean_insert_leaves_dirt() {
        let mut pc = PartialCover::new(Arc::new(fix1()), 2.0, 4).unwrap();
        let rep = pc.update(ins(0)).unwrap();
        assert!(rep.recourse <= 1);
        assert!(!rep.rebuild_fired);
        assert_eq!(pc.total_dirt(), 0.0);
    }

    #[test]
    fn rising_charges_dirt() {
        let sys = Arc::new(
            SetSystem::from_sets(4, &[vec![0, 1, 2, 3], vec![0], vec![1], vec![2], vec![3]])
                .unwrap(),
        );
        let mut pc = PartialCover::new(sys, 2.0, 4).unwrap();
        pc.set_audit(true);
        for e in 0..3 {
            let rep = pc.update(ins(e)).unwrap();
            assert!(!rep.rebuild_fired);
        }
        let rep = pc.update(ins(3)).unwrap();
        // four elements left level 0 as s0 rose to level 2: D = 4 >= 0.5
        assert!(rep.rebuild_fired);
        let r = &pc.last_rebuilds()[0];
        assert_eq!(r.dirt_before[0], 4);
        assert_eq!(pc.state().set_level(0), 2);
        assert_eq!(pc.total_dirt(), 0.0);
        pc.check().unwrap();
    }

    #[test]
    fn critical_level_examples() {
        // all dirt at level 0; one covering set at level 0, none up to 4, a
        // set at level 5. Levels 0..4 tie, the highest wins.
        let dirt = [3, 0, 0, 0, 0, 0];
        let sets = [1, 0, 0, 0, 0, 1];
        assert_eq!(find_critical_level(&dirt, &sets, 2.0), 4);
        // ratio at level 5 falls below the tie
        // uniform dirt and an empty cover: the cumulative ratio only grows
        let uniform = [1u64; 6];
        assert_eq!(find_critical_level(&uniform, &[0; 6], 1.5), 5);
        // uniform dirt with the single covering set at the top level: the
        // denominator doubles at the top
        assert_eq!(find_critical_level(&uniform, &[0, 0, 0, 0, 0, 1], 1.5), 4);
        // dirt only at the top level
        assert_eq!(find_critical_level(&[0, 0, 0, 2], &[1, 1, 0, 0], 2.0), 3);
    }

    #[test]
    fn errors() {
        let mut pc = PartialCover::new(Arc::new(fix1()), 1.5, 4).unwrap();
        pc.update(ins(0)).unwrap();
        assert_eq!(pc.update(ins(0)), Err(Error::DuplicateInsert(0)));
        assert_eq!(pc.update(del(1)), Err(Error::PhantomDelete(1)));
    }
}
