//! Both level properties relaxed globally.
//!
//! Every element carries a passive level `plev(e) >= lev(e)` that never
//! decreases while it is active. Per level `i` the maintainer counts
//!
//! - `A_i = |{e : lev(e) <= i < plev(e)}|`
//! - `P_i = |{e : plev(e) <= i}|`
//! - `D_i`, deletions charged to level `i`
//!
//! and keeps `P_i + D_i <= 2 (beta - 1) A_i` by rebuilding below the highest
//! violating level.

use std::sync::Arc;

use super::{check_coverage, Algorithm, DynamicCover, StepReport};
use crate::dynamizer::{Op, UpdateStep};
use crate::error::Result;
use crate::levels::LevelState;
use crate::setsystem::{ElementId, SetId, SetSystem};

/// Snapshot of the per-level counters, indexed `0..=level_cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counters {
    pub a: Vec<i64>,
    pub p: Vec<i64>,
    pub d: Vec<i64>,
}

pub struct GlobalCover {
    sys: Arc<SetSystem>,
    level: LevelState,
    plev: Vec<i32>,
    a: Vec<i64>,
    p: Vec<i64>,
    d: Vec<i64>,
    slope: f64,
}

impl GlobalCover {
    pub fn new(sys: Arc<SetSystem>, beta: f64, n_cap: usize) -> Result<Self> {
        let level = LevelState::new(&sys, beta, n_cap)?;
        let levels = level.level_cap() as usize + 1;
        Ok(GlobalCover {
            plev: vec![-1; sys.num_elements()],
            a: vec![0; levels],
            p: vec![0; levels],
            d: vec![0; levels],
            slope: 2.0 * (beta - 1.0),
            level,
            sys,
        })
    }

    pub fn state(&self) -> &LevelState {
        &self.level
    }

    /// Passive level of an active element, `-1` otherwise.
    pub fn plev(&self, e: ElementId) -> i32 {
        if self.level.is_active(e) {
            self.plev[e as usize]
        } else {
            -1
        }
    }

    pub fn counters(&self) -> Counters {
        Counters {
            a: self.a.clone(),
            p: self.p.clone(),
            d: self.d.clone(),
        }
    }

    /// `A` and `P` recomputed from `lev` and `plev`.
    pub fn recount(&self) -> (Vec<i64>, Vec<i64>) {
        let mut a = vec![0; self.a.len()];
        let mut p = vec![0; self.p.len()];
        for e in self.level.active_elements() {
            let (l, pl) = (self.level.elem_level(e), self.plev[e as usize]);
            Self::spread(&mut a, &mut p, l, pl, 1);
        }
        (a, p)
    }

    fn spread(a: &mut [i64], p: &mut [i64], lev: i32, plev: i32, sign: i64) {
        let top = a.len() as i32;
        for i in lev.max(0)..plev.min(top) {
            a[i as usize] += sign;
        }
        for i in plev.max(0)..top {
            p[i as usize] += sign;
        }
    }

    fn violates(&self, i: usize) -> bool {
        let lhs = (self.p[i] + self.d[i]) as f64;
        let rhs = self.slope * self.a[i] as f64;
        lhs > rhs + 1e-9 * rhs.max(1.0)
    }

    /// Highest level where the counter inequality fails.
    pub fn highest_violation(&self) -> Option<i32> {
        (0..self.a.len()).rev().find(|&i| self.violates(i)).map(|i| i as i32)
    }

    fn rebuild_until_clean(&mut self) -> Result<bool> {
        let sys = Arc::clone(&self.sys);
        let mut fired = false;
        // Levels up to i_crit are clean afterwards, so i_crit strictly grows.
        while let Some(i_crit) = self.highest_violation() {
            let report = self.level.rebuild_below(&sys, i_crit)?;
            for &(e, old_lev) in &report.rebuilt {
                let ei = e as usize;
                let old_plev = self.plev[ei];
                Self::spread(&mut self.a, &mut self.p, old_lev, old_plev, -1);
                let lev = self.level.elem_level(e);
                let plev = old_plev.max(i_crit + 1).max(lev);
                self.plev[ei] = plev;
                Self::spread(&mut self.a, &mut self.p, lev, plev, 1);
            }
            for c in &mut self.d[..=i_crit as usize] {
                *c = 0;
            }
            fired = true;
        }
        Ok(fired)
    }
}

impl DynamicCover for GlobalCover {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Global
    }

    fn system(&self) -> &SetSystem {
        &self.sys
    }

    fn update(&mut self, step: UpdateStep) -> Result<StepReport> {
        let sys = Arc::clone(&self.sys);
        let e = step.element;
        self.level.begin_step();
        match step.op {
            Op::Insert => {
                self.level.insert_at_highest(&sys, e)?;
                let lev = self.level.elem_level(e);
                self.plev[e as usize] = lev;
                Self::spread(&mut self.a, &mut self.p, lev, lev, 1);
            }
            Op::Delete => {
                self.level.check_deletable(e)?;
                let lev = self.level.elem_level(e);
                let plev = self.plev[e as usize];
                Self::spread(&mut self.a, &mut self.p, lev, plev, -1);
                for c in &mut self.d[lev.max(0) as usize..] {
                    *c += 1;
                }
                self.level.detach(&sys, e);
                self.level.deactivate(e);
                self.plev[e as usize] = -1;
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
        for e in self.level.active_elements() {
            let (l, pl) = (self.level.elem_level(e), self.plev[e as usize]);
            if pl < l {
                return Err(format!("element {} has plev {pl} below lev {l}", e + 1));
            }
        }
        let (a, p) = self.recount();
        if a != self.a || p != self.p {
            return Err("incremental A/P counters differ from recomputation".into());
        }
        if let Some(i) = self.highest_violation() {
            return Err(format!(
                "P + D > 2(beta-1) A at level {i}: P={} D={} A={}",
                self.p[i as usize], self.d[i as usize], self.a[i as usize]
            ));
        }
        if self.d.iter().any(|&d| d < 0) {
            return Err("negative dirt counter".into());
        }
        check_coverage(&self.sys, self.level.active_elements(), |s| self.level.in_cover(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::{del, ins};
    use crate::setsystem::fixtures::fix1;

    fn fresh() -> GlobalCover {
        let g = GlobalCover::new(Arc::new(fix1()), 2.0, 4).unwrap();
        assert_eq!(g.state().level_cap(), 2);
        g
    }

    #[test]
    fn first_insert_rebuilds_everything() {
        let mut g = fresh();
        let rep = g.update(ins(3)).unwrap();
        assert!(rep.rebuild_fired);
        assert_eq!(g.cover(), vec![1]);
        assert_eq!(g.state().elem_level(3), 0);
        assert_eq!(g.plev(3), 3);
        let c = g.counters();
        assert_eq!(c.a, vec![1, 1, 1]);
        assert_eq!(c.p, vec![0, 0, 0]);
        assert_eq!(c.d, vec![0, 0, 0]);
        g.check().unwrap();
    }

    #[test]
    fn second_insert_joins_without_rebuild() {
        let mut g = fresh();
        g.update(ins(3)).unwrap();
        let rep = g.update(ins(2)).unwrap();
        assert!(!rep.rebuild_fired);
        assert_eq!(g.state().asn(2), Some(1));
        assert_eq!(g.plev(2), 0);
        assert_eq!(g.counters().p, vec![1, 1, 1]);
        g.check().unwrap();
    }

    #[test]
    fn delete_charges_dirt_without_rebuild() {
        let mut g = fresh();
        g.update(ins(3)).unwrap();
        g.update(ins(2)).unwrap();
        let rep = g.update(del(2)).unwrap();
        assert!(!rep.rebuild_fired);
        let c = g.counters();
        assert_eq!(c.p, vec![0, 0, 0]);
        assert_eq!(c.d, vec![1, 1, 1]);
        assert_eq!(c.a, vec![1, 1, 1]);
        g.check().unwrap();
    }

    #[test]
    fn plev_never_drops_through_rebuilds() {
        let mut g = GlobalCover::new(Arc::new(fix1()), 1.25, 4).unwrap();
        let mut seen = [-1i32; 4];
        for step in [ins(0), ins(1), ins(2), ins(3), del(1), ins(1), del(0), del(3)] {
            let e = step.element as usize;
            if step.op == Op::Insert {
                seen[e] = -1;
            }
            g.update(step).unwrap();
            g.check().unwrap();
            for x in 0..4u32 {
                if g.state().is_active(x) {
                    assert!(g.plev(x) >= seen[x as usize]);
                    seen[x as usize] = g.plev(x);
                }
            }
        }
    }
}
