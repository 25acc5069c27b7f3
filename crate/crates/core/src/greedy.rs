//! Level-bucketed relaxed greedy.
//!
//! Each candidate set starts at level `floor(log_beta |s ∩ E|)`. Levels are
//! scanned from `floor(log_beta |E|)` down to 0; a set still holding at least
//! `beta^l` uncovered elements is taken at level `l`, otherwise it drops
//! straight to the highest level its uncovered count supports. Within a level
//! sets are taken in ascending id order.
//!
//! The run costs `O(f |E| + |S| L)`: membership lists are built from the
//! incidence of `E` only, so large sets with few rebuilt elements stay cheap.

use crate::error::{Error, Result};
use crate::levels::{LevelScale, LevelState};
use crate::setsystem::{ElementId, SetId, SetSystem};

/// Reusable stamp-indexed buffers, sized once per instance.
#[derive(Debug, Clone)]
pub struct GreedyScratch {
    elem_stamp: Vec<u32>,
    set_stamp: Vec<u32>,
    slot: Vec<u32>,
    epoch: u32,
}

impl GreedyScratch {
    pub fn new(num_elements: usize, num_sets: usize) -> Self {
        GreedyScratch {
            elem_stamp: vec![0; num_elements],
            set_stamp: vec![0; num_sets],
            slot: vec![0; num_sets],
            epoch: 0,
        }
    }

    /// Opens a new epoch; `epoch` marks "in E, uncovered", `epoch + 1`
    /// marks "in E, covered".
    fn next_epoch(&mut self) -> u32 {
        if self.epoch >= u32::MAX - 4 {
            self.elem_stamp.iter_mut().for_each(|x| *x = 0);
            self.set_stamp.iter_mut().for_each(|x| *x = 0);
            self.epoch = 0;
        }
        self.epoch += 2;
        self.epoch
    }
}

pub(crate) struct Placement<'a> {
    pub set: SetId,
    pub level: i32,
    pub elements: &'a [ElementId],
}

/// The greedy's decisions, in the order they were made.
#[derive(Debug, Default)]
pub(crate) struct Plan {
    chosen: Vec<(SetId, i32, usize, usize)>,
    elements: Vec<ElementId>,
    pub touches: usize,
}

impl Plan {
    pub fn placements(&self) -> impl Iterator<Item = Placement<'_>> {
        self.chosen.iter().map(|&(set, level, a, b)| Placement {
            set,
            level,
            elements: &self.elements[a..b],
        })
    }
}

/// Runs the greedy over `elements` without touching any level state.
/// `candidates = None` means every set meeting `elements`.
pub(crate) fn plan(
    sys: &SetSystem,
    elements: &[ElementId],
    candidates: Option<&[SetId]>,
    scale: &LevelScale,
    scratch: &mut GreedyScratch,
) -> Result<Plan> {
    let uncovered = scratch.next_epoch();
    let covered = uncovered + 1;
    let mut universe = Vec::with_capacity(elements.len());
    for &e in elements {
        let stamp = scratch
            .elem_stamp
            .get_mut(e as usize)
            .ok_or(Error::UnknownElement(e, sys.num_elements()))?;
        if *stamp != uncovered {
            *stamp = uncovered;
            universe.push(e);
        }
    }
    if universe.is_empty() {
        return Ok(Plan::default());
    }

    // Candidate sets, ascending, each with a dense slot index.
    let mut cands: Vec<SetId> = Vec::new();
    match candidates {
        Some(list) => {
            for &s in list {
                let stamp = scratch
                    .set_stamp
                    .get_mut(s as usize)
                    .ok_or(Error::UnknownSet(s, sys.num_sets()))?;
                if *stamp != uncovered {
                    *stamp = uncovered;
                    cands.push(s);
                }
            }
        }
        None => {
            for &e in &universe {
                for &s in sys.sets_of(e) {
                    if scratch.set_stamp[s as usize] != uncovered {
                        scratch.set_stamp[s as usize] = uncovered;
                        cands.push(s);
                    }
                }
            }
        }
    }
    cands.sort_unstable();
    for (i, &s) in cands.iter().enumerate() {
        scratch.slot[s as usize] = i as u32;
    }

    // count[i] = |cands[i] ∩ E|, then CSR membership lists.
    let mut count = vec![0u32; cands.len()];
    for &e in &universe {
        let mut any = false;
        for &s in sys.sets_of(e) {
            if scratch.set_stamp[s as usize] == uncovered {
                count[scratch.slot[s as usize] as usize] += 1;
                any = true;
            }
        }
        if !any {
            return Err(Error::Uncoverable(e));
        }
    }
    let mut offset = Vec::with_capacity(cands.len() + 1);
    offset.push(0usize);
    for &c in &count {
        offset.push(offset.last().unwrap() + c as usize);
    }
    let mut fill = offset[..cands.len()].to_vec();
    let mut members = vec![0 as ElementId; *offset.last().unwrap()];
    for &e in &universe {
        for &s in sys.sets_of(e) {
            if scratch.set_stamp[s as usize] == uncovered {
                let i = scratch.slot[s as usize] as usize;
                members[fill[i]] = e;
                fill[i] += 1;
            }
        }
    }

    // No candidate can start above the level of |E| itself.
    let top = scale.level_of(universe.len() as u64);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); top as usize + 1];
    for (i, &c) in count.iter().enumerate() {
        if c > 0 {
            buckets[scale.level_of(c as u64) as usize].push(i as u32);
        }
    }

    let mut plan = Plan {
        chosen: Vec::new(),
        elements: Vec::with_capacity(universe.len()),
        touches: 0,
    };
    for level in (0..=top).rev() {
        let mut queue = std::mem::take(&mut buckets[level as usize]);
        // Demotions only go strictly down, so this level's queue is final.
        queue.sort_unstable();
        let need = scale.threshold(level);
        for i in queue {
            let i = i as usize;
            plan.touches += 1;
            let c = count[i] as u64;
            if c >= need {
                let start = plan.elements.len();
                for &e in &members[offset[i]..offset[i + 1]] {
                    if scratch.elem_stamp[e as usize] != uncovered {
                        continue;
                    }
                    scratch.elem_stamp[e as usize] = covered;
                    plan.elements.push(e);
                    for &t in sys.sets_of(e) {
                        if scratch.set_stamp[t as usize] == uncovered {
                            count[scratch.slot[t as usize] as usize] -= 1;
                        }
                    }
                }
                plan.chosen.push((cands[i], level, start, plan.elements.len()));
            } else if c > 0 {
                buckets[scale.level_of(c) as usize].push(i as u32);
            }
        }
    }
    debug_assert_eq!(plan.elements.len(), universe.len());
    Ok(plan)
}

/// Result of [`static_greedy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyOutcome {
    /// Sets that received elements, ascending.
    pub cover: Vec<SetId>,
    /// Number of times a set was examined at some level.
    pub set_touches: usize,
}

/// Covers `elements` greedily and records the assignment in `state`.
///
/// Inactive elements of `elements` are activated. Every element must be
/// unassigned beforehand. `candidates` restricts the sets the greedy may use;
/// `None` allows every set meeting `elements`. Candidate sets must not
/// currently cover anything.
pub fn static_greedy(
    sys: &SetSystem,
    elements: &[ElementId],
    candidates: Option<&[SetId]>,
    state: &mut LevelState,
) -> Result<GreedyOutcome> {
    for &e in elements {
        if (e as usize) >= sys.num_elements() {
            return Err(Error::UnknownElement(e, sys.num_elements()));
        }
        if state.asn(e).is_some() {
            return Err(Error::Invariant(format!(
                "element {} is already assigned",
                e + 1
            )));
        }
    }
    let plan = {
        let scale = state.scale().clone();
        plan(sys, elements, candidates, &scale, &mut state.scratch)?
    };
    for &e in elements {
        if !state.is_active(e) {
            state.activate(e)?;
        }
    }
    let mut cover = Vec::new();
    for placement in plan.placements() {
        if state.in_cover(placement.set) {
            return Err(Error::Invariant(format!(
                "candidate set {} already covers elements",
                placement.set + 1
            )));
        }
        state.place(placement.set, placement.level);
        for &e in placement.elements {
            state.attach(sys, e, placement.set);
        }
        cover.push(placement.set);
    }
    cover.sort_unstable();
    Ok(GreedyOutcome {
        cover,
        set_touches: plan.touches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsystem::fixtures::fix1;

    #[test]
    fn fix1_hand_simulation() {
        let sys = fix1();
        let mut st = LevelState::new(&sys, 2.0, 4).unwrap();
        let out = static_greedy(&sys, &[0, 1, 2, 3], None, &mut st).unwrap();
        assert_eq!(out.cover, vec![0, 1]);
        assert_eq!(st.set_level(0), 1);
        let mut c0 = st.cov(0).to_vec();
        c0.sort();
        assert_eq!(c0, vec![0, 1, 2]);
        assert_eq!(st.set_level(1), 0);
        assert_eq!(st.cov(1), &[3]);
        assert_eq!(st.set_level(2), -1);
        assert!(st.check_properties(0, 0).passed);
        st.validate(&sys).unwrap();
    }

    #[test]
    fn empty_universe_is_noop() {
        let sys = fix1();
        let mut st = LevelState::new(&sys, 2.0, 4).unwrap();
        let out = static_greedy(&sys, &[], None, &mut st).unwrap();
        assert!(out.cover.is_empty());
        assert_eq!(st.active_count(), 0);
    }

    #[test]
    fn uncoverable_element_named() {
        let sys = fix1();
        let mut st = LevelState::new(&sys, 2.0, 4).unwrap();
        // e1 lies only in s1; restrict candidates to s2, s3
        let err = static_greedy(&sys, &[0, 3], Some(&[1, 2]), &mut st).unwrap_err();
        assert_eq!(err, Error::Uncoverable(0));
        assert_eq!(st.active_count(), 0);
    }

    #[test]
    fn deterministic() {
        let sys = fix1();
        let run = || {
            let mut st = LevelState::new(&sys, 1.5, 4).unwrap();
            let out = static_greedy(&sys, &[3, 2, 1, 0], None, &mut st).unwrap();
            (out, (0..3).map(|s| (st.set_level(s), st.cov(s).to_vec())).collect::<Vec<_>>())
        };
        assert_eq!(run(), run());
    }
}
