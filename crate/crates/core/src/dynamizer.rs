//! Turns a static instance into a reproducible insert/delete sequence.
//!
//! Elements are inserted in file order. While below capacity each step
//! inserts with probability 0.8 and otherwise deletes one of the (up to) five
//! most recently inserted active elements. Reaching capacity triggers a
//! cleanup that deletes the `d` oldest active elements. Once every element
//! has been inserted the rest are deleted oldest first.
//!
//! Draw order on the SplitMix64 stream: one draw for the branch, one for the
//! victim, one for `d`. No draw is made when the branch is forced.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::setsystem::{ElementId, SetSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Insert,
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UpdateStep {
    pub op: Op,
    pub element: ElementId,
}

impl UpdateStep {
    pub fn insert(element: ElementId) -> Self {
        UpdateStep {
            op: Op::Insert,
            element,
        }
    }

    pub fn delete(element: ElementId) -> Self {
        UpdateStep {
            op: Op::Delete,
            element,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateSequence {
    /// Number of elements in the source instance.
    pub x: usize,
    pub n_cap: usize,
    pub seed: u64,
    pub steps: Vec<UpdateStep>,
}

const INSERT_PROBABILITY: f64 = 0.8;
const RECENT_WINDOW: usize = 5;

/// `max(1, floor(x / 10))`.
pub fn capacity_for(x: usize) -> usize {
    (x / 10).max(1)
}

fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn dynamize(sys: &SetSystem, seed: u64) -> Result<UpdateSequence> {
    let x = sys.num_elements();
    if x == 0 {
        return Err(Error::NoElements);
    }
    let n_cap = capacity_for(x);
    let cleanup_bound = (n_cap / 10).max(1) as u64;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(2 * x);
    // Active elements ordered by insertion time; ids are inserted ascending.
    let mut active: VecDeque<ElementId> = VecDeque::with_capacity(n_cap);
    let mut next: usize = 0;
    loop {
        if next == x {
            steps.extend(active.drain(..).map(UpdateStep::delete));
            break;
        }
        if active.len() >= n_cap {
            let d = 1 + rng.next_u64() % cleanup_bound;
            for _ in 0..d.min(active.len() as u64) {
                let e = active.pop_front().unwrap();
                steps.push(UpdateStep::delete(e));
            }
            continue;
        }
        if active.is_empty() || unit(&mut rng) < INSERT_PROBABILITY {
            let e = next as ElementId;
            next += 1;
            active.push_back(e);
            steps.push(UpdateStep::insert(e));
        } else {
            let window = active.len().min(RECENT_WINDOW);
            let pick = (rng.next_u64() % window as u64) as usize;
            let e = active.remove(active.len() - window + pick).unwrap();
            steps.push(UpdateStep::delete(e));
        }
    }
    Ok(UpdateSequence {
        x,
        n_cap,
        seed,
        steps,
    })
}

/// Returns the first broken sequence invariant, if any.
pub fn validate_sequence(seq: &UpdateSequence, sys: &SetSystem) -> Result<(), String> {
    let n = sys.num_elements();
    if seq.x != n {
        return Err(format!("header has x={} but the instance has {n} elements", seq.x));
    }
    #[derive(Clone, Copy, PartialEq)]
    enum St {
        Fresh,
        Active,
        Gone,
    }
    let mut state = vec![St::Fresh; n];
    let mut active = 0usize;
    let mut next_insert: ElementId = 0;
    for (i, step) in seq.steps.iter().enumerate() {
        let at = i + 1;
        let e = step.element;
        if e as usize >= n {
            return Err(format!("element {} out of range at step {at}", e + 1));
        }
        let st = &mut state[e as usize];
        match step.op {
            Op::Insert => {
                if *st != St::Fresh {
                    return Err(format!("element {} inserted twice at step {at}", e + 1));
                }
                if e != next_insert {
                    return Err(format!(
                        "element {} inserted out of order at step {at}",
                        e + 1
                    ));
                }
                next_insert += 1;
                *st = St::Active;
                active += 1;
                if active > seq.n_cap {
                    return Err(format!(
                        "{active} active elements exceed capacity {} at step {at}",
                        seq.n_cap
                    ));
                }
            }
            Op::Delete => {
                match *st {
                    St::Fresh => {
                        return Err(format!(
                            "element {} deleted before insertion at step {at}",
                            e + 1
                        ))
                    }
                    St::Gone => {
                        return Err(format!("element {} deleted twice at step {at}", e + 1))
                    }
                    St::Active => {}
                }
                *st = St::Gone;
                active -= 1;
            }
        }
    }
    if active != 0 {
        return Err("sequence does not end empty".into());
    }
    if next_insert as usize != n {
        return Err(format!("only {next_insert} of {n} elements inserted"));
    }
    Ok(())
}

impl UpdateSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Largest number of simultaneously active elements over all prefixes.
    pub fn peak_active(&self) -> usize {
        let mut active = 0usize;
        let mut peak = 0;
        for s in &self.steps {
            match s.op {
                Op::Insert => active += 1,
                Op::Delete => active = active.saturating_sub(1),
            }
            peak = peak.max(active);
        }
        peak
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(8 * self.steps.len() + 64);
        let _ = writeln!(
            out,
            "# x={} cap={} seed={} k={}",
            self.x,
            self.n_cap,
            self.seed,
            self.steps.len()
        );
        for s in &self.steps {
            let c = match s.op {
                Op::Insert => '+',
                Op::Delete => '-',
            };
            let _ = writeln!(out, "{c} {}", s.element + 1);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::EmptySequence)?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let body = header
            .strip_prefix('#')
            .ok_or_else(|| perr(1, "missing '# x=.. cap=.. seed=.. k=..' header".into()))?;
        let (mut x, mut cap, mut seed, mut k) = (None, None, None, None);
        for field in body.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| perr(1, format!("malformed header field {field:?}")))?;
            let bad = || perr(1, format!("bad value in header field {field:?}"));
            match key {
                "x" => x = Some(value.parse::<usize>().map_err(|_| bad())?),
                "cap" => cap = Some(value.parse::<usize>().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad())?),
                "k" => k = Some(value.parse::<usize>().map_err(|_| bad())?),
                _ => return Err(perr(1, format!("unknown header field {key:?}"))),
            }
        }
        let missing = |name: &str| perr(1, format!("header lacks {name}"));
        let x = x.ok_or_else(|| missing("x"))?;
        let n_cap = cap.ok_or_else(|| missing("cap"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;
        let k = k.ok_or_else(|| missing("k"))?;

        let mut steps = Vec::with_capacity(k);
        for (i, line) in lines {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (op, id) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| perr(line_no, format!("expected '+ <id>' or '- <id>', got {line:?}")))?;
            let op = match op {
                "+" => Op::Insert,
                "-" => Op::Delete,
                _ => return Err(perr(line_no, format!("unknown operation {op:?}"))),
            };
            let id: u64 = id
                .trim()
                .parse()
                .map_err(|_| perr(line_no, format!("bad element id {:?}", id.trim())))?;
            if id == 0 || id > ElementId::MAX as u64 {
                return Err(perr(line_no, format!("element id {id} out of range")));
            }
            steps.push(UpdateStep {
                op,
                element: (id - 1) as ElementId,
            });
        }
        if steps.len() != k {
            return Err(perr(1, format!("header says k={k} but {} steps follow", steps.len())));
        }
        if steps.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(UpdateSequence {
            x,
            n_cap,
            seed,
            steps,
        })
    }
}
