//! The static set family and its element → set incidence.
//!
//! Instances are read from an hMETIS-like hypergraph file where hyperedges are
//! the (dynamic) elements and vertices are the (static) sets:
//!
//! ```text
//! % optional comments
//! <elements> <sets>
//! <1-based set ids of element 1>
//! <1-based set ids of element 2>
//! ...
//! ```
//!
//! Ids are dense and 0-based once loaded.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type ElementId = u32;
pub type SetId = u32;

/// Immutable problem instance: `sets[s]` lists the elements of set `s`,
/// `incidence[e]` lists the sets containing element `e`. Both are sorted and
/// each is the exact transpose of the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    sets: Vec<Vec<ElementId>>,
    incidence: Vec<Vec<SetId>>,
    frequency: usize,
}

impl SetSystem {
    /// Builds a system from per-element incidence lists (0-based set ids).
    pub fn from_incidence(num_sets: usize, incidence: Vec<Vec<SetId>>) -> Result<Self> {
        if incidence.is_empty() {
            return Err(Error::NoElements);
        }
        let mut incidence = incidence;
        let mut sets = vec![Vec::new(); num_sets];
        for (e, list) in incidence.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(Error::Uncoverable(e as ElementId));
            }
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Parse {
                    line: e + 1,
                    msg: format!("duplicate vertex {} in hyperedge", w[0] + 1),
                });
            }
            for &s in list.iter() {
                let slot = sets
                    .get_mut(s as usize)
                    .ok_or(Error::UnknownSet(s, num_sets))?;
                slot.push(e as ElementId);
            }
        }
        let frequency = incidence.iter().map(Vec::len).max().unwrap_or(0);
        Ok(SetSystem {
            sets,
            incidence,
            frequency,
        })
    }

    /// Builds a system from per-set element lists (0-based element ids).
    pub fn from_sets(num_elements: usize, sets: &[Vec<ElementId>]) -> Result<Self> {
        let mut incidence = vec![Vec::new(); num_elements];
        for (s, members) in sets.iter().enumerate() {
            for &e in members {
                incidence
                    .get_mut(e as usize)
                    .ok_or(Error::UnknownElement(e, num_elements))?
                    .push(s as SetId);
            }
        }
        Self::from_incidence(sets.len(), incidence)
    }

    pub fn num_elements(&self) -> usize {
        self.incidence.len()
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Maximum number of sets any element belongs to.
    pub fn frequency(&self) -> usize {
        self.frequency
    }

    pub fn set(&self, s: SetId) -> &[ElementId] {
        &self.sets[s as usize]
    }

    /// The sets containing `e`, ascending.
    pub fn sets_of(&self, e: ElementId) -> &[SetId] {
        &self.incidence[e as usize]
    }

    pub fn sets(&self) -> impl ExactSizeIterator<Item = &[ElementId]> {
        self.sets.iter().map(Vec::as_slice)
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total number of (element, set) incidences.
    pub fn total_incidence(&self) -> usize {
        self.incidence.iter().map(Vec::len).sum()
    }

    /// Serializes back to the instance file format. Element order is preserved.
    pub fn to_instance_text(&self) -> String {
        let mut out = String::with_capacity(self.total_incidence() * 4 + 32);
        let _ = writeln!(out, "{} {}", self.num_elements(), self.num_sets());
        for list in &self.incidence {
            let mut first = true;
            for &s in list {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{}", s + 1);
            }
            out.push('\n');
        }
        out
    }
}

pub fn frequency_of(sys: &SetSystem) -> usize {
    sys.frequency()
}

/// Parses an instance file.
pub fn load_instance(text: &str) -> Result<SetSystem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with('%'));

    let (header_line, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let malformed = || Error::Parse {
        line: header_line,
        msg: format!("malformed header {header:?}, expected \"<elements> <sets>\""),
    };
    if fields.len() != 2 {
        return Err(malformed());
    }
    let num_elements: usize = fields[0].parse().map_err(|_| malformed())?;
    let num_sets: usize = fields[1].parse().map_err(|_| malformed())?;
    if num_elements == 0 {
        return Err(Error::NoElements);
    }

    let mut incidence = Vec::with_capacity(num_elements);
    for e in 0..num_elements {
        let (line, body) = lines.next().ok_or(Error::Parse {
            line: header_line + e + 1,
            msg: format!("expected {num_elements} hyperedge lines, found {e}"),
        })?;
        let mut list = Vec::new();
        for tok in body.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid vertex id {tok:?}"),
            })?;
            if v == 0 || v > num_sets {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex id {v} out of range 1..={num_sets}"),
                });
            }
            list.push((v - 1) as SetId);
        }
        if list.is_empty() {
            return Err(Error::Parse {
                line,
                msg: format!("empty hyperedge: element {} lies in no set", e + 1),
            });
        }
        let mut sorted = list.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate vertex {} in hyperedge", w[0] + 1),
            });
        }
        incidence.push(sorted);
    }
    if let Some((line, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::Parse {
            line,
            msg: format!("unexpected content after {num_elements} hyperedge lines"),
        });
    }
    SetSystem::from_incidence(num_sets, incidence)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fix1_transpose() {
        let sys = fix1();
        assert_eq!(sys.num_elements(), 4);
        assert_eq!(sys.num_sets(), 3);
        assert_eq!(sys.set(0), &[0, 1, 2]);
        assert_eq!(sys.set(1), &[2, 3]);
        assert_eq!(sys.set(2), &[3]);
        assert_eq!(sys.sets_of(2), &[0, 1]);
        assert_eq!(frequency_of(&sys), 2);
    }

    #[test]
    fn frequency_extremes() {
        let one = SetSystem::from_sets(1, &[vec![0]]).unwrap();
        assert_eq!(one.frequency(), 1);
        let all = SetSystem::from_sets(1, &[vec![0], vec![0], vec![0], vec![0]]).unwrap();
        assert_eq!(all.frequency(), 4);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(load_instance("0 5\n"), Err(Error::NoElements));
        let dup = load_instance("1 2\n1 1\n").unwrap_err();
        assert!(dup.to_string().contains("duplicate vertex"), "{dup}");
        let range = load_instance("1 2\n3\n").unwrap_err();
        assert!(range.to_string().contains("out of range"), "{range}");
        let empty = load_instance("2 2\n1\n\n").unwrap_err();
        assert!(empty.to_string().contains("empty hyperedge"), "{empty}");
        assert!(load_instance("4\n1\n").is_err());
        assert!(load_instance("x 3\n").is_err());
        assert!(load_instance("1 1\n1\n1\n").is_err());
    }

    #[test]
    fn comments_and_roundtrip() {
        let sys = load_instance("% a comment\n4 3\n% inner\n1\n1\n2 1\n2 3\n").unwrap();
        assert_eq!(sys, fix1());
        assert_eq!(load_instance(&sys.to_instance_text()).unwrap(), sys);
    }

    #[test]
    fn deterministic_load() {
        assert_eq!(load_instance(FIX1).unwrap(), load_instance(FIX1).unwrap());
    }
}
