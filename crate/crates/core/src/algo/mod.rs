//! Dynamic maintainers behind one trait so the harness can replay a sequence
//! through any of them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamizer::UpdateStep;
use crate::error::{Error, Result};
use crate::setsystem::{SetId, SetSystem};

mod global;
mod local;
mod partial;
mod robust;

pub use global::GlobalCover;
pub use local::{LocalCover, PhaseTrace};
pub use partial::{find_critical_level, PartialCover, RebuildRecord};
pub use robust::RobustCover;

pub use crate::oracle::NaiveCover;

/// Per-step measurements. `elapsed_ns` is filled in by the harness.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReport {
    pub cover_size: usize,
    /// `|C_before Δ C_after|` for this step.
    pub recourse: usize,
    pub elapsed_ns: u64,
    pub rebuild_fired: bool,
}

/// A fully dynamic set cover maintainer over a fixed set family.
pub trait DynamicCover: Send {
    fn algorithm(&self) -> Algorithm;

    fn system(&self) -> &SetSystem;

    /// Applies one insertion or deletion.
    fn update(&mut self, step: UpdateStep) -> Result<StepReport>;

    /// Current cover, ascending set ids.
    fn cover(&self) -> Vec<SetId>;

    fn cover_size(&self) -> usize;

    /// Recomputes and checks every invariant this maintainer promises.
    /// Not meant for timed regions.
    fn check(&self) -> Result<(), String>;

    /// Enables extra bookkeeping consumed by [`check`](Self::check) (e.g.
    /// snapshots around rebuilds). Off by default.
    fn set_audit(&mut self, _on: bool) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Robust,
    Local,
    Partial,
    Global,
    Naive,
}

impl Algorithm {
    pub const DYNAMIC: [Algorithm; 4] = [
        Algorithm::Robust,
        Algorithm::Local,
        Algorithm::Partial,
        Algorithm::Global,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Robust => "robust",
            Algorithm::Local => "local",
            Algorithm::Partial => "partial",
            Algorithm::Global => "global",
            Algorithm::Naive => "naive",
        }
    }

    /// The tuned default beta per algorithm (robust 1.99, local 1.9,
    /// partial 1.99, global 1.495). Naive shares robust's.
    pub fn preset_beta(self) -> f64 {
        match self {
            Algorithm::Robust | Algorithm::Partial | Algorithm::Naive => 1.99,
            Algorithm::Local => 1.9,
            Algorithm::Global => 1.495,
        }
    }

    pub fn check_beta(self, beta: f64) -> Result<()> {
        crate::levels::check_beta(beta)?;
        if self == Algorithm::Robust && beta >= 2.0 {
            return Err(Error::RobustBeta(beta));
        }
        Ok(())
    }

    /// Builds an empty maintainer for `sys` with capacity `n_cap`.
    pub fn build(
        self,
        sys: Arc<SetSystem>,
        beta: f64,
        n_cap: usize,
    ) -> Result<Box<dyn DynamicCover>> {
        Ok(match self {
            Algorithm::Robust => Box::new(RobustCover::new(sys, beta, n_cap)?),
            Algorithm::Local => Box::new(LocalCover::new(sys, beta, n_cap)?),
            Algorithm::Partial => Box::new(PartialCover::new(sys, beta, n_cap)?),
            Algorithm::Global => Box::new(GlobalCover::new(sys, beta, n_cap)?),
            Algorithm::Naive => Box::new(NaiveCover::new(sys, beta, n_cap)?),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "robust" => Ok(Algorithm::Robust),
            "local" => Ok(Algorithm::Local),
            "partial" => Ok(Algorithm::Partial),
            "global" => Ok(Algorithm::Global),
            "naive" => Ok(Algorithm::Naive),
            other => Err(Error::Metrics(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Checks that every active element of `state` lies in some set of `cover`.
pub(crate) fn check_coverage(
    sys: &SetSystem,
    active: impl Iterator<Item = crate::setsystem::ElementId>,
    in_cover: impl Fn(SetId) -> bool,
) -> Result<(), String> {
    for e in active {
        if !sys.sets_of(e).iter().any(|&s| in_cover(s)) {
            return Err(format!("active element {} is uncovered", e + 1));
        }
    }
    Ok(())
}

/// `|a Δ b|` for two duplicate-free id lists.
pub(crate) fn symmetric_difference(a: &[SetId], b: &[SetId]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut diff) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                diff += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                diff += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    diff + (a.len() - i) + (b.len() - j)
}
