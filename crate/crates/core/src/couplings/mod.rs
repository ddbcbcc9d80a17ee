//! Joint processes driven by shared clocks, with per-event assertion hooks.
//!
//! * [`basic`]: two SWTs on the same rings; order is preserved.
//! * [`labelled`]: a labelled SWT against the labelled SSEP obtained by
//!   filling every trap with zero.
//! * [`unrolled`]: the three unrolled processes on a segment of length
//!   `K + a` with reservoirs, and their domination by reservoir SSEPs.
//!
//! Assertions are evaluated after every ring. The state is piecewise
//! constant in time, so a check that holds at every event time holds on the
//! whole interval.

pub mod basic;
pub mod labelled;
pub mod unrolled;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use basic::{run_basic_coupling, BasicCoupling};
pub use labelled::{run_labelled_vs_ssep, LabelledCoupling};
pub use unrolled::{
    align_segment, run_reservoir_domination, run_unrolled, survival_bound_check, Segment, SurvivalBoundReport,
    SurvivalBoundRow, Suppression, UnrolledCoupling, UnrolledReport, UnrolledState, Variant,
};

/// Maximum number of violations kept verbatim in a log; the rest are counted.
pub const MAX_RECORDED: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// `ξ(t) ≤ ξ'(t)` under the basic coupling.
    Order,
    /// Live labels agree with the SSEP labels; dead ones sit where the SSEP
    /// label was when they died.
    Identity,
    /// While transient, some label has not explored the whole ring.
    Exploration,
    /// A label alive in an unrolled process is alive in the SWT and sits at
    /// the same site modulo `K`.
    Tracking,
    /// Outside-`A` labels survive in the SWT iff they survive centrally.
    CentralSurvival,
    /// Live central labels are less than `K − 1` apart.
    Distance,
    /// Labels right of a trap in `A` survive in the right process.
    RightSurvival,
    /// Labels left of a trap in `A` survive in the left process.
    LeftSurvival,
    /// `δ_p ≤ δ'_p + δ^R_p + δ^L_p`.
    SurvivalSum,
    /// No clock ring can reach live particles on both copies of an edge.
    DisjointEdges,
    /// `σ* ≤ σ̃*` for each unrolled process.
    Domination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub time: f64,
    pub check: Check,
    pub detail: String,
}

/// Counts of evaluated checks and the violations found.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssertionLog {
    pub evaluated: BTreeMap<Check, u64>,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl AssertionLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one evaluation of `check`; `detail` is only built on failure.
    pub fn record(&mut self, check: Check, time: f64, ok: bool, detail: impl FnOnce() -> String) {
        *self.evaluated.entry(check).or_default() += 1;
        if !ok {
            self.violation_count += 1;
            if self.violations.len() < MAX_RECORDED {
                self.violations.push(Violation {
                    time,
                    check,
                    detail: detail(),
                });
            }
        }
    }

    pub fn evaluated(&self, check: Check) -> u64 {
        self.evaluated.get(&check).copied().unwrap_or(0)
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    pub fn merge(&mut self, other: AssertionLog) {
        for (c, n) in other.evaluated {
            *self.evaluated.entry(c).or_default() += n;
        }
        self.violation_count += other.violation_count;
        let room = MAX_RECORDED.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
    }

    /// `Err` with the first violation when any check failed.
    pub fn into_result(self) -> Result<AssertionLog, CouplingError> {
        if self.is_clean() {
            Ok(self)
        } else {
            let first = self.violations.first().cloned();
            Err(CouplingError::Violated {
                count: self.violation_count,
                first: first.map(|v| format!("{:?} at t={}: {}", v.check, v.time, v.detail)).unwrap_or_default(),
            })
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("initial configurations are not ordered: site {site} has {lower} > {upper}")]
    Unordered { site: usize, lower: i32, upper: i32 },
    #[error("configurations have different sizes ({0} and {1})")]
    SizeMismatch(usize, usize),
    #[error("configuration has no particles")]
    NoParticles,
    #[error("segment length {a} must be in 1..{k}")]
    SegmentTooLong { a: usize, k: usize },
    #[error("ring size {0} is too small for the unrolled couplings (need K ≥ 3)")]
    SizeTooSmall(usize),
    #[error("clock stream has {got} edges, expected {expected}")]
    ClockMismatch { expected: usize, got: usize },
    #[error("{count} assertion violation(s); first: {first}")]
    Violated { count: u64, first: String },
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_counts_and_caps() {
        let mut log = AssertionLog::new();
        for i in 0..100 {
            log.record(Check::Order, i as f64, i % 2 == 0, || format!("step {i}"));
        }
        assert_eq!(log.evaluated(Check::Order), 100);
        assert_eq!(log.violation_count, 50);
        assert_eq!(log.violations.len(), MAX_RECORDED.min(50));
        let mut other = AssertionLog::new();
        other.record(Check::Identity, 0.0, true, String::new);
        other.merge(log.clone());
        assert_eq!(other.violation_count, 50);
        assert!(log.into_result().is_err());
        let json = serde_json::to_string(&other).unwrap();
        assert!(json.contains("\"identity\":1"));
    }
}
