//! Monte Carlo estimators, worst-case configuration families and the
//! demonstrations built on the oracle.

mod estimators;
mod families;
mod meeting;
mod negdep;
mod walks;

use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::mappings::MappingError;
use crate::oracle::OracleError;

pub use estimators::{
    cover_envelope, cutoff_profile, estimate_theta, estimate_transience_prob, sample_exit_times, CutoffProfile,
    EstimatorReport, ProfileRow, ProfileSummary, ThetaEstimate, ThetaOptions, HORIZON_FACTOR,
};
pub use families::{single_deep_trap_critical, worst_config, ConfigFamily};
pub use meeting::{meeting_time, mixing_upper_via_meeting, MeetingReport};
pub use negdep::{
    any_particle_case, any_particle_seed, live_particle_case, live_particle_seed, negdep_demo, negdep_report,
    AnyParticleCase, LiveParticleCase, NegDepReport, PowerRow, CASE1_TOL, CASE2_T, CASE2_TOL, CROSSOVER_SEARCH_MAX,
};
pub use walks::{
    rw_exit_tail, rw_exit_time, segment_count_at, segment_occupation_mc, ExitTailReport, ExitTailRow,
    OccupationComparison,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Invalid(String),
    #[error("unknown configuration family {0:?}")]
    UnknownFamily(String),
    #[error("undecided at t = {t}: interval [{lower}, {upper}] after {samples} samples")]
    IndeterminateAtBudget { t: f64, lower: f64, upper: f64, samples: u64 },
    #[error("horizon {horizon} is too short to resolve ε = {eps}")]
    HorizonTooShort { horizon: f64, eps: f64 },
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("assertion failed: {0}")]
    AssertionFailed(String),
}
