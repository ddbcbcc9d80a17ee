//! Exact computations for small instances.
//!
//! * [`Chain`] enumerates the states reachable from a seed and assembles the
//!   integer generator.
//! * [`Series`] evaluates `P(t)` by uniformization with a certified
//!   truncation error.
//! * [`generator_power_value`] evaluates `(𝓛ⁿ f)(seed)` in exact integer
//!   arithmetic.
//! * [`mixing`] computes exact transience and mixing times of the SWT with a
//!   given excess over the whole state space `{ξ : S(ξ) = s}`.

pub mod chain;
pub mod mixing;
pub mod observable;
pub mod uniformization;

use std::hash::Hash;

use thiserror::Error;

pub use chain::{Chain, Generator, DEFAULT_STATE_CAP};
pub use mixing::{exact_tv_and_mixing, excess_class, ssep_class, ExactMixing, MixingReport, TimeBracket};
pub use observable::{ExceedanceTracked, SiteObservable, TrackedSwt};
pub use uniformization::{poisson_weights, Certified, PoissonWeights, Series};

use crate::dynamics::RingDynamics;

/// Truncation tolerance for transience probabilities.
pub const TRANSIENT_TOL: f64 = 1e-10;
/// Truncation tolerance for semigroup values.
pub const SEMIGROUP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("state space exceeds the cap of {cap} states ({partial} enumerated)")]
    CapExceeded { cap: usize, partial: usize },
    #[error("state set is not closed under the dynamics")]
    NotClosed,
    #[error("seed is not in the state space")]
    UnknownSeed,
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("integer overflow computing generator power {power}")]
    Overflow { power: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// `enumerate_reachable`: the chain of states reachable from `seed`.
pub fn enumerate_reachable<D>(seed: &D::State, cap: usize) -> Result<Chain<D::State>, OracleError>
where
    D: RingDynamics,
    D::State: Eq + Hash + Ord,
{
    Chain::reachable::<D>(seed, cap)
}

/// `P_seed(state at time t is transient)` with a certified error below `1e-10`.
pub fn exact_transient_prob<D>(seed: &D::State, t: f64, cap: usize) -> Result<Certified, OracleError>
where
    D: RingDynamics,
    D::State: Eq + Hash + Ord,
{
    if t < 0.0 {
        return Err(OracleError::NegativeTime(t));
    }
    let chain = Chain::reachable::<D>(seed, cap)?;
    let i = chain.index_of(seed).ok_or(OracleError::UnknownSeed)?;
    if !chain.transient_flags()[i] {
        return Ok(Certified { value: 0.0, error: 0.0 });
    }
    let mut series = Series::backward(chain.generator(), chain.transient_indicator());
    Ok(series.eval_at(i, t, TRANSIENT_TOL))
}

/// `(P_t f)(seed)` with certified error below `tol`.
pub fn semigroup_value<S: Clone + Eq + Hash + Ord>(
    chain: &Chain<S>,
    seed: &S,
    f: &dyn Fn(&S) -> f64,
    t: f64,
    tol: f64,
) -> Result<Certified, OracleError> {
    if t < 0.0 {
        return Err(OracleError::NegativeTime(t));
    }
    let i = chain.index_of(seed).ok_or(OracleError::UnknownSeed)?;
    let mut series = Series::backward(chain.generator(), chain.observe(f));
    Ok(series.eval_at(i, t, tol))
}

/// `(𝓛ᵐ f)(seed)` for `m = 0..=n`, exactly.
pub fn generator_power_value<S: Clone + Eq + Hash + Ord>(
    chain: &Chain<S>,
    seed: &S,
    f: &dyn Fn(&S) -> i64,
    n: usize,
) -> Result<Vec<i128>, OracleError> {
    let i = chain.index_of(seed).ok_or(OracleError::UnknownSeed)?;
    let g = chain.generator();
    let mut v: Vec<i128> = chain.observe(|s| f(s) as i128);
    let mut out = vec![v[i]];
    for power in 1..=n {
        let next = (0..g.len())
            .map(|a| {
                let va = v[a];
                g.row(a).iter().try_fold(0i128, |acc, &(b, c)| {
                    (v[b as usize].checked_sub(va))
                        .and_then(|d| d.checked_mul(c as i128))
                        .and_then(|d| acc.checked_add(d))
                })
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(OracleError::Overflow { power })?;
        v = next;
        out.push(v[i]);
    }
    Ok(out)
}
