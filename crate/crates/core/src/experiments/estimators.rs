//! Monte Carlo estimators of transience probabilities and transience times.
//!
//! Trajectory `i` always draws from stream `(master_seed, i)`, and only sums
//! and counts are aggregated, so results do not depend on the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::analytic::{rw_constant, t_star};
use crate::config::SwtConfig;
use crate::dynamics::{sample_exit_time, StreamId};
use crate::stats::{wilson, Proportion, LEVEL};

/// Horizon for transience experiments, in units of `t*_K`.
pub const HORIZON_FACTOR: f64 = 4.0;

/// Exit times of trajectories `first..first+count`, `∞` when still
/// transient at `horizon`.
pub fn sample_exit_times(xi: &SwtConfig, first: u64, count: u64, master_seed: u64, horizon: f64) -> Vec<f64> {
    (first..first + count)
        .into_par_iter()
        .map(|i| sample_exit_time(xi, StreamId::new(master_seed, i), horizon))
        .collect()
}

/// Point estimate of a probability with its Wilson interval and run data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub t: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub samples: u64,
    pub master_seed: u64,
    pub horizon: f64,
    /// Runs still transient at the horizon.
    pub censored: u64,
    pub wall_clock_secs: f64,
}

impl EstimatorReport {
    fn new(t: f64, hits: u64, samples: u64, master_seed: u64, horizon: f64, censored: u64, started: Instant) -> Self {
        let w = wilson(hits, samples, LEVEL);
        EstimatorReport {
            t,
            estimate: w.estimate,
            lower: w.lower,
            upper: w.upper,
            level: w.level,
            samples,
            master_seed,
            horizon,
            censored,
            wall_clock_secs: started.elapsed().as_secs_f64(),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Estimate `P_ξ(ξ(t) is transient)` from `samples` trajectories run to `t`.
pub fn estimate_transience_prob(
    xi: &SwtConfig,
    t: f64,
    samples: u64,
    master_seed: u64,
) -> Result<EstimatorReport, ExperimentError> {
    if samples == 0 {
        return Err(ExperimentError::Invalid("need at least one sample".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ExperimentError::Invalid(format!("time must be finite and non-negative, got {t}")));
    }
    let started = Instant::now();
    let exits = sample_exit_times(xi, 0, samples, master_seed, t);
    let hits = exits.iter().filter(|&&e| e > t).count() as u64;
    Ok(EstimatorReport::new(t, hits, samples, master_seed, t, hits, started))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptions {
    pub horizon: f64,
    /// Initial number of trajectories; the pool doubles when a test point
    /// cannot be decided.
    pub initial_samples: u64,
    pub max_samples: u64,
    /// Bisection stops once `hi − lo ≤ rel_width · hi`.
    pub rel_width: f64,
    pub master_seed: u64,
}

impl ThetaOptions {
    /// Defaults for ring size `k`: horizon `4 t*_K`, 2000 to 64000 samples.
    pub fn for_size(k: usize, master_seed: u64) -> Self {
        ThetaOptions {
            horizon: HORIZON_FACTOR * t_star(k.max(2)),
            initial_samples: 2_000,
            max_samples: 64_000,
            rel_width: 1e-3,
            master_seed,
        }
    }
}

/// A bracket `[lower, upper]` for `θ(ε)`: at `lower` the transience
/// probability is certified above `ε`, at `upper` at most `ε`, each at 99%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub eps: f64,
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub samples: u64,
    pub censored: u64,
    /// `false` when bisection stopped at a point that stayed undecided at
    /// the sample budget; the bracket is still certified.
    pub resolved: bool,
    pub horizon: f64,
    pub master_seed: u64,
    pub wall_clock_secs: f64,
}

struct Pool<'a> {
    xi: &'a SwtConfig,
    exits: Vec<f64>,
    max: u64,
    horizon: f64,
    seed: u64,
}

enum Side {
    Above,
    AtMost,
    Undecided(Proportion),
}

impl Pool<'_> {
    fn grow(&mut self) -> bool {
        let n = self.exits.len() as u64;
        if n >= self.max {
            return false;
        }
        let more = n.min(self.max - n).max(1);
        self.exits
            .extend(sample_exit_times(self.xi, n, more, self.seed, self.horizon));
        true
    }

    /// Compare `p(t)` with `eps`, drawing more trajectories while undecided.
    fn side(&mut self, t: f64, eps: f64) -> Side {
        loop {
            let n = self.exits.len() as u64;
            let hits = self.exits.iter().filter(|&&e| e > t).count() as u64;
            let w = wilson(hits, n, LEVEL);
            if w.lower > eps {
                return Side::Above;
            }
            if w.upper <= eps {
                return Side::AtMost;
            }
            if !self.grow() {
                return Side::Undecided(w);
            }
        }
    }
}

/// Bracket `θ(ε) = inf{t : P_ξ(ξ(t) transient) ≤ ε}` by bisection on
/// `[0, horizon]` with sequential Wilson tests. Trajectories are shared
/// between test points, since one exit time answers every `t`.
pub fn estimate_theta(xi: &SwtConfig, eps: f64, opts: ThetaOptions) -> Result<ThetaEstimate, ExperimentError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ExperimentError::Invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    let started = Instant::now();
    let finish = |lower: f64, upper: f64, pool: &Pool, resolved: bool| ThetaEstimate {
        eps,
        lower,
        upper,
        estimate: 0.5 * (lower + upper),
        samples: pool.exits.len() as u64,
        censored: pool.exits.iter().filter(|e| e.is_infinite()).count() as u64,
        resolved,
        horizon: opts.horizon,
        master_seed: opts.master_seed,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    let mut pool = Pool {
        xi,
        exits: Vec::new(),
        max: opts.max_samples.max(1),
        horizon: opts.horizon,
        seed: opts.master_seed,
    };
    if !xi.phase().is_transient() {
        return Ok(finish(0.0, 0.0, &pool, true));
    }
    pool.exits = sample_exit_times(xi, 0, opts.initial_samples.clamp(1, pool.max), opts.master_seed, opts.horizon);
    // the probability is 1 at t = 0 and right-continuous, so lo = 0 needs no test
    let (mut lo, mut hi) = (0.0, opts.horizon);
    match pool.side(hi, eps) {
        Side::AtMost => {}
        Side::Above => {
            return Err(ExperimentError::HorizonTooShort {
                horizon: opts.horizon,
                eps,
            })
        }
        Side::Undecided(w) => {
            return Err(ExperimentError::IndeterminateAtBudget {
                t: hi,
                lower: w.lower,
                upper: w.upper,
                samples: w.trials,
            })
        }
    }
    while hi - lo > opts.rel_width * hi {
        let mid = 0.5 * (lo + hi);
        match pool.side(mid, eps) {
            Side::Above => lo = mid,
            Side::AtMost => hi = mid,
            Side::Undecided(_) => return Ok(finish(lo, hi, &pool, false)),
        }
    }
    Ok(finish(lo, hi, &pool, true))
}

/// One cell of a cutoff profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub k: usize,
    /// Time in units of `t*_K`.
    pub u: f64,
    pub t: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: u64,
    pub censored: u64,
    /// `min(1, C·K^{1−u/π²})`: union bound over labels of the probability
    /// that one of them has not covered the ring by time `u·t*_K`.
    pub envelope: f64,
}

/// Steepness of one profile around its ½-crossing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub k: usize,
    /// Linear interpolation of the ½-crossing, in units of `t*_K`.
    pub half_crossing: Option<f64>,
    /// `−Δp/Δu` across the grid cell containing the crossing.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub rows: Vec<ProfileRow>,
    pub summaries: Vec<ProfileSummary>,
    pub master_seed: u64,
}

/// Union-bound envelope `min(1, C·K^{1−u/π²})`.
pub fn cover_envelope(k: usize, u: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    (rw_constant() * (k as f64).powf(1.0 - u / pi2)).min(1.0)
}

/// Transience profile `p̂(K, u·t*_K)` for each `K` on the grid `us`. All
/// grid points of one `K` use the same trajectories; runs are censored at
/// `max(4, max u)·t*_K` and counted transient.
pub fn cutoff_profile(
    ks: &[usize],
    us: &[f64],
    family: &dyn Fn(usize) -> Result<SwtConfig, ExperimentError>,
    samples: u64,
    master_seed: u64,
) -> Result<CutoffProfile, ExperimentError> {
    if samples == 0 {
        return Err(ExperimentError::Invalid("need at least one sample".into()));
    }
    if us.iter().any(|&u| !(u >= 0.0 && u.is_finite())) {
        return Err(ExperimentError::Invalid("grid points must be finite and non-negative".into()));
    }
    let umax = us.iter().cloned().fold(HORIZON_FACTOR, f64::max);
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &k in ks {
        let xi = family(k)?;
        let ts = t_star(k.max(2));
        let horizon = umax * ts;
        let exits = sample_exit_times(&xi, 0, samples, master_seed, horizon);
        let censored = exits.iter().filter(|e| e.is_infinite()).count() as u64;
        let mut cells = Vec::new();
        for &u in us {
            let t = u * ts;
            let hits = exits.iter().filter(|&&e| e > t).count() as u64;
            let w = wilson(hits, samples, LEVEL);
            cells.push((u, w.estimate));
            rows.push(ProfileRow {
                k,
                u,
                t,
                estimate: w.estimate,
                lower: w.lower,
                upper: w.upper,
                samples,
                censored,
                envelope: cover_envelope(k, u),
            });
        }
        cells.sort_by(|a, b| a.0.total_cmp(&b.0));
        let crossing = cells.windows(2).find(|w| w[0].1 >= 0.5 && w[1].1 < 0.5);
        summaries.push(ProfileSummary {
            k,
            half_crossing: crossing.map(|w| {
                let (u0, p0, u1, p1) = (w[0].0, w[0].1, w[1].0, w[1].1);
                u0 + (p0 - 0.5) / (p0 - p1) * (u1 - u0)
            }),
            slope: crossing.map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0)),
        });
    }
    Ok(CutoffProfile {
        rows,
        summaries,
        master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swt(v: &[i32]) -> SwtConfig {
        SwtConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn frozen_config_never_transient() {
        let r = estimate_transience_prob(&swt(&[1, 0, 1, 0]), 3.0, 500, 1).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.lower, 0.0);
        assert!(r.upper > 0.0 && r.upper < 0.02);
        assert_eq!(r.censored, 0);
    }

    #[test]
    fn two_site_closed_form() {
        let r = estimate_transience_prob(&swt(&[1, -1]), 1.0, 100_000, 11).unwrap();
        assert!(r.contains((-2.0f64).exp()), "{r:?}");
        assert!(r.lower <= r.estimate && r.estimate <= r.upper);
    }

    #[test]
    fn deterministic_given_seed() {
        let x = swt(&[1, 1, -1, 0, 1, -1]);
        let a = estimate_transience_prob(&x, 2.0, 3000, 5).unwrap();
        let b = estimate_transience_prob(&x, 2.0, 3000, 5).unwrap();
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn theta_of_two_sites() {
        let eps = (-2.0f64).exp();
        let opts = ThetaOptions {
            horizon: 10.0,
            initial_samples: 4_000,
            max_samples: 256_000,
            rel_width: 1e-3,
            master_seed: 3,
        };
        let th = estimate_theta(&swt(&[1, -1]), eps, opts).unwrap();
        assert!(th.lower <= 1.0 && 1.0 <= th.upper, "{th:?}");
        assert!(th.upper - th.lower < 0.2);
    }

    #[test]
    fn theta_near_one_brackets_zero() {
        let opts = ThetaOptions {
            horizon: 10.0,
            initial_samples: 4_000,
            max_samples: 64_000,
            rel_width: 1e-3,
            master_seed: 3,
        };
        let th = estimate_theta(&swt(&[1, -1]), 0.999, opts).unwrap();
        assert_eq!(th.lower, 0.0);
        assert!(th.upper < 0.01, "{th:?}");
    }

    #[test]
    fn theta_decreases_in_eps() {
        let x = swt(&[1, 1, 1, -3]);
        let opts = ThetaOptions::for_size(4, 8);
        let ths: Vec<f64> = [0.1, 0.25, 0.5, 0.75]
            .iter()
            .map(|&e| estimate_theta(&x, e, opts).unwrap().estimate)
            .collect();
        assert!(ths.windows(2).all(|w| w[0] >= w[1]), "{ths:?}");
    }

    #[test]
    fn horizon_too_short() {
        let opts = ThetaOptions {
            horizon: 0.01,
            ..ThetaOptions::for_size(4, 1)
        };
        let err = estimate_theta(&swt(&[1, 1, 1, -3]), 0.25, opts).unwrap_err();
        assert!(matches!(err, ExperimentError::HorizonTooShort { .. }));
    }

    #[test]
    fn profile_starts_at_one() {
        let fam = |k: usize| crate::experiments::single_deep_trap_critical(k);
        let p = cutoff_profile(&[6, 8], &[0.0, 0.5, 1.0, 2.0], &fam, 2000, 1).unwrap();
        assert_eq!(p.rows.len(), 8);
        for r in p.rows.iter().filter(|r| r.u == 0.0) {
            assert_eq!(r.estimate, 1.0);
        }
        for s in &p.summaries {
            assert!(s.half_crossing.is_some());
        }
    }
}
