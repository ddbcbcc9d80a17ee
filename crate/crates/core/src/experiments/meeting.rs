//! Meeting-time upper bound for the SSEP mixing time on a ring.
//!
//! A labelled SSEP `σ` started from a block of `s` particles is driven by
//! ring clocks `𝒯` (labels on a ringing edge swap). A second labelled SSEP
//! `ζ` starts from a uniform configuration and uses `𝒯_k` on edge `k` while
//! some label `i` sits on that edge at the same site in both processes, and an
//! independent clock `𝒮_k` otherwise. Both are interchange processes, `ζ`
//! stays stationary, and paired labels move together once they meet, so the
//! total-variation distance at `t` is at most `P(some pair has not met)`.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::analytic::ssep_mixing_bounds;
use crate::dynamics::{ClockStream, Family, MergedClocks, StreamId};
use crate::stats::{wilson, LEVEL};

/// Labelled ring occupancy: `at[site]` is the label there, if any.
struct Labelled {
    pos: Vec<usize>,
    at: Vec<Option<u32>>,
}

impl Labelled {
    fn new(k: usize, pos: &[usize]) -> Self {
        let mut at = vec![None; k];
        for (i, &p) in pos.iter().enumerate() {
            assert!(at[p].is_none(), "two labels on site {p}");
            at[p] = Some(i as u32);
        }
        Labelled { pos: pos.to_vec(), at }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.at.swap(a, b);
        for site in [a, b] {
            if let Some(l) = self.at[site] {
                self.pos[l as usize] = site;
            }
        }
    }
}

/// First time every label of `σ` (from `sigma0`) shares its site with the
/// same label of `ζ` (from `zeta0`), or `∞` if that has not happened by
/// `horizon`. Label `i` starts at `sigma0[i]` and `zeta0[i]`.
pub fn meeting_time(k: usize, sigma0: &[usize], zeta0: &[usize], id: StreamId, horizon: f64) -> f64 {
    assert_eq!(sigma0.len(), zeta0.len());
    let mut x = Labelled::new(k, sigma0);
    let mut y = Labelled::new(k, zeta0);
    let all_met = |x: &Labelled, y: &Labelled| x.pos == y.pos;
    if all_met(&x, &y) {
        return 0.0;
    }
    let mut clocks = MergedClocks::new(ClockStream::new(id, k), ClockStream::new(id.lane(1), k));
    loop {
        let (family, ring) = clocks.next_ring();
        if ring.time >= horizon {
            return f64::INFINITY;
        }
        let (a, b) = (ring.edge, (ring.edge + 1) % k);
        let paired = [a, b]
            .iter()
            .any(|&site| matches!((x.at[site], y.at[site]), (Some(i), Some(j)) if i == j));
        match family {
            Family::First => {
                x.swap(a, b);
                if paired {
                    y.swap(a, b);
                }
            }
            Family::Second if !paired => y.swap(a, b),
            Family::Second => continue,
        }
        if all_met(&x, &y) {
            return ring.time;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingReport {
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    pub samples: u64,
    pub master_seed: u64,
    /// Empirical `(1 − ε)`-quantile of the time all pairs have met.
    pub bound: f64,
    /// Smallest sampled time at which the 99% Wilson upper limit of
    /// `P(some pair not met)` is at most `ε`; `None` if never reached.
    pub certified_bound: Option<f64>,
    pub mean_meeting_time: f64,
    /// `(K²/2π²)(log((s ∧ (K−s))/ε) + log(4/π))`.
    pub analytic_upper: f64,
}

/// Meeting-time estimate of an upper bound on `τ^ssep_{K,s}(ε)`, with `σ`
/// started from the block `0..s`.
pub fn mixing_upper_via_meeting(
    k: usize,
    s: usize,
    eps: f64,
    samples: u64,
    master_seed: u64,
) -> Result<MeetingReport, ExperimentError> {
    if s == 0 || s > k {
        return Err(ExperimentError::Invalid(format!("need 0 < s ≤ K, got s = {s}, K = {k}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ExperimentError::Invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    if samples == 0 {
        return Err(ExperimentError::Invalid("need at least one sample".into()));
    }
    let sigma0: Vec<usize> = (0..s).collect();
    let mut times: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let id = StreamId::new(master_seed, i);
            let mut rng = id.lane(2).rng();
            let mut sites: Vec<usize> = (0..k).collect();
            sites.shuffle(&mut rng);
            let mut zeta0 = sites[..s].to_vec();
            zeta0.sort_unstable();
            meeting_time(k, &sigma0, &zeta0, id, f64::INFINITY)
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let n = samples as usize;
    let j = ((n as f64) * (1.0 - eps)).ceil() as usize;
    let bound = times[j.clamp(1, n) - 1];
    let certified_bound = (1..=n)
        .find(|&j| {
            let t = times[j - 1];
            let above = (n - times.partition_point(|&m| m <= t)) as u64;
            wilson(above, samples, LEVEL).upper <= eps
        })
        .map(|j| times[j - 1]);
    let analytic_upper = ssep_mixing_bounds(k, s, eps)?.upper_loose;
    Ok(MeetingReport {
        k,
        s,
        eps,
        samples,
        master_seed,
        bound,
        certified_bound,
        mean_meeting_time: times.iter().sum::<f64>() / n as f64,
        analytic_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colocated_start_meets_at_zero() {
        assert_eq!(meeting_time(8, &[0, 3, 5], &[0, 3, 5], StreamId::new(1, 0), 10.0), 0.0);
    }

    #[test]
    fn paired_labels_stay_together() {
        let id = StreamId::new(4, 2);
        let t = meeting_time(10, &[0, 1, 2], &[4, 7, 9], id, f64::INFINITY);
        assert!(t.is_finite() && t > 0.0);
    }

    #[test]
    fn two_sites_match_exact_mixing() {
        // P(not met at t) = ½ e^{−4t}, and the exact mixing time at ¼ is ln 2 / 4
        let r = mixing_upper_via_meeting(2, 1, 0.25, 40_000, 9).unwrap();
        let exact = 2f64.ln() / 4.0;
        assert!(r.bound > exact / 2.0 && r.bound < 2.0 * exact, "{r:?}");
        assert!((r.bound - exact).abs() < 0.03, "{r:?}");
    }
}
