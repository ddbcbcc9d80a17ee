//! Random-walk exit tails and the occupation of the reservoir SSEP.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::analytic::{rw_constant, spectral_occupation};
use crate::config::SegmentSsepConfig;
use crate::dynamics::{ClockStream, RingDynamics, SegmentSsep, StreamId};
use crate::stats::{wilson, LEVEL};

/// Exit time from `(−K, K)` of a rate-1 simple random walk on `ℤ` from 0.
pub fn rw_exit_time(k: usize, id: StreamId) -> f64 {
    let mut rng = id.rng();
    let k = k as i64;
    let (mut x, mut t) = (0i64, 0.0);
    while x.abs() < k {
        t += rng.sample::<f64, _>(Exp1);
        x += if rng.random::<bool>() { 1 } else { -1 };
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitTailRow {
    pub s: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// `C e^{−s/K²}` with `C = 1/cos √(24/11)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitTailReport {
    pub k: usize,
    pub samples: u64,
    pub master_seed: u64,
    pub rows: Vec<ExitTailRow>,
}

impl ExitTailReport {
    /// Whether every empirical tail is at most its bound.
    pub fn dominated(&self) -> bool {
        self.rows.iter().all(|r| r.estimate <= r.bound)
    }
}

/// Empirical `P(T_K > s)` against `C e^{−s/K²}` for each `s` in `times`.
pub fn rw_exit_tail(k: usize, times: &[f64], samples: u64, master_seed: u64) -> Result<ExitTailReport, ExperimentError> {
    if k == 0 || samples == 0 {
        return Err(ExperimentError::Invalid("need K ≥ 1 and at least one sample".into()));
    }
    let exits: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| rw_exit_time(k, StreamId::new(master_seed, i)))
        .collect();
    let k2 = (k * k) as f64;
    let rows = times
        .iter()
        .map(|&s| {
            let hits = exits.iter().filter(|&&e| e > s).count() as u64;
            let w = wilson(hits, samples, LEVEL);
            ExitTailRow {
                s,
                estimate: w.estimate,
                lower: w.lower,
                upper: w.upper,
                bound: rw_constant() * (-s / k2).exp(),
            }
        })
        .collect();
    Ok(ExitTailReport {
        k,
        samples,
        master_seed,
        rows,
    })
}

/// Monte Carlo mean of `|σ(t)|` for the SSEP on `K − 1` sites with empty
/// reservoirs started full, next to the spectral value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationComparison {
    pub k: usize,
    pub t: f64,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    pub spectral: f64,
}

impl OccupationComparison {
    /// `|mean − spectral|` in standard errors. When every sample agreed the
    /// sample error is zero; the count is a sum of negatively associated
    /// indicators, so its variance is at most its mean and
    /// `sqrt(spectral / samples)` is used instead.
    pub fn z_score(&self) -> f64 {
        let se = if self.std_error > 0.0 {
            self.std_error
        } else {
            (self.spectral / self.samples as f64).sqrt()
        };
        if se == 0.0 {
            if self.mean == self.spectral {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - self.spectral).abs() / se
        }
    }
}

/// Particles left at `t` in one run of the reservoir SSEP on `K − 1` sites.
pub fn segment_count_at(k: usize, t: f64, id: StreamId) -> u64 {
    let mut s = SegmentSsepConfig::full(k - 1);
    let mut clocks = ClockStream::new(id, k);
    loop {
        let r = clocks.next_ring();
        if r.time >= t {
            return s.particle_count();
        }
        SegmentSsep::apply(&mut s, r.edge);
    }
}

pub fn segment_occupation_mc(
    k: usize,
    t: f64,
    samples: u64,
    master_seed: u64,
) -> Result<OccupationComparison, ExperimentError> {
    if k < 2 || samples < 2 {
        return Err(ExperimentError::Invalid("need K ≥ 2 and at least two samples".into()));
    }
    let spectral = spectral_occupation(k, t)?.full;
    let (sum, sum2) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let c = segment_count_at(k, t, StreamId::new(master_seed, i)) as f64;
            (c, c * c)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(OccupationComparison {
        k,
        t,
        samples,
        mean,
        std_error: (var / n).sqrt(),
        spectral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_from_one_is_first_step() {
        // from 0 the walk leaves (−1, 1) at its first jump: Exp(1)
        let r = rw_exit_tail(1, &[1.0], 20_000, 2).unwrap();
        let row = &r.rows[0];
        assert!(row.lower <= (-1.0f64).exp() && (-1.0f64).exp() <= row.upper, "{row:?}");
    }

    #[test]
    fn single_site_occupation() {
        let c = segment_occupation_mc(2, 0.5, 20_000, 4).unwrap();
        assert!((c.spectral - (-1.0f64).exp()).abs() < 1e-12);
        assert!(c.z_score() < 4.0, "{c:?}");
    }
}
