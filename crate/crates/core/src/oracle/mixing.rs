//! Exact transience and mixing times of the SWT at fixed excess.
//!
//! The state space `Γ_{K,s}` is every configuration with entries `≤ 1` and
//! excess `s`; it is closed under the dynamics. The invariant law `π_{K,s}` is
//! uniform on the trap-free configurations with `s` particles (the Dirac mass
//! at the empty ring when `s = 0`).
//!
//! Distances from a fixed seed to an invariant law are non-increasing in `t`,
//! so the worst-seed mixing time is the maximum of per-seed crossing times.
//! Seeds are screened against the running maximum so that only seeds that
//! beat it are bisected.

use serde::{Deserialize, Serialize};

use super::chain::Chain;
use super::uniformization::{Certified, Series};
use super::OracleError;
use crate::config::SwtConfig;
use crate::dynamics::Swt;

/// Truncation tolerance of every series evaluation in this module.
const TOL: f64 = 1e-13;
/// Relative width at which bisection stops.
const REL_WIDTH: f64 = 1e-10;
const T_MAX: f64 = 1e7;

/// A time known to lie in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBracket {
    pub lo: f64,
    pub hi: f64,
}

impl TimeBracket {
    pub fn exact(t: f64) -> Self {
        TimeBracket { lo: t, hi: t }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// All configurations of length `k` with entries `≤ 1` summing to `s`.
pub fn excess_class(k: usize, s: i64) -> Vec<SwtConfig> {
    assert!(k >= 1, "ring must have at least one site");
    assert!(s <= k as i64, "excess cannot exceed the number of sites");
    // y_j = 1 − ξ_j ≥ 0 with Σ y = k − s
    let total = (k as i64 - s) as i32;
    let mut out = Vec::new();
    let mut y = vec![0i32; k];
    fn rec(j: usize, left: i32, y: &mut [i32], out: &mut Vec<SwtConfig>) {
        if j + 1 == y.len() {
            y[j] = left;
            out.push(SwtConfig::new(y.iter().map(|&v| 1 - v).collect()).expect("valid sites"));
            return;
        }
        for v in 0..=left {
            y[j] = v;
            rec(j + 1, left - v, y, out);
        }
    }
    rec(0, total, &mut y, &mut out);
    out
}

/// Trap-free configurations of length `k` with `s` particles.
pub fn ssep_class(k: usize, s: usize) -> Vec<SwtConfig> {
    assert!(s <= k);
    (0u64..1 << k)
        .filter(|m| m.count_ones() as usize == s)
        .map(|m| SwtConfig::new((0..k).map(|j| ((m >> j) & 1) as i32).collect()).expect("valid sites"))
        .collect()
}

/// Smallest `t` (to relative width [`REL_WIDTH`]) with `f(t) ≤ eps`, given a
/// non-increasing `f`, a point `lo` with `f(lo) > eps`, and an optional known
/// upper point.
fn crossing(mut f: impl FnMut(f64) -> f64, eps: f64, lo: f64, hi: Option<f64>) -> TimeBracket {
    let mut lo = lo;
    let mut hi = match hi {
        Some(h) => h,
        None => {
            let mut h = if lo > 0.0 { 2.0 * lo } else { 1.0 };
            while f(h) > eps {
                lo = h;
                h *= 2.0;
                assert!(h < T_MAX, "distance does not fall below {eps} before t = {T_MAX}");
            }
            h
        }
    };
    while hi - lo > REL_WIDTH * hi.max(1.0) {
        let m = 0.5 * (lo + hi);
        if f(m) > eps {
            lo = m;
        } else {
            hi = m;
        }
    }
    TimeBracket { lo, hi }
}

fn tv(mu: &[f64], pi: &[f64]) -> f64 {
    0.5 * mu.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Exact distance evaluator on `Γ_{K,s}`, with the restricted SSEP chain for
/// comparison.
#[derive(Debug, Clone)]
pub struct ExactMixing {
    k: usize,
    s: i64,
    chain: Chain<SwtConfig>,
    pi: Vec<f64>,
    ssep: Chain<SwtConfig>,
    ssep_pi: Vec<f64>,
}

impl ExactMixing {
    pub fn new(k: usize, s: i64, cap: usize) -> Result<Self, OracleError> {
        if s < 0 {
            return Err(OracleError::Invalid(format!(
                "negative excess {s} has no trap-free invariant law"
            )));
        }
        if s > k as i64 {
            return Err(OracleError::Invalid(format!("excess {s} exceeds ring size {k}")));
        }
        let states = excess_class(k, s);
        if states.len() > cap {
            return Err(OracleError::CapExceeded {
                cap,
                partial: states.len(),
            });
        }
        let chain = Chain::from_states::<Swt>(states)?;
        let ssep = Chain::from_states::<Swt>(ssep_class(k, s as usize))?;
        let n_inv = ssep.len() as f64;
        let pi = chain
            .observe(|x| x.sites().iter().all(|&v| v >= 0))
            .into_iter()
            .map(|b| if b { 1.0 / n_inv } else { 0.0 })
            .collect();
        let ssep_pi = vec![1.0 / n_inv; ssep.len()];
        Ok(ExactMixing {
            k,
            s,
            chain,
            pi,
            ssep,
            ssep_pi,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn chain(&self) -> &Chain<SwtConfig> {
        &self.chain
    }

    pub fn ssep_chain(&self) -> &Chain<SwtConfig> {
        &self.ssep
    }

    /// `d_TV(P_ξ(ξ(t) ∈ ·), π_{K,s})`.
    pub fn d_tv(&self, seed: &SwtConfig, t: f64) -> Result<Certified, OracleError> {
        if t < 0.0 {
            return Err(OracleError::NegativeTime(t));
        }
        let i = self.chain.index_of(seed).ok_or(OracleError::UnknownSeed)?;
        let mut series = Series::forward(self.chain.generator(), i);
        let (mu, err) = series.eval(t, TOL);
        Ok(Certified {
            value: tv(&mu, &self.pi),
            error: err,
        })
    }

    /// `sup_ξ d_TV(t)` over `Γ_{K,s}`, with a maximising seed.
    pub fn worst_tv(&self, t: f64) -> (Certified, SwtConfig) {
        let mut best: Option<(Certified, usize)> = None;
        for i in 0..self.chain.len() {
            let (mu, err) = Series::forward(self.chain.generator(), i).eval(t, TOL);
            let c = Certified {
                value: tv(&mu, &self.pi),
                error: err,
            };
            if best.is_none_or(|(b, _)| c.value > b.value) {
                best = Some((c, i));
            }
        }
        let (c, i) = best.expect("non-empty state space");
        (c, self.chain.states()[i].clone())
    }

    /// `sup_ξ P_ξ(ξ(t) transient)` over `Γ_{K,s}`.
    pub fn worst_transient(&self, t: f64) -> Certified {
        let mut series = Series::backward(self.chain.generator(), self.chain.transient_indicator());
        let (p, err) = series.eval(t, TOL);
        Certified {
            value: p.into_iter().fold(0.0, f64::max),
            error: err,
        }
    }

    /// `θ(ε)`: first time the worst transience probability is `≤ ε`.
    pub fn transience_time(&self, eps: f64) -> TimeBracket {
        if !self.chain.transient_flags().iter().any(|&b| b) {
            return TimeBracket::exact(0.0);
        }
        let mut series = Series::backward(self.chain.generator(), self.chain.transient_indicator());
        let f = |t: f64| series.eval(t, TOL).0.into_iter().fold(0.0, f64::max);
        crossing(f, eps, 0.0, None)
    }

    /// `τ^swt(ε)` with a seed attaining it.
    pub fn mixing_time(&self, eps: f64) -> (TimeBracket, SwtConfig) {
        let (b, i) = worst_crossing(&self.chain, &self.pi, eps);
        (b, self.chain.states()[i].clone())
    }

    /// `τ^ssep(ε)` of the trap-free chain with `s` particles.
    pub fn ssep_mixing_time(&self, eps: f64) -> TimeBracket {
        worst_crossing(&self.ssep, &self.ssep_pi, eps).0
    }

    /// All quantities of the mixing sandwich at `eps`.
    pub fn report(&self, eps: f64) -> MixingReport {
        let theta = self.transience_time(eps);
        let theta_half = self.transience_time(eps / 2.0);
        let tau_ssep = self.ssep_mixing_time(eps);
        let tau_ssep_half = self.ssep_mixing_time(eps / 2.0);
        let (tau_swt, worst) = self.mixing_time(eps);
        let lower_holds = theta.lo.max(tau_ssep.lo) <= tau_swt.hi;
        let upper_holds = tau_swt.lo <= theta_half.hi + tau_ssep_half.hi;
        MixingReport {
            k: self.k,
            s: self.s,
            eps,
            states: self.chain.len(),
            ssep_states: self.ssep.len(),
            theta,
            theta_half,
            tau_ssep,
            tau_ssep_half,
            tau_swt,
            worst_seed: worst.to_string(),
            lower_holds,
            upper_holds,
        }
    }
}

/// Per-seed crossing times, maximised with screening: a seed is bisected only
/// if its distance at the current maximum still exceeds `eps`.
fn worst_crossing(chain: &Chain<SwtConfig>, pi: &[f64], eps: f64) -> (TimeBracket, usize) {
    let mut best = TimeBracket::exact(0.0);
    let mut arg = 0;
    for i in 0..chain.len() {
        let mut series = Series::forward(chain.generator(), i);
        let mut d = |t: f64| tv(&series.eval(t, TOL).0, pi);
        if d(best.hi) <= eps {
            continue;
        }
        best = crossing(&mut d, eps, best.hi, None);
        arg = i;
    }
    (best, arg)
}

/// Exact sandwich values at fixed `(K, s, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub k: usize,
    pub s: i64,
    pub eps: f64,
    pub states: usize,
    pub ssep_states: usize,
    pub theta: TimeBracket,
    pub theta_half: TimeBracket,
    pub tau_ssep: TimeBracket,
    pub tau_ssep_half: TimeBracket,
    pub tau_swt: TimeBracket,
    pub worst_seed: String,
    /// `θ(ε) ∨ τ^ssep(ε) ≤ τ^swt(ε)`, up to bracket width.
    pub lower_holds: bool,
    /// `τ^swt(ε) ≤ θ(ε/2) + τ^ssep(ε/2)`, up to bracket width.
    pub upper_holds: bool,
}

/// Exact mixing analysis of the SWT on `K` sites at excess `s`.
pub fn exact_tv_and_mixing(k: usize, s: i64, eps: f64, cap: usize) -> Result<(ExactMixing, MixingReport), OracleError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(OracleError::Invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    let m = ExactMixing::new(k, s, cap)?;
    let r = m.report(eps);
    Ok((m, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn class_sizes() {
        for s in 0..=3 {
            let k = 6;
            assert_eq!(excess_class(k, s).len() as u64, binom(2 * k as u64 - 1 - s as u64, k as u64 - 1));
        }
        assert_eq!(excess_class(6, 0).len(), 462);
        assert_eq!(ssep_class(6, 2).len(), 15);
        assert!(excess_class(5, 1).iter().all(|x| x.excess() == 1));
    }

    #[test]
    fn two_sites_one_particle() {
        let m = ExactMixing::new(2, 1, 100).unwrap();
        let seed = SwtConfig::new(vec![1, 0]).unwrap();
        for &t in &[0.0, 0.1, 0.4, 1.0] {
            let d = m.d_tv(&seed, t).unwrap();
            assert!((d.value - 0.5 * (-4.0 * t).exp()).abs() < 1e-12, "t={t}");
        }
        let (tau, _) = m.mixing_time(0.25);
        assert!((tau.mid() - 2f64.ln() / 4.0).abs() < 1e-9);
        assert!(tau.width() < 1e-9);
    }

    #[test]
    fn zero_excess_mixing_is_transience() {
        let m = ExactMixing::new(4, 0, 1000).unwrap();
        let theta = m.transience_time(0.25);
        let (tau, _) = m.mixing_time(0.25);
        assert!((theta.mid() - tau.mid()).abs() < 1e-8);
        assert_eq!(m.ssep_mixing_time(0.25), TimeBracket::exact(0.0));
    }

    #[test]
    fn tv_non_increasing() {
        let m = ExactMixing::new(4, 1, 1000).unwrap();
        for seed in m.chain().states().iter().take(10) {
            let mut prev = f64::INFINITY;
            for j in 0..40 {
                let d = m.d_tv(seed, 0.25 * j as f64).unwrap();
                assert!(d.value <= prev + 1e-12);
                prev = d.value;
            }
        }
    }

    #[test]
    fn rejects_negative_excess() {
        assert!(matches!(ExactMixing::new(4, -1, 100), Err(OracleError::Invalid(_))));
    }
}
