//! Closed-form quantities: the expected occupation of the SSEP on a segment
//! with empty reservoirs, the reference times `t*` and `τ*`, bound envelopes
//! for transience and mixing times, and exit-time bounds for random walks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::poisson_weights;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("system size must be at least 2, got {0}")]
    SizeTooSmall(usize),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("ε must lie in (0, 1), got {0}")]
    EpsOutOfRange(f64),
    #[error("excess {s} out of range for K = {k}")]
    ExcessOutOfRange { s: usize, k: usize },
    #[error("λ = {lambda} outside (0, {max})")]
    LambdaOutOfRange { lambda: f64, max: f64 },
    #[error("calibration constant must be positive, got {0}")]
    BadConstant(f64),
}

fn check_size(k: usize) -> Result<(), AnalyticError> {
    if k < 2 {
        Err(AnalyticError::SizeTooSmall(k))
    } else {
        Ok(())
    }
}

fn check_eps(eps: f64) -> Result<(), AnalyticError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(AnalyticError::EpsOutOfRange(eps))
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `K² log K / π²`.
pub fn t_star(k: usize) -> f64 {
    let k = k as f64;
    k * k * k.ln() / (PI * PI)
}

/// Eigen-data of the discrete Laplacian on `⟦1, K−1⟧` with Dirichlet
/// boundary, in the basis `φ_l(k) = √2 sin(πlk/K)`, orthonormal for
/// `⟨f, g⟩ = K⁻¹ Σ f(k) g(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub k: usize,
    /// `λ_l = 2(1 − cos(πl/K))`, `l = 1..K−1`.
    pub eigenvalues: Vec<f64>,
    /// `c_l = ⟨𝟙_{K/2}, φ_l⟩ = (√2/K) sin(πl/2)`.
    pub c: Vec<f64>,
    /// `c'_l = ⟨𝟙, φ_l⟩ = (√2/K) sin²(πl/2) / tan(πl/2K)`.
    pub c_prime: Vec<f64>,
}

impl SpectralSummary {
    pub fn new(k: usize) -> Result<Self, AnalyticError> {
        check_size(k)?;
        let kf = k as f64;
        let ls = 1..k;
        let eigenvalues = ls.clone().map(|l| 2.0 * (1.0 - (PI * l as f64 / kf).cos())).collect();
        // sin(πl/2) ∈ {0, 1, 0, −1}, taken exactly
        let sin_half = |l: usize| [0.0, 1.0, 0.0, -1.0][l % 4];
        let c = ls.clone().map(|l| 2f64.sqrt() / kf * sin_half(l)).collect();
        let c_prime = ls
            .map(|l| {
                let s = sin_half(l);
                2f64.sqrt() / kf * s * s / (PI * l as f64 / (2.0 * kf)).tan()
            })
            .collect();
        Ok(SpectralSummary {
            k,
            eigenvalues,
            c,
            c_prime,
        })
    }

    /// `E_𝟙[|σ(t)|] = K Σ_l c'_l² e^{−λ_l t}`, the expected number of
    /// particles starting from the full segment. All terms are non-negative.
    pub fn occupation(&self, t: f64) -> f64 {
        let kf = self.k as f64;
        kf * compensated_sum(
            self.c_prime
                .iter()
                .zip(&self.eigenvalues)
                .step_by(2)
                .map(|(cp, lam)| cp * cp * (-lam * t).exp()),
        )
    }

    /// `E_{𝟙_{K/2}}[|σ(t)|] = K Σ_l c_l c'_l e^{−λ_l t}` for a single particle
    /// started at the midpoint; only defined for even `K`. The signed odd-`l`
    /// terms are summed directly.
    pub fn centred_occupation(&self, t: f64) -> Option<f64> {
        if self.k % 2 != 0 {
            return None;
        }
        let kf = self.k as f64;
        Some(
            kf * compensated_sum(
                self.c
                    .iter()
                    .zip(&self.c_prime)
                    .zip(&self.eigenvalues)
                    .step_by(2)
                    .map(|((c, cp), lam)| c * cp * (-lam * t).exp()),
            ),
        )
    }

    /// Single-mode bound `(2/K) e^{−λ_1 t} / tan(π/2K)` on
    /// [`SpectralSummary::centred_occupation`].
    pub fn centred_bound(&self, t: f64) -> f64 {
        let kf = self.k as f64;
        2.0 / kf * (-self.eigenvalues[0] * t).exp() / (PI / (2.0 * kf)).tan()
    }
}

/// Expected occupation of the reservoir SSEP at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupation {
    pub k: usize,
    pub t: f64,
    /// From the full segment.
    pub full: f64,
    /// From a single midpoint particle (even `K` only).
    pub centred: Option<f64>,
    /// Single-mode upper bound on `centred`.
    pub centred_bound: f64,
}

pub fn spectral_occupation(k: usize, t: f64) -> Result<Occupation, AnalyticError> {
    if t < 0.0 {
        return Err(AnalyticError::NegativeTime(t));
    }
    let s = SpectralSummary::new(k)?;
    Ok(Occupation {
        k,
        t,
        full: s.occupation(t),
        centred: s.centred_occupation(t),
        centred_bound: s.centred_bound(t),
    })
}

/// `τ*_{K,s}`; `degenerate` is set when the occupation starts at or below
/// the target, in which case `time = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauStar {
    pub k: usize,
    pub s: usize,
    pub time: f64,
    pub degenerate: bool,
}

const TAU_REL_TOL: f64 = 1e-8;

/// Smallest `t` with `E_𝟙[|σ(t)|] ≤ max(s, 1)`.
pub fn tau_star(k: usize, s: usize) -> Result<TauStar, AnalyticError> {
    let spec = SpectralSummary::new(k)?;
    let target = s.max(1) as f64;
    // the occupation at t = 0 is exactly K − 1
    if k - 1 <= s.max(1) {
        return Ok(TauStar {
            k,
            s,
            time: 0.0,
            degenerate: true,
        });
    }
    let mut lo = 0.0;
    let mut hi = (k * k) as f64;
    while spec.occupation(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > TAU_REL_TOL * hi {
        let m = 0.5 * (lo + hi);
        if spec.occupation(m) > target {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(TauStar {
        k,
        s,
        time: hi,
        degenerate: false,
    })
}

/// Lower and upper transience-time bounds at excess `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransienceBounds {
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    pub constant: f64,
    /// `(K²/π²) log(K/(s∨1))`.
    pub leading: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn transience_bounds(k: usize, s: usize, eps: f64, constant: f64) -> Result<TransienceBounds, AnalyticError> {
    check_size(k)?;
    check_eps(eps)?;
    if s > k {
        return Err(AnalyticError::ExcessOutOfRange { s, k });
    }
    if !(constant > 0.0) {
        return Err(AnalyticError::BadConstant(constant));
    }
    let kf = k as f64;
    let k2 = kf * kf;
    let leading = k2 / (PI * PI) * (kf / s.max(1) as f64).ln();
    let lower = (leading - constant * k2 * (1.0 + (1.0 / (1.0 - eps)).ln())).max(0.0);
    let upper = (leading + constant * k2 * (1.0 + (3.0 * kf.ln() / eps).ln())).max(0.0);
    Ok(TransienceBounds {
        k,
        s,
        eps,
        constant,
        leading,
        lower,
        upper,
    })
}

/// SSEP mixing-time bounds on the ring with `s` particles. The vanishing
/// correction of `upper_loose` and the `O(K²)` corrections of `lower` and
/// `upper_sharp` are not included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsepMixingBounds {
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    /// `(K²/8π²) log(s ∧ (K−s))`.
    pub lower: f64,
    /// Leading term of the sharp upper bound; equal to `lower`.
    pub upper_sharp: f64,
    /// `(K²/2π²)(log((s ∧ (K−s))/ε) + log(4/π))`.
    pub upper_loose: f64,
    /// Whether `s ∧ (K−s)` is large enough for `lower`/`upper_sharp` to be
    /// in their asymptotic regime (see [`BOUNDED_MAX`]).
    pub asymptotic_regime: bool,
    pub vanishing_term_dropped: bool,
}

impl SsepMixingBounds {
    /// Sharp upper bound with an explicit `c·K²` correction.
    pub fn upper_sharp_with(&self, c: f64) -> f64 {
        self.upper_sharp + c * (self.k * self.k) as f64
    }
}

pub fn ssep_mixing_bounds(k: usize, s: usize, eps: f64) -> Result<SsepMixingBounds, AnalyticError> {
    check_eps(eps)?;
    if s > k {
        return Err(AnalyticError::ExcessOutOfRange { s, k });
    }
    let sharp = s.min(k - s);
    let k2 = (k * k) as f64;
    let (lower, upper_loose) = if sharp == 0 {
        (0.0, 0.0)
    } else {
        let l = k2 / (8.0 * PI * PI) * (sharp as f64).ln();
        let u = k2 / (2.0 * PI * PI) * ((sharp as f64 / eps).ln() + (4.0 / PI).ln());
        (l, u)
    };
    Ok(SsepMixingBounds {
        k,
        s,
        eps,
        lower,
        upper_sharp: lower,
        upper_loose,
        asymptotic_regime: sharp > BOUNDED_MAX,
        vanishing_term_dropped: sharp != 0,
    })
}

/// Particle numbers `s ∧ (K−s)` up to this value count as bounded.
pub const BOUNDED_MAX: usize = 3;
/// Fractions `s/K` at least this far from `0` and `1` count as linear.
pub const LINEAR_MIN: f64 = 0.1;

/// Growth regime of `s` relative to `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "regime")]
pub enum Regime {
    Zero,
    Bounded,
    /// `s = K^α < K/2`.
    Power { alpha: f64 },
    /// `s = δK`.
    Linear { delta: f64 },
    /// `s = K − K^α`.
    CoPower { alpha: f64 },
    /// `s = K − O(1)`.
    CoBounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominant {
    Transience,
    SsepMixing,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffVerdict {
    Yes,
    Unknown,
}

/// Regime of `(K, s)` with the term that dominates the mixing time and
/// whether cutoff is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub regime: Regime,
    pub dominant: Dominant,
    pub cutoff: CutoffVerdict,
}

impl RegimeClass {
    /// `"?"` when cutoff is not known, otherwise the dominating term.
    pub fn label(&self) -> &'static str {
        if self.cutoff == CutoffVerdict::Unknown {
            return "?";
        }
        match self.dominant {
            Dominant::Transience => "transience dominates",
            Dominant::SsepMixing => "SSEP mixing dominates",
            Dominant::Undetermined => "?",
        }
    }
}

pub fn classify_regime(k: usize, s: usize) -> RegimeClass {
    use CutoffVerdict::*;
    use Dominant::*;
    let kf = k as f64;
    let delta = s as f64 / kf;
    let co = k.saturating_sub(s);
    let (regime, dominant, cutoff) = if s == 0 {
        (Regime::Zero, Transience, Yes)
    } else if s <= BOUNDED_MAX {
        (Regime::Bounded, Transience, Yes)
    } else if co <= BOUNDED_MAX {
        (Regime::CoBounded, Undetermined, Unknown)
    } else if (LINEAR_MIN..=1.0 - LINEAR_MIN).contains(&delta) {
        (Regime::Linear { delta }, SsepMixing, Yes)
    } else if delta < LINEAR_MIN {
        // both terms of order K² log K: (1−α)/π² against α/8π²
        let alpha = (s as f64).ln() / kf.ln();
        let dom = if 1.0 - alpha > alpha / 8.0 {
            Transience
        } else {
            SsepMixing
        };
        (Regime::Power { alpha }, dom, Unknown)
    } else {
        let alpha = (co as f64).ln() / kf.ln();
        (Regime::CoPower { alpha }, SsepMixing, Yes)
    };
    RegimeClass {
        regime,
        dominant,
        cutoff,
    }
}

/// Bounds on the SWT mixing time at excess `s`, assembled from
/// [`transience_bounds`] and [`ssep_mixing_bounds`] at `ε` and `ε/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub k: usize,
    pub s: usize,
    pub eps: f64,
    pub constant: f64,
    pub transience: TransienceBounds,
    pub transience_half: TransienceBounds,
    pub ssep: SsepMixingBounds,
    pub ssep_half: SsepMixingBounds,
    /// `ϑ^swt(ε) ∨ ϑ^ssep(ε)`.
    pub lower: f64,
    /// `Θ^swt(ε/2) + Θ^ssep(ε/2)`, with the loose SSEP bound.
    pub upper: f64,
    pub regime: RegimeClass,
}

pub fn swt_mixing_sandwich(k: usize, s: usize, eps: f64, constant: f64) -> Result<BoundEnvelope, AnalyticError> {
    let transience = transience_bounds(k, s, eps, constant)?;
    let transience_half = transience_bounds(k, s, eps / 2.0, constant)?;
    let ssep = ssep_mixing_bounds(k, s, eps)?;
    let ssep_half = ssep_mixing_bounds(k, s, eps / 2.0)?;
    Ok(BoundEnvelope {
        k,
        s,
        eps,
        constant,
        transience,
        transience_half,
        ssep,
        ssep_half,
        lower: transience.lower.max(ssep.lower),
        upper: transience_half.upper + ssep_half.upper_loose,
        regime: classify_regime(k, s),
    })
}

/// `√(24/11)`: the scaled parameter `λK` of the continuous-time bound.
pub fn rw_default_lambda_scaled() -> f64 {
    (24.0f64 / 11.0).sqrt()
}

/// `1/cos(√(24/11))`.
pub fn rw_constant() -> f64 {
    1.0 / rw_default_lambda_scaled().cos()
}

/// Bound on `P(discrete walk has not left (−K, K) after n steps)`:
/// `cos(λ)ⁿ / cos(λK)` for `0 < λ < π/2K`.
pub fn rw_exit_bound_discrete(k: usize, lambda: f64, n: u64) -> Result<f64, AnalyticError> {
    if k == 0 {
        return Err(AnalyticError::SizeTooSmall(k));
    }
    let max = PI / (2.0 * k as f64);
    if !(lambda > 0.0 && lambda < max) {
        return Err(AnalyticError::LambdaOutOfRange { lambda, max });
    }
    Ok(lambda.cos().powf(n as f64) / (lambda * k as f64).cos())
}

/// Continuous-time walk with jump rate 1: `e^{−s(1−cos λ)} / cos(λK)`.
pub fn rw_exit_bound_continuous_lambda(k: usize, lambda: f64, s: f64) -> Result<f64, AnalyticError> {
    if s < 0.0 {
        return Err(AnalyticError::NegativeTime(s));
    }
    let max = PI / (2.0 * k as f64);
    if !(lambda > 0.0 && lambda < max) {
        return Err(AnalyticError::LambdaOutOfRange { lambda, max });
    }
    Ok((-s * (1.0 - lambda.cos())).exp() / (lambda * k as f64).cos())
}

/// `C e^{−s/K²}` with `C = 1/cos(√(24/11))`; requires `K ≥ 2` so that
/// `λ = √(24/11)/K ≤ 1`.
pub fn rw_exit_bound_continuous(k: usize, s: f64) -> Result<f64, AnalyticError> {
    check_size(k)?;
    if s < 0.0 {
        return Err(AnalyticError::NegativeTime(s));
    }
    let kf = k as f64;
    Ok(rw_constant() * (-s / (kf * kf)).exp())
}

/// Reference size at which the default calibration constant is computed.
pub const CALIBRATION_K: usize = 64;

/// Calibration of the unspecified constant in the transience bounds:
/// `c = −log sup_i P_i(T_0 ≥ 2K²)` for the walk on `{0, …, K}` jumping to
/// each neighbour at rate 1, absorbed at `0` and reflected at `K`, and
/// `C = 2/c ∨ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub k: usize,
    pub survival: f64,
    pub rate: f64,
    pub constant: f64,
}

pub fn calibrate(k: usize) -> Result<Calibration, AnalyticError> {
    check_size(k)?;
    // states 1..=K, index i−1; uniformized with Λ = 2
    let t = 2.0 * (k * k) as f64;
    let lambda = 2.0;
    let pw = poisson_weights(lambda * t, 1e-14);
    let mut v = vec![1.0f64; k];
    let mut acc: Vec<f64> = v.iter().map(|x| x * pw.weights[0]).collect();
    for w in &pw.weights[1..] {
        let next: Vec<f64> = (0..k)
            .map(|i| {
                let left = if i == 0 { 0.0 } else { v[i - 1] };
                if i + 1 == k {
                    0.5 * left + 0.5 * v[i]
                } else {
                    0.5 * left + 0.5 * v[i + 1]
                }
            })
            .collect();
        v = next;
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += w * x;
        }
    }
    let survival = acc.iter().copied().fold(0.0, f64::max);
    let rate = -survival.ln();
    Ok(Calibration {
        k,
        survival,
        rate,
        constant: (2.0 / rate).max(2.0),
    })
}

/// Default calibration constant `C` (computed at [`CALIBRATION_K`]).
pub fn default_constant() -> f64 {
    calibrate(CALIBRATION_K).expect("valid size").constant
}
