//! Exact counterexamples showing that the SWT does not preserve negative
//! dependence.
//!
//! * Occupation by any particle: on `(1,1,−1,0,−1)` a particle between the
//!   two traps means the other one has been trapped, so
//!   `P(X₄ = 1, X₃ + X₅ ≥ 1) = P(X₄ = 1) > P(X₄ = 1) P(X₃ + X₅ ≥ 1)`.
//! * Occupation by live particles: on `(−3,1,1,1,0,−1,0)` with
//!   `f = 1{ξ₆ = 1}`, `g = 1{ξ₇ = 1}`, `h = fg`, the first non-zero
//!   generator powers at the seed are of order 5, 6 and 10, so for small `t`,
//!   `P_t h ≈ t¹⁰ ≫ P_t f · P_t g ≈ t¹¹`.

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::config::SwtConfig;
use crate::dynamics::Swt;
use crate::oracle::{generator_power_value, Certified, Chain, Series, DEFAULT_STATE_CAP};

/// Seed of the any-particle counterexample (sites 1-based in the docs).
pub fn any_particle_seed() -> SwtConfig {
    SwtConfig::new(vec![1, 1, -1, 0, -1]).expect("valid")
}

/// Seed of the live-particle counterexample.
pub fn live_particle_seed() -> SwtConfig {
    SwtConfig::new(vec![-3, 1, 1, 1, 0, -1, 0]).expect("valid")
}

/// Tolerance for the any-particle comparison at `t = 1`.
pub const CASE1_TOL: f64 = 1e-13;
/// Tolerance for the live-particle comparison at small `t`, far below `t¹⁰/10!`.
pub const CASE2_TOL: f64 = 1e-60;
/// Time of the small-`t` live-particle comparison.
pub const CASE2_T: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnyParticleCase {
    pub seed: SwtConfig,
    pub t: f64,
    /// `P(X₄ = 1)`.
    pub p_a: Certified,
    /// `P(X₃ + X₅ ≥ 1)`.
    pub p_b: Certified,
    pub p_ab: Certified,
    /// `P(A ∩ B) − P(A) P(B)`.
    pub gap: f64,
    /// Certified bound on the error of `gap`.
    pub gap_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub n: usize,
    pub f: i128,
    pub g: i128,
    pub h: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveParticleCase {
    pub seed: SwtConfig,
    pub states: usize,
    pub powers: Vec<PowerRow>,
    /// First `n` with a non-zero power, for `f`, `g` and `h`.
    pub first_nonzero: [Option<usize>; 3],
    pub pattern_holds: bool,
    pub t: f64,
    pub p_f: Certified,
    pub p_g: Certified,
    pub p_h: Certified,
    pub gap: f64,
    pub gap_error: f64,
    pub holds: bool,
    /// First time after which `P_t h < P_t f · P_t g`, if found up to
    /// [`CROSSOVER_SEARCH_MAX`].
    pub crossover: Option<f64>,
}

/// Upper end of the crossover search.
pub const CROSSOVER_SEARCH_MAX: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegDepReport {
    pub any_particle: AnyParticleCase,
    pub live_particle: LiveParticleCase,
}

impl NegDepReport {
    pub fn holds(&self) -> bool {
        self.any_particle.holds && self.live_particle.holds && self.live_particle.pattern_holds
    }
}

fn product_error(a: &Certified, b: &Certified) -> f64 {
    // |ab − a'b'| ≤ |a| e_b + |b| e_a + e_a e_b
    a.value.abs() * b.error + b.value.abs() * a.error + a.error * b.error
}

/// Case with `X_k = 1{ξ_k(t) > ξ_k(0)}` at time `t`.
pub fn any_particle_case(t: f64) -> Result<AnyParticleCase, ExperimentError> {
    let seed = any_particle_seed();
    let chain = Chain::reachable::<Swt>(&seed, DEFAULT_STATE_CAP)?;
    let i = chain.index_of(&seed).expect("seed in chain");
    let a = |x: &SwtConfig| x.get(3) > 0;
    let b = |x: &SwtConfig| x.get(2) > -1 || x.get(4) > -1;
    let eval = |f: &dyn Fn(&SwtConfig) -> bool| {
        let obs = chain.observe(|x| f(x) as u8 as f64);
        Series::backward(chain.generator(), obs).eval_at(i, t, CASE1_TOL)
    };
    let p_a = eval(&a);
    let p_b = eval(&b);
    let p_ab = eval(&|x| a(x) && b(x));
    let gap = p_ab.value - p_a.value * p_b.value;
    let gap_error = p_ab.error + product_error(&p_a, &p_b);
    Ok(AnyParticleCase {
        seed,
        t,
        p_a,
        p_b,
        p_ab,
        gap,
        gap_error,
        holds: gap > gap_error,
    })
}

/// Case with `X'_k = 1{ξ_k(t) = 1}`: power table for `n = 0..=10`, the
/// comparison at [`CASE2_T`] and the crossover time.
pub fn live_particle_case() -> Result<LiveParticleCase, ExperimentError> {
    let seed = live_particle_seed();
    let chain = Chain::reachable::<Swt>(&seed, DEFAULT_STATE_CAP)?;
    let i = chain.index_of(&seed).expect("seed in chain");
    let f = |x: &SwtConfig| x.get(5) == 1;
    let g = |x: &SwtConfig| x.get(6) == 1;
    let h = |x: &SwtConfig| f(x) && g(x);
    let pf = generator_power_value(&chain, &seed, &|x| f(x) as i64, 10)?;
    let pg = generator_power_value(&chain, &seed, &|x| g(x) as i64, 10)?;
    let ph = generator_power_value(&chain, &seed, &|x| h(x) as i64, 10)?;
    let powers: Vec<PowerRow> = (0..=10)
        .map(|n| PowerRow {
            n,
            f: pf[n],
            g: pg[n],
            h: ph[n],
        })
        .collect();
    let first = |v: &[i128]| v.iter().position(|&x| x != 0);
    let first_nonzero = [first(&pf), first(&pg), first(&ph)];
    let pattern_holds = first_nonzero == [Some(5), Some(6), Some(10)] && pf[5] > 0 && pg[6] > 0 && ph[10] > 0;

    let obs = |p: &dyn Fn(&SwtConfig) -> bool| chain.observe(|x| p(x) as u8 as f64);
    let mut sf = Series::backward(chain.generator(), obs(&f));
    let mut sg = Series::backward(chain.generator(), obs(&g));
    let mut sh = Series::backward(chain.generator(), obs(&h));
    let mut at = |t: f64, tol: f64| {
        let (a, b, c) = (sf.eval_at(i, t, tol), sg.eval_at(i, t, tol), sh.eval_at(i, t, tol));
        (a, b, c, c.value - a.value * b.value)
    };
    let (p_f, p_g, p_h, gap) = at(CASE2_T, CASE2_TOL);
    let gap_error = p_h.error + product_error(&p_f, &p_g);

    // scan geometrically for the first sign change, then bisect
    let mut crossover = None;
    let mut lo = CASE2_T;
    while lo < CROSSOVER_SEARCH_MAX {
        let hi = lo * 1.25;
        if at(hi, CASE2_TOL).3 < 0.0 {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-12 * b {
                let m = 0.5 * (a + b);
                if at(m, CASE2_TOL).3 < 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            crossover = Some(0.5 * (a + b));
            break;
        }
        lo = hi;
    }
    Ok(LiveParticleCase {
        seed,
        states: chain.len(),
        powers,
        first_nonzero,
        pattern_holds,
        t: CASE2_T,
        p_f,
        p_g,
        p_h,
        gap,
        gap_error,
        holds: gap > gap_error,
        crossover,
    })
}

/// Both cases, without judging them.
pub fn negdep_report() -> Result<NegDepReport, ExperimentError> {
    Ok(NegDepReport {
        any_particle: any_particle_case(1.0)?,
        live_particle: live_particle_case()?,
    })
}

/// Both cases; an error if either inequality or the zero pattern fails.
pub fn negdep_demo() -> Result<NegDepReport, ExperimentError> {
    let r = negdep_report()?;
    if !r.holds() {
        return Err(ExperimentError::AssertionFailed(format!(
            "negative-dependence counterexample failed: any-particle gap {} ± {}, live-particle gap {} ± {}, pattern {:?}",
            r.any_particle.gap,
            r.any_particle.gap_error,
            r.live_particle.gap,
            r.live_particle.gap_error,
            r.live_particle.first_nonzero
        )));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_cases_hold() {
        let r = negdep_demo().unwrap();
        let a = &r.any_particle;
        assert!(a.p_ab.error < 1e-12);
        assert!((a.p_ab.value - a.p_a.value).abs() < 1e-12);
        // frozen from a dense matrix exponential of the 5-site chain
        assert!((a.p_a.value - 0.0124610366857468).abs() < 1e-12);
        assert!((a.p_b.value - 0.8646647167633866).abs() < 1e-12);
    }

    #[test]
    fn live_particle_powers_and_values() {
        let l = live_particle_case().unwrap();
        let f: Vec<i128> = l.powers.iter().map(|p| p.f).collect();
        let g: Vec<i128> = l.powers.iter().map(|p| p.g).collect();
        let h: Vec<i128> = l.powers.iter().map(|p| p.h).collect();
        assert_eq!(f, [0, 0, 0, 0, 0, 2, -23, 164, -922, 4352, -16809]);
        assert_eq!(g, [0, 0, 0, 0, 0, 0, 2, -27, 218, -1358, 7068]);
        assert_eq!(h, [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 33]);
        // frozen from an 80-digit Taylor series of the semigroup
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        assert!(rel(l.p_f.value, 1.6350453442879995e-12) < 1e-10);
        assert!(rel(l.p_g.value, 2.7247433009257794e-15) < 1e-10);
        assert!(rel(l.p_h.value, 8.796446246083505e-26) < 1e-10);
        assert!((l.crossover.unwrap() - 0.22005783400544).abs() < 1e-9);
    }
}
