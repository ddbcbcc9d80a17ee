//! Basic coupling of two SWTs.

use serde::{Deserialize, Serialize};

use super::{AssertionLog, Check, CouplingError};
use crate::config::SwtConfig;
use crate::dynamics::{ClockStream, Event, RingDynamics, Swt, Trajectory};

/// Two SWT trajectories driven by the same rings, plus the order checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicCoupling {
    pub lower: Trajectory<SwtConfig>,
    pub upper: Trajectory<SwtConfig>,
    pub log: AssertionLog,
}

fn first_violation(lo: &SwtConfig, hi: &SwtConfig) -> Option<usize> {
    lo.sites().iter().zip(hi.sites()).position(|(a, b)| a > b)
}

/// Run `lower ≤ upper` on the rings of `clocks` before `horizon`, checking
/// the order after every ring.
pub fn run_basic_coupling(
    lower: &SwtConfig,
    upper: &SwtConfig,
    mut clocks: ClockStream,
    horizon: f64,
) -> Result<BasicCoupling, CouplingError> {
    if lower.len() != upper.len() {
        return Err(CouplingError::SizeMismatch(lower.len(), upper.len()));
    }
    if let Some(site) = first_violation(lower, upper) {
        return Err(CouplingError::Unordered {
            site,
            lower: lower.get(site),
            upper: upper.get(site),
        });
    }
    if clocks.edges() != lower.len() {
        return Err(CouplingError::ClockMismatch {
            expected: lower.len(),
            got: clocks.edges(),
        });
    }
    let mut log = AssertionLog::new();
    let (mut lo, mut hi) = (lower.clone(), upper.clone());
    let (mut ev_lo, mut ev_hi) = (Vec::new(), Vec::new());
    let exit0 = |x: &SwtConfig| if x.phase().is_transient() { None } else { Some(0.0) };
    let (mut exit_lo, mut exit_hi) = (exit0(&lo), exit0(&hi));
    loop {
        let ring = clocks.next_ring();
        if ring.time >= horizon {
            break;
        }
        for (state, events, exit) in [(&mut lo, &mut ev_lo, &mut exit_lo), (&mut hi, &mut ev_hi, &mut exit_hi)] {
            if let Some(out) = Swt::apply(state, ring.edge) {
                events.push(Event {
                    time: ring.time,
                    edge: ring.edge,
                    kind: out.kind,
                    labels: out.labels,
                });
                if exit.is_none() && !state.phase().is_transient() {
                    *exit = Some(ring.time);
                }
            }
        }
        let bad = first_violation(&lo, &hi);
        log.record(Check::Order, ring.time, bad.is_none(), || {
            format!("site {}: {:?} vs {:?}", bad.unwrap_or(0), lo.sites(), hi.sites())
        });
    }
    let traj = |initial: &SwtConfig, events, final_state, first_exit_time| Trajectory {
        initial: initial.clone(),
        events,
        final_state,
        horizon,
        first_exit_time,
    };
    Ok(BasicCoupling {
        lower: traj(lower, ev_lo, lo, exit_lo),
        upper: traj(upper, ev_hi, hi, exit_hi),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::simulate_swt;

    fn swt(v: &[i32]) -> SwtConfig {
        SwtConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn equal_pair_is_identical() {
        let x = swt(&[1, -2, 1, 0, 1]);
        let c = run_basic_coupling(&x, &x, ClockStream::from_seed(3, 0, 5), 20.0).unwrap();
        assert_eq!(c.lower, c.upper);
        let single = simulate_swt(&x, ClockStream::from_seed(3, 0, 5), 20.0);
        assert_eq!(c.lower.events, single.events);
    }

    #[test]
    fn order_is_preserved() {
        let (lo, hi) = (swt(&[1, -1, 0]), swt(&[1, 0, 0]));
        for seed in 0..200 {
            let c = run_basic_coupling(&lo, &hi, ClockStream::from_seed(seed, 0, 3), 10.0).unwrap();
            assert!(c.log.is_clean(), "{:?}", c.log.violations);
            assert!(c.log.evaluated(Check::Order) > 0);
        }
    }

    #[test]
    fn rejects_unordered_pair() {
        let err = run_basic_coupling(&swt(&[1, 0]), &swt(&[0, 0]), ClockStream::from_seed(0, 0, 2), 1.0);
        assert!(matches!(err, Err(CouplingError::Unordered { site: 0, .. })));
    }
}
