//! Labelled SWT coupled with the labelled SSEP on the same clocks.
//!
//! The SSEP starts from `σ_k = max(ξ_k, 0)` with the same labels. A live
//! label crosses every ringing edge it sits on in both processes, so each
//! SWT label follows its SSEP twin until it dies, and then stays where the
//! twin was at that moment.

use serde::{Deserialize, Serialize};

use super::{AssertionLog, Check, CouplingError};
use crate::config::SwtConfig;
use crate::dynamics::{ClockStream, LabelledSwtState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledCoupling {
    pub initial: SwtConfig,
    pub horizon: f64,
    pub events: u64,
    pub swt: LabelledSwtState,
    pub ssep: LabelledSwtState,
    /// Death time of each label, `None` while alive.
    pub death_times: Vec<Option<f64>>,
    /// Number of distinct sites each SSEP label has visited.
    pub explored: Vec<usize>,
    pub first_exit_time: Option<f64>,
    pub log: AssertionLog,
}

/// Run the coupled pair on the rings of `clocks` before `horizon`.
pub fn run_labelled_vs_ssep(
    xi0: &SwtConfig,
    mut clocks: ClockStream,
    horizon: f64,
) -> Result<LabelledCoupling, CouplingError> {
    let k = xi0.len();
    if xi0.particle_count() == 0 {
        return Err(CouplingError::NoParticles);
    }
    if clocks.edges() != k {
        return Err(CouplingError::ClockMismatch {
            expected: k,
            got: clocks.edges(),
        });
    }
    let sigma0 = SwtConfig::new(xi0.sites().iter().map(|&v| v.max(0)).collect()).expect("non-empty");
    let mut swt = LabelledSwtState::from_config(xi0.clone());
    let mut ssep = LabelledSwtState::from_config(sigma0);
    let n = swt.label_count();
    let mut visited = vec![vec![false; k]; n];
    let mut explored = vec![1usize; n];
    for (j, v) in visited.iter_mut().enumerate() {
        v[ssep.position(j)] = true;
    }
    let mut death_pos: Vec<Option<usize>> = vec![None; n];
    let mut death_times = vec![None; n];
    let mut log = AssertionLog::new();
    let mut exit = if xi0.phase().is_transient() { None } else { Some(0.0) };
    let mut events = 0u64;

    loop {
        let ring = clocks.next_ring();
        if ring.time >= horizon {
            break;
        }
        let changed_swt = swt.ring(ring.edge);
        let changed_ssep = ssep.ring(ring.edge);
        if changed_swt.is_none() && changed_ssep.is_none() {
            continue;
        }
        events += 1;
        for j in 0..n {
            let y = ssep.position(j);
            if !visited[j][y] {
                visited[j][y] = true;
                explored[j] += 1;
            }
            if !swt.is_alive(j) && death_pos[j].is_none() {
                death_pos[j] = Some(y);
                death_times[j] = Some(ring.time);
            }
            let expected = death_pos[j].unwrap_or(y);
            let got = swt.position(j);
            log.record(Check::Identity, ring.time, got == expected, || {
                format!("label {j}: SWT at {got}, SSEP twin gives {expected}")
            });
        }
        if exit.is_none() && !swt.config().phase().is_transient() {
            exit = Some(ring.time);
        }
        if exit.is_none() {
            let ok = explored.iter().any(|&c| c < k);
            log.record(Check::Exploration, ring.time, ok, || {
                "transient state but every label explored the whole ring".into()
            });
        }
    }
    Ok(LabelledCoupling {
        initial: xi0.clone(),
        horizon,
        events,
        swt,
        ssep,
        death_times,
        explored,
        first_exit_time: exit,
        log,
    })
}
