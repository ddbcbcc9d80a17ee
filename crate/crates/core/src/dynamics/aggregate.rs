//! Next-event engine for high-volume SWT estimation.
//!
//! Instead of drawing every clock ring, the engine keeps the set of edges
//! whose ring would move a particle and samples the next state change with
//! the total enabled rate. Its paths have the law of the clock-stream engine
//! but do not share randomness with other processes.

use rand::Rng;
use rand_distr::Exp1;

use super::clock::StreamId;
use super::process::{swt_move, swt_mover, EventKind};
use crate::config::SwtConfig;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct AggregateSwt {
    sites: Vec<i32>,
    active: Vec<u32>,
    slot: Vec<u32>,
    particles: u64,
    depth: u64,
    time: f64,
}

impl AggregateSwt {
    pub fn new(xi: &SwtConfig) -> Self {
        let k = xi.len();
        let mut engine = AggregateSwt {
            sites: xi.sites().to_vec(),
            active: Vec::with_capacity(k),
            slot: vec![ABSENT; k],
            particles: xi.particle_count(),
            depth: xi.trap_depth(),
            time: 0.0,
        };
        for e in 0..k {
            engine.refresh(e);
        }
        engine
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn sites(&self) -> &[i32] {
        &self.sites
    }

    pub fn enabled(&self) -> usize {
        self.active.len()
    }

    pub fn is_transient(&self) -> bool {
        self.particles > 0 && self.depth > 0
    }

    fn refresh(&mut self, e: usize) {
        let on = swt_mover(&self.sites, e).is_some();
        let at = self.slot[e];
        if on && at == ABSENT {
            self.slot[e] = self.active.len() as u32;
            self.active.push(e as u32);
        } else if !on && at != ABSENT {
            let last = *self.active.last().expect("non-empty active set");
            self.active.swap_remove(at as usize);
            if last as usize != e {
                self.slot[last as usize] = at;
            }
            self.slot[e] = ABSENT;
        }
    }

    /// Perform the next state change. Returns `None` when nothing can move.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<(f64, usize, EventKind)> {
        let n = self.active.len();
        if n == 0 {
            return None;
        }
        let gap: f64 = rng.sample(Exp1);
        self.time += gap / n as f64;
        let e = self.active[rng.random_range(0..n)] as usize;
        let (src, dst) = swt_mover(&self.sites, e).expect("active edge is enabled");
        let kind = swt_move(&mut self.sites, src, dst);
        if kind == EventKind::TrapFill {
            self.particles -= 1;
            self.depth -= 1;
        }
        let k = self.sites.len();
        self.refresh((e + k - 1) % k);
        self.refresh(e);
        self.refresh((e + 1) % k);
        Some((self.time, e, kind))
    }

    /// Run until the configuration leaves the transient class or the next
    /// event falls at or beyond `horizon`. Returns the exit time or infinity.
    pub fn run_to_exit<R: Rng + ?Sized>(&mut self, rng: &mut R, horizon: f64) -> f64 {
        if !self.is_transient() {
            return self.time;
        }
        while let Some((t, _, _)) = self.step(rng) {
            if t >= horizon {
                return f64::INFINITY;
            }
            if !self.is_transient() {
                return t;
            }
        }
        // a transient configuration always has an enabled move
        unreachable!("transient configuration with no enabled transition")
    }
}

/// Exit time of one aggregate-engine trajectory, `f64::INFINITY` if still
/// transient at `horizon`.
pub fn sample_exit_time(xi: &SwtConfig, id: StreamId, horizon: f64) -> f64 {
    let mut rng = id.rng();
    AggregateSwt::new(xi).run_to_exit(&mut rng, horizon)
}
