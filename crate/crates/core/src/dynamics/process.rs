//! Edge-ring update rules for each process.
//!
//! Every process is driven by a family of rate-1 clocks. [`RingDynamics::apply`]
//! performs the effect of one ring and reports what happened, or `None` when
//! the ring leaves the state unchanged.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::config::{
    ConservedQuantities, FepConfig, FzrConfig, Phase, SegmentSsepConfig, SwtConfig,
};

/// Kind of a logged event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// A particle moves to an empty site.
    Jump,
    /// A particle falls into a trap of positive depth and dies.
    TrapFill,
    /// Two labelled particles exchange sites.
    Swap,
    /// A particle is absorbed by a boundary reservoir.
    ReservoirKill,
    /// A clock rang without changing the state.
    NoOp,
}

/// Effect of one ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub kind: EventKind,
    pub labels: Vec<u32>,
}

impl Outcome {
    pub fn plain(kind: EventKind) -> Self {
        Outcome {
            kind,
            labels: Vec::new(),
        }
    }
}

pub trait RingDynamics {
    type State: Clone + PartialEq + Debug;

    /// Number of independent rate-1 clocks driving the state.
    fn clock_count(state: &Self::State) -> usize;

    fn apply(state: &mut Self::State, clock: usize) -> Option<Outcome>;

    fn is_transient(state: &Self::State) -> bool;

    fn phase(state: &Self::State) -> Option<Phase>;

    fn conserved(state: &Self::State) -> ConservedQuantities;

    /// Check the invariants that must hold across one state-changing event:
    /// conserved quantities are constant and absorbing classes are never left.
    fn check_step(before: &Self::State, after: &Self::State) -> Result<(), String> {
        let (cb, ca) = (Self::conserved(before), Self::conserved(after));
        if cb != ca {
            return Err(format!("conserved quantities changed: {cb:?} -> {ca:?}"));
        }
        if let (Some(pb), Some(pa)) = (Self::phase(before), Self::phase(after)) {
            if !pb.is_transient() && pa != pb {
                return Err(format!("left absorbing class {pb:?} for {pa:?}"));
            }
        }
        Ok(())
    }
}

/// SSEP with traps on a ring of `K` sites; clock `k` is edge `(k, k+1 mod K)`.
#[derive(Debug, Clone, Copy)]
pub struct Swt;

/// Move a particle from `src` to `dst` (with `ξ_dst ≤ 0`) and report the kind.
#[inline]
pub(crate) fn swt_move(sites: &mut [i32], src: usize, dst: usize) -> EventKind {
    let target = sites[dst];
    sites[src] = 0;
    sites[dst] = target + 1;
    if target < 0 {
        EventKind::TrapFill
    } else {
        EventKind::Jump
    }
}

/// Source and target of the particle moved by a ring of edge `k`, if any.
#[inline]
pub(crate) fn swt_mover(sites: &[i32], k: usize) -> Option<(usize, usize)> {
    let n = sites.len();
    let (a, b) = (k, (k + 1) % n);
    if a == b {
        return None;
    }
    let (va, vb) = (sites[a], sites[b]);
    if va == 1 && vb <= 0 {
        Some((a, b))
    } else if vb == 1 && va <= 0 {
        Some((b, a))
    } else {
        None
    }
}

impl RingDynamics for Swt {
    type State = SwtConfig;

    fn clock_count(state: &SwtConfig) -> usize {
        state.len()
    }

    fn apply(state: &mut SwtConfig, clock: usize) -> Option<Outcome> {
        let (src, dst) = swt_mover(state.sites(), clock)?;
        Some(Outcome::plain(swt_move(state.sites_mut(), src, dst)))
    }

    fn is_transient(state: &SwtConfig) -> bool {
        state.phase().is_transient()
    }

    fn phase(state: &SwtConfig) -> Option<Phase> {
        Some(state.phase())
    }

    /// Particle count and trap depth both drop by one at each trap fill;
    /// only the excess is conserved.
    fn conserved(state: &SwtConfig) -> ConservedQuantities {
        state.conserved()
    }

    fn check_step(before: &SwtConfig, after: &SwtConfig) -> Result<(), String> {
        if before.excess() != after.excess() {
            return Err(format!(
                "excess changed: {} -> {}",
                before.excess(),
                after.excess()
            ));
        }
        if after.particle_count() > before.particle_count() || after.trap_depth() > before.trap_depth() {
            return Err("particle count or trap depth increased".into());
        }
        let (pb, pa) = (before.phase(), after.phase());
        if !pb.is_transient() && pa != pb {
            return Err(format!("left absorbing class {pb:?} for {pa:?}"));
        }
        Ok(())
    }
}

/// Facilitated exclusion on a ring of `N` sites; clock `x` is edge `(x, x+1 mod N)`.
#[derive(Debug, Clone, Copy)]
pub struct Fep;

/// Direction of the FEP jump enabled across edge `x`, as `(from, to)`.
#[inline]
pub(crate) fn fep_mover(s: &[u8], x: usize) -> Option<(usize, usize)> {
    let n = s.len();
    let at = |i: isize| s[i.rem_euclid(n as isize) as usize];
    let x = x as isize;
    if at(x - 1) == 1 && at(x) == 1 && at(x + 1) == 0 {
        Some((x as usize, (x + 1).rem_euclid(n as isize) as usize))
    } else if at(x) == 0 && at(x + 1) == 1 && at(x + 2) == 1 {
        Some(((x + 1).rem_euclid(n as isize) as usize, x as usize))
    } else {
        None
    }
}

impl RingDynamics for Fep {
    type State = FepConfig;

    fn clock_count(state: &FepConfig) -> usize {
        state.len()
    }

    fn apply(state: &mut FepConfig, clock: usize) -> Option<Outcome> {
        let (from, to) = fep_mover(state.sites(), clock)?;
        let s = state.sites_mut();
        s[from] = 0;
        s[to] = 1;
        Some(Outcome::plain(EventKind::Jump))
    }

    fn is_transient(state: &FepConfig) -> bool {
        state.phase().is_transient()
    }

    fn phase(state: &FepConfig) -> Option<Phase> {
        Some(state.phase())
    }

    fn conserved(state: &FepConfig) -> ConservedQuantities {
        state.conserved()
    }
}

/// Facilitated zero-range on a ring of `P` sites.
///
/// Clock `2y` fires left departures from site `y` and clock `2y+1` right
/// departures; each is a rate-1 stream, active only while `ω_y ≥ 2`.
#[derive(Debug, Clone, Copy)]
pub struct Fzr;

impl RingDynamics for Fzr {
    type State = FzrConfig;

    fn clock_count(state: &FzrConfig) -> usize {
        2 * state.len()
    }

    fn apply(state: &mut FzrConfig, clock: usize) -> Option<Outcome> {
        let p = state.len();
        let y = clock / 2;
        let to = if clock % 2 == 0 { (y + p - 1) % p } else { (y + 1) % p };
        if state.get(y) < 2 || to == y {
            return None;
        }
        let s = state.sites_mut();
        s[y] -= 1;
        s[to] += 1;
        Some(Outcome::plain(EventKind::Jump))
    }

    fn is_transient(state: &FzrConfig) -> bool {
        state.phase().is_transient()
    }

    fn phase(state: &FzrConfig) -> Option<Phase> {
        Some(state.phase())
    }

    fn conserved(state: &FzrConfig) -> ConservedQuantities {
        state.conserved()
    }
}

/// SSEP on a segment of `L` sites with empty reservoirs at both ends.
///
/// Clock `e ∈ 0..=L` is the edge between positions `e` and `e+1`, where
/// positions `0` and `L+1` are the reservoirs: a ring of a boundary edge
/// removes the particle at the adjacent site.
#[derive(Debug, Clone, Copy)]
pub struct SegmentSsep;

/// Apply a ring of edge `e` to a segment occupation vector.
#[inline]
pub(crate) fn segment_ring(s: &mut [u8], e: usize) -> Option<EventKind> {
    let l = s.len();
    if l == 0 {
        return None;
    }
    if e == 0 || e == l {
        let i = if e == 0 { 0 } else { l - 1 };
        if s[i] == 1 {
            s[i] = 0;
            return Some(EventKind::ReservoirKill);
        }
        // on a single site both boundary edges touch site 0
        return None;
    }
    if s[e - 1] != s[e] {
        s.swap(e - 1, e);
        Some(EventKind::Jump)
    } else {
        None
    }
}

impl RingDynamics for SegmentSsep {
    type State = SegmentSsepConfig;

    fn clock_count(state: &SegmentSsepConfig) -> usize {
        state.len() + 1
    }

    fn apply(state: &mut SegmentSsepConfig, clock: usize) -> Option<Outcome> {
        segment_ring(state.sites_mut(), clock).map(Outcome::plain)
    }

    /// The segment process counts as transient until it is empty.
    fn is_transient(state: &SegmentSsepConfig) -> bool {
        state.particle_count() > 0
    }

    fn phase(_: &SegmentSsepConfig) -> Option<Phase> {
        None
    }

    fn conserved(state: &SegmentSsepConfig) -> ConservedQuantities {
        ConservedQuantities {
            particles: state.particle_count(),
            trap_depth: None,
            excess: None,
        }
    }

    fn check_step(before: &SegmentSsepConfig, after: &SegmentSsepConfig) -> Result<(), String> {
        if after.particle_count() > before.particle_count() {
            return Err("particle count increased".into());
        }
        Ok(())
    }
}
