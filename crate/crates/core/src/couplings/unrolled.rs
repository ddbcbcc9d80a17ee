//! Unrolled couplings on a segment of length `K + a`.
//!
//! Internal ring sites are `0..K`; after alignment the segment `A` is
//! `1..=a`. Unrolled positions are `1..=K+a` with reservoirs at `0` and
//! `K+a+1`; unrolled edge `e` joins `e` and `e+1` and is driven by ring clock
//! `e mod K`, so clock `k ≤ a` drives the two edges `k` and `k+K`.
//!
//! * Central: labels starting outside `A`, at their ring site (site `0`
//!   becomes position `K`).
//! * Right: labels starting in `A`, at their ring site.
//! * Left: labels starting in `A`, shifted by `K`.
//!
//! A live label on a driven edge crosses it, a label killed in the SWT is
//! killed everywhere, and boundary edges kill. After every ring the right
//! process kills `p` at `≤ a+1` when a live label sits at `p + K − 1`, and
//! the left process kills `p` at `≥ K` when a live label sits at `p − K + 1`.
//!
//! For the domination coupling each unrolled process `σ*` is paired with a
//! reservoir SSEP `σ̃*` on `1..=K+a`. Edge `e` of `σ̃*` follows the ring
//! clock while a trap remains in `A` and `σ*` has a live particle on `e`,
//! and an independent auxiliary clock otherwise. The switching predicate is
//! read on the state just before the ring.

use serde::{Deserialize, Serialize};

use super::{AssertionLog, Check, CouplingError};
use crate::config::{SegmentSsepConfig, SwtConfig};
use crate::dynamics::process::segment_ring;
use crate::dynamics::{ClockStream, EventKind, Family, LabelledSwtState, MergedClocks, RingDynamics, SegmentSsep, Swt};
use crate::oracle::{semigroup_value, Chain, SEMIGROUP_TOL};
use crate::stats::{wilson, Proportion, LEVEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Central,
    Right,
    Left,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Central, Variant::Right, Variant::Left];
}

/// Ring segment `start, start+1, …, start+len−1` (mod `K`), 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

impl Segment {
    /// The segment `1..=a` used after alignment.
    pub fn aligned(a: usize) -> Self {
        Segment { start: 1, len: a }
    }
}

/// Rotate a labelled state so that site `start` becomes site `1`.
pub fn align_segment(state: &LabelledSwtState, start: usize) -> LabelledSwtState {
    let k = state.config().len();
    let offset = (start + k - 1) % k;
    if offset == 0 {
        return state.clone();
    }
    let config = state.config().rotated(offset);
    let positions = state.positions().iter().map(|&p| (p + k - offset) % k).collect();
    LabelledSwtState::new(config, positions, state.alive().to_vec()).expect("rotation preserves consistency")
}

/// One unrolled process: positions and alive flags of every label, with
/// non-members permanently dead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnrolledState {
    pub variant: Variant,
    pub k: usize,
    pub a: usize,
    pub member: Vec<bool>,
    pub positions: Vec<usize>,
    pub alive: Vec<bool>,
}

impl UnrolledState {
    /// Initial unrolled process for an aligned labelled state.
    pub fn new(variant: Variant, xi: &LabelledSwtState, a: usize) -> Self {
        let k = xi.config().len();
        let n = xi.label_count();
        let mut member = vec![false; n];
        let mut positions = vec![0; n];
        for j in 0..n {
            let x = xi.position(j);
            let in_a = (1..=a).contains(&x);
            match variant {
                Variant::Central if !in_a => {
                    member[j] = true;
                    positions[j] = if x == 0 { k } else { x };
                }
                Variant::Right if in_a => {
                    member[j] = true;
                    positions[j] = x;
                }
                Variant::Left if in_a => {
                    member[j] = true;
                    positions[j] = x + k;
                }
                _ => {}
            }
        }
        let alive = (0..n).map(|j| member[j] && xi.is_alive(j)).collect();
        UnrolledState {
            variant,
            k,
            a,
            member,
            positions,
            alive,
        }
    }

    /// Segment length `K + a`.
    pub fn len(&self) -> usize {
        self.k + self.a
    }

    pub fn is_empty(&self) -> bool {
        !self.alive.iter().any(|&a| a)
    }

    /// Occupation vector of live labels; index `y − 1` holds position `y`.
    pub fn occupation(&self) -> Vec<u8> {
        let mut s = vec![0u8; self.len()];
        for (p, &al) in self.positions.iter().zip(&self.alive) {
            if al {
                s[p - 1] += 1;
            }
        }
        s
    }

    /// Unrolled edges driven by ring clock `k`.
    fn edges(&self, k: usize) -> impl Iterator<Item = usize> {
        let second = (k <= self.a).then_some(k + self.k);
        std::iter::once(k).chain(second)
    }

    /// Apply one unrolled edge: live labels on it cross, boundary edges kill.
    fn apply_edge(&mut self, e: usize) {
        let l = self.len();
        for j in 0..self.positions.len() {
            if !self.alive[j] {
                continue;
            }
            let p = self.positions[j];
            if p == e {
                if e == l {
                    self.alive[j] = false;
                } else {
                    self.positions[j] = e + 1;
                }
            } else if p == e + 1 {
                if e == 0 {
                    self.alive[j] = false;
                } else {
                    self.positions[j] = e;
                }
            }
        }
    }

    /// Apply the suppression map of this variant; returns the killed labels.
    fn suppress(&mut self) -> Vec<u32> {
        let shift = self.k - 1;
        let occupied = |pos: usize, alive: &[bool], positions: &[usize]| {
            positions.iter().zip(alive).any(|(&q, &al)| al && q == pos)
        };
        let killed: Vec<usize> = (0..self.positions.len())
            .filter(|&p| self.alive[p])
            .filter(|&p| {
                let x = self.positions[p];
                match self.variant {
                    Variant::Central => false,
                    Variant::Right => x <= self.a + 1 && occupied(x + shift, &self.alive, &self.positions),
                    Variant::Left => x >= self.k && occupied(x - shift, &self.alive, &self.positions),
                }
            })
            .collect();
        for &p in &killed {
            self.alive[p] = false;
        }
        killed.into_iter().map(|p| p as u32).collect()
    }
}

/// A suppression kill.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Suppression {
    pub time: f64,
    pub variant: Variant,
    pub label: u32,
}

/// Labelled SWT, the three unrolled processes and (optionally) their
/// dominating reservoir SSEPs, advanced ring by ring.
#[derive(Debug, Clone)]
pub struct UnrolledCoupling {
    xi: LabelledSwtState,
    initial_sites: Vec<usize>,
    a: usize,
    unrolled: [UnrolledState; 3],
    dominating: Option<[SegmentSsepConfig; 3]>,
    suppressions: Vec<Suppression>,
    trap_clear_time: Option<f64>,
    events: u64,
    log: AssertionLog,
}

impl UnrolledCoupling {
    /// Build from an aligned state (`A = 1..=a`); `domination` adds the
    /// reservoir SSEPs started from the unrolled occupations.
    pub fn new(xi: LabelledSwtState, a: usize, domination: bool) -> Result<Self, CouplingError> {
        let k = xi.config().len();
        if k < 3 {
            return Err(CouplingError::SizeTooSmall(k));
        }
        if a == 0 || a >= k {
            return Err(CouplingError::SegmentTooLong { a, k });
        }
        let unrolled = Variant::ALL.map(|v| UnrolledState::new(v, &xi, a));
        let dominating = domination.then(|| {
            unrolled
                .clone()
                .map(|u| SegmentSsepConfig::new(u.occupation()).expect("binary occupation"))
        });
        let initial_sites = xi.positions().to_vec();
        let mut c = UnrolledCoupling {
            xi,
            initial_sites,
            a,
            unrolled,
            dominating,
            suppressions: Vec::new(),
            trap_clear_time: None,
            events: 0,
            log: AssertionLog::new(),
        };
        if !c.trap_in_a() {
            c.trap_clear_time = Some(0.0);
        }
        c.check(0.0);
        Ok(c)
    }

    pub fn k(&self) -> usize {
        self.xi.config().len()
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn swt(&self) -> &LabelledSwtState {
        &self.xi
    }

    pub fn unrolled(&self, v: Variant) -> &UnrolledState {
        &self.unrolled[v as usize]
    }

    pub fn dominating(&self, v: Variant) -> Option<&SegmentSsepConfig> {
        self.dominating.as_ref().map(|d| &d[v as usize])
    }

    pub fn suppressions(&self) -> &[Suppression] {
        &self.suppressions
    }

    pub fn log(&self) -> &AssertionLog {
        &self.log
    }

    /// `E_A`: some site of `A` is still a trap of positive depth.
    pub fn trap_in_a(&self) -> bool {
        (1..=self.a).any(|i| self.xi.config().get(i) < 0)
    }

    fn edge_occupied(occ: &[u8], e: usize) -> bool {
        let l = occ.len();
        let left = e >= 1 && occ[e - 1] > 0;
        let right = e < l && occ[e] > 0;
        left || right
    }

    /// A ring of the SWT clock `k` at `time`.
    pub fn ring_t(&mut self, time: f64, k: usize) {
        let trap_before = self.trap_in_a();
        let occ_before: Vec<Vec<u8>> = self.unrolled.iter().map(UnrolledState::occupation).collect();
        let outcome = self.xi.ring(k);
        let killed = match &outcome {
            Some(o) if o.kind == EventKind::TrapFill => Some(o.labels[0] as usize),
            _ => None,
        };
        for (i, u) in self.unrolled.iter_mut().enumerate() {
            let edges: Vec<usize> = u.edges(k).collect();
            for &e in &edges {
                u.apply_edge(e);
            }
            if let Some(j) = killed {
                u.alive[j] = false;
            }
            for label in u.suppress() {
                self.suppressions.push(Suppression {
                    time,
                    variant: u.variant,
                    label,
                });
            }
            if let Some(dom) = self.dominating.as_mut() {
                for &e in &edges {
                    if trap_before && Self::edge_occupied(&occ_before[i], e) {
                        segment_ring(dom[i].sites_mut(), e);
                    }
                }
            }
        }
        self.after_event(time);
    }

    /// A ring of the auxiliary clock on unrolled edge `e`.
    pub fn ring_s(&mut self, time: f64, e: usize) {
        let Some(dom) = self.dominating.as_mut() else {
            return;
        };
        let trap = (1..=self.a).any(|i| self.xi.config().get(i) < 0);
        for (u, d) in self.unrolled.iter().zip(dom.iter_mut()) {
            if !trap || !Self::edge_occupied(&u.occupation(), e) {
                segment_ring(d.sites_mut(), e);
            }
        }
        self.after_event(time);
    }

    fn after_event(&mut self, time: f64) {
        self.events += 1;
        if self.trap_clear_time.is_none() && !self.trap_in_a() {
            self.trap_clear_time = Some(time);
        }
        self.check(time);
    }

    fn check(&mut self, time: f64) {
        let k = self.k();
        let n = self.xi.label_count();
        let log = &mut self.log;
        for u in &self.unrolled {
            for j in 0..n {
                if u.alive[j] {
                    let ok = self.xi.is_alive(j) && u.positions[j] % k == self.xi.position(j);
                    log.record(Check::Tracking, time, ok, || {
                        format!(
                            "{:?} label {j}: unrolled {} vs ring {} (alive {})",
                            u.variant,
                            u.positions[j],
                            self.xi.position(j),
                            self.xi.is_alive(j)
                        )
                    });
                }
            }
        }
        if !(1..=self.a).any(|i| self.xi.config().get(i) < 0) {
            return;
        }
        let [central, right, left] = &self.unrolled;
        for j in 0..n {
            if central.member[j] {
                let ok = central.alive[j] == self.xi.is_alive(j);
                log.record(Check::CentralSurvival, time, ok, || {
                    format!("label {j}: ring alive {}, central alive {}", self.xi.is_alive(j), central.alive[j])
                });
            }
        }
        for p in 0..n {
            for q in p + 1..n {
                if central.alive[p] && central.alive[q] {
                    let d = central.positions[p].abs_diff(central.positions[q]);
                    log.record(Check::Distance, time, d < k - 1, || {
                        format!("labels {p},{q} at {} and {}", central.positions[p], central.positions[q])
                    });
                }
            }
        }
        for trap in (1..=self.a).filter(|&i| self.xi.config().get(i) < 0) {
            for p in (0..n).filter(|&p| right.member[p] && self.xi.is_alive(p)) {
                let x0 = self.initial_sites[p];
                if trap < x0 && x0 <= self.a {
                    log.record(Check::RightSurvival, time, right.alive[p], || {
                        format!("label {p} from {x0}, trap at {trap}")
                    });
                }
                if 1 <= x0 && x0 < trap {
                    log.record(Check::LeftSurvival, time, left.alive[p], || {
                        format!("label {p} from {x0}, trap at {trap}")
                    });
                }
            }
        }
        for p in 0..n {
            let sum = central.alive[p] as u8 + right.alive[p] as u8 + left.alive[p] as u8;
            let ok = !self.xi.is_alive(p) || sum >= 1;
            log.record(Check::SurvivalSum, time, ok, || format!("label {p} alive on the ring only"));
        }
        for u in &self.unrolled {
            let occ = u.occupation();
            for e in 0..=self.a {
                let both = Self::edge_occupied(&occ, e) && Self::edge_occupied(&occ, e + k);
                log.record(Check::DisjointEdges, time, !both, || {
                    format!("{:?}: edges {e} and {} both occupied in {occ:?}", u.variant, e + k)
                });
            }
        }
        if let Some(dom) = &self.dominating {
            for (u, d) in self.unrolled.iter().zip(dom) {
                let occ = u.occupation();
                let ok = occ.iter().zip(d.sites()).all(|(&x, &y)| x <= y);
                log.record(Check::Domination, time, ok, || {
                    format!("{:?}: {occ:?} not below {:?}", u.variant, d.sites())
                });
            }
        }
    }

    fn report(self, horizon: f64) -> UnrolledReport {
        let survivors = self.unrolled.clone().map(|u| u.alive.iter().filter(|&&a| a).count());
        UnrolledReport {
            k: self.k(),
            a: self.a,
            horizon,
            events: self.events,
            trap_clear_time: self.trap_clear_time,
            ring_survivors: self.xi.alive().iter().filter(|&&a| a).count(),
            central_survivors: survivors[0],
            right_survivors: survivors[1],
            left_survivors: survivors[2],
            suppressions: self.suppressions,
            log: self.log,
        }
    }
}

/// Summary of one unrolled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnrolledReport {
    pub k: usize,
    pub a: usize,
    pub horizon: f64,
    pub events: u64,
    /// First time no trap of positive depth remains in `A`.
    pub trap_clear_time: Option<f64>,
    pub ring_survivors: usize,
    pub central_survivors: usize,
    pub right_survivors: usize,
    pub left_survivors: usize,
    pub suppressions: Vec<Suppression>,
    pub log: AssertionLog,
}

fn prepare(xi0: &LabelledSwtState, segment: Segment) -> Result<LabelledSwtState, CouplingError> {
    let k = xi0.config().len();
    if k < 3 {
        return Err(CouplingError::SizeTooSmall(k));
    }
    if segment.len == 0 || segment.len >= k {
        return Err(CouplingError::SegmentTooLong { a: segment.len, k });
    }
    Ok(align_segment(xi0, segment.start % k))
}

/// Run the three unrolled processes on the ring clocks before `horizon`.
pub fn run_unrolled(
    xi0: &LabelledSwtState,
    segment: Segment,
    mut clocks: ClockStream,
    horizon: f64,
) -> Result<UnrolledReport, CouplingError> {
    let xi = prepare(xi0, segment)?;
    let k = xi.config().len();
    if clocks.edges() != k {
        return Err(CouplingError::ClockMismatch {
            expected: k,
            got: clocks.edges(),
        });
    }
    let mut c = UnrolledCoupling::new(xi, segment.len, false)?;
    loop {
        let r = clocks.next_ring();
        if r.time >= horizon {
            break;
        }
        c.ring_t(r.time, r.edge);
    }
    Ok(c.report(horizon))
}

/// Run the unrolled processes together with their dominating reservoir
/// SSEPs; `s_clocks` covers the `K + a + 1` unrolled edges.
pub fn run_reservoir_domination(
    xi0: &LabelledSwtState,
    segment: Segment,
    t_clocks: ClockStream,
    s_clocks: ClockStream,
    horizon: f64,
) -> Result<UnrolledReport, CouplingError> {
    let xi = prepare(xi0, segment)?;
    let k = xi.config().len();
    if t_clocks.edges() != k {
        return Err(CouplingError::ClockMismatch {
            expected: k,
            got: t_clocks.edges(),
        });
    }
    if s_clocks.edges() != k + segment.len + 1 {
        return Err(CouplingError::ClockMismatch {
            expected: k + segment.len + 1,
            got: s_clocks.edges(),
        });
    }
    let mut c = UnrolledCoupling::new(xi, segment.len, true)?;
    let mut clocks = MergedClocks::new(t_clocks, s_clocks);
    loop {
        let (family, r) = clocks.next_ring();
        if r.time >= horizon {
            break;
        }
        match family {
            Family::First => c.ring_t(r.time, r.edge),
            Family::Second => c.ring_s(r.time, r.edge),
        }
    }
    Ok(c.report(horizon))
}

/// One time point of the survival-bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalBoundRow {
    pub t: f64,
    /// Monte Carlo estimate of the probability that a trap remains in `A`.
    pub trap_remains: Proportion,
    /// `3 · Q(|σ(t)| > S/3)` for the reservoir SSEP on `K + a` sites
    /// started full, computed exactly.
    pub bound: f64,
    pub bound_error: f64,
    /// The lower end of the interval does not exceed the bound.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalBoundReport {
    pub k: usize,
    pub a: usize,
    pub excess: i64,
    pub samples: u64,
    pub master_seed: u64,
    pub rows: Vec<SurvivalBoundRow>,
}

impl SurvivalBoundReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// First time no trap remains in `1..=a`, or `∞` if one remains at `horizon`.
fn trap_clear_time(xi: &SwtConfig, a: usize, mut clocks: ClockStream, horizon: f64) -> f64 {
    let mut x = xi.clone();
    let trap = |x: &SwtConfig| (1..=a).any(|i| x.get(i) < 0);
    if !trap(&x) {
        return 0.0;
    }
    loop {
        let r = clocks.next_ring();
        if r.time >= horizon {
            return f64::INFINITY;
        }
        if Swt::apply(&mut x, r.edge).is_some() && !trap(&x) {
            return r.time;
        }
    }
}

/// Compare the Monte Carlo probability that a trap survives in `segment`
/// with three times the exact probability that the full reservoir SSEP on
/// `K + a` sites still holds more than `S(ξ)/3` particles.
pub fn survival_bound_check(
    xi: &SwtConfig,
    segment: Segment,
    times: &[f64],
    samples: u64,
    master_seed: u64,
    cap: usize,
) -> Result<SurvivalBoundReport, CouplingError> {
    use rayon::prelude::*;

    let k = xi.len();
    let aligned = prepare(&LabelledSwtState::from_config(xi.clone()), segment)?;
    let x = aligned.config().clone();
    let a = segment.len;
    let s = xi.excess();
    let horizon = times.iter().cloned().fold(0.0, f64::max);
    let exits: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| trap_clear_time(&x, a, ClockStream::from_seed(master_seed, i, k), horizon + 1.0))
        .collect();
    let full = SegmentSsepConfig::full(k + a);
    let chain = Chain::reachable::<SegmentSsep>(&full, cap)?;
    let threshold = s as f64 / 3.0;
    let f = |c: &SegmentSsepConfig| (c.particle_count() as f64 > threshold) as u8 as f64;
    let rows = times
        .iter()
        .map(|&t| {
            let q = semigroup_value(&chain, &full, &f, t, SEMIGROUP_TOL)?;
            let hits = exits.iter().filter(|&&e| e > t).count() as u64;
            let trap_remains = wilson(hits, samples, LEVEL);
            let bound = 3.0 * q.value;
            Ok(SurvivalBoundRow {
                t,
                trap_remains,
                bound,
                bound_error: 3.0 * q.error,
                holds: trap_remains.lower <= bound + 3.0 * q.error,
            })
        })
        .collect::<Result<Vec<_>, crate::oracle::OracleError>>()?;
    Ok(SurvivalBoundReport {
        k,
        a,
        excess: s,
        samples,
        master_seed,
        rows,
    })
}
