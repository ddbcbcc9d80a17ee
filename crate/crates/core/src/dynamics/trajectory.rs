//! Clock-stream simulation, event logs and replay.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::clock::ClockStream;
use super::process::{EventKind, RingDynamics};

/// One logged event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    /// Index of the clock that rang (the edge for ring and segment processes).
    pub edge: usize,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOptions {
    /// Record rings that leave the state unchanged.
    pub log_noops: bool,
    /// Stop at the first exit from the transient class instead of running
    /// to the horizon.
    pub stop_at_exit: bool,
}

/// Simulated path: initial state, event log, final state and exit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub initial: S,
    pub events: Vec<Event>,
    #[serde(rename = "final")]
    pub final_state: S,
    pub horizon: f64,
    /// First time the state is non-transient; `None` when still transient at
    /// the end of the run.
    pub first_exit_time: Option<f64>,
}

impl<S> Trajectory<S> {
    /// First exit time, with `f64::INFINITY` standing for "still transient".
    pub fn exit_time(&self) -> f64 {
        self.first_exit_time.unwrap_or(f64::INFINITY)
    }

    /// Whether the path is still transient at time `t ≤ horizon`. Absorption
    /// is permanent, so this is `t < exit_time`.
    pub fn transient_at(&self, t: f64) -> bool {
        t < self.exit_time()
    }

    /// Number of state-changing events.
    pub fn state_changes(&self) -> usize {
        self.events.iter().filter(|e| e.kind != EventKind::NoOp).count()
    }
}

impl<S: Serialize> Trajectory<S> {
    /// Newline-delimited JSON: a header record, one record per event and a
    /// closing record with the final state.
    pub fn write_ndjson<W: Write>(&self, mut w: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Header<'a, S> {
            record: &'static str,
            initial: &'a S,
            horizon: f64,
        }
        #[derive(Serialize)]
        struct Footer<'a, S> {
            record: &'static str,
            #[serde(rename = "final")]
            final_state: &'a S,
            first_exit_time: Option<f64>,
        }
        #[derive(Serialize)]
        struct Line<'a> {
            record: &'static str,
            #[serde(flatten)]
            event: &'a Event,
        }
        let header = Header {
            record: "start",
            initial: &self.initial,
            horizon: self.horizon,
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for e in &self.events {
            serde_json::to_writer(&mut w, &Line { record: "event", event: e })?;
            writeln!(w)?;
        }
        let footer = Footer {
            record: "end",
            final_state: &self.final_state,
            first_exit_time: self.first_exit_time,
        };
        serde_json::to_writer(&mut w, &footer)?;
        writeln!(w)
    }
}

impl<S: serde::de::DeserializeOwned> Trajectory<S> {
    /// Read the format written by [`Trajectory::write_ndjson`].
    pub fn read_ndjson<R: BufRead>(r: R) -> io::Result<Self> {
        #[derive(Deserialize)]
        #[serde(tag = "record", rename_all = "lowercase")]
        enum Record<S> {
            Start {
                initial: S,
                horizon: f64,
            },
            Event(Event),
            End {
                #[serde(rename = "final")]
                final_state: S,
                first_exit_time: Option<f64>,
            },
        }
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let (mut start, mut end, mut events) = (None, None, Vec::new());
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record<S> = serde_json::from_str(&line).map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
            match rec {
                Record::Start { initial, horizon } => start = Some((initial, horizon)),
                Record::Event(e) => events.push(e),
                Record::End {
                    final_state,
                    first_exit_time,
                } => end = Some((final_state, first_exit_time)),
            }
        }
        let (initial, horizon) = start.ok_or_else(|| bad("missing start record".into()))?;
        let (final_state, first_exit_time) = end.ok_or_else(|| bad("missing end record".into()))?;
        Ok(Trajectory {
            initial,
            events,
            final_state,
            horizon,
            first_exit_time,
        })
    }
}

/// Run `D` from `initial` on the rings of `clocks` strictly before `horizon`.
pub fn simulate<D: RingDynamics>(
    initial: &D::State,
    mut clocks: ClockStream,
    horizon: f64,
    opts: SimOptions,
) -> Trajectory<D::State> {
    assert!(horizon >= 0.0, "horizon must be non-negative");
    debug_assert_eq!(clocks.edges(), D::clock_count(initial));
    let mut state = initial.clone();
    let mut events = Vec::new();
    let mut exit = if D::is_transient(&state) { None } else { Some(0.0) };
    loop {
        if opts.stop_at_exit && exit.is_some() {
            break;
        }
        let ring = clocks.next_ring();
        if ring.time >= horizon {
            break;
        }
        match D::apply(&mut state, ring.edge) {
            Some(out) => {
                events.push(Event {
                    time: ring.time,
                    edge: ring.edge,
                    kind: out.kind,
                    labels: out.labels,
                });
                if exit.is_none() && !D::is_transient(&state) {
                    exit = Some(ring.time);
                }
            }
            None if opts.log_noops => events.push(Event {
                time: ring.time,
                edge: ring.edge,
                kind: EventKind::NoOp,
                labels: Vec::new(),
            }),
            None => {}
        }
    }
    Trajectory {
        initial: initial.clone(),
        events,
        final_state: state,
        horizon,
        first_exit_time: exit,
    }
}

/// Convenience: clocks sized for the state.
pub fn simulate_seeded<D: RingDynamics>(
    initial: &D::State,
    master_seed: u64,
    trajectory: u64,
    horizon: f64,
    opts: SimOptions,
) -> Trajectory<D::State> {
    let clocks = ClockStream::from_seed(master_seed, trajectory, D::clock_count(initial));
    simulate::<D>(initial, clocks, horizon, opts)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("event {index}: logged {logged:?} but replay gives {replayed:?}")]
    KindMismatch {
        index: usize,
        logged: EventKind,
        replayed: EventKind,
    },
    #[error("event {index}: edge {edge} out of range")]
    BadEdge { index: usize, edge: usize },
    #[error("event {index}: times out of order")]
    TimeOrder { index: usize },
    #[error("event {index}: labels {logged:?} but replay moves {replayed:?}")]
    LabelMismatch {
        index: usize,
        logged: Vec<u32>,
        replayed: Vec<u32>,
    },
    #[error("event {index}: invariant violated: {reason}")]
    Invariant { index: usize, reason: String },
    #[error("replayed final state differs from the recorded one")]
    FinalMismatch,
    #[error("recorded exit time {recorded:?} but replay gives {replayed:?}")]
    ExitMismatch {
        recorded: Option<f64>,
        replayed: Option<f64>,
    },
}

/// Replay an event log and check it against the recorded final state and
/// exit time, asserting the per-step invariants of `D` at every event.
pub fn replay<D: RingDynamics>(traj: &Trajectory<D::State>) -> Result<D::State, ReplayError> {
    let mut state = traj.initial.clone();
    let clocks = D::clock_count(&state);
    let mut exit = if D::is_transient(&state) { None } else { Some(0.0) };
    let mut prev_time = 0.0;
    for (index, e) in traj.events.iter().enumerate() {
        if e.time < prev_time {
            return Err(ReplayError::TimeOrder { index });
        }
        prev_time = e.time;
        if e.edge >= clocks {
            return Err(ReplayError::BadEdge { index, edge: e.edge });
        }
        let before = state.clone();
        let out = D::apply(&mut state, e.edge);
        let replayed = out.as_ref().map_or(EventKind::NoOp, |o| o.kind);
        if replayed != e.kind {
            return Err(ReplayError::KindMismatch {
                index,
                logged: e.kind,
                replayed,
            });
        }
        if let Some(o) = out {
            if !e.labels.is_empty() && o.labels != e.labels {
                return Err(ReplayError::LabelMismatch {
                    index,
                    logged: e.labels.clone(),
                    replayed: o.labels,
                });
            }
            D::check_step(&before, &state).map_err(|reason| ReplayError::Invariant { index, reason })?;
            if exit.is_none() && !D::is_transient(&state) {
                exit = Some(e.time);
            }
        }
    }
    if state != traj.final_state {
        return Err(ReplayError::FinalMismatch);
    }
    if exit != traj.first_exit_time {
        return Err(ReplayError::ExitMismatch {
            recorded: traj.first_exit_time,
            replayed: exit,
        });
    }
    Ok(state)
}

/// First time the trajectory is non-transient; `f64::INFINITY` if never.
pub fn transience_exit_time<S>(traj: &Trajectory<S>) -> f64 {
    traj.exit_time()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FepConfig, FzrConfig, SegmentSsepConfig, SwtConfig};
    use crate::dynamics::process::{Fep, Fzr, SegmentSsep, Swt};

    fn swt(v: &[i32]) -> SwtConfig {
        SwtConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ndjson_roundtrip() {
        let t = simulate_seeded::<Swt>(&swt(&[1, 1, -1, 0, -1]), 5, 0, 1e3, SimOptions::default());
        let mut buf = Vec::new();
        t.write_ndjson(&mut buf).unwrap();
        let back = Trajectory::<SwtConfig>::read_ndjson(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert!(Trajectory::<SwtConfig>::read_ndjson(&b"{}\n"[..]).is_err());
    }

    #[test]
    fn frozen_has_no_events() {
        let t = simulate_seeded::<Swt>(&swt(&[0, -2, 0]), 1, 0, 50.0, SimOptions::default());
        assert!(t.events.is_empty());
        assert_eq!(t.final_state, t.initial);
        assert_eq!(t.first_exit_time, Some(0.0));
    }

    #[test]
    fn single_particle_exit_is_the_only_event() {
        let t = simulate_seeded::<Swt>(&swt(&[1, -1]), 3, 0, 100.0, SimOptions::default());
        assert_eq!(t.events.len(), 1);
        assert_eq!(t.exit_time(), t.events[0].time);
        assert_eq!(t.final_state, swt(&[0, 0]));
    }

    #[test]
    fn critical_absorbs_in_empty() {
        for seed in 0..50 {
            let t = simulate_seeded::<Swt>(&swt(&[1, 1, -1, 0, -1]), seed, 0, 1e4, SimOptions::default());
            assert_eq!(t.final_state, SwtConfig::empty(5));
            assert!(t.exit_time().is_finite());
            replay::<Swt>(&t).unwrap();
        }
    }

    #[test]
    fn horizon_censoring() {
        let t = simulate_seeded::<Swt>(&swt(&[1, 0, 0, 0, 0, 0, 0, -1]), 0, 0, 1e-6, SimOptions::default());
        assert_eq!(t.first_exit_time, None);
        assert!(t.exit_time().is_infinite());
    }

    #[test]
    fn replay_with_noops() {
        let opts = SimOptions {
            log_noops: true,
            stop_at_exit: false,
        };
        let t = simulate_seeded::<Fep>(&FepConfig::new(vec![1, 1, 0, 0, 1, 0, 0]).unwrap(), 9, 2, 20.0, opts);
        assert!(t.events.iter().any(|e| e.kind == EventKind::NoOp));
        replay::<Fep>(&t).unwrap();
        let mut bad = t.clone();
        if let Some(e) = bad.events.iter_mut().find(|e| e.kind == EventKind::NoOp) {
            e.kind = EventKind::Jump;
        }
        assert!(replay::<Fep>(&bad).is_err());
    }

    #[test]
    fn fzr_and_segment_replay() {
        let t = simulate_seeded::<Fzr>(&FzrConfig::new(vec![3, 1, 1]).unwrap(), 4, 0, 30.0, SimOptions::default());
        replay::<Fzr>(&t).unwrap();
        assert_eq!(t.first_exit_time, Some(0.0));
        let t = simulate_seeded::<SegmentSsep>(&SegmentSsepConfig::full(6), 4, 0, 1e4, SimOptions::default());
        replay::<SegmentSsep>(&t).unwrap();
        assert_eq!(t.final_state.particle_count(), 0);
    }

    #[test]
    fn ndjson_lines() {
        let t = simulate_seeded::<Swt>(&swt(&[1, 0, -1]), 5, 0, 10.0, SimOptions::default());
        let mut buf = Vec::new();
        t.write_ndjson(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), t.events.len() + 2);
        for l in &lines {
            serde_json::from_str::<serde_json::Value>(l).unwrap();
        }
        assert!(lines[0].contains("\"start\""));
    }
}
