//! Maps between the facilitated exclusion process and the SSEP with traps
//! (and the facilitated zero-range process).
//!
//! Label the FEP particles `X_1 < X_2 < … < X_K` starting from a tagged
//! particle and set `X_{K+1} = X_1 + N`. The SWT configuration on `K` sites is
//! `ξ_k = 2 + X_k − X_{k+1}`: a particle whose right neighbour is adjacent
//! becomes a particle, a single gap becomes an empty site and `d+1` empty sites
//! after a particle become a trap of depth `d`. Because FEP particles never
//! cross, the same labelling can be followed along a trajectory, and every FEP
//! jump becomes exactly one SWT jump.
//!
//! The FZR map reads the gaps between consecutive empty sites instead:
//! `ω_y = Y_{y+1} − Y_y − 1` where `Y_1 < … < Y_P` are the empty sites.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{FepConfig, FzrConfig, SwtConfig};
use crate::dynamics::process::fep_mover;
use crate::dynamics::{Event, EventKind, RingDynamics, Swt, Trajectory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MappingError {
    #[error("configuration has no particles")]
    NoParticles,
    #[error("configuration has no empty sites")]
    NoEmptySites,
    #[error("inconsistent ring size: configuration requires {required}, got {given}")]
    InconsistentSize { required: usize, given: usize },
    #[error("tag {tag} out of range for ring of size {size}")]
    TagOutOfRange { tag: usize, size: usize },
    #[error("tag {tag} is not a particle site")]
    TagNotParticle { tag: usize },
    #[error("tag {tag} is not an empty site")]
    TagNotEmpty { tag: usize },
    #[error("event {index} does not move a particle in the FEP")]
    InvalidFepEvent { index: usize },
}

/// FEP configuration with a tagged particle `X_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedFep {
    pub eta: FepConfig,
    pub tag: usize,
}

impl TaggedFep {
    /// Tag the first particle at or to the right of the origin.
    pub fn new(eta: FepConfig) -> Result<Self, MappingError> {
        let tag = eta
            .sites()
            .iter()
            .position(|&v| v == 1)
            .ok_or(MappingError::NoParticles)?;
        Ok(TaggedFep { eta, tag })
    }

    pub fn with_tag(eta: FepConfig, tag: usize) -> Result<Self, MappingError> {
        if tag >= eta.len() {
            return Err(MappingError::TagOutOfRange { tag, size: eta.len() });
        }
        if eta.get(tag) != 1 {
            return Err(MappingError::TagNotParticle { tag });
        }
        Ok(TaggedFep { eta, tag })
    }

    /// Unwrapped positions `X_1 < … < X_K` with `X_1 = tag`.
    pub fn positions(&self) -> Vec<i64> {
        let n = self.eta.len();
        (0..n)
            .map(|i| (self.tag + i) % n)
            .filter(|&x| self.eta.get(x) == 1)
            .map(|x| if x >= self.tag { x as i64 } else { (x + n) as i64 })
            .collect()
    }
}

fn gaps_to_swt(xs: &[i64], n: usize) -> SwtConfig {
    let k = xs.len();
    let sites = (0..k)
        .map(|i| {
            let next = if i + 1 < k { xs[i + 1] } else { xs[0] + n as i64 };
            (2 + xs[i] - next) as i32
        })
        .collect();
    SwtConfig::new(sites).expect("gaps are at least one")
}

/// `Π`: FEP configuration to SWT configuration on `|η|` sites, returning
/// the tag used.
pub fn fep_to_swt_static(tagged: &TaggedFep) -> (SwtConfig, usize) {
    (gaps_to_swt(&tagged.positions(), tagged.eta.len()), tagged.tag)
}

/// Inverse of [`fep_to_swt_static`]: rebuild `η` on `n` sites with the first
/// SWT particle placed at `x1`.
pub fn swt_to_fep_static(xi: &SwtConfig, x1: usize, n: usize) -> Result<FepConfig, MappingError> {
    let required: i64 = xi.sites().iter().map(|&v| 2 - v as i64).sum();
    if required != n as i64 {
        return Err(MappingError::InconsistentSize {
            required: required as usize,
            given: n,
        });
    }
    if x1 >= n {
        return Err(MappingError::TagOutOfRange { tag: x1, size: n });
    }
    let mut eta = vec![0u8; n];
    let mut x = x1;
    for &v in xi.sites() {
        eta[x % n] = 1;
        x += (2 - v) as usize;
    }
    Ok(FepConfig::new(eta).expect("bits"))
}

/// `Φ`: FEP configuration to FZR configuration on the `N − |η|` empty sites.
/// With `tag = None` the first empty site at or right of the origin is used.
pub fn fep_to_fzr(eta: &FepConfig, tag: Option<usize>) -> Result<(FzrConfig, usize), MappingError> {
    let n = eta.len();
    let tag = match tag {
        Some(t) if t >= n => return Err(MappingError::TagOutOfRange { tag: t, size: n }),
        Some(t) if eta.get(t) != 0 => return Err(MappingError::TagNotEmpty { tag: t }),
        Some(t) => t,
        None => eta
            .sites()
            .iter()
            .position(|&v| v == 0)
            .ok_or(MappingError::NoEmptySites)?,
    };
    let ys: Vec<usize> = (0..n)
        .map(|i| tag + i)
        .filter(|&y| eta.get(y % n) == 0)
        .collect();
    let p = ys.len();
    let omega = (0..p)
        .map(|i| {
            let next = if i + 1 < p { ys[i + 1] } else { ys[0] + n };
            (next - ys[i] - 1) as u32
        })
        .collect();
    Ok((FzrConfig::new(omega).expect("non-empty"), tag))
}

/// Inverse of [`fep_to_fzr`], with the first empty site placed at `y1`.
pub fn fzr_to_fep(omega: &FzrConfig, y1: usize, n: usize) -> Result<FepConfig, MappingError> {
    let required = omega.len() + omega.particle_count() as usize;
    if required != n {
        return Err(MappingError::InconsistentSize { required, given: n });
    }
    if y1 >= n {
        return Err(MappingError::TagOutOfRange { tag: y1, size: n });
    }
    let mut eta = vec![1u8; n];
    let mut y = y1;
    for &w in omega.sites() {
        eta[y % n] = 0;
        y += w as usize + 1;
    }
    Ok(FepConfig::new(eta).expect("bits"))
}

/// SWT trajectory obtained from an FEP trajectory, with the tagged labelling
/// carried along.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedTrajectory {
    pub swt: Trajectory<SwtConfig>,
    pub tag: usize,
    /// Unwrapped positions `X_1..X_K` at the end of the run.
    pub final_positions: Vec<i64>,
    /// Net number of times the tagged particle wound around the ring
    /// (positive clockwise, i.e. to the right).
    pub tagged_winding: i64,
}

/// Follow the FEP event log and emit the corresponding SWT events.
///
/// Particle `k` (0-based) jumping right moves the SWT particle from site
/// `k−1` to `k`; jumping left moves it from `k` to `k−1`. Both use SWT edge
/// `k−1 mod K`. Target sites hold `0` (jump) or a trap (trap fill), according
/// to whether one or several empty sites follow the destination.
pub fn fep_to_swt_dynamic(
    fep: &Trajectory<FepConfig>,
    tag: Option<usize>,
) -> Result<MappedTrajectory, MappingError> {
    let tagged = match tag {
        Some(t) => TaggedFep::with_tag(fep.initial.clone(), t)?,
        None => TaggedFep::new(fep.initial.clone())?,
    };
    let n = fep.initial.len();
    let mut xs = tagged.positions();
    let k = xs.len();
    let mut label_at = vec![usize::MAX; n];
    for (i, &x) in xs.iter().enumerate() {
        label_at[x as usize % n] = i;
    }
    let (xi0, _) = fep_to_swt_static(&tagged);
    let mut eta = fep.initial.sites().to_vec();
    let mut xi = xi0.clone();
    let mut events = Vec::new();
    let mut exit = if Swt::is_transient(&xi) { None } else { Some(0.0) };
    for (index, e) in fep.events.iter().enumerate() {
        if e.kind == EventKind::NoOp {
            continue;
        }
        let (from, to) = fep_mover(&eta, e.edge).ok_or(MappingError::InvalidFepEvent { index })?;
        eta[from] = 0;
        eta[to] = 1;
        let p = label_at[from];
        label_at[from] = usize::MAX;
        label_at[to] = p;
        let right = to == (from + 1) % n;
        xs[p] += if right { 1 } else { -1 };
        let edge = (p + k - 1) % k;
        let out = Swt::apply(&mut xi, edge).ok_or(MappingError::InvalidFepEvent { index })?;
        events.push(Event {
            time: e.time,
            edge,
            kind: out.kind,
            labels: Vec::new(),
        });
        if exit.is_none() && !Swt::is_transient(&xi) {
            exit = Some(e.time);
        }
    }
    debug_assert_eq!(xi, gaps_to_swt(&xs, n));
    let tagged_winding = xs[0].div_euclid(n as i64);
    Ok(MappedTrajectory {
        swt: Trajectory {
            initial: xi0,
            events,
            final_state: xi,
            horizon: fep.horizon,
            first_exit_time: exit,
        },
        tag: tagged.tag,
        final_positions: xs,
        tagged_winding,
    })
}

/// A disagreement found while checking a mapped trajectory event by event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingViolation {
    pub event: usize,
    pub time: f64,
    pub reason: String,
}

/// Check a mapped trajectory against its source at every event: the mapped
/// log replays as a valid SWT path, the SWT state equals `Π` of the FEP state
/// up to rotation, and both are transient or both are not.
pub fn check_mapped(fep: &Trajectory<FepConfig>, mapped: &MappedTrajectory) -> Result<(), MappingViolation> {
    let fail = |event: usize, time: f64, reason: String| MappingViolation { event, time, reason };
    crate::dynamics::replay::<Swt>(&mapped.swt).map_err(|e| fail(0, 0.0, format!("replay: {e}")))?;
    let changes: Vec<&Event> = fep.events.iter().filter(|e| e.kind != EventKind::NoOp).collect();
    if changes.len() != mapped.swt.events.len() {
        return Err(fail(0, 0.0, "event counts differ".into()));
    }
    let compare = |i: usize, t: f64, eta: &FepConfig, xi: &SwtConfig| -> Result<(), MappingViolation> {
        if eta.phase().is_transient() != xi.phase().is_transient() {
            return Err(fail(i, t, format!("phase mismatch {:?} vs {:?}", eta.phase(), xi.phase())));
        }
        let (direct, _) = fep_to_swt_static(&TaggedFep::new(eta.clone()).expect("particles conserved"));
        if !(0..xi.len()).any(|r| xi.rotated(r) == direct) {
            return Err(fail(i, t, "mapped state is not a rotation of the static image".into()));
        }
        Ok(())
    };
    let mut eta = fep.initial.clone();
    let mut xi = mapped.swt.initial.clone();
    compare(0, 0.0, &eta, &xi)?;
    for (i, (fe, se)) in changes.iter().zip(&mapped.swt.events).enumerate() {
        if fe.time != se.time {
            return Err(fail(i, fe.time, "event times differ".into()));
        }
        crate::dynamics::Fep::apply(&mut eta, fe.edge);
        Swt::apply(&mut xi, se.edge);
        compare(i, fe.time, &eta, &xi)?;
    }
    if fep.first_exit_time != mapped.swt.first_exit_time {
        return Err(fail(changes.len(), fep.horizon, "exit times differ".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, ClockStream, Fep, SimOptions};

    fn fep(v: &[u8]) -> FepConfig {
        FepConfig::new(v.to_vec()).unwrap()
    }

    fn swt(v: &[i32]) -> SwtConfig {
        SwtConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn static_examples() {
        let t = TaggedFep::new(fep(&[1, 0, 1, 0])).unwrap();
        assert_eq!(fep_to_swt_static(&t), (swt(&[0, 0]), 0));
        let t = TaggedFep::new(fep(&[1, 1, 1])).unwrap();
        assert_eq!(fep_to_swt_static(&t).0, swt(&[1, 1, 1]));
        let t = TaggedFep::new(fep(&[1, 1, 0, 0, 1, 0])).unwrap();
        let (xi, _) = fep_to_swt_static(&t);
        assert_eq!(xi, swt(&[1, -1, 0]));
        assert_eq!(xi.excess(), 0);
        assert!(TaggedFep::new(fep(&[0, 0])).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(swt_to_fep_static(&swt(&[0, 0]), 0, 4).unwrap(), fep(&[1, 0, 1, 0]));
        assert_eq!(swt_to_fep_static(&swt(&[1, -1, 0]), 0, 6).unwrap(), fep(&[1, 1, 0, 0, 1, 0]));
        assert_eq!(
            swt_to_fep_static(&swt(&[1, 1]), 0, 5),
            Err(MappingError::InconsistentSize { required: 2, given: 5 })
        );
        assert!(matches!(
            swt_to_fep_static(&swt(&[0, 0]), 4, 4),
            Err(MappingError::TagOutOfRange { .. })
        ));
    }

    #[test]
    fn explicit_tag() {
        let eta = fep(&[1, 1, 0, 0, 1, 0]);
        let t = TaggedFep::with_tag(eta.clone(), 4).unwrap();
        let (xi, tag) = fep_to_swt_static(&t);
        assert_eq!((xi.clone(), tag), (swt(&[0, 1, -1]), 4));
        assert_eq!(swt_to_fep_static(&xi, 4, 6).unwrap(), eta);
        assert!(TaggedFep::with_tag(eta, 2).is_err());
    }

    #[test]
    fn fzr_examples() {
        assert_eq!(fep_to_fzr(&fep(&[1, 0, 1, 0]), None).unwrap().0.sites(), &[1, 1]);
        let (omega, tag) = fep_to_fzr(&fep(&[1, 1, 0, 0, 1, 0]), None).unwrap();
        assert_eq!((omega.sites(), tag), (&[0u32, 1, 2][..], 2));
        assert_eq!(fzr_to_fep(&omega, 2, 6).unwrap(), fep(&[1, 1, 0, 0, 1, 0]));
        assert_eq!(
            fzr_to_fep(&FzrConfig::new(vec![1, 1, 1]).unwrap(), 1, 6).unwrap(),
            fep(&[1, 0, 1, 0, 1, 0])
        );
        assert_eq!(fep_to_fzr(&fep(&[1, 1]), None), Err(MappingError::NoEmptySites));
        assert!(fzr_to_fep(&omega, 0, 7).is_err());
    }

    #[test]
    fn right_jump_into_long_gap_fills_a_trap() {
        // pair at 0,1 followed by three empties: particle 1 jumping right
        let eta = fep(&[1, 1, 0, 0, 0, 1, 0]);
        let mut traj = simulate::<Fep>(&eta, ClockStream::from_seed(0, 0, 7), 0.0, SimOptions::default());
        traj.events.push(Event {
            time: 0.5,
            edge: 1,
            kind: EventKind::Jump,
            labels: vec![],
        });
        traj.horizon = 1.0;
        let mut state = eta.clone();
        Fep::apply(&mut state, 1);
        traj.final_state = state;
        let m = fep_to_swt_dynamic(&traj, None).unwrap();
        assert_eq!(m.swt.initial, swt(&[1, -2, 0]));
        assert_eq!(m.swt.events[0].kind, EventKind::TrapFill);
        assert_eq!(m.swt.final_state, swt(&[0, -1, 0]));
    }

    #[test]
    fn dynamic_map_is_consistent() {
        for seed in 0..100 {
            let eta = fep(&[1, 1, 1, 0, 0, 1, 0, 0, 1, 0]);
            let t = simulate::<Fep>(&eta, ClockStream::from_seed(seed, 0, 10), 50.0, SimOptions::default());
            let m = fep_to_swt_dynamic(&t, None).unwrap();
            check_mapped(&t, &m).unwrap();
        }
    }
}
