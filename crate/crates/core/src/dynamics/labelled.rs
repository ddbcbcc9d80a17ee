//! SSEP with traps carrying distinguishable particles.
//!
//! Each particle keeps a label. A live label sitting on a ringing edge always
//! crosses it: into an empty site it moves, into a trap of positive depth it
//! moves and dies (the trap depth drops by one), and two live labels on the
//! same edge swap. Dead labels stay on their trap site forever. Individual
//! labels therefore perform rate-1 random walks until trapped, while the
//! unlabelled projection is the ordinary SSEP with traps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::process::{swt_move, EventKind, Outcome, RingDynamics};
use crate::config::{ConservedQuantities, Phase, SwtConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("label and alive vectors differ in length")]
    LengthMismatch,
    #[error("label {label} at site {site} outside the ring")]
    OutOfRing { label: u32, site: usize },
    #[error("two live labels share site {site}")]
    SharedSite { site: usize },
    #[error("live labels do not match the particle sites of the configuration")]
    ParticleMismatch,
    #[error("site values disagree with initial depths plus label counts")]
    DepthMismatch,
}

/// `(ξ, Ξ_1..Ξ_n, δ_1..δ_n)`: configuration, label positions and alive flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledSwtState {
    config: SwtConfig,
    positions: Vec<usize>,
    alive: Vec<bool>,
    #[serde(skip)]
    occupant: Vec<Option<u32>>,
}

impl LabelledSwtState {
    /// Label the particles of `config` from left to right starting at 0.
    pub fn from_config(config: SwtConfig) -> Self {
        let positions: Vec<usize> = config
            .sites()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(k, _)| k)
            .collect();
        let alive = vec![true; positions.len()];
        let mut s = LabelledSwtState {
            config,
            positions,
            alive,
            occupant: Vec::new(),
        };
        s.rebuild_occupancy();
        s
    }

    /// Build a state from explicit labels. Dead labels must sit on sites that
    /// are, or were, traps; the site-value identity is not checkable without
    /// the initial depths, so only the live-label conditions are enforced.
    pub fn new(config: SwtConfig, positions: Vec<usize>, alive: Vec<bool>) -> Result<Self, LabelError> {
        if positions.len() != alive.len() {
            return Err(LabelError::LengthMismatch);
        }
        let k = config.len();
        let mut occupant = vec![None; k];
        for (j, (&p, &a)) in positions.iter().zip(&alive).enumerate() {
            if p >= k {
                return Err(LabelError::OutOfRing { label: j as u32, site: p });
            }
            if a {
                if occupant[p].is_some() {
                    return Err(LabelError::SharedSite { site: p });
                }
                occupant[p] = Some(j as u32);
            }
        }
        let matches = config
            .sites()
            .iter()
            .zip(&occupant)
            .all(|(&v, o)| (v == 1) == o.is_some());
        if !matches {
            return Err(LabelError::ParticleMismatch);
        }
        Ok(LabelledSwtState {
            config,
            positions,
            alive,
            occupant,
        })
    }

    fn rebuild_occupancy(&mut self) {
        self.occupant = vec![None; self.config.len()];
        for (j, (&p, &a)) in self.positions.iter().zip(&self.alive).enumerate() {
            if a {
                self.occupant[p] = Some(j as u32);
            }
        }
    }

    pub fn config(&self) -> &SwtConfig {
        &self.config
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn alive(&self) -> &[bool] {
        &self.alive
    }

    pub fn label_count(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, label: usize) -> usize {
        self.positions[label]
    }

    pub fn is_alive(&self, label: usize) -> bool {
        self.alive[label]
    }

    /// Live label at site `k`, if any.
    pub fn occupant(&self, k: usize) -> Option<u32> {
        if self.occupant.len() != self.config.len() {
            // deserialized states carry no occupancy cache
            return self
                .positions
                .iter()
                .zip(&self.alive)
                .position(|(&p, &a)| a && p == k)
                .map(|j| j as u32);
        }
        self.occupant[k]
    }

    /// Check `ξ_k = ξ_k(0)·1{ξ_k(0) ≤ 0} + #{labels at k}` against the
    /// initial configuration the labels started from.
    pub fn check_site_identity(&self, initial: &SwtConfig) -> Result<(), LabelError> {
        let mut expect: Vec<i64> = initial
            .sites()
            .iter()
            .map(|&v| if v <= 0 { v as i64 } else { 0 })
            .collect();
        for &p in &self.positions {
            expect[p] += 1;
        }
        let ok = expect
            .iter()
            .zip(self.config.sites())
            .all(|(&e, &v)| e == v as i64);
        if ok {
            Ok(())
        } else {
            Err(LabelError::DepthMismatch)
        }
    }

    /// Apply a ring of edge `k`.
    pub fn ring(&mut self, k: usize) -> Option<Outcome> {
        let n = self.config.len();
        let (a, b) = (k, (k + 1) % n);
        if a == b {
            return None;
        }
        let (va, vb) = (self.config.get(a), self.config.get(b));
        match (va == 1, vb == 1) {
            (false, false) => None,
            (true, true) => {
                let la = self.occupant[a].expect("particle site has a label");
                let lb = self.occupant[b].expect("particle site has a label");
                self.positions[la as usize] = b;
                self.positions[lb as usize] = a;
                self.occupant[a] = Some(lb);
                self.occupant[b] = Some(la);
                Some(Outcome {
                    kind: EventKind::Swap,
                    labels: vec![la, lb],
                })
            }
            (from_a, _) => {
                let (src, dst) = if from_a { (a, b) } else { (b, a) };
                let l = self.occupant[src].take().expect("particle site has a label");
                let kind = swt_move(self.config.sites_mut(), src, dst);
                self.positions[l as usize] = dst;
                if kind == EventKind::TrapFill {
                    self.alive[l as usize] = false;
                } else {
                    self.occupant[dst] = Some(l);
                }
                Some(Outcome {
                    kind,
                    labels: vec![l],
                })
            }
        }
    }
}

/// Labelled SSEP with traps, clock `k` on edge `(k, k+1 mod K)`.
#[derive(Debug, Clone, Copy)]
pub struct LabelledSwt;

impl RingDynamics for LabelledSwt {
    type State = LabelledSwtState;

    fn clock_count(state: &LabelledSwtState) -> usize {
        state.config.len()
    }

    fn apply(state: &mut LabelledSwtState, clock: usize) -> Option<Outcome> {
        state.ring(clock)
    }

    fn is_transient(state: &LabelledSwtState) -> bool {
        state.config.phase().is_transient()
    }

    fn phase(state: &LabelledSwtState) -> Option<Phase> {
        Some(state.config.phase())
    }

    fn conserved(state: &LabelledSwtState) -> ConservedQuantities {
        state.config.conserved()
    }

    fn check_step(before: &LabelledSwtState, after: &LabelledSwtState) -> Result<(), String> {
        <super::process::Swt as RingDynamics>::check_step(&before.config, &after.config)?;
        for (j, (&was, &is)) in before.alive.iter().zip(&after.alive).enumerate() {
            if !was && is {
                return Err(format!("label {j} revived"));
            }
            if !was && before.positions[j] != after.positions[j] {
                return Err(format!("dead label {j} moved"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(v: &[i32]) -> LabelledSwtState {
        LabelledSwtState::from_config(SwtConfig::new(v.to_vec()).unwrap())
    }

    #[test]
    fn four_rules() {
        let mut s = state(&[1, 1, -1]);
        // swap on edge 0
        let o = s.ring(0).unwrap();
        assert_eq!(o.kind, EventKind::Swap);
        assert_eq!(s.positions(), &[1, 0]);
        // label 0 now at site 1 enters the trap at site 2
        let o = s.ring(1).unwrap();
        assert_eq!((o.kind, o.labels.clone()), (EventKind::TrapFill, vec![0]));
        assert_eq!(s.config().sites(), &[1, 0, 0]);
        assert!(!s.is_alive(0));
        assert_eq!(s.position(0), 2);
        // label 1 walks over the filled trap; label 0 stays
        assert_eq!(s.ring(2).unwrap().kind, EventKind::Jump);
        assert_eq!(s.position(1), 2);
        assert_eq!(s.position(0), 2);
        assert_eq!(s.occupant(2), Some(1));
        // two frozen sites
        assert!(s.ring(0).is_none());
        s.check_site_identity(&SwtConfig::new(vec![1, 1, -1]).unwrap()).unwrap();
    }

    #[test]
    fn validation() {
        let c = SwtConfig::new(vec![1, 0, -1]).unwrap();
        assert!(LabelledSwtState::new(c.clone(), vec![0], vec![true]).is_ok());
        assert_eq!(
            LabelledSwtState::new(c.clone(), vec![1], vec![true]),
            Err(LabelError::ParticleMismatch)
        );
        assert_eq!(
            LabelledSwtState::new(c.clone(), vec![0, 0], vec![true, true]),
            Err(LabelError::SharedSite { site: 0 })
        );
        assert_eq!(
            LabelledSwtState::new(c.clone(), vec![0], vec![true, true]),
            Err(LabelError::LengthMismatch)
        );
        assert_eq!(
            LabelledSwtState::new(c, vec![5], vec![true]),
            Err(LabelError::OutOfRing { label: 0, site: 5 })
        );
    }
}
