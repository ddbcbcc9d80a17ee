//! Finite state spaces and integer generator matrices.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::OracleError;
use crate::dynamics::RingDynamics;

/// Default cap on enumerated states.
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

/// Generator with integer rates: row `i` lists `(j, count)` where `count` is
/// the number of clocks whose ring takes state `i` to `j ≠ i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    rows: Vec<Vec<(u32, u32)>>,
    exit: Vec<u32>,
}

impl Generator {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }

    /// Total exit rate of state `i` (minus the diagonal entry).
    pub fn exit_rate(&self, i: usize) -> u32 {
        self.exit[i]
    }

    pub fn max_exit_rate(&self) -> u32 {
        self.exit.iter().copied().max().unwrap_or(0)
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// States of a finite Markov chain in lexicographic order, with the generator
/// and per-state transience flags.
#[derive(Debug, Clone)]
pub struct Chain<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
    generator: Generator,
    transient: Vec<bool>,
}

impl<S: Clone + Eq + Hash + Ord> Chain<S> {
    /// Breadth-first closure of `seed` under the enabled transitions of `D`.
    pub fn reachable<D: RingDynamics<State = S>>(seed: &S, cap: usize) -> Result<Self, OracleError> {
        let mut seen: HashMap<S, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(seed.clone(), ());
        queue.push_back(seed.clone());
        let clocks = D::clock_count(seed);
        while let Some(s) = queue.pop_front() {
            for c in 0..clocks {
                let mut t = s.clone();
                if D::apply(&mut t, c).is_some() && !seen.contains_key(&t) {
                    if seen.len() >= cap {
                        return Err(OracleError::CapExceeded {
                            cap,
                            partial: seen.len(),
                        });
                    }
                    seen.insert(t.clone(), ());
                    queue.push_back(t);
                }
            }
        }
        Self::from_states::<D>(seen.into_keys().collect())
    }

    /// Chain on an explicit state set, which must be closed under `D`.
    pub fn from_states<D: RingDynamics<State = S>>(mut states: Vec<S>) -> Result<Self, OracleError> {
        states.sort();
        states.dedup();
        let index: HashMap<S, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut rows = Vec::with_capacity(states.len());
        let mut exit = Vec::with_capacity(states.len());
        for s in &states {
            let mut row: Vec<(u32, u32)> = Vec::new();
            for c in 0..D::clock_count(s) {
                let mut t = s.clone();
                if D::apply(&mut t, c).is_some() {
                    if t == *s {
                        continue;
                    }
                    let j = *index.get(&t).ok_or(OracleError::NotClosed)? as u32;
                    match row.iter_mut().find(|(k, _)| *k == j) {
                        Some((_, n)) => *n += 1,
                        None => row.push((j, 1)),
                    }
                }
            }
            row.sort_unstable();
            exit.push(row.iter().map(|&(_, n)| n).sum());
            rows.push(row);
        }
        let transient = states.iter().map(D::is_transient).collect();
        Ok(Chain {
            states,
            index,
            generator: Generator { rows, exit },
            transient,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn transient_flags(&self) -> &[bool] {
        &self.transient
    }

    /// Indicator vector of the transient states.
    pub fn transient_indicator(&self) -> Vec<f64> {
        self.transient.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Evaluate an observable on every state.
    pub fn observe<T>(&self, f: impl Fn(&S) -> T) -> Vec<T> {
        self.states.iter().map(f).collect()
    }
}
