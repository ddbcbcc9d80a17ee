//! Observables on SWT states and a state augmentation recording, per site,
//! whether its value ever exceeded its initial value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{ConservedQuantities, Phase, SwtConfig};
use crate::dynamics::{Outcome, RingDynamics, Swt};

/// Product of site indicators `Π 1{ξ_site = value}`; sites are 1-based in the
/// text form (`"6=1*7=1"`) and 0-based in memory. The empty product is `1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteObservable {
    pub terms: Vec<(usize, i32)>,
}

impl SiteObservable {
    pub fn indicator(site: usize, value: i32) -> Self {
        SiteObservable {
            terms: vec![(site, value)],
        }
    }

    pub fn product(&self, other: &SiteObservable) -> SiteObservable {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        SiteObservable { terms }
    }

    pub fn eval(&self, xi: &SwtConfig) -> i64 {
        self.terms.iter().all(|&(k, v)| xi.get(k) == v) as i64
    }

    pub fn max_site(&self) -> Option<usize> {
        self.terms.iter().map(|&(k, _)| k).max()
    }
}

impl fmt::Display for SiteObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{}={}", k + 1, v)?;
        }
        Ok(())
    }
}

impl FromStr for SiteObservable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let terms = s
            .split('*')
            .map(|term| {
                let (site, value) = term
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| format!("expected SITE=VALUE, got {term:?}"))?;
                let site: usize = site.trim().parse().map_err(|_| format!("bad site {site:?}"))?;
                let value: i32 = value.trim().parse().map_err(|_| format!("bad value {value:?}"))?;
                if site == 0 {
                    return Err("sites are numbered from 1".to_string());
                }
                Ok((site - 1, value))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SiteObservable { terms })
    }
}

/// SWT state plus, for every site, a flag recording whether its value has
/// ever been strictly above its initial value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExceedanceTracked {
    pub xi: SwtConfig,
    pub initial: Vec<i32>,
    pub ever: Vec<bool>,
}

impl ExceedanceTracked {
    pub fn new(xi: SwtConfig) -> Self {
        let initial = xi.sites().to_vec();
        let ever = vec![false; xi.len()];
        ExceedanceTracked { xi, initial, ever }
    }
}

/// Dynamics of [`ExceedanceTracked`]: the SWT with flag updates.
#[derive(Debug, Clone, Copy)]
pub struct TrackedSwt;

impl RingDynamics for TrackedSwt {
    type State = ExceedanceTracked;

    fn clock_count(state: &ExceedanceTracked) -> usize {
        state.xi.len()
    }

    fn apply(state: &mut ExceedanceTracked, clock: usize) -> Option<Outcome> {
        let out = Swt::apply(&mut state.xi, clock)?;
        for (k, flag) in state.ever.iter_mut().enumerate() {
            if state.xi.get(k) > state.initial[k] {
                *flag = true;
            }
        }
        Some(out)
    }

    fn is_transient(state: &ExceedanceTracked) -> bool {
        state.xi.phase().is_transient()
    }

    fn phase(state: &ExceedanceTracked) -> Option<Phase> {
        Some(state.xi.phase())
    }

    fn conserved(state: &ExceedanceTracked) -> ConservedQuantities {
        state.xi.conserved()
    }
}
