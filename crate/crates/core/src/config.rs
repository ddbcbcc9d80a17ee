//! Configuration types for the three ring processes and the reservoir segment SSEP.
//!
//! Sites are stored 0-based in ring order. Public text and JSON forms list site
//! values in order and carry no indices.
//!
//! # Text codec
//!
//! A configuration is written as a one-character process tag, a colon and a
//! comma-separated list of integers:
//!
//! | tag | process                          | admissible entries |
//! |-----|----------------------------------|--------------------|
//! | `S` | SSEP with traps on a ring        | `≤ 1`              |
//! | `F` | facilitated exclusion on a ring  | `0` or `1`         |
//! | `Z` | facilitated zero-range on a ring | `≥ 0`              |
//! | `R` | SSEP on a segment with reservoirs| `0` or `1`         |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which process a configuration belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Swt,
    Fep,
    Fzr,
    Segment,
}

impl ProcessKind {
    pub fn tag(self) -> char {
        match self {
            ProcessKind::Swt => 'S',
            ProcessKind::Fep => 'F',
            ProcessKind::Fzr => 'Z',
            ProcessKind::Segment => 'R',
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ProcessKind::Swt => "swt",
            ProcessKind::Fep => "fep",
            ProcessKind::Fzr => "fzr",
            ProcessKind::Segment => "segment",
        };
        f.write_str(name)
    }
}

impl FromStr for ProcessKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "swt" | "s" => Ok(ProcessKind::Swt),
            "fep" | "f" => Ok(ProcessKind::Fep),
            "fzr" | "z" => Ok(ProcessKind::Fzr),
            "segment" | "ssep" | "r" => Ok(ProcessKind::Segment),
            _ => Err(ConfigError::UnknownTag(s.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("configuration has no sites")]
    Empty,
    #[error("entry {value} at position {index} is out of range for {process}")]
    OutOfRange {
        process: ProcessKind,
        index: usize,
        value: i64,
    },
    #[error("malformed integer {0:?}")]
    Malformed(String),
    #[error("unknown process tag {0:?}")]
    UnknownTag(String),
    #[error("missing process tag in {0:?}")]
    MissingTag(String),
}

/// Phase of a configuration.
///
/// `FrozenAndErgodic` is its own member: for the SWT it is the empty
/// configuration, for the FEP the alternating ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Frozen,
    Ergodic,
    FrozenAndErgodic,
    TransientSub,
    TransientSuper,
    TransientCritical,
}

impl Phase {
    pub fn is_transient(self) -> bool {
        matches!(
            self,
            Phase::TransientSub | Phase::TransientSuper | Phase::TransientCritical
        )
    }

    pub fn is_frozen(self) -> bool {
        matches!(self, Phase::Frozen | Phase::FrozenAndErgodic)
    }

    pub fn is_ergodic(self) -> bool {
        matches!(self, Phase::Ergodic | Phase::FrozenAndErgodic)
    }

    fn transient(excess: i64) -> Phase {
        match excess.cmp(&0) {
            std::cmp::Ordering::Less => Phase::TransientSub,
            std::cmp::Ordering::Greater => Phase::TransientSuper,
            std::cmp::Ordering::Equal => Phase::TransientCritical,
        }
    }

    fn from_flags(frozen: bool, ergodic: bool, excess: i64) -> Phase {
        match (frozen, ergodic) {
            (true, true) => Phase::FrozenAndErgodic,
            (true, false) => Phase::Frozen,
            (false, true) => Phase::Ergodic,
            (false, false) => Phase::transient(excess),
        }
    }
}

/// Statistics conserved by the dynamics of each process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub particles: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_depth: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excess: Option<i64>,
}

fn out_of_range(process: ProcessKind, index: usize, value: i64) -> ConfigError {
    ConfigError::OutOfRange {
        process,
        index,
        value,
    }
}

/// SSEP-with-traps configuration: `1` particle, `0` empty, `-d` trap of depth `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SwtConfig {
    sites: Vec<i32>,
}

impl SwtConfig {
    pub fn new(sites: Vec<i32>) -> Result<Self, ConfigError> {
        if sites.is_empty() {
            return Err(ConfigError::Empty);
        }
        if let Some((i, &v)) = sites.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(out_of_range(ProcessKind::Swt, i, v as i64));
        }
        Ok(SwtConfig { sites })
    }

    /// All-empty configuration on `k` sites.
    pub fn empty(k: usize) -> Self {
        assert!(k >= 1, "ring needs at least one site");
        SwtConfig { sites: vec![0; k] }
    }

    pub fn sites(&self) -> &[i32] {
        &self.sites
    }

    pub fn into_sites(self) -> Vec<i32> {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn get(&self, k: usize) -> i32 {
        self.sites[k]
    }

    pub fn particle_count(&self) -> u64 {
        self.sites.iter().filter(|&&v| v == 1).count() as u64
    }

    pub fn trap_depth(&self) -> u64 {
        self.sites.iter().map(|&v| (-(v.min(0))) as u64).sum()
    }

    /// Excess `S = Σ ξ_k`, the number of particles minus total trap depth.
    pub fn excess(&self) -> i64 {
        self.sites.iter().map(|&v| v as i64).sum()
    }

    pub fn phase(&self) -> Phase {
        classify_swt(self)
    }

    pub fn conserved(&self) -> ConservedQuantities {
        ConservedQuantities {
            particles: self.particle_count(),
            trap_depth: Some(self.trap_depth()),
            excess: Some(self.excess()),
        }
    }

    /// Rotate so that site `offset` becomes site 0.
    pub fn rotated(&self, offset: usize) -> SwtConfig {
        let k = self.len();
        SwtConfig {
            sites: (0..k).map(|i| self.sites[(i + offset) % k]).collect(),
        }
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [i32] {
        &mut self.sites
    }
}

impl TryFrom<Vec<i64>> for SwtConfig {
    type Error = ConfigError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        if let Some((i, &x)) = v
            .iter()
            .enumerate()
            .find(|(_, &x)| x > 1 || x < i32::MIN as i64)
        {
            return Err(out_of_range(ProcessKind::Swt, i, x));
        }
        SwtConfig::new(v.into_iter().map(|x| x as i32).collect())
    }
}

impl From<SwtConfig> for Vec<i64> {
    fn from(c: SwtConfig) -> Self {
        c.sites.into_iter().map(i64::from).collect()
    }
}

/// Facilitated exclusion configuration on a ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct FepConfig {
    sites: Vec<u8>,
}

impl FepConfig {
    pub fn new(sites: Vec<u8>) -> Result<Self, ConfigError> {
        if sites.is_empty() {
            return Err(ConfigError::Empty);
        }
        if let Some((i, &v)) = sites.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(out_of_range(ProcessKind::Fep, i, v as i64));
        }
        Ok(FepConfig { sites })
    }

    pub fn sites(&self) -> &[u8] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn get(&self, x: usize) -> u8 {
        self.sites[x]
    }

    pub fn particle_count(&self) -> u64 {
        self.sites.iter().filter(|&&v| v == 1).count() as u64
    }

    pub fn empty_count(&self) -> u64 {
        self.len() as u64 - self.particle_count()
    }

    pub fn phase(&self) -> Phase {
        classify_fep(self)
    }

    pub fn conserved(&self) -> ConservedQuantities {
        ConservedQuantities {
            particles: self.particle_count(),
            trap_depth: None,
            excess: None,
        }
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [u8] {
        &mut self.sites
    }
}

impl TryFrom<Vec<i64>> for FepConfig {
    type Error = ConfigError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        bits_from(ProcessKind::Fep, v).and_then(FepConfig::new)
    }
}

impl From<FepConfig> for Vec<i64> {
    fn from(c: FepConfig) -> Self {
        c.sites.into_iter().map(i64::from).collect()
    }
}

fn bits_from(process: ProcessKind, v: Vec<i64>) -> Result<Vec<u8>, ConfigError> {
    v.into_iter()
        .enumerate()
        .map(|(i, x)| match x {
            0 | 1 => Ok(x as u8),
            _ => Err(out_of_range(process, i, x)),
        })
        .collect()
}

/// Facilitated zero-range configuration on a ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct FzrConfig {
    sites: Vec<u32>,
}

impl FzrConfig {
    pub fn new(sites: Vec<u32>) -> Result<Self, ConfigError> {
        if sites.is_empty() {
            return Err(ConfigError::Empty);
        }
        Ok(FzrConfig { sites })
    }

    pub fn sites(&self) -> &[u32] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn get(&self, y: usize) -> u32 {
        self.sites[y]
    }

    pub fn particle_count(&self) -> u64 {
        self.sites.iter().map(|&v| v as u64).sum()
    }

    pub fn phase(&self) -> Phase {
        classify_fzr(self)
    }

    pub fn conserved(&self) -> ConservedQuantities {
        ConservedQuantities {
            particles: self.particle_count(),
            trap_depth: None,
            excess: None,
        }
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [u32] {
        &mut self.sites
    }
}

impl TryFrom<Vec<i64>> for FzrConfig {
    type Error = ConfigError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        let sites = v
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                u32::try_from(x).map_err(|_| out_of_range(ProcessKind::Fzr, i, x))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FzrConfig::new(sites)
    }
}

impl From<FzrConfig> for Vec<i64> {
    fn from(c: FzrConfig) -> Self {
        c.sites.into_iter().map(i64::from).collect()
    }
}

/// SSEP configuration on the segment `1..=L` with absorbing empty reservoirs at
/// the virtual sites `0` and `L+1`. For the single-trap reduction on a ring of
/// size `K` the segment has `L = K-1` sites.
///
/// `L = 0` is allowed and has no particles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SegmentSsepConfig {
    sites: Vec<u8>,
}

impl SegmentSsepConfig {
    pub fn new(sites: Vec<u8>) -> Result<Self, ConfigError> {
        if let Some((i, &v)) = sites.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(out_of_range(ProcessKind::Segment, i, v as i64));
        }
        Ok(SegmentSsepConfig { sites })
    }

    pub fn full(len: usize) -> Self {
        SegmentSsepConfig {
            sites: vec![1; len],
        }
    }

    pub fn sites(&self) -> &[u8] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn particle_count(&self) -> u64 {
        self.sites.iter().filter(|&&v| v == 1).count() as u64
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [u8] {
        &mut self.sites
    }
}

impl TryFrom<Vec<i64>> for SegmentSsepConfig {
    type Error = ConfigError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        bits_from(ProcessKind::Segment, v).and_then(SegmentSsepConfig::new)
    }
}

impl From<SegmentSsepConfig> for Vec<i64> {
    fn from(c: SegmentSsepConfig) -> Self {
        c.sites.into_iter().map(i64::from).collect()
    }
}

/// Phase of an SWT configuration.
pub fn classify_swt(xi: &SwtConfig) -> Phase {
    let frozen = xi.sites.iter().all(|&v| v <= 0);
    let ergodic = xi.sites.iter().all(|&v| v >= 0);
    Phase::from_flags(frozen, ergodic, xi.excess())
}

/// Phase of an FEP configuration, from the literal cyclic conditions.
///
/// Criticality compares `2|η|` with `N`.
pub fn classify_fep(eta: &FepConfig) -> Phase {
    let n = eta.len();
    let s = &eta.sites;
    let frozen = (0..n).all(|x| s[x] * s[(x + 1) % n] == 0);
    let ergodic = (0..n).all(|x| (1 - s[x]) * (1 - s[(x + 1) % n]) == 0);
    let excess = 2 * eta.particle_count() as i64 - n as i64;
    Phase::from_flags(frozen, ergodic, excess)
}

/// Phase of an FZR configuration: frozen when no site holds two particles,
/// ergodic when no site is empty.
pub fn classify_fzr(omega: &FzrConfig) -> Phase {
    let frozen = omega.sites.iter().all(|&v| v <= 1);
    let ergodic = omega.sites.iter().all(|&v| v >= 1);
    let excess = omega.particle_count() as i64 - omega.len() as i64;
    Phase::from_flags(frozen, ergodic, excess)
}

/// A configuration of any of the supported processes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "process", content = "sites", rename_all = "lowercase")]
pub enum Configuration {
    Swt(SwtConfig),
    Fep(FepConfig),
    Fzr(FzrConfig),
    Segment(SegmentSsepConfig),
}

impl Configuration {
    pub fn kind(&self) -> ProcessKind {
        match self {
            Configuration::Swt(_) => ProcessKind::Swt,
            Configuration::Fep(_) => ProcessKind::Fep,
            Configuration::Fzr(_) => ProcessKind::Fzr,
            Configuration::Segment(_) => ProcessKind::Segment,
        }
    }

    pub fn conserved(&self) -> ConservedQuantities {
        match self {
            Configuration::Swt(c) => c.conserved(),
            Configuration::Fep(c) => c.conserved(),
            Configuration::Fzr(c) => c.conserved(),
            Configuration::Segment(c) => ConservedQuantities {
                particles: c.particle_count(),
                trap_depth: None,
                excess: None,
            },
        }
    }

    /// Phase of ring configurations; `None` for the segment process.
    pub fn phase(&self) -> Option<Phase> {
        match self {
            Configuration::Swt(c) => Some(c.phase()),
            Configuration::Fep(c) => Some(c.phase()),
            Configuration::Fzr(c) => Some(c.phase()),
            Configuration::Segment(_) => None,
        }
    }

    fn values(&self) -> Vec<i64> {
        match self {
            Configuration::Swt(c) => c.clone().into(),
            Configuration::Fep(c) => c.clone().into(),
            Configuration::Fzr(c) => c.clone().into(),
            Configuration::Segment(c) => c.clone().into(),
        }
    }
}

impl From<SwtConfig> for Configuration {
    fn from(c: SwtConfig) -> Self {
        Configuration::Swt(c)
    }
}

impl From<FepConfig> for Configuration {
    fn from(c: FepConfig) -> Self {
        Configuration::Fep(c)
    }
}

impl From<FzrConfig> for Configuration {
    fn from(c: FzrConfig) -> Self {
        Configuration::Fzr(c)
    }
}

impl From<SegmentSsepConfig> for Configuration {
    fn from(c: SegmentSsepConfig) -> Self {
        Configuration::Segment(c)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind().tag())?;
        for (i, v) in self.values().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let (tag, body) = text
            .split_once(':')
            .ok_or_else(|| ConfigError::MissingTag(text.to_string()))?;
        let kind = match tag.trim() {
            "S" => ProcessKind::Swt,
            "F" => ProcessKind::Fep,
            "Z" => ProcessKind::Fzr,
            "R" => ProcessKind::Segment,
            other => return Err(ConfigError::UnknownTag(other.to_string())),
        };
        let body = body.trim();
        let values = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    tok.parse::<i64>()
                        .map_err(|_| ConfigError::Malformed(tok.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() && kind != ProcessKind::Segment {
            return Err(ConfigError::Empty);
        }
        Ok(match kind {
            ProcessKind::Swt => Configuration::Swt(values.try_into()?),
            ProcessKind::Fep => Configuration::Fep(values.try_into()?),
            ProcessKind::Fzr => Configuration::Fzr(values.try_into()?),
            ProcessKind::Segment => Configuration::Segment(values.try_into()?),
        })
    }
}

macro_rules! display_via_configuration {
    ($t:ty) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                Configuration::from(self.clone()).fmt(f)
            }
        }
    };
}

display_via_configuration!(SwtConfig);
display_via_configuration!(FepConfig);
display_via_configuration!(FzrConfig);
display_via_configuration!(SegmentSsepConfig);

macro_rules! parse_as {
    ($t:ty, $variant:ident, $kind:expr) => {
        impl FromStr for $t {
            type Err = ConfigError;

            fn from_str(text: &str) -> Result<Self, Self::Err> {
                match text.parse::<Configuration>()? {
                    Configuration::$variant(c) => Ok(c),
                    other => Err(ConfigError::UnknownTag(format!(
                        "expected {} configuration, found {}",
                        $kind,
                        other.kind()
                    ))),
                }
            }
        }
    };
}

parse_as!(SwtConfig, Swt, ProcessKind::Swt);
parse_as!(FepConfig, Fep, ProcessKind::Fep);
parse_as!(FzrConfig, Fzr, ProcessKind::Fzr);
parse_as!(SegmentSsepConfig, Segment, ProcessKind::Segment);

#[cfg(test)]
mod tests {
    use super::*;

    fn swt(v: &[i32]) -> SwtConfig {
        SwtConfig::new(v.to_vec()).unwrap()
    }

    fn fep(v: &[u8]) -> FepConfig {
        FepConfig::new(v.to_vec()).unwrap()
    }

    #[test]
    fn swt_phases() {
        assert_eq!(swt(&[1, 1, -1, 0, -1]).phase(), Phase::TransientCritical);
        assert_eq!(swt(&[0, 0, 0]).phase(), Phase::FrozenAndErgodic);
        assert_eq!(swt(&[-3, 1, 1, 1, 0, -1, 0]).phase(), Phase::TransientSub);
        assert_eq!(swt(&[1, 1, -1, 0]).phase(), Phase::TransientSuper);
        assert_eq!(swt(&[0, -2, 0]).phase(), Phase::Frozen);
        assert_eq!(swt(&[1, 0, 1]).phase(), Phase::Ergodic);
        assert_eq!(swt(&[1]).phase(), Phase::Ergodic);
        assert_eq!(swt(&[-1]).phase(), Phase::Frozen);
    }

    #[test]
    fn fep_phases() {
        assert_eq!(fep(&[1, 0, 1, 0]).phase(), Phase::FrozenAndErgodic);
        assert_eq!(fep(&[1, 1, 1, 0]).phase(), Phase::Ergodic);
        assert_eq!(fep(&[1, 1, 0, 0, 1, 0]).phase(), Phase::TransientCritical);
        assert_eq!(fep(&[1, 0, 1, 0, 0]).phase(), Phase::Frozen);
        assert_eq!(fep(&[1, 1, 0, 0, 0]).phase(), Phase::TransientSub);
        assert_eq!(fep(&[1]).phase(), Phase::Ergodic);
        assert_eq!(fep(&[0]).phase(), Phase::Frozen);
        assert_eq!(fep(&[1, 0]).phase(), Phase::FrozenAndErgodic);
    }

    #[test]
    fn fzr_phases() {
        let z = |v: &[u32]| FzrConfig::new(v.to_vec()).unwrap().phase();
        assert_eq!(z(&[1, 1, 1]), Phase::FrozenAndErgodic);
        assert_eq!(z(&[2, 0, 1]), Phase::TransientCritical);
        assert_eq!(z(&[3, 1, 1]), Phase::Ergodic);
        assert_eq!(z(&[1, 0, 1]), Phase::Frozen);
    }

    #[test]
    fn conserved_quantities_examples() {
        let c = swt(&[1, 1, -1, 0, -1]).conserved();
        assert_eq!((c.particles, c.trap_depth, c.excess), (2, Some(2), Some(0)));
        assert_eq!(fep(&[1, 1, 0, 0, 1, 0]).conserved().particles, 3);
        assert_eq!(
            FzrConfig::new(vec![2, 0, 1]).unwrap().conserved().particles,
            3
        );
    }

    #[test]
    fn codec_examples() {
        assert_eq!(
            "S:1,1,-1,0,-1".parse::<Configuration>().unwrap(),
            Configuration::Swt(swt(&[1, 1, -1, 0, -1]))
        );
        assert_eq!(
            "F:1,0,1".parse::<Configuration>().unwrap(),
            Configuration::Fep(fep(&[1, 0, 1]))
        );
        assert!(matches!(
            "S:1,2,0".parse::<Configuration>(),
            Err(ConfigError::OutOfRange { index: 1, value: 2, .. })
        ));
        assert!(matches!(
            "F:1,-1".parse::<Configuration>(),
            Err(ConfigError::OutOfRange { .. })
        ));
        assert!(matches!(
            "Z:1,-1".parse::<Configuration>(),
            Err(ConfigError::OutOfRange { .. })
        ));
        assert_eq!("S:".parse::<Configuration>(), Err(ConfigError::Empty));
        assert_eq!(
            "S:1,x".parse::<Configuration>(),
            Err(ConfigError::Malformed("x".into()))
        );
        assert!(matches!(
            "Q:1".parse::<Configuration>(),
            Err(ConfigError::UnknownTag(_))
        ));
        assert!(matches!(
            "1,0".parse::<Configuration>(),
            Err(ConfigError::MissingTag(_))
        ));
        assert_eq!(
            "R:".parse::<Configuration>().unwrap(),
            Configuration::Segment(SegmentSsepConfig::new(vec![]).unwrap())
        );
    }

    #[test]
    fn display_round_trip() {
        let c: Configuration = "Z:2,0,1".parse().unwrap();
        assert_eq!(c.to_string(), "Z:2,0,1");
        assert_eq!(swt(&[1, -4]).to_string(), "S:1,-4");
    }

    #[test]
    fn json_form() {
        let c = Configuration::Swt(swt(&[1, -1, 0]));
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"process":"swt","sites":[1,-1,0]}"#);
        let back: Configuration = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Configuration>(r#"{"process":"fep","sites":[2]}"#).is_err());
        assert!(serde_json::from_str::<SwtConfig>("[]").is_err());
    }

    #[test]
    fn rotation() {
        assert_eq!(swt(&[1, 0, -1]).rotated(2), swt(&[-1, 1, 0]));
    }
}
