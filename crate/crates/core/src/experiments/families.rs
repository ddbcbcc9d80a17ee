//! Named generators of initial configurations.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::config::{Configuration, FepConfig, SwtConfig};
use crate::dynamics::StreamId;
use crate::mappings::swt_to_fep_static;

/// Initial-configuration families for the transience experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ConfigFamily {
    /// Particles everywhere except one trap of depth `K − 1` on the last site.
    SingleDeepTrapCritical { k: usize },
    /// `m` evenly spaced traps whose depths add up to the `K − m` particles.
    UniformTrapsCritical { k: usize, m: usize },
    /// A random critical transient configuration drawn from `seed`.
    RandomCritical { k: usize, seed: u64 },
    /// The FEP on `n` sites whose image is `SingleDeepTrapCritical(n/2)`.
    FepWorst { n: usize },
}

/// `𝟙{k < K−1} − (K−1)𝟙{k = K−1}` on sites `0..K`.
pub fn single_deep_trap_critical(k: usize) -> Result<SwtConfig, ExperimentError> {
    if k < 2 {
        return Err(ExperimentError::Invalid(format!("ring size must be at least 2, got {k}")));
    }
    let mut v = vec![1i32; k];
    v[k - 1] = -(k as i32 - 1);
    Ok(SwtConfig::new(v).expect("valid"))
}

fn uniform_traps_critical(k: usize, m: usize) -> Result<SwtConfig, ExperimentError> {
    if m == 0 || 2 * m > k {
        return Err(ExperimentError::Invalid(format!(
            "need 1 ≤ m ≤ K/2 traps, got m = {m} on K = {k}"
        )));
    }
    let mut v = vec![1i32; k];
    let traps: Vec<usize> = (1..=m).map(|i| i * k / m - 1).collect();
    let total = (k - m) as i32;
    for (i, &site) in traps.iter().enumerate() {
        let share = total / m as i32 + ((i as i32) < total % m as i32) as i32;
        v[site] = -share;
    }
    Ok(SwtConfig::new(v).expect("valid"))
}

fn random_critical(k: usize, seed: u64) -> Result<SwtConfig, ExperimentError> {
    if k < 2 {
        return Err(ExperimentError::Invalid(format!("ring size must be at least 2, got {k}")));
    }
    let mut rng = StreamId::new(seed, 0).rng();
    let mut sites: Vec<usize> = (0..k).collect();
    sites.shuffle(&mut rng);
    let n = rng.random_range(1..k);
    let m = rng.random_range(1..=n.min(k - n));
    // split n into m positive depths: m−1 distinct cut points in 1..n
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(&mut rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);
    let mut v = vec![0i32; k];
    for &s in &sites[..n] {
        v[s] = 1;
    }
    for (j, &s) in sites[n..n + m].iter().enumerate() {
        v[s] = -((cuts[j + 1] - cuts[j]) as i32);
    }
    Ok(SwtConfig::new(v).expect("valid"))
}

fn fep_worst(n: usize) -> Result<FepConfig, ExperimentError> {
    if n < 4 || n % 2 == 1 {
        return Err(ExperimentError::Invalid(format!("FEP size must be even and at least 4, got {n}")));
    }
    let xi = single_deep_trap_critical(n / 2)?;
    Ok(swt_to_fep_static(&xi, 0, n)?)
}

impl ConfigFamily {
    pub fn build(&self) -> Result<Configuration, ExperimentError> {
        Ok(match *self {
            ConfigFamily::FepWorst { n } => fep_worst(n)?.into(),
            _ => self.swt()?.into(),
        })
    }

    /// The SWT configuration whose transience time the family measures; for
    /// [`ConfigFamily::FepWorst`] this is the mapped image.
    pub fn swt(&self) -> Result<SwtConfig, ExperimentError> {
        match *self {
            ConfigFamily::SingleDeepTrapCritical { k } => single_deep_trap_critical(k),
            ConfigFamily::UniformTrapsCritical { k, m } => uniform_traps_critical(k, m),
            ConfigFamily::RandomCritical { k, seed } => random_critical(k, seed),
            ConfigFamily::FepWorst { n } => {
                fep_worst(n)?;
                single_deep_trap_critical(n / 2)
            }
        }
    }

    /// Same family at another size.
    pub fn with_size(&self, size: usize) -> ConfigFamily {
        match *self {
            ConfigFamily::SingleDeepTrapCritical { .. } => ConfigFamily::SingleDeepTrapCritical { k: size },
            ConfigFamily::UniformTrapsCritical { m, .. } => ConfigFamily::UniformTrapsCritical { k: size, m },
            ConfigFamily::RandomCritical { seed, .. } => ConfigFamily::RandomCritical { k: size, seed },
            ConfigFamily::FepWorst { .. } => ConfigFamily::FepWorst { n: size },
        }
    }

    /// SWT ring size of the family member.
    pub fn ring_size(&self) -> usize {
        match *self {
            ConfigFamily::SingleDeepTrapCritical { k }
            | ConfigFamily::UniformTrapsCritical { k, .. }
            | ConfigFamily::RandomCritical { k, .. } => k,
            ConfigFamily::FepWorst { n } => n / 2,
        }
    }
}

impl fmt::Display for ConfigFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConfigFamily::SingleDeepTrapCritical { k } => write!(f, "single-deep-trap-critical:{k}"),
            ConfigFamily::UniformTrapsCritical { k, m } => write!(f, "uniform-traps-critical:{k}:{m}"),
            ConfigFamily::RandomCritical { k, seed } => write!(f, "random-critical:{k}:{seed}"),
            ConfigFamily::FepWorst { n } => write!(f, "fep-worst:{n}"),
        }
    }
}

fn normalise(name: &str) -> String {
    name.chars()
        .filter(|c| !matches!(c, '-' | '_' | ' '))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Parses `name:size[:extra]`, where `extra` is the trap count `m` or the
/// random seed. Names are matched ignoring case, dashes and underscores.
impl FromStr for ConfigFamily {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut num = |what: &str| -> Result<Option<u64>, ExperimentError> {
            parts
                .next()
                .map(|p| {
                    p.trim()
                        .parse::<u64>()
                        .map_err(|_| ExperimentError::Invalid(format!("bad {what} {p:?} in {s:?}")))
                })
                .transpose()
        };
        let size = num("size")?.ok_or_else(|| ExperimentError::Invalid(format!("missing size in {s:?}")))? as usize;
        let extra = num("parameter")?;
        worst_config_family(name, size, extra)
    }
}

fn worst_config_family(name: &str, size: usize, extra: Option<u64>) -> Result<ConfigFamily, ExperimentError> {
    Ok(match normalise(name).as_str() {
        "singledeeptrapcritical" | "singledeeptrap" => ConfigFamily::SingleDeepTrapCritical { k: size },
        "uniformtrapscritical" | "uniformtraps" => ConfigFamily::UniformTrapsCritical {
            k: size,
            m: extra.unwrap_or(2) as usize,
        },
        "randomcritical" => ConfigFamily::RandomCritical {
            k: size,
            seed: extra.unwrap_or(0),
        },
        "fepworst" => ConfigFamily::FepWorst { n: size },
        _ => return Err(ExperimentError::UnknownFamily(name.to_string())),
    })
}

/// Member of the named family at `size` (`K`, or `N` for the FEP family).
/// `extra` is the trap count for the uniform family (default 2) and the
/// seed for the random family (default 0).
pub fn worst_config(name: &str, size: usize, extra: Option<u64>) -> Result<Configuration, ExperimentError> {
    worst_config_family(name, size, extra)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Phase;
    use crate::mappings::{fep_to_swt_static, TaggedFep};

    #[test]
    fn single_deep_trap() {
        let c = worst_config("SingleDeepTrapCritical", 4, None).unwrap();
        assert_eq!(c.to_string(), "S:1,1,1,-3");
        assert_eq!(c.phase(), Some(Phase::TransientCritical));
        assert!(worst_config("single-deep-trap-critical", 1, None).is_err());
    }

    #[test]
    fn uniform_traps() {
        let x = ConfigFamily::UniformTrapsCritical { k: 9, m: 3 }.swt().unwrap();
        assert_eq!(x.sites(), &[1, 1, -2, 1, 1, -2, 1, 1, -2]);
        let y = ConfigFamily::UniformTrapsCritical { k: 10, m: 3 }.swt().unwrap();
        assert_eq!(y.excess(), 0);
        assert_eq!(y.sites().iter().filter(|&&v| v < 0).count(), 3);
        assert!(ConfigFamily::UniformTrapsCritical { k: 5, m: 3 }.swt().is_err());
    }

    #[test]
    fn random_critical_is_transient_critical() {
        for seed in 0..500 {
            for k in [2, 3, 6, 11] {
                let x = ConfigFamily::RandomCritical { k, seed }.swt().unwrap();
                assert_eq!(x.phase(), Phase::TransientCritical, "{x:?}");
            }
        }
        let a = ConfigFamily::RandomCritical { k: 8, seed: 4 }.swt().unwrap();
        assert_eq!(a, ConfigFamily::RandomCritical { k: 8, seed: 4 }.swt().unwrap());
    }

    #[test]
    fn fep_worst_maps_to_single_trap() {
        let Configuration::Fep(eta) = worst_config("fep-worst", 8, None).unwrap() else {
            panic!("expected an FEP configuration");
        };
        let (xi, _) = fep_to_swt_static(&TaggedFep::new(eta).unwrap());
        assert_eq!(xi.sites(), &[1, 1, 1, -3]);
        assert!(worst_config("fep-worst", 7, None).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for f in [
            ConfigFamily::SingleDeepTrapCritical { k: 16 },
            ConfigFamily::UniformTrapsCritical { k: 12, m: 3 },
            ConfigFamily::RandomCritical { k: 6, seed: 99 },
            ConfigFamily::FepWorst { n: 8 },
        ] {
            assert_eq!(f.to_string().parse::<ConfigFamily>().unwrap(), f);
        }
        assert!(matches!("nope:4".parse::<ConfigFamily>(), Err(ExperimentError::UnknownFamily(_))));
    }
}
