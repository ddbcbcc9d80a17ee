//! Simulation and exact analysis of the symmetric simple exclusion process
//! with traps (SWT), the facilitated exclusion process (FEP) and the
//! facilitated zero-range process (FZR) on rings.
//!
//! The crate is organised bottom-up:
//!
//! * [`config`]: configuration types, phases, conserved quantities, codecs.
//! * [`dynamics`]: clock-stream and aggregate simulation engines.
//! * [`mappings`]: static and trajectory-level maps FEP ↔ SWT and FEP ↔ FZR.
//! * [`couplings`]: basic, labelled, unrolled and reservoir-domination couplings
//!   with per-event assertions.
//! * [`analytic`]: spectral occupation of the reservoir SSEP and bound envelopes.
//! * [`oracle`]: exact finite-state computations by uniformization.
//! * [`experiments`]: Monte Carlo estimators and experiment recipes.
//! * [`stats`]: Wilson intervals.

pub mod analytic;
pub mod config;
pub mod couplings;
pub mod dynamics;
pub mod experiments;
pub mod mappings;
pub mod oracle;
pub mod stats;

pub use config::{
    classify_fep, classify_fzr, classify_swt, ConfigError, Configuration, ConservedQuantities,
    FepConfig, FzrConfig, Phase, ProcessKind, SegmentSsepConfig, SwtConfig,
};
