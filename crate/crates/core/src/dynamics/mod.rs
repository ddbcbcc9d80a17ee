//! Continuous-time simulation engines.
//!
//! * [`clock`]: reproducible per-edge Poisson clocks shared by coupled processes.
//! * [`process`]: the ring-update rules of each process.
//! * [`trajectory`]: the clock-stream engine, event logs and replay validation.
//! * [`labelled`]: the SSEP with traps with distinguishable particles.
//! * [`aggregate`]: a next-event engine for mass estimation of exit times.

pub mod aggregate;
pub mod clock;
pub mod labelled;
pub mod process;
pub mod trajectory;

pub use aggregate::{sample_exit_time, AggregateSwt};
pub use clock::{ClockStream, Family, MergedClocks, Ring, StreamId};
pub use labelled::{LabelError, LabelledSwt, LabelledSwtState};
pub use process::{EventKind, Fep, Fzr, Outcome, RingDynamics, SegmentSsep, Swt};
pub use trajectory::{replay, simulate, simulate_seeded, transience_exit_time, Event, ReplayError, SimOptions, Trajectory};

use crate::config::{FepConfig, FzrConfig, SegmentSsepConfig, SwtConfig};

pub fn simulate_swt(xi0: &SwtConfig, clocks: ClockStream, horizon: f64) -> Trajectory<SwtConfig> {
    simulate::<Swt>(xi0, clocks, horizon, SimOptions::default())
}

pub fn simulate_fep(eta0: &FepConfig, clocks: ClockStream, horizon: f64) -> Trajectory<FepConfig> {
    simulate::<Fep>(eta0, clocks, horizon, SimOptions::default())
}

/// `clocks` must provide two streams per site (see [`Fzr`]).
pub fn simulate_fzr(omega0: &FzrConfig, clocks: ClockStream, horizon: f64) -> Trajectory<FzrConfig> {
    simulate::<Fzr>(omega0, clocks, horizon, SimOptions::default())
}

pub fn simulate_labelled_swt(
    state0: &LabelledSwtState,
    clocks: ClockStream,
    horizon: f64,
) -> Trajectory<LabelledSwtState> {
    simulate::<LabelledSwt>(state0, clocks, horizon, SimOptions::default())
}

/// `clocks` must provide `L + 1` edges for a segment of `L` sites.
pub fn simulate_segment_ssep(
    sigma0: &SegmentSsepConfig,
    clocks: ClockStream,
    horizon: f64,
) -> Trajectory<SegmentSsepConfig> {
    simulate::<SegmentSsep>(sigma0, clocks, horizon, SimOptions::default())
}
