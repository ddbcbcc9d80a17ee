use proptest::prelude::*;

use swt_core::couplings::run_basic_coupling;
use swt_core::dynamics::{replay, simulate_seeded, ClockStream, Fep, Fzr, SimOptions, Swt};
use swt_core::mappings::{check_mapped, fep_to_fzr, fep_to_swt_dynamic, fep_to_swt_static, fzr_to_fep, swt_to_fep_static, TaggedFep};
use swt_core::oracle::{semigroup_value, Chain};
use swt_core::stats::{wilson, LEVEL};
use swt_core::{FepConfig, FzrConfig, SwtConfig};

fn swt_config(max_len: usize) -> impl Strategy<Value = SwtConfig> {
    prop::collection::vec(-3i32..=1, 2..=max_len).prop_map(|v| SwtConfig::new(v).unwrap())
}

/// An ordered pair `lower ≤ upper` obtained by lowering some sites.
fn ordered_pair(max_len: usize) -> impl Strategy<Value = (SwtConfig, SwtConfig)> {
    prop::collection::vec((-3i32..=1, 0i32..=2), 2..=max_len).prop_map(|v| {
        let upper: Vec<i32> = v.iter().map(|&(x, _)| x).collect();
        let lower: Vec<i32> = v.iter().map(|&(x, d)| x - d).collect();
        (SwtConfig::new(lower).unwrap(), SwtConfig::new(upper).unwrap())
    })
}

fn fep_config(max_len: usize) -> impl Strategy<Value = FepConfig> {
    prop::collection::vec(0u8..=1, 2..=max_len)
        .prop_filter("needs a particle", |v| v.contains(&1))
        .prop_map(|v| FepConfig::new(v).unwrap())
}

fn fzr_config(max_len: usize) -> impl Strategy<Value = FzrConfig> {
    prop::collection::vec(0u32..=3, 2..=max_len)
        .prop_filter("needs a particle", |v| v.iter().any(|&x| x > 0))
        .prop_map(|v| FzrConfig::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn basic_coupling_preserves_order((lower, upper) in ordered_pair(10), seed in any::<u64>()) {
        let c = run_basic_coupling(&lower, &upper, ClockStream::from_seed(seed, 0, lower.len()), 50.0).unwrap();
        prop_assert!(c.log.is_clean(), "{:?}", c.log.violations);
        // a critical configuration stays transient at least as long as any
        // configuration below or above it
        if upper.excess() == 0 {
            prop_assert!(c.lower.exit_time() <= c.upper.exit_time());
        }
        if lower.excess() == 0 {
            prop_assert!(c.upper.exit_time() <= c.lower.exit_time());
        }
    }

    #[test]
    fn swt_replays_and_conserves_excess(xi in swt_config(10), seed in any::<u64>()) {
        let t = simulate_seeded::<Swt>(&xi, seed, 0, 100.0, SimOptions::default());
        prop_assert!(replay::<Swt>(&t).is_ok());
        prop_assert_eq!(t.final_state.excess(), xi.excess());
    }

    #[test]
    fn fep_replays_and_conserves_particles(eta in fep_config(12), seed in any::<u64>()) {
        let t = simulate_seeded::<Fep>(&eta, seed, 0, 100.0, SimOptions::default());
        prop_assert!(replay::<Fep>(&t).is_ok());
        prop_assert_eq!(t.final_state.particle_count(), eta.particle_count());
    }

    #[test]
    fn fzr_replays_and_conserves_mass(omega in fzr_config(8), seed in any::<u64>()) {
        let t = simulate_seeded::<Fzr>(&omega, seed, 0, 100.0, SimOptions::default());
        prop_assert!(replay::<Fzr>(&t).is_ok());
        prop_assert_eq!(t.final_state.particle_count(), omega.particle_count());
    }

    #[test]
    fn static_maps_invert(eta in fep_config(12)) {
        let tagged = TaggedFep::new(eta.clone()).unwrap();
        let (xi, tag) = fep_to_swt_static(&tagged);
        prop_assert_eq!(swt_to_fep_static(&xi, tag, eta.len()).unwrap(), eta.clone());
        prop_assert_eq!(xi.phase(), eta.phase());
        if eta.empty_count() > 0 {
            let (omega, y1) = fep_to_fzr(&eta, None).unwrap();
            prop_assert_eq!(fzr_to_fep(&omega, y1, eta.len()).unwrap(), eta);
        }
    }

    #[test]
    fn dynamic_map_tracks_phase(eta in fep_config(12), seed in any::<u64>()) {
        let t = simulate_seeded::<Fep>(&eta, seed, 0, 50.0, SimOptions::default());
        let mapped = fep_to_swt_dynamic(&t, None).unwrap();
        prop_assert!(check_mapped(&t, &mapped).is_ok());
        prop_assert_eq!(mapped.swt.first_exit_time, t.first_exit_time);
    }

    #[test]
    fn wilson_contains_estimate(n in 1u64..10_000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).round() as u64;
        let w = wilson(k, n, LEVEL);
        prop_assert!(w.lower <= w.estimate && w.estimate <= w.upper);
        prop_assert!(w.lower >= 0.0 && w.upper <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn semigroup_preserves_constants(xi in swt_config(6), t in 0.0f64..20.0) {
        let chain = Chain::reachable::<Swt>(&xi, 100_000).unwrap();
        let one = semigroup_value(&chain, &xi, &|_| 1.0, t, 1e-12).unwrap();
        prop_assert!((one.value - 1.0).abs() <= 1e-12 + one.error);
        let tr = semigroup_value(&chain, &xi, &|s: &SwtConfig| s.phase().is_transient() as u8 as f64, t, 1e-12).unwrap();
        prop_assert!(tr.value >= -1e-12 && tr.value <= 1.0 + 1e-12);
    }
}
