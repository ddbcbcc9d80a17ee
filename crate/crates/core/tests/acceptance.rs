//! End-to-end acceptance suite. Each test checks one criterion and writes a
//! single `PASS`/`FAIL` line to stderr (unbuffered, so it shows up without
//! `--nocapture`) before asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use swt_core::analytic::{rw_constant, spectral_occupation, t_star, tau_star};
use swt_core::couplings::{
    run_basic_coupling, run_labelled_vs_ssep, run_reservoir_domination, run_unrolled, survival_bound_check,
    AssertionLog, Check, Segment,
};
use swt_core::dynamics::{
    replay, simulate_seeded, AggregateSwt, ClockStream, Fep, Fzr, LabelledSwtState, SimOptions, StreamId,
    Swt, Trajectory,
};
use swt_core::experiments::{
    any_particle_case, estimate_theta, live_particle_case, rw_exit_tail, sample_exit_times, segment_occupation_mc,
    single_deep_trap_critical, ConfigFamily, ThetaOptions,
};
use swt_core::mappings::{check_mapped, fep_to_fzr, fep_to_swt_dynamic};
use swt_core::oracle::{exact_transient_prob, exact_tv_and_mixing, generator_power_value, Chain, DEFAULT_STATE_CAP};
use swt_core::stats::{wilson, LEVEL};
use swt_core::{FepConfig, FzrConfig, SwtConfig};

const SEED: u64 = 1;

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("\n[{id:>2}] {verdict} {name} ({:.2} s): {detail}\n", elapsed.as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn random_fep(id: StreamId) -> FepConfig {
    let mut rng = id.rng();
    let n = rng.random_range(2..=12);
    loop {
        let v: Vec<u8> = (0..n).map(|_| rng.random_bool(0.6) as u8).collect();
        if v.contains(&1) {
            return FepConfig::new(v).unwrap();
        }
    }
}

/// A random configuration on `k` sites holding a trap in `1..=2`.
fn random_trapped_swt(id: StreamId, k: usize) -> SwtConfig {
    let mut rng = id.rng();
    let mut v: Vec<i32> = (0..k).map(|_| rng.random_range(-2..=1)).collect();
    let site = rng.random_range(1..=2);
    v[site] = -rng.random_range(1..=3);
    if !v.contains(&1) {
        v[0] = 1;
    }
    SwtConfig::new(v).unwrap()
}

#[test]
fn negative_dependence_counterexamples() {
    let started = Instant::now();
    let seed = SwtConfig::new(vec![-3, 1, 1, 1, 0, -1, 0]).unwrap();
    let chain = Chain::reachable::<Swt>(&seed, DEFAULT_STATE_CAP).unwrap();
    let f = |x: &SwtConfig| (x.get(5) == 1) as i64;
    let g = |x: &SwtConfig| (x.get(6) == 1) as i64;
    let pf = generator_power_value(&chain, &seed, &f, 10).unwrap();
    let pg = generator_power_value(&chain, &seed, &g, 10).unwrap();
    let ph = generator_power_value(&chain, &seed, &|x| f(x) * g(x), 10).unwrap();
    let powers_time = started.elapsed();

    let started_case = Instant::now();
    let case1 = any_particle_case(1.0).unwrap();
    let case1_time = started_case.elapsed();
    let live = live_particle_case().unwrap();

    let pattern = pf[..5].iter().all(|&v| v == 0)
        && pf[5] > 0
        && pg[..6].iter().all(|&v| v == 0)
        && ph[..10].iter().all(|&v| v == 0);
    let frozen = pf == [0, 0, 0, 0, 0, 2, -23, 164, -922, 4352, -16809]
        && pg == [0, 0, 0, 0, 0, 0, 2, -27, 218, -1358, 7068]
        && ph[10] == 33
        && live.pattern_holds;
    let case1_ok = case1.holds && case1.gap_error < 1e-12 && case1.gap > 0.0;
    let fast = powers_time < Duration::from_secs(1) && case1_time < Duration::from_secs(1);
    let pass = pattern && frozen && case1_ok && fast;
    report(
        1,
        "generator-power zero pattern and strict inequality",
        pass,
        started.elapsed(),
        &format!(
            "L^5 f = {}, L^6 g = {}, L^10 h = {}, powers in {:.3} s; gap {:.6e} ± {:.1e} at t = 1 in {:.3} s",
            pf[5],
            pg[6],
            ph[10],
            powers_time.as_secs_f64(),
            case1.gap,
            case1.gap_error,
            case1_time.as_secs_f64()
        ),
    );
    assert!(pattern && frozen, "power table {pf:?} {pg:?} {ph:?}");
    assert!(case1_ok, "{case1:?}");
    assert!(fast, "powers {powers_time:?}, case {case1_time:?}");
}

#[test]
fn tau_star_tracks_t_star() {
    let started = Instant::now();
    let rows: Vec<(usize, f64)> = [50, 100, 200, 400]
        .into_iter()
        .map(|k| {
            let tau = tau_star(k, 0).unwrap();
            (k, (tau.time - t_star(k)).abs() / (k * k) as f64)
        })
        .collect();
    let elapsed = started.elapsed();
    let pass = rows.iter().all(|&(_, d)| d <= 2.0) && elapsed < Duration::from_secs(1);
    let detail = rows
        .iter()
        .map(|(k, d)| format!("K={k}: {d:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(2, "|tau* - t*| / K^2 <= 2", pass, elapsed, &detail);
    assert!(pass, "{rows:?} in {elapsed:?}");
}

#[test]
fn monte_carlo_matches_exact_transience() {
    const SAMPLES: u64 = 100_000;
    let started = Instant::now();
    let mut configs = vec![("single-deep-trap-critical:5".to_string(), single_deep_trap_critical(5).unwrap())];
    let mut seed = 0;
    while configs.len() < 5 {
        let family = ConfigFamily::RandomCritical { k: 7, seed };
        let xi = family.swt().unwrap();
        let small = Chain::reachable::<Swt>(&xi, 10_000).is_ok();
        if small && xi.phase().is_transient() {
            configs.push((family.to_string(), xi));
        }
        seed += 1;
    }
    let mut misses = Vec::new();
    let mut worst_z: f64 = 0.0;
    for (name, xi) in &configs {
        let k2 = (xi.len() * xi.len()) as f64;
        let times = [0.5 * k2, k2, 2.0 * k2];
        let exits = sample_exit_times(xi, 0, SAMPLES, SEED, times[2]);
        for t in times {
            let exact = exact_transient_prob::<Swt>(xi, t, 10_000).unwrap();
            let hits = exits.iter().filter(|&&e| e > t).count() as u64;
            let w = wilson(hits, SAMPLES, LEVEL);
            let sd = (exact.value * (1.0 - exact.value) / SAMPLES as f64).sqrt();
            if sd > 0.0 {
                worst_z = worst_z.max((w.estimate - exact.value).abs() / sd);
            }
            if !w.contains(exact.value) {
                misses.push(format!("{name} t={t}: exact {:.5} not in [{:.5}, {:.5}]", exact.value, w.lower, w.upper));
            }
        }
    }
    let pass = misses.is_empty();
    report(
        3,
        "Monte Carlo inside the Wilson 99% interval of the exact value",
        pass,
        started.elapsed(),
        &format!("{} configurations x 3 times, largest |z| = {worst_z:.2}", configs.len()),
    );
    assert!(pass, "{misses:?}");
}

#[test]
fn transience_time_trend() {
    let started = Instant::now();
    let mut ratios = Vec::new();
    let mut tail = None;
    for k in [16, 32, 64] {
        let xi = single_deep_trap_critical(k).unwrap();
        let est = estimate_theta(&xi, 0.25, ThetaOptions::for_size(k, SEED)).unwrap();
        ratios.push((k, est.estimate / t_star(k), est.lower / t_star(k), est.upper / t_star(k)));
        if k == 64 {
            // the censoring horizon is 4 t*_K
            tail = Some(wilson(est.censored, est.samples, LEVEL));
        }
    }
    let tail = tail.expect("K = 64 ran");
    let window = ratios.iter().all(|&(_, r, _, _)| (0.6..=1.4).contains(&r));
    let trend = ratios.windows(2).all(|w| (w[1].1 - 1.0).abs() <= (w[0].1 - 1.0).abs());
    let pass = window && trend && tail.estimate < 0.05;
    let detail = ratios
        .iter()
        .map(|(k, r, lo, hi)| format!("K={k}: {r:.3} [{lo:.3}, {hi:.3}]"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        4,
        "theta(1/4)/t* in [0.6, 1.4] and approaching 1",
        pass,
        started.elapsed(),
        &format!("{detail}; p(4 t*_64) = {:.5} (upper {:.5})", tail.estimate, tail.upper),
    );
    assert!(window, "{ratios:?}");
    assert!(trend, "{ratios:?}");
    assert!(tail.estimate < 0.05, "{tail:?}");
}

#[test]
fn exact_mixing_sandwich() {
    let started = Instant::now();
    let mut rows = Vec::new();
    for s in 0..=3 {
        let (_, r) = exact_tv_and_mixing(6, s, 0.25, DEFAULT_STATE_CAP).unwrap();
        rows.push(r);
    }
    let elapsed = started.elapsed();
    let pass = rows.iter().all(|r| r.lower_holds && r.upper_holds) && elapsed < Duration::from_secs(60);
    let detail = rows
        .iter()
        .map(|r| {
            format!(
                "s={}: max({:.3}, {:.3}) <= {:.3} <= {:.3} + {:.3}",
                r.s,
                r.theta.mid(),
                r.tau_ssep.mid(),
                r.tau_swt.mid(),
                r.theta_half.mid(),
                r.tau_ssep_half.mid()
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    report(5, "exact mixing sandwich at K = 6", pass, elapsed, &detail);
    assert!(pass, "{rows:?}");
}

#[test]
fn dynamic_mapping_equivalence() {
    let started = Instant::now();
    let failures: Vec<String> = (0..1000u64)
        .into_par_iter()
        .filter_map(|i| {
            let eta = random_fep(StreamId::new(SEED, i).lane(7));
            let t = simulate_seeded::<Fep>(&eta, SEED, i, 50.0, SimOptions::default());
            let mapped = match fep_to_swt_dynamic(&t, None) {
                Ok(m) => m,
                Err(e) => return Some(format!("{i}: {e}")),
            };
            if let Err(e) = replay::<Swt>(&mapped.swt) {
                return Some(format!("{i}: mapped SWT does not replay: {e}"));
            }
            check_mapped(&t, &mapped).err().map(|v| format!("{i}: {v:?}"))
        })
        .collect();
    let pass = failures.is_empty();
    report(
        6,
        "FEP trajectories map to replay-valid, phase-equivalent SWT",
        pass,
        started.elapsed(),
        &format!("1000 trajectories, {} violations", failures.len()),
    );
    assert!(pass, "{:?}", &failures[..failures.len().min(5)]);
}

#[test]
fn coupling_assertions() {
    const K: usize = 8;
    const HORIZON: f64 = 200.0;
    let started = Instant::now();
    let segment = Segment::aligned(2);
    let logs: Vec<(AssertionLog, AssertionLog, AssertionLog, AssertionLog)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let id = StreamId::new(SEED, i);
            let mut rng = id.lane(9).rng();
            let upper: Vec<i32> = (0..K).map(|_| rng.random_range(-3..=1)).collect();
            let lower: Vec<i32> = upper.iter().map(|&x| x - rng.random_range(0..=2)).collect();
            let basic = run_basic_coupling(
                &SwtConfig::new(lower).unwrap(),
                &SwtConfig::new(upper).unwrap(),
                ClockStream::new(id, K),
                HORIZON,
            )
            .unwrap()
            .log;

            let xi = random_trapped_swt(id.lane(10), K);
            let labelled = run_labelled_vs_ssep(&xi, ClockStream::new(id, K), HORIZON).unwrap().log;
            let state = LabelledSwtState::from_config(xi);
            let unrolled = run_unrolled(&state, segment, ClockStream::new(id, K), HORIZON).unwrap().log;
            let domination = run_reservoir_domination(
                &state,
                segment,
                ClockStream::new(id, K),
                ClockStream::new(id.lane(1), K + 3),
                HORIZON,
            )
            .unwrap()
            .log;
            (basic, labelled, unrolled, domination)
        })
        .collect();
    let mut total = [AssertionLog::new(), AssertionLog::new(), AssertionLog::new(), AssertionLog::new()];
    for (a, b, c, d) in logs {
        total[0].merge(a);
        total[1].merge(b);
        total[2].merge(c);
        total[3].merge(d);
    }

    let survival: Vec<_> = [vec![1, -4, 1, 1, 1, 1, 1, 1], vec![1, -2, 1, 1, 0, 1, 1, -1], vec![0, 1, -3, 1, 1, 1, 1, 1]]
        .into_iter()
        .map(|v| {
            let xi = SwtConfig::new(v).unwrap();
            survival_bound_check(&xi, segment, &[4.0, 16.0, 64.0], 1000, SEED, DEFAULT_STATE_CAP).unwrap()
        })
        .collect();

    let clean = total.iter().all(AssertionLog::is_clean);
    let exercised = [
        (0, Check::Order),
        (1, Check::Identity),
        (2, Check::Distance),
        (2, Check::SurvivalSum),
        (3, Check::Domination),
    ]
    .iter()
    .all(|&(j, c)| total[j].evaluated(c) > 0);
    let survival_ok = survival.iter().all(|r| r.holds());
    let pass = clean && exercised && survival_ok;
    let counts = ["basic", "labelled", "unrolled", "domination"]
        .iter()
        .zip(&total)
        .map(|(n, l)| {
            let checks: u64 = l.evaluated.values().sum();
            format!("{n} {checks} checks/{} violations", l.violation_count)
        })
        .collect::<Vec<_>>()
        .join(", ");
    report(
        7,
        "coupling assertions at K = 8, a = 2",
        pass,
        started.elapsed(),
        &format!("1000 seeds: {counts}; survival bound holds on {}/3", survival.iter().filter(|r| r.holds()).count()),
    );
    for l in &total {
        assert!(l.is_clean(), "{:?}", l.violations);
    }
    assert!(exercised, "some checks never ran");
    assert!(survival_ok, "{survival:?}");
}

#[test]
fn walk_exit_tail_is_dominated() {
    let started = Instant::now();
    let k = 20;
    let k2 = (k * k) as f64;
    let rep = rw_exit_tail(k, &[k2, 2.0 * k2, 4.0 * k2], 100_000, SEED).unwrap();
    let pass = rep.dominated();
    let detail = rep
        .rows
        .iter()
        .map(|r| format!("s={}: {:.5} <= {:.5}", r.s, r.estimate, r.bound))
        .collect::<Vec<_>>()
        .join(", ");
    report(8, "walk exit tail below C e^{-s/K^2}", pass, started.elapsed(), &format!("C = {:.5}; {detail}", rw_constant()));
    assert!(pass, "{rep:?}");
}

#[test]
fn spectral_occupation_consistency() {
    let started = Instant::now();
    let k = 16;
    let k2 = (k * k) as f64;
    let cmp: Vec<_> = [k2, 2.0 * k2]
        .into_iter()
        .map(|t| segment_occupation_mc(k, t, 100_000, SEED).unwrap())
        .collect();
    let mc_ok = cmp.iter().all(|c| c.z_score().abs() <= 3.0);
    let closed_err = [0.0, 0.1, 0.5, 1.0, 3.0, 10.0]
        .into_iter()
        .map(|t| (spectral_occupation(2, t).unwrap().full - (-2.0 * t).exp()).abs())
        .fold(0.0, f64::max);
    let pass = mc_ok && closed_err <= 1e-9;
    let detail = cmp
        .iter()
        .map(|c| format!("t={}: MC {:.4e} vs {:.4e} (z = {:.2})", c.t, c.mean, c.spectral, c.z_score()))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        9,
        "spectral occupation against segment SSEP",
        pass,
        started.elapsed(),
        &format!("{detail}; K = 2 closed form error {closed_err:.1e}"),
    );
    assert!(mc_ok, "{cmp:?}");
    assert!(closed_err <= 1e-9, "{closed_err}");
}

fn check_corpus<D, S>(trajs: &[Trajectory<S>], conserved: impl Fn(&S) -> u64) -> Vec<String>
where
    D: swt_core::dynamics::RingDynamics<State = S>,
    S: Clone + PartialEq,
{
    trajs
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match replay::<D>(t) {
            Err(e) => Some(format!("{i}: {e}")),
            Ok(_) if conserved(&t.final_state) != conserved(&t.initial) => Some(format!("{i}: conserved quantity drifted")),
            Ok(_) => None,
        })
        .collect()
}

#[test]
fn conservation_and_absorption() {
    let started = Instant::now();
    let opts = SimOptions::default();

    let mut swt_starts = vec![single_deep_trap_critical(5).unwrap(), single_deep_trap_critical(16).unwrap()];
    swt_starts.extend((0..20).map(|seed| ConfigFamily::RandomCritical { k: 7, seed }.swt().unwrap()));
    swt_starts.extend((0..20).map(|i| random_trapped_swt(StreamId::new(SEED, i).lane(10), 8)));
    let swt: Vec<_> = swt_starts
        .par_iter()
        .flat_map_iter(|xi| (0..25).map(move |i| simulate_seeded::<Swt>(xi, SEED, i, 100.0, opts)))
        .collect();
    let fep_starts: Vec<FepConfig> = (0..1000).map(|i| random_fep(StreamId::new(SEED, i).lane(7))).collect();
    let fep: Vec<_> = fep_starts
        .par_iter()
        .enumerate()
        .map(|(i, eta)| simulate_seeded::<Fep>(eta, SEED, i as u64, 50.0, opts))
        .collect();
    let fzr_starts: Vec<FzrConfig> = fep_starts
        .iter()
        .filter(|eta| eta.empty_count() > 0)
        .map(|eta| fep_to_fzr(eta, None).unwrap().0)
        .collect();
    let fzr: Vec<_> = fzr_starts
        .par_iter()
        .enumerate()
        .map(|(i, w)| simulate_seeded::<Fzr>(w, SEED, i as u64, 50.0, opts))
        .collect();

    let mut failures = check_corpus::<Swt, _>(&swt, |x| x.excess() as u64);
    failures.extend(check_corpus::<Fep, _>(&fep, FepConfig::particle_count));
    failures.extend(check_corpus::<Fzr, _>(&fzr, FzrConfig::particle_count));

    // the aggregate engine behind the transience estimators
    let mut aggregate_events = 0u64;
    for (j, xi) in swt_starts.iter().enumerate() {
        let mut rng = StreamId::new(SEED, j as u64).rng();
        let mut sim = AggregateSwt::new(xi);
        let mut exited = !sim.is_transient();
        let mut phase = SwtConfig::new(sim.sites().to_vec()).unwrap().phase();
        while let Some((time, _, _)) = sim.step(&mut rng) {
            if time > 200.0 {
                break;
            }
            aggregate_events += 1;
            let now = SwtConfig::new(sim.sites().to_vec()).unwrap();
            if now.excess() != xi.excess() {
                failures.push(format!("aggregate {j}: excess changed at {time}"));
                break;
            }
            if exited && now.phase() != phase {
                failures.push(format!("aggregate {j}: left {phase:?} at {time}"));
                break;
            }
            exited |= !now.phase().is_transient();
            phase = now.phase();
        }
    }

    let events: usize = swt.iter().map(|t| t.events.len()).sum::<usize>()
        + fep.iter().map(|t| t.events.len()).sum::<usize>()
        + fzr.iter().map(|t| t.events.len()).sum::<usize>();
    let pass = failures.is_empty();
    report(
        10,
        "conservation and absorption over the simulation corpus",
        pass,
        started.elapsed(),
        &format!(
            "{} SWT, {} FEP, {} FZR trajectories with {events} events, {aggregate_events} aggregate steps; {} failures",
            swt.len(),
            fep.len(),
            fzr.len(),
            failures.len()
        ),
    );
    assert!(pass, "{:?}", &failures[..failures.len().min(5)]);
}
