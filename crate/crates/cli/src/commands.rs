use std::fmt;
use std::fs;
use std::hash::Hash;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use swt_core::analytic::{default_constant, swt_mixing_sandwich, t_star, tau_star};
use swt_core::couplings::{
    run_basic_coupling, run_labelled_vs_ssep, run_reservoir_domination, run_unrolled, survival_bound_check,
    AssertionLog, Segment,
};
use swt_core::dynamics::{
    replay, simulate, ClockStream, EventKind, Fep, Fzr, RingDynamics, SegmentSsep, SimOptions, StreamId, Swt,
    Trajectory, LabelledSwtState,
};
use swt_core::experiments::{
    cutoff_profile, estimate_theta, estimate_transience_prob, mixing_upper_via_meeting, negdep_report,
    ConfigFamily, ThetaOptions,
};
use swt_core::mappings::{
    check_mapped, fep_to_fzr, fep_to_swt_dynamic, fep_to_swt_static, fzr_to_fep, swt_to_fep_static, TaggedFep,
};
use swt_core::oracle::{exact_transient_prob, exact_tv_and_mixing, generator_power_value, semigroup_value, Chain, SiteObservable};
use swt_core::{Configuration, FepConfig, SwtConfig};

use crate::args::*;
use crate::output::Sink;

/// Failures with their own exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A checked property does not hold (exit 1).
    Assertion(String),
    /// Bad or missing arguments (exit 2).
    Usage(String),
    /// A resource cap was hit (exit 3).
    Cap(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Assertion(m) => write!(f, "assertion failed: {m}"),
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Cap(m) => write!(f, "resource cap: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Failure::Usage(msg.into()).into()
}

/// Defaults read from `--experiment`; command-line flags take precedence.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    /// `NAME:SIZE[:EXTRA]` or an explicit configuration, for transience and theta.
    pub target: Option<String>,
    /// Family name for cutoff.
    pub family: Option<String>,
    pub extra: Option<u64>,
    pub ks: Option<Vec<usize>>,
    pub grid: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub initial_samples: Option<u64>,
    pub eps: Option<f64>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
}

impl ExperimentFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("experiment file {}: {e}", path.display())))
    }
}

pub struct Ctx<'a> {
    pub global: &'a Global,
    pub file: ExperimentFile,
    pub seed: u64,
    pub sink: Sink,
}

impl Ctx<'_> {
    fn samples(&self, flag: Option<u64>, default: u64) -> Result<u64> {
        let n = flag.or(self.file.samples).unwrap_or(default);
        if n == 0 {
            return Err(usage("--samples must be positive"));
        }
        if n > self.global.max_samples {
            return Err(Failure::Cap(format!(
                "{n} samples requested, --max-samples is {}",
                self.global.max_samples
            ))
            .into());
        }
        Ok(n)
    }

    fn horizon(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(usage(format!("horizon must be non-negative, got {h}")));
        }
        if h > self.global.max_horizon {
            return Err(Failure::Cap(format!("horizon {h} exceeds --max-horizon {}", self.global.max_horizon)).into());
        }
        Ok(h)
    }

    fn check(&self, ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
        if self.global.assert && !ok {
            return Err(Failure::Assertion(msg()).into());
        }
        Ok(())
    }
}

fn parse_config(text: &str) -> Result<Configuration> {
    text.parse::<Configuration>()
        .map_err(|e| usage(format!("configuration {text:?}: {e}")))
}

fn parse_swt(text: &str) -> Result<SwtConfig> {
    match parse_config(text)? {
        Configuration::Swt(x) => Ok(x),
        other => Err(usage(format!("expected an SWT configuration (S:...), got {}", other.kind()))),
    }
}

fn check_process(process: Option<ProcessArg>, config: &Configuration) -> Result<()> {
    let kind = config.kind().to_string();
    if let Some(p) = process {
        let want = serde_json::to_value(p)?;
        if want.as_str() != Some(kind.as_str()) {
            return Err(usage(format!("--process {} does not match a {kind} configuration", want.as_str().unwrap_or(""))));
        }
    }
    Ok(())
}

fn kind_name(k: EventKind) -> String {
    serde_json::to_value(k)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

#[derive(Serialize)]
struct EventRow {
    time: f64,
    edge: usize,
    kind: String,
    labels: String,
    state: String,
}

fn event_rows<D: RingDynamics>(traj: &Trajectory<D::State>) -> Vec<EventRow>
where
    D::State: Into<Configuration>,
{
    let mut state = traj.initial.clone();
    traj.events
        .iter()
        .map(|e| {
            if e.kind != EventKind::NoOp {
                D::apply(&mut state, e.edge);
            }
            EventRow {
                time: e.time,
                edge: e.edge,
                kind: kind_name(e.kind),
                labels: e.labels.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
                state: state.clone().into().to_string(),
            }
        })
        .collect()
}

fn emit_trajectory<D: RingDynamics>(ctx: &Ctx, traj: &Trajectory<D::State>) -> Result<()>
where
    D::State: Into<Configuration> + Serialize,
{
    match ctx.sink.format {
        Format::Csv => ctx.sink.emit(&event_rows::<D>(traj), &()),
        Format::Json => {
            let mut w = ctx.sink.writer()?;
            traj.write_ndjson(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn run_simulation<D: RingDynamics>(ctx: &Ctx, initial: &D::State, a: &SimulateArgs) -> Result<()>
where
    D::State: Into<Configuration> + Serialize,
{
    let clocks = ClockStream::from_seed(ctx.seed, a.trajectory, D::clock_count(initial));
    let opts = SimOptions {
        log_noops: a.log_noops,
        stop_at_exit: a.stop_at_exit,
    };
    let traj = simulate::<D>(initial, clocks, ctx.horizon(a.horizon)?, opts);
    if ctx.global.assert {
        replay::<D>(&traj).map_err(|e| Failure::Assertion(format!("replay: {e}")))?;
    }
    emit_trajectory::<D>(ctx, &traj)
}

pub fn simulate_cmd(ctx: &Ctx, a: &SimulateArgs) -> Result<()> {
    let config = parse_config(&a.config)?;
    check_process(a.process, &config)?;
    match config {
        Configuration::Swt(x) => run_simulation::<Swt>(ctx, &x, a),
        Configuration::Fep(x) => run_simulation::<Fep>(ctx, &x, a),
        Configuration::Fzr(x) => run_simulation::<Fzr>(ctx, &x, a),
        Configuration::Segment(x) => run_simulation::<SegmentSsep>(ctx, &x, a),
    }
}

enum MapInput {
    Config(Configuration),
    FepTrajectory(Trajectory<FepConfig>),
}

fn read_map_input(input: &str) -> Result<MapInput> {
    if let Ok(c) = input.parse::<Configuration>() {
        return Ok(MapInput::Config(c));
    }
    let path = PathBuf::from(input);
    if !path.exists() {
        return Err(usage(format!("--input {input:?} is neither a configuration nor a file")));
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let traj = Trajectory::<FepConfig>::read_ndjson(BufReader::new(text.as_bytes()))
            .map_err(|e| usage(format!("{}: not an FEP trajectory: {e}", path.display())))?;
        Ok(MapInput::FepTrajectory(traj))
    } else {
        Ok(MapInput::Config(parse_config(&text)?))
    }
}

#[derive(Serialize)]
struct MapRow {
    direction: Direction,
    input: String,
    output: String,
    /// FEP site of the tagged particle, or the site the output starts from.
    anchor: usize,
}

pub fn map_cmd(ctx: &Ctx, a: &MapArgs) -> Result<()> {
    let input = read_map_input(&a.input)?;
    let need_n = || a.n.ok_or_else(|| usage("--n is required for this direction"));
    let tagged = |eta: FepConfig| -> Result<TaggedFep> {
        Ok(match a.tag {
            Some(t) => TaggedFep::with_tag(eta, t)?,
            None => TaggedFep::new(eta)?,
        })
    };
    let (output, anchor): (Configuration, usize) = match (a.direction, input) {
        (Direction::Fep2swt, MapInput::FepTrajectory(traj)) => {
            let mapped = fep_to_swt_dynamic(&traj, a.tag)?;
            if ctx.global.assert {
                check_mapped(&traj, &mapped)
                    .map_err(|v| Failure::Assertion(format!("event {} at t={}: {}", v.event, v.time, v.reason)))?;
            }
            return emit_trajectory::<Swt>(ctx, &mapped.swt);
        }
        (_, MapInput::FepTrajectory(_)) => {
            return Err(usage("trajectory input is only supported for --direction fep2swt"));
        }
        (Direction::Fep2swt, MapInput::Config(Configuration::Fep(eta))) => {
            let t = tagged(eta)?;
            let (xi, _) = fep_to_swt_static(&t);
            (xi.into(), t.tag)
        }
        (Direction::Swt2fep, MapInput::Config(Configuration::Swt(xi))) => {
            (swt_to_fep_static(&xi, a.origin, need_n()?)?.into(), a.origin)
        }
        (Direction::Fep2fzr, MapInput::Config(Configuration::Fep(eta))) => {
            let (omega, tag) = fep_to_fzr(&eta, a.tag)?;
            (omega.into(), tag)
        }
        (Direction::Fzr2fep, MapInput::Config(Configuration::Fzr(omega))) => {
            (fzr_to_fep(&omega, a.origin, need_n()?)?.into(), a.origin)
        }
        (d, MapInput::Config(c)) => {
            return Err(usage(format!("a {} configuration cannot be mapped with {d:?}", c.kind())));
        }
    };
    let row = MapRow {
        direction: a.direction,
        input: a.input.clone(),
        output: output.to_string(),
        anchor,
    };
    ctx.sink.emit(&[&row], &row)
}

#[derive(Serialize)]
struct CouplingRow {
    trajectory: u64,
    events: u64,
    checks: u64,
    violations: u64,
    first_violation: String,
    /// Exit time (basic, labelled) or the time the segment is clear of traps.
    time: Option<f64>,
}

#[derive(Serialize)]
struct CouplingDoc<'a> {
    kind: CouplingKind,
    config: &'a str,
    lower: Option<&'a str>,
    horizon: f64,
    master_seed: u64,
    runs: &'a [CouplingRow],
    log: &'a AssertionLog,
}

fn row_from_log(trajectory: u64, events: u64, time: Option<f64>, log: &AssertionLog) -> CouplingRow {
    CouplingRow {
        trajectory,
        events,
        checks: log.evaluated.values().sum(),
        violations: log.violation_count,
        first_violation: log
            .violations
            .first()
            .map(|v| format!("{:?} at t={}: {}", v.check, v.time, v.detail))
            .unwrap_or_default(),
        time,
    }
}

pub fn coupling_cmd(ctx: &Ctx, a: &CouplingArgs) -> Result<()> {
    let xi = parse_swt(&a.config)?;
    let horizon = ctx.horizon(a.horizon)?;
    let k = xi.len();
    if a.segment_start == 0 || a.segment_start > k {
        return Err(usage(format!("--segment-start must lie in 1..={k}")));
    }
    let segment = Segment {
        start: a.segment_start - 1,
        len: a.segment_len,
    };
    if a.kind == CouplingKind::Survival {
        let samples = ctx.samples(Some(a.samples), a.samples)?;
        let rep = survival_bound_check(&xi, segment, &a.times, samples, ctx.seed, ctx.global.max_states)?;
        #[derive(Serialize)]
        struct Row {
            t: f64,
            trap_remains: f64,
            lower: f64,
            upper: f64,
            bound: f64,
            bound_error: f64,
            holds: bool,
        }
        let rows: Vec<Row> = rep
            .rows
            .iter()
            .map(|r| Row {
                t: r.t,
                trap_remains: r.trap_remains.estimate,
                lower: r.trap_remains.lower,
                upper: r.trap_remains.upper,
                bound: r.bound,
                bound_error: r.bound_error,
                holds: r.holds,
            })
            .collect();
        ctx.sink.emit(&rows, &rep)?;
        return ctx.check(rep.holds(), || "trap survival exceeds the reservoir bound".into());
    }
    let lower = match (a.kind, &a.lower) {
        (CouplingKind::Basic, Some(l)) => Some(parse_swt(l)?),
        (CouplingKind::Basic, None) => return Err(usage("--lower is required for --kind basic")),
        (_, Some(_)) => return Err(usage("--lower only applies to --kind basic")),
        _ => None,
    };
    let labelled = LabelledSwtState::from_config(xi.clone());
    let results: Vec<Result<(CouplingRow, AssertionLog)>> = (0..a.seeds)
        .into_par_iter()
        .map(|i| {
            let id = StreamId::new(ctx.seed, i);
            let clocks = ClockStream::new(id, k);
            let (events, time, log) = match a.kind {
                CouplingKind::Basic => {
                    let c = run_basic_coupling(lower.as_ref().expect("checked"), &xi, clocks, horizon)?;
                    let events = (c.lower.events.len() + c.upper.events.len()) as u64;
                    (events, c.upper.first_exit_time, c.log)
                }
                CouplingKind::Labelled => {
                    let c = run_labelled_vs_ssep(&xi, clocks, horizon)?;
                    (c.events, c.first_exit_time, c.log)
                }
                CouplingKind::Unrolled => {
                    let r = run_unrolled(&labelled, segment, clocks, horizon)?;
                    (r.events, r.trap_clear_time, r.log)
                }
                CouplingKind::Domination => {
                    let s_clocks = ClockStream::new(id.lane(1), k + a.segment_len + 1);
                    let r = run_reservoir_domination(&labelled, segment, clocks, s_clocks, horizon)?;
                    (r.events, r.trap_clear_time, r.log)
                }
                CouplingKind::Survival => unreachable!(),
            };
            Ok((row_from_log(i, events, time, &log), log))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut total = AssertionLog::new();
    for r in results {
        let (row, log) = r.map_err(|e| usage(e.to_string()))?;
        rows.push(row);
        total.merge(log);
    }
    let doc = CouplingDoc {
        kind: a.kind,
        config: &a.config,
        lower: a.lower.as_deref(),
        horizon,
        master_seed: ctx.seed,
        runs: &rows,
        log: &total,
    };
    ctx.sink.emit(&rows, &doc)?;
    ctx.check(total.is_clean(), || {
        format!(
            "{} violations; first: {}",
            total.violation_count,
            rows.iter().find(|r| r.violations > 0).map(|r| r.first_violation.as_str()).unwrap_or("")
        )
    })
}

#[derive(Serialize)]
struct SpectralRow {
    k: usize,
    s: usize,
    eps: f64,
    constant: f64,
    t_star: f64,
    tau_star: f64,
    tau_star_degenerate: bool,
    transience_leading: f64,
    transience_lower: f64,
    transience_upper: f64,
    ssep_lower: f64,
    ssep_upper_sharp: f64,
    ssep_upper_loose: f64,
    swt_lower: f64,
    swt_upper: f64,
    regime: &'static str,
}

pub fn spectral_cmd(ctx: &Ctx, a: &SpectralArgs) -> Result<()> {
    let constant = a.constant.unwrap_or_else(default_constant);
    let mut rows = Vec::new();
    for &k in &a.k {
        for &s in &a.s {
            let tau = tau_star(k, s).map_err(|e| usage(e.to_string()))?;
            let env = swt_mixing_sandwich(k, s, a.eps, constant).map_err(|e| usage(e.to_string()))?;
            rows.push(SpectralRow {
                k,
                s,
                eps: a.eps,
                constant,
                t_star: t_star(k),
                tau_star: tau.time,
                tau_star_degenerate: tau.degenerate,
                transience_leading: env.transience.leading,
                transience_lower: env.transience.lower,
                transience_upper: env.transience.upper,
                ssep_lower: env.ssep.lower,
                ssep_upper_sharp: env.ssep.upper_sharp,
                ssep_upper_loose: env.ssep.upper_loose,
                swt_lower: env.lower,
                swt_upper: env.upper,
                regime: env.regime.label(),
            });
        }
    }
    ctx.sink.emit(&rows, &rows)
}

#[derive(Serialize)]
struct OracleRow {
    quantity: &'static str,
    observable: String,
    /// Time for semigroup rows, power for generator rows.
    point: String,
    value: String,
    error: Option<f64>,
}

fn oracle_rows<D: RingDynamics>(
    ctx: &Ctx,
    a: &OracleArgs,
    seed: &D::State,
    obs: impl Fn(&D::State) -> i64,
) -> Result<Vec<OracleRow>>
where
    D::State: Clone + Eq + Hash + Ord,
{
    let chain = Chain::reachable::<D>(seed, ctx.global.max_states)?;
    let mut rows = Vec::new();
    for &t in &a.time {
        let c = semigroup_value(&chain, seed, &|s| obs(s) as f64, t, a.tol)?;
        rows.push(OracleRow {
            quantity: "semigroup",
            observable: a.observable.clone(),
            point: format!("{t:?}"),
            value: format!("{:?}", c.value),
            error: Some(c.error),
        });
    }
    if let Some(n) = a.power {
        for (m, v) in generator_power_value(&chain, seed, &|s| obs(s), n)?.into_iter().enumerate() {
            rows.push(OracleRow {
                quantity: "power",
                observable: a.observable.clone(),
                point: m.to_string(),
                value: v.to_string(),
                error: None,
            });
        }
    }
    Ok(rows)
}

pub fn oracle_cmd(ctx: &Ctx, a: &OracleArgs) -> Result<()> {
    let config = parse_config(&a.seed_config)?;
    check_process(a.process, &config)?;
    if a.time.is_empty() && a.power.is_none() {
        return Err(usage("give --time and/or --power"));
    }
    if a.observable != "transient" && !matches!(config, Configuration::Swt(_)) {
        return Err(usage("site observables are only defined for SWT configurations"));
    }
    let site = match a.observable.as_str() {
        "transient" => None,
        text => Some(SiteObservable::from_str(text).map_err(usage)?),
    };
    let rows = match &config {
        Configuration::Swt(x) => oracle_rows::<Swt>(ctx, a, x, |s| match &site {
            Some(o) => o.eval(s),
            None => Swt::is_transient(s) as i64,
        })?,
        Configuration::Fep(x) => oracle_rows::<Fep>(ctx, a, x, |s| Fep::is_transient(s) as i64)?,
        Configuration::Fzr(x) => oracle_rows::<Fzr>(ctx, a, x, |s| Fzr::is_transient(s) as i64)?,
        Configuration::Segment(x) => oracle_rows::<SegmentSsep>(ctx, a, x, |s| SegmentSsep::is_transient(s) as i64)?,
    };
    #[derive(Serialize)]
    struct Doc<'a> {
        seed: String,
        tol: f64,
        rows: &'a [OracleRow],
    }
    ctx.sink.emit(
        &rows,
        &Doc {
            seed: config.to_string(),
            tol: a.tol,
            rows: &rows,
        },
    )
}

fn resolve_target(ctx: &Ctx, t: &TargetArgs) -> Result<SwtConfig> {
    if let Some(c) = &t.config {
        return parse_swt(c);
    }
    let spec = t
        .family
        .clone()
        .or_else(|| ctx.file.target.clone())
        .ok_or_else(|| usage("give --family NAME:SIZE or --config"))?;
    if spec.contains(',') || spec.starts_with("S:") {
        return parse_swt(&spec);
    }
    let fam = ConfigFamily::from_str(&spec).map_err(|e| usage(e.to_string()))?;
    fam.swt().map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct TransienceRow {
    config: String,
    t: f64,
    estimate: f64,
    lower: f64,
    upper: f64,
    level: f64,
    samples: u64,
    master_seed: u64,
    censored: u64,
    wall_clock_secs: f64,
    exact: Option<f64>,
    exact_error: Option<f64>,
}

pub fn transience_cmd(ctx: &Ctx, a: &TransienceArgs) -> Result<()> {
    let xi = resolve_target(ctx, &a.target)?;
    let times = if a.time.is_empty() {
        ctx.file.times.clone().unwrap_or_default()
    } else {
        a.time.clone()
    };
    if times.is_empty() {
        return Err(usage("give at least one --time"));
    }
    let samples = ctx.samples(a.samples, 100_000)?;
    let mut rows = Vec::new();
    let mut missed = Vec::new();
    for &t in &times {
        ctx.horizon(t)?;
        let r = estimate_transience_prob(&xi, t, samples, ctx.seed).map_err(|e| usage(e.to_string()))?;
        let exact = if a.exact {
            Some(exact_transient_prob::<Swt>(&xi, t, ctx.global.max_states)?)
        } else {
            None
        };
        if let Some(e) = exact {
            if !(r.lower <= e.value + e.error && e.value - e.error <= r.upper) {
                missed.push(t);
            }
        }
        rows.push(TransienceRow {
            config: xi.to_string(),
            t,
            estimate: r.estimate,
            lower: r.lower,
            upper: r.upper,
            level: r.level,
            samples: r.samples,
            master_seed: r.master_seed,
            censored: r.censored,
            wall_clock_secs: r.wall_clock_secs,
            exact: exact.map(|e| e.value),
            exact_error: exact.map(|e| e.error),
        });
    }
    ctx.sink.emit(&rows, &rows)?;
    ctx.check(missed.is_empty(), || format!("exact value outside the interval at t = {missed:?}"))
}

#[derive(Serialize)]
struct ThetaRow {
    config: String,
    eps: f64,
    lower: f64,
    upper: f64,
    estimate: f64,
    t_star: f64,
    ratio: f64,
    samples: u64,
    censored: u64,
    resolved: bool,
    horizon: f64,
    master_seed: u64,
    wall_clock_secs: f64,
}

pub fn theta_cmd(ctx: &Ctx, a: &ThetaArgs) -> Result<()> {
    let xi = resolve_target(ctx, &a.target)?;
    let eps = a.eps.or(ctx.file.eps).unwrap_or(0.25);
    let mut opts = ThetaOptions::for_size(xi.len(), ctx.seed);
    opts.max_samples = ctx.samples(a.samples, opts.max_samples)?;
    opts.initial_samples = a
        .initial_samples
        .or(ctx.file.initial_samples)
        .unwrap_or(opts.initial_samples)
        .min(opts.max_samples);
    if let Some(h) = a.horizon.or(ctx.file.horizon) {
        opts.horizon = ctx.horizon(h)?;
    }
    opts.rel_width = a.rel_width;
    let est = estimate_theta(&xi, eps, opts)?;
    let ts = t_star(xi.len().max(2));
    let row = ThetaRow {
        config: xi.to_string(),
        eps,
        lower: est.lower,
        upper: est.upper,
        estimate: est.estimate,
        t_star: ts,
        ratio: est.estimate / ts,
        samples: est.samples,
        censored: est.censored,
        resolved: est.resolved,
        horizon: est.horizon,
        master_seed: est.master_seed,
        wall_clock_secs: est.wall_clock_secs,
    };
    ctx.sink.emit(&[&row], &row)?;
    ctx.check(est.resolved, || "bisection stopped at an undecided point".into())
}

pub fn cutoff_cmd(ctx: &Ctx, a: &CutoffArgs) -> Result<()> {
    let name = a
        .family
        .clone()
        .or_else(|| ctx.file.family.clone())
        .unwrap_or_else(|| "single-deep-trap-critical".into());
    let extra = a.extra.or(ctx.file.extra);
    let ks = if a.k.is_empty() {
        ctx.file.ks.clone().unwrap_or_default()
    } else {
        a.k.clone()
    };
    if ks.is_empty() {
        return Err(usage("give at least one --K"));
    }
    let grid = if a.grid.is_empty() {
        ctx.file
            .grid
            .clone()
            .unwrap_or_else(|| (0..=16).map(|i| i as f64 * 0.125).collect())
    } else {
        a.grid.clone()
    };
    let samples = ctx.samples(a.samples, 10_000)?;
    let family = |k: usize| {
        let spec = match extra {
            Some(e) => format!("{name}:{k}:{e}"),
            None => format!("{name}:{k}"),
        };
        ConfigFamily::from_str(&spec)?.swt()
    };
    let profile = cutoff_profile(&ks, &grid, &family, samples, ctx.seed).map_err(|e| usage(e.to_string()))?;
    ctx.sink.emit(&profile.rows, &profile)?;
    let over: Vec<(usize, f64)> = profile
        .rows
        .iter()
        .filter(|r| r.lower > r.envelope)
        .map(|r| (r.k, r.u))
        .collect();
    ctx.check(over.is_empty(), || format!("profile above the envelope at (K, u) = {over:?}"))
}

#[derive(Serialize, Default)]
struct MixingRow {
    k: usize,
    s: usize,
    eps: f64,
    samples: u64,
    meeting_bound: f64,
    certified_bound: Option<f64>,
    mean_meeting_time: f64,
    analytic_upper: f64,
    exact_theta: Option<f64>,
    exact_theta_half: Option<f64>,
    exact_tau_ssep: Option<f64>,
    exact_tau_ssep_half: Option<f64>,
    exact_tau_swt: Option<f64>,
    sandwich_lower_holds: Option<bool>,
    sandwich_upper_holds: Option<bool>,
}

pub fn mixing_cmd(ctx: &Ctx, a: &MixingArgs) -> Result<()> {
    let k = a.k.or(ctx.file.k).ok_or_else(|| usage("give --K"))?;
    let s = a.s.or(ctx.file.s).unwrap_or(k / 2);
    let eps = a.eps.or(ctx.file.eps).unwrap_or(0.25);
    let samples = ctx.samples(a.samples, 10_000)?;
    let mut row = MixingRow {
        k,
        s,
        eps,
        samples,
        ..Default::default()
    };
    let mut exact = None;
    if s > 0 {
        let m = mixing_upper_via_meeting(k, s, eps, samples, ctx.seed).map_err(|e| usage(e.to_string()))?;
        row.meeting_bound = m.bound;
        row.certified_bound = m.certified_bound;
        row.mean_meeting_time = m.mean_meeting_time;
        row.analytic_upper = m.analytic_upper;
    }
    if a.exact {
        let (_, r) = exact_tv_and_mixing(k, s as i64, eps, ctx.global.max_states)?;
        row.exact_theta = Some(r.theta.mid());
        row.exact_theta_half = Some(r.theta_half.mid());
        row.exact_tau_ssep = Some(r.tau_ssep.mid());
        row.exact_tau_ssep_half = Some(r.tau_ssep_half.mid());
        row.exact_tau_swt = Some(r.tau_swt.mid());
        row.sandwich_lower_holds = Some(r.lower_holds);
        row.sandwich_upper_holds = Some(r.upper_holds);
        exact = Some(r);
    }
    #[derive(Serialize)]
    struct Doc<'a, R> {
        summary: &'a MixingRow,
        exact: Option<R>,
    }
    ctx.sink.emit(&[&row], &Doc { summary: &row, exact: exact.as_ref() })?;
    ctx.check(row.meeting_bound <= row.analytic_upper || s == 0, || {
        format!("meeting bound {} exceeds the analytic upper bound {}", row.meeting_bound, row.analytic_upper)
    })?;
    ctx.check(
        row.sandwich_lower_holds.unwrap_or(true) && row.sandwich_upper_holds.unwrap_or(true),
        || "exact mixing sandwich fails".into(),
    )
}

#[derive(Serialize)]
struct NegdepRow {
    case: &'static str,
    quantity: String,
    value: String,
    error: Option<f64>,
}

pub fn negdep_cmd(ctx: &Ctx) -> Result<()> {
    let r = negdep_report()?;
    let mut rows = Vec::new();
    let mut push = |case, quantity: String, value: String, error| {
        rows.push(NegdepRow {
            case,
            quantity,
            value,
            error,
        })
    };
    let a = &r.any_particle;
    push("any-particle", "seed".into(), a.seed.to_string(), None);
    push("any-particle", "t".into(), format!("{:?}", a.t), None);
    push("any-particle", "P(A)".into(), format!("{:?}", a.p_a.value), Some(a.p_a.error));
    push("any-particle", "P(B)".into(), format!("{:?}", a.p_b.value), Some(a.p_b.error));
    push("any-particle", "P(AB)".into(), format!("{:?}", a.p_ab.value), Some(a.p_ab.error));
    push("any-particle", "P(AB)-P(A)P(B)".into(), format!("{:?}", a.gap), Some(a.gap_error));
    let l = &r.live_particle;
    push("live-particle", "seed".into(), l.seed.to_string(), None);
    for p in &l.powers {
        push("live-particle", format!("L^{} f", p.n), p.f.to_string(), None);
        push("live-particle", format!("L^{} g", p.n), p.g.to_string(), None);
        push("live-particle", format!("L^{} h", p.n), p.h.to_string(), None);
    }
    push("live-particle", "t".into(), format!("{:?}", l.t), None);
    push("live-particle", "P_t f".into(), format!("{:?}", l.p_f.value), Some(l.p_f.error));
    push("live-particle", "P_t g".into(), format!("{:?}", l.p_g.value), Some(l.p_g.error));
    push("live-particle", "P_t h".into(), format!("{:?}", l.p_h.value), Some(l.p_h.error));
    push("live-particle", "P_t h-P_t f P_t g".into(), format!("{:?}", l.gap), Some(l.gap_error));
    push(
        "live-particle",
        "crossover".into(),
        l.crossover.map(|c| format!("{c:?}")).unwrap_or_default(),
        None,
    );
    ctx.sink.emit(&rows, &r)?;
    ctx.check(r.holds(), || {
        format!(
            "any-particle gap {} ± {}, live-particle gap {} ± {}, first non-zero powers {:?}",
            a.gap, a.gap_error, l.gap, l.gap_error, l.first_nonzero
        )
    })
}

pub fn dispatch(ctx: &Ctx, cmd: &Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate_cmd(ctx, a),
        Command::Map(a) => map_cmd(ctx, a),
        Command::Coupling(a) => coupling_cmd(ctx, a),
        Command::Spectral(a) => spectral_cmd(ctx, a),
        Command::Oracle(a) => oracle_cmd(ctx, a),
        Command::Transience(a) => transience_cmd(ctx, a),
        Command::Theta(a) => theta_cmd(ctx, a),
        Command::Cutoff(a) => cutoff_cmd(ctx, a),
        Command::Mixing(a) => mixing_cmd(ctx, a),
        Command::Negdep(_) => negdep_cmd(ctx),
    }
}
