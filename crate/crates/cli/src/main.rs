//! `uavcast`: plan, verify and benchmark UAV multicast trajectories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use uavcast_core::export;
use uavcast_core::{
    load_config, run_comparison, simulate_recovery, static_baseline, sweep_distance, to_toml, AuxDistance, BenchConfig,
    Scenario, ScenarioConfig, WaypointScheme,
};

#[derive(Parser)]
#[command(name = "uavcast", version, about = "Completion-time-minimizing UAV multicast trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario and write the trajectory and its plot data.
    Plan(PlanArgs),
    /// Monte Carlo recovery check of a planned trajectory.
    Simulate(SimulateArgs),
    /// Compare waypoint schemes over random GT realizations.
    Compare(CompareArgs),
    /// Mission completion time against the connection distance.
    #[command(name = "sweep-d")]
    SweepD(SweepArgs),
    /// A hovering transmitter against a planned UAV trajectory.
    StaticBaseline(StaticArgs),
}

#[derive(Args)]
struct Output {
    /// Output directory; created if missing.
    #[arg(short, long)]
    out: PathBuf,
    /// Also render SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct PlanArgs {
    /// Scenario TOML file.
    #[arg(short, long)]
    config: PathBuf,
    #[arg(long, default_value = "optimized-waypoints")]
    scheme: WaypointScheme,
    /// Discretization step in meters (default: min(D/10, Vmax·δt)).
    #[arg(long)]
    step_m: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario TOML file (as written by `plan`).
    #[arg(short, long)]
    config: PathBuf,
    /// Waypoint schedule CSV (as written by `plan`).
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    seed: u64,
    /// Number of GTs per realization.
    #[arg(long)]
    n_gts: Option<usize>,
    /// Side of the square deployment area in meters.
    #[arg(long, default_value_t = 3000.0)]
    area_side: f64,
    #[arg(long)]
    realizations: Option<usize>,
    /// Comma-separated scheme names.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<WaypointScheme>>,
    /// Connection distance in meters, or `auto` for D*.
    #[arg(long, default_value = "auto", value_parser = parse_distance)]
    distance: AuxDistance,
    /// Channel, RLNC and planner settings; its GT section is ignored.
    #[arg(short, long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    bench: BenchArgs,
    /// Monte Carlo trials per planned instance (0 skips simulation).
    #[arg(long, default_value_t = 0)]
    trials: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    bench: BenchArgs,
    /// Comma-separated distances in meters.
    #[arg(long, value_delimiter = ',', default_value = "75,150,225,300,375,450,525,600,675,750,825,900")]
    grid: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct StaticArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    n_gts: usize,
    #[arg(long, default_value_t = 3000.0)]
    area_side: f64,
    #[arg(long, default_value = "optimized-waypoints")]
    scheme: WaypointScheme,
    /// Comma-separated hovering times in seconds.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,5,10,20,50,100,200,500,1000,2000,5000,10000")]
    times: Vec<f64>,
    /// Channel, RLNC and planner settings; its GT section is ignored.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

fn parse_distance(s: &str) -> Result<AuxDistance, String> {
    if s == "auto" {
        return Ok(AuxDistance::AUTO);
    }
    match s.parse::<f64>() {
        Ok(d) if d.is_finite() && d > 0.0 => Ok(AuxDistance::Fixed(d)),
        _ => Err(format!("expected `auto` or a positive distance in meters, got {s:?}")),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Plan(a) => plan(a),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
        Command::SweepD(a) => sweep(a),
        Command::StaticBaseline(a) => baseline(a),
    }
}

struct Sink<'a> {
    dir: &'a Path,
}

impl<'a> Sink<'a> {
    fn open(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir })
    }

    fn put(&self, name: &str, body: &str) -> Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    }

    fn summary(&self, text: &str) -> Result<()> {
        print!("{text}");
        self.put("summary.txt", text)
    }
}

fn read_scenario(path: &Path) -> Result<ScenarioConfig> {
    load_config(path).with_context(|| format!("reading scenario {}", path.display()))
}

fn bench_config(b: &BenchArgs, n_gts: usize, realizations: usize) -> Result<BenchConfig> {
    let mut cfg = BenchConfig {
        n_gts: b.n_gts.unwrap_or(n_gts),
        area_side_m: b.area_side,
        n_realizations: b.realizations.unwrap_or(realizations),
        distance: b.distance,
        seed: b.seed,
        ..Default::default()
    };
    if let Some(s) = &b.schemes {
        cfg.schemes = s.clone();
    }
    if let Some(path) = &b.config {
        apply_settings(&mut cfg, read_scenario(path)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_settings(cfg: &mut BenchConfig, sc: ScenarioConfig) {
    cfg.channel = sc.scenario.channel;
    cfg.rlnc = sc.scenario.rlnc;
    cfg.plan = sc.plan;
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.digits$}"))
}

fn plan(a: PlanArgs) -> Result<()> {
    let mut sc = read_scenario(&a.config)?;
    if a.step_m.is_some() {
        sc.plan.step_m = a.step_m;
    }
    let m = uavcast_core::plan_mission(&sc.scenario, a.scheme, &sc.plan)?;
    let sink = Sink::open(&a.output.out)?;
    let gts = &sc.scenario.gts;
    sink.put("scenario.toml", &to_toml(&sc)?)?;
    sink.put("trajectory.csv", &export::trajectory_csv(&m.trajectory, sc.scenario.rlnc.slot_s)?)?;
    sink.put("schedule.csv", &export::waypoint_schedule_csv(&m.trajectory)?)?;
    sink.put("waypoints.csv", &export::waypoints_csv(&m.waypoints)?)?;
    sink.put("speed.csv", &export::speed_csv(&m.path, &m.speed)?)?;
    if let Some(c) = &m.coverage {
        sink.put("coverage.csv", &export::coverage_csv(c, gts)?)?;
    }
    if a.output.svg {
        let title = format!("{} (T = {:.2} s)", m.scheme, m.total_time());
        sink.put("trajectory.svg", &export::trajectory_svg(&title, gts, m.coverage.as_ref(), &m.trajectory))?;
    }
    let min_slots = m.connection_slots.iter().min().copied().unwrap_or(0);
    let mut s = String::new();
    writeln!(s, "scheme              {}", m.scheme)?;
    writeln!(s, "GTs                 {}", gts.len())?;
    writeln!(s, "distance D          {:.3} m", m.radius)?;
    writeln!(s, "p_D                 {:.6}", m.requirement.p_d)?;
    writeln!(s, "M_min               {} slots ({:.3} s)", m.requirement.min_slots, m.requirement.min_time_s)?;
    if let Some(c) = &m.coverage {
        writeln!(s, "VBS count           {}", c.vbs.len())?;
    }
    writeln!(s, "waypoints           {}", m.trajectory.waypoints().len())?;
    writeln!(s, "path length         {:.3} m", m.path_length())?;
    writeln!(s, "completion time T   {:.3} s", m.total_time())?;
    writeln!(s, "LP duality gap      {:.3e}", m.speed.duality_gap())?;
    writeln!(s, "guard slots         {}", m.guard_slots)?;
    writeln!(s, "min connection      {min_slots} slots")?;
    writeln!(s, "requirement met     {}", m.requirement_met)?;
    sink.summary(&s)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let sc = read_scenario(&a.config)?;
    let text = fs::read_to_string(&a.schedule).with_context(|| format!("reading {}", a.schedule.display()))?;
    let traj = export::read_waypoint_schedule(&text)?;
    let r = simulate_recovery(&traj, &sc.scenario, a.trials, a.seed)?;
    let sink = Sink::open(&a.output.out)?;
    sink.put("recovery.csv", &export::report_csv(&r)?)?;
    if a.output.svg {
        let idx = |f: &dyn Fn(&uavcast_core::sim::GtReport) -> Option<f64>| -> Vec<(f64, f64)> {
            r.per_gt.iter().filter_map(|g| f(g).map(|v| (g.gt_index as f64, v))).collect()
        };
        let series =
            vec![("lower bound".to_string(), idx(&|g| Some(g.p_lb))), ("empirical".to_string(), idx(&|g| g.empirical))];
        sink.put("recovery.svg", &export::curves_svg("Recovery probability per GT", "GT", "P", &series))?;
    }
    let violations = r.bound_violations();
    let n = r.per_gt.len();
    let high = r.per_gt.iter().filter(|g| g.empirical.is_some_and(|e| e >= 0.99)).count();
    let mut s = String::new();
    writeln!(s, "GTs                 {n}")?;
    writeln!(s, "trials              {} (seed {})", r.n_trials, r.rng_seed)?;
    writeln!(s, "slots               {}", r.n_slots)?;
    writeln!(s, "min P_lb            {:.6}", r.min_p_lb())?;
    writeln!(s, "min empirical       {}", fmt_opt(r.min_empirical(), 6))?;
    writeln!(s, "empirical >= 0.99   {high} of {n}")?;
    writeln!(s, "bound violations    {}", violations.len())?;
    sink.summary(&s)
}

fn compare(a: CompareArgs) -> Result<()> {
    let mut cfg = bench_config(&a.bench, 50, 20)?;
    cfg.n_trials = a.trials;
    let table = run_comparison(&cfg)?;
    let sink = Sink::open(&a.output.out)?;
    sink.put("bench.toml", &toml::to_string(&cfg)?)?;
    sink.put("comparison.csv", &export::comparison_csv(&table)?)?;
    sink.put("summary.csv", &export::summary_csv(&table)?)?;
    if a.output.svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = cfg
            .schemes
            .iter()
            .map(|&sch| {
                let pts = table
                    .rows
                    .iter()
                    .filter(|r| r.scheme == sch)
                    .filter_map(|r| r.total_time.map(|t| (r.realization as f64, t)))
                    .collect();
                (sch.to_string(), pts)
            })
            .collect();
        sink.put(
            "comparison.svg",
            &export::curves_svg("Completion time per realization", "realization", "T [s]", &series),
        )?;
    }
    let mut s = String::new();
    writeln!(
        s,
        "K = {}, area {} m, realizations {}, seed {}",
        cfg.n_gts, cfg.area_side_m, cfg.n_realizations, cfg.seed
    )?;
    writeln!(s, "{:<22}{:>14}{:>16}{:>6}{:>8}", "scheme", "mean T [s]", "mean length [m]", "ok", "failed")?;
    for r in &table.summary {
        writeln!(
            s,
            "{:<22}{:>14}{:>16}{:>6}{:>8}",
            r.scheme.name(),
            fmt_opt(r.mean_time, 3),
            fmt_opt(r.mean_path_length, 1),
            r.n_ok,
            r.n_failed
        )?;
    }
    sink.summary(&s)
}

fn sweep(a: SweepArgs) -> Result<()> {
    if a.grid.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        bail!("every grid distance must be positive");
    }
    let cfg = bench_config(&a.bench, 50, 1)?;
    let res = sweep_distance(&cfg, &a.grid)?;
    let sink = Sink::open(&a.output.out)?;
    sink.put("bench.toml", &toml::to_string(&cfg)?)?;
    sink.put("sweep.csv", &export::sweep_csv(&res)?)?;
    if a.output.svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = cfg
            .schemes
            .iter()
            .map(|&sch| {
                let pts = res.curve(sch).iter().filter_map(|p| p.mean_time.map(|t| (p.distance, t))).collect();
                (sch.to_string(), pts)
            })
            .collect();
        sink.put("sweep.svg", &export::curves_svg("Completion time against D", "D [m]", "T [s]", &series))?;
    }
    let mut s = String::new();
    writeln!(s, "K = {}, realizations {}, seed {}", cfg.n_gts, cfg.n_realizations, cfg.seed)?;
    writeln!(s, "D* = {:.3} m", res.critical_distance)?;
    for (sch, d) in &res.argmin {
        writeln!(s, "{:<22} argmin D = {}", sch.name(), fmt_opt(*d, 1))?;
    }
    sink.summary(&s)
}

fn baseline(a: StaticArgs) -> Result<()> {
    let mut cfg = BenchConfig {
        n_gts: a.n_gts,
        area_side_m: a.area_side,
        n_realizations: 1,
        seed: a.seed,
        schemes: vec![a.scheme],
        ..Default::default()
    };
    if let Some(path) = &a.config {
        apply_settings(&mut cfg, read_scenario(path)?);
    }
    let b = static_baseline(&cfg, &a.times, a.scheme)?;
    let sink = Sink::open(&a.output.out)?;
    sink.put("static_curve.csv", &export::static_curve_csv(&b.curve)?)?;
    if a.output.svg {
        let pts = b.curve.iter().map(|&(t, n)| (t, n as f64)).collect();
        let series = vec![("static transmitter".to_string(), pts)];
        sink.put("static_curve.svg", &export::curves_svg("GTs reaching the target", "T [s]", "GTs", &series))?;
    }
    let scenario: Scenario = cfg.scenario(0)?;
    let mut s = String::new();
    writeln!(s, "K = {}, seed {}", scenario.gts.len(), cfg.seed)?;
    for (t, n) in &b.curve {
        writeln!(s, "static  T = {t:>8} s   successful GTs {n}")?;
    }
    match &b.uav_error {
        Some(e) => writeln!(s, "UAV ({}) failed: {e}", b.uav_scheme)?,
        None => writeln!(
            s,
            "UAV ({})  T = {} s   min P_lb {}",
            b.uav_scheme,
            fmt_opt(b.uav_time, 3),
            fmt_opt(b.uav_min_p_lb, 6)
        )?,
    }
    sink.summary(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn distance_flag() {
        assert_eq!(parse_distance("auto").unwrap(), AuxDistance::AUTO);
        assert_eq!(parse_distance("400").unwrap(), AuxDistance::Fixed(400.0));
        assert!(parse_distance("-3").is_err());
        assert!(parse_distance("far").is_err());
    }

    #[test]
    fn seed_is_mandatory_for_bench_protocols() {
        let no_seed = Cli::try_parse_from(["uavcast", "compare", "--out", "x"]);
        assert!(no_seed.is_err());
        let no_seed = Cli::try_parse_from(["uavcast", "sweep-d", "--out", "x"]);
        assert!(no_seed.is_err());
        assert!(Cli::try_parse_from(["uavcast", "compare", "--seed", "1", "--out", "x"]).is_ok());
    }
}
