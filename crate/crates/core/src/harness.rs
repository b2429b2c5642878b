//! Experiment protocols: scheme comparison over random GT realizations,
//! sweeps over the connection distance, and the static-transmitter baseline.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::critical_distance;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::{AuxDistance, ChannelParams, RlncParams, Scenario};
use crate::pipeline::{plan_mission, PlanOptions};
use crate::rng::stream_rng;
use crate::sim::{simulate_recovery, static_transmitter_curve};
use crate::waypoints::WaypointScheme;

/// Stream offset separating simulation seeds from GT-placement streams.
const SIM_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub n_gts: usize,
    pub area_side_m: f64,
    pub n_realizations: usize,
    pub schemes: Vec<WaypointScheme>,
    pub distance: AuxDistance,
    pub seed: u64,
    /// Monte Carlo trials per planned instance; 0 skips simulation.
    pub n_trials: u64,
    pub channel: ChannelParams,
    pub rlnc: RlncParams,
    pub plan: PlanOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_gts: 50,
            area_side_m: 3000.0,
            n_realizations: 20,
            schemes: WaypointScheme::ALL.to_vec(),
            distance: AuxDistance::AUTO,
            seed: 0,
            n_trials: 0,
            channel: ChannelParams::reference_setup(),
            rlnc: RlncParams::reference_setup(),
            plan: PlanOptions::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_gts == 0 {
            return Err(Error::InvalidParameters("need at least one GT".into()));
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameters("need at least one realization".into()));
        }
        if !(self.area_side_m.is_finite() && self.area_side_m > 0.0) {
            return Err(Error::InvalidParameters(format!("area side must be > 0, got {}", self.area_side_m)));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParameters("scheme list is empty".into()));
        }
        self.channel.validate()?;
        self.rlnc.validate()
    }

    /// The scenario of realization `r`.
    pub fn scenario(&self, r: usize) -> Result<Scenario> {
        let gts = uniform_gts(self.n_gts, self.area_side_m, self.seed, r as u64);
        Scenario::new(gts, self.channel.clone(), self.rlnc.clone(), self.distance)
    }
}

/// `n` GTs uniform on `[0, side]²`, drawn from stream `realization`.
pub fn uniform_gts(n: usize, side: f64, seed: u64, realization: u64) -> Vec<Point> {
    let mut rng = stream_rng(seed, realization);
    (0..n).map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side))).collect()
}

/// One planned instance of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub realization: usize,
    pub scheme: WaypointScheme,
    pub path_length: Option<f64>,
    pub total_time: Option<f64>,
    pub min_p_lb: Option<f64>,
    pub min_empirical: Option<f64>,
    pub guard_slots: Option<u64>,
    pub requirement_met: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub scheme: WaypointScheme,
    pub mean_time: Option<f64>,
    pub mean_path_length: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub summary: Vec<SchemeSummary>,
}

impl ComparisonTable {
    pub fn summary_for(&self, scheme: WaypointScheme) -> Option<&SchemeSummary> {
        self.summary.iter().find(|s| s.scheme == scheme)
    }
}

/// Plans (and optionally simulates) every scheme on every realization.
/// Per-instance failures are recorded in the rows.
pub fn run_comparison(cfg: &BenchConfig) -> Result<ComparisonTable> {
    cfg.validate()?;
    let per_realization: Vec<Vec<ComparisonRow>> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|r| match cfg.scenario(r) {
            Ok(scenario) => {
                cfg.schemes.iter().enumerate().map(|(i, &scheme)| run_instance(cfg, &scenario, r, i, scheme)).collect()
            }
            Err(e) => cfg.schemes.iter().map(|&scheme| failed(r, scheme, &e)).collect(),
        })
        .collect();
    let rows: Vec<ComparisonRow> = per_realization.into_iter().flatten().collect();
    let summary = cfg.schemes.iter().map(|&s| summarize(&rows, s)).collect();
    Ok(ComparisonTable { rows, summary })
}

fn failed(realization: usize, scheme: WaypointScheme, e: &Error) -> ComparisonRow {
    ComparisonRow {
        realization,
        scheme,
        path_length: None,
        total_time: None,
        min_p_lb: None,
        min_empirical: None,
        guard_slots: None,
        requirement_met: None,
        error: Some(e.to_string()),
    }
}

fn run_instance(cfg: &BenchConfig, scenario: &Scenario, r: usize, i: usize, scheme: WaypointScheme) -> ComparisonRow {
    let attempt = || -> Result<ComparisonRow> {
        let m = plan_mission(scenario, scheme, &cfg.plan)?;
        let sim_seed: u64 = stream_rng(cfg.seed, SIM_STREAM_BASE + (r * WaypointScheme::ALL.len() + i) as u64).random();
        let report = simulate_recovery(&m.trajectory, scenario, cfg.n_trials, sim_seed)?;
        Ok(ComparisonRow {
            realization: r,
            scheme,
            path_length: Some(m.path_length()),
            total_time: Some(m.total_time()),
            min_p_lb: Some(report.min_p_lb()),
            min_empirical: report.min_empirical(),
            guard_slots: Some(m.guard_slots),
            requirement_met: Some(m.requirement_met),
            error: None,
        })
    };
    attempt().unwrap_or_else(|e| failed(r, scheme, &e))
}

fn summarize(rows: &[ComparisonRow], scheme: WaypointScheme) -> SchemeSummary {
    let ok: Vec<&ComparisonRow> = rows.iter().filter(|r| r.scheme == scheme && r.error.is_none()).collect();
    let n_failed = rows.iter().filter(|r| r.scheme == scheme && r.error.is_some()).count();
    let mean = |f: fn(&ComparisonRow) -> Option<f64>| {
        (!ok.is_empty()).then(|| ok.iter().filter_map(|r| f(r)).sum::<f64>() / ok.len() as f64)
    };
    SchemeSummary {
        scheme,
        mean_time: mean(|r| r.total_time),
        mean_path_length: mean(|r| r.path_length),
        n_ok: ok.len(),
        n_failed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub scheme: WaypointScheme,
    pub distance: f64,
    pub mean_time: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Grid value with the smallest mean time, per scheme.
    pub argmin: Vec<(WaypointScheme, Option<f64>)>,
    pub critical_distance: f64,
}

impl SweepResult {
    pub fn curve(&self, scheme: WaypointScheme) -> Vec<&SweepPoint> {
        self.points.iter().filter(|p| p.scheme == scheme).collect()
    }

    pub fn argmin_for(&self, scheme: WaypointScheme) -> Option<f64> {
        self.argmin.iter().find(|(s, _)| *s == scheme).and_then(|(_, d)| *d)
    }
}

/// Mean completion time per scheme at every `D` on the grid. Monte Carlo is
/// skipped; infeasible distances show up as failed points.
pub fn sweep_distance(cfg: &BenchConfig, grid: &[f64]) -> Result<SweepResult> {
    cfg.validate()?;
    if let Some(d) = grid.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::InvalidParameters(format!("distance grid values must be > 0, got {d}")));
    }
    let mut points = Vec::new();
    for &d in grid {
        let run = BenchConfig { distance: AuxDistance::Fixed(d), n_trials: 0, ..cfg.clone() };
        let table = run_comparison(&run)?;
        points.extend(table.summary.into_iter().map(|s| SweepPoint {
            scheme: s.scheme,
            distance: d,
            mean_time: s.mean_time,
            n_ok: s.n_ok,
            n_failed: s.n_failed,
        }));
    }
    let argmin = cfg
        .schemes
        .iter()
        .map(|&s| {
            let best = points
                .iter()
                .filter(|p| p.scheme == s && p.n_failed == 0)
                .filter_map(|p| p.mean_time.map(|t| (p.distance, t)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            (s, best.map(|(d, _)| d))
        })
        .collect();
    Ok(SweepResult { points, argmin, critical_distance: critical_distance(&cfg.channel)? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticBaseline {
    /// `(T, number of GTs reaching P̄)` for the hovering transmitter.
    pub curve: Vec<(f64, usize)>,
    pub uav_scheme: WaypointScheme,
    pub uav_time: Option<f64>,
    pub uav_min_p_lb: Option<f64>,
    pub uav_error: Option<String>,
}

/// Static transmitter at the centroid of realization 0 against the UAV plan
/// of `scheme` on the same GTs.
pub fn static_baseline(cfg: &BenchConfig, time_grid: &[f64], scheme: WaypointScheme) -> Result<StaticBaseline> {
    cfg.validate()?;
    let scenario = cfg.scenario(0)?;
    let curve = static_transmitter_curve(&scenario, time_grid)?;
    let row = run_instance(&BenchConfig { n_trials: 0, ..cfg.clone() }, &scenario, 0, 0, scheme);
    Ok(StaticBaseline {
        curve,
        uav_scheme: scheme,
        uav_time: row.total_time,
        uav_min_p_lb: row.min_p_lb,
        uav_error: row.error,
    })
}
