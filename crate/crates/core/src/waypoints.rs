//! Waypoint sets for the four trajectory schemes.
//!
//! The optimized scheme chooses, for each cluster in visiting order, an entry
//! point `s_g` and exit point `f_g` inside its connection region to minimize
//!
//! ```text
//! Σ_g max(‖f_g − s_g‖ / V, T_min) + Σ_g ‖s_{g+1} − f_g‖ / V
//! ```
//!
//! by projected subgradient descent.

use serde::{Deserialize, Serialize};

use crate::coverage::{ConnectionRegion, CoveragePlan};
use crate::error::{Error, Result};
use crate::geometry::{polyline_length, BoundingBox, Point};
use crate::routing::{solve_tour, TourSpec, TourVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaypointScheme {
    StripBased,
    GtsAsWaypoints,
    VbsAsWaypoints,
    OptimizedWaypoints,
}

impl WaypointScheme {
    pub const ALL: [WaypointScheme; 4] = [
        WaypointScheme::StripBased,
        WaypointScheme::GtsAsWaypoints,
        WaypointScheme::VbsAsWaypoints,
        WaypointScheme::OptimizedWaypoints,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaypointScheme::StripBased => "strip-based",
            WaypointScheme::GtsAsWaypoints => "gts-as-waypoints",
            WaypointScheme::VbsAsWaypoints => "vbs-as-waypoints",
            WaypointScheme::OptimizedWaypoints => "optimized-waypoints",
        }
    }
}

impl std::fmt::Display for WaypointScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for WaypointScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        WaypointScheme::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// Entry and exit point of one cluster's connection region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVisit {
    pub cluster: usize,
    pub entry: Point,
    pub exit: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointPlan {
    pub scheme: WaypointScheme,
    pub waypoints: Vec<Point>,
    pub region_visits: Vec<RegionVisit>,
    pub path_length: f64,
}

impl WaypointPlan {
    fn new(scheme: WaypointScheme, waypoints: Vec<Point>, region_visits: Vec<RegionVisit>) -> Self {
        let path_length = polyline_length(&waypoints);
        Self { scheme, waypoints, region_visits, path_length }
    }
}

/// Boustrophedon sweep over `⌈height / 2D⌉` horizontal strips of width `2D`
/// covering the GTs' bounding box, strips centred on the box.
///
/// The foot point of every GT on its strip's centre line is kept as an
/// extra collinear waypoint, so each GT has a path point within `D`.
pub fn strip_waypoints(gts: &[Point], radius: f64) -> Result<WaypointPlan> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("strip width needs D > 0, got {radius}")));
    }
    let bb = BoundingBox::of(gts).ok_or_else(|| Error::Precondition("no GTs".into()))?;
    let n_strips = ((bb.height() / (2.0 * radius)).ceil() as usize).max(1);
    let margin = (2.0 * radius * n_strips as f64 - bb.height()) / 2.0;
    let bottom = bb.min.y - margin;
    let mut feet: Vec<Vec<f64>> = vec![Vec::new(); n_strips];
    for g in gts {
        let i = (((g.y - bottom) / (2.0 * radius)).floor().max(0.0) as usize).min(n_strips - 1);
        feet[i].push(g.x);
    }
    let mut waypoints = Vec::new();
    for (i, xs) in feet.iter_mut().enumerate() {
        let y = bottom + radius * (2 * i + 1) as f64;
        xs.push(bb.min.x);
        xs.push(bb.max.x);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if i % 2 == 1 {
            xs.reverse();
        }
        waypoints.extend(xs.iter().map(|&x| Point::new(x, y)));
    }
    Ok(WaypointPlan::new(WaypointScheme::StripBased, waypoints, Vec::new()))
}

/// The GTs themselves, in tour order.
pub fn gts_as_waypoints(gts: &[Point], variant: TourVariant) -> Result<WaypointPlan> {
    let tour = solve_tour(&TourSpec { points: gts.to_vec(), variant })?;
    Ok(WaypointPlan::new(WaypointScheme::GtsAsWaypoints, tour.ordered_points(gts), Vec::new()))
}

/// Orders the VBSs by a tour, returning the reordered coverage plan.
pub fn order_clusters(plan: &CoveragePlan, variant: TourVariant) -> Result<CoveragePlan> {
    let tour = solve_tour(&TourSpec { points: plan.vbs.clone(), variant })?;
    plan.reordered(&tour.order)
}

/// VBS locations in the plan's (already toured) order.
pub fn vbs_as_waypoints(plan: &CoveragePlan) -> WaypointPlan {
    let visits = plan.vbs.iter().enumerate().map(|(g, &v)| RegionVisit { cluster: g, entry: v, exit: v }).collect();
    WaypointPlan::new(WaypointScheme::VbsAsWaypoints, plan.vbs.clone(), visits)
}

/// Mission endpoints fixed in advance; `None` leaves an end free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PinnedEnds {
    pub start: Option<Point>,
    pub end: Option<Point>,
}

/// Tuning of the projected subgradient solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubgradientOptions {
    /// Step length `c` in meters; the k-th step moves `c/√k` along the
    /// normalized subgradient. `None` uses the connection distance `D`.
    pub step_scale_m: Option<f64>,
    pub max_iters: usize,
    /// Stop once the best objective improved by less than `stall_tol`
    /// seconds over this many iterations.
    pub stall_iters: usize,
    pub stall_tol: f64,
}

impl Default for SubgradientOptions {
    fn default() -> Self {
        Self { step_scale_m: None, max_iters: 20_000, stall_iters: 200, stall_tol: 1e-6 }
    }
}

/// Objective of the entry/exit problem for `visits` (entry, exit per cluster).
pub fn p4_objective(visits: &[(Point, Point)], min_time: f64, max_speed: f64, pins: PinnedEnds) -> f64 {
    let dwell: f64 = visits.iter().map(|(s, f)| (s.dist(*f) / max_speed).max(min_time)).sum();
    let travel: f64 = visits.windows(2).map(|w| w[1].0.dist(w[0].1) / max_speed).sum();
    let start = match (pins.start, visits.first()) {
        (Some(p), Some((s, _))) => p.dist(*s) / max_speed,
        _ => 0.0,
    };
    let end = match (pins.end, visits.last()) {
        (Some(p), Some((_, f))) => p.dist(*f) / max_speed,
        _ => 0.0,
    };
    dwell + travel + start + end
}

fn unit(v: Point) -> Point {
    let n = v.norm();
    if n > 0.0 {
        v * (1.0 / n)
    } else {
        Point::default()
    }
}

/// A subgradient of [`p4_objective`] (gradient wrt entry, exit per cluster).
fn p4_subgradient(visits: &[(Point, Point)], min_time: f64, max_speed: f64, pins: PinnedEnds) -> Vec<(Point, Point)> {
    let inv = 1.0 / max_speed;
    let mut g = vec![(Point::default(), Point::default()); visits.len()];
    for (i, &(s, f)) in visits.iter().enumerate() {
        if s.dist(f) * inv > min_time {
            let u = unit(f - s) * inv;
            g[i].0 = g[i].0 - u;
            g[i].1 = g[i].1 + u;
        }
    }
    for i in 0..visits.len().saturating_sub(1) {
        let u = unit(visits[i + 1].0 - visits[i].1) * inv;
        g[i + 1].0 = g[i + 1].0 + u;
        g[i].1 = g[i].1 - u;
    }
    if let (Some(p), Some(first)) = (pins.start, g.first_mut()) {
        first.0 = first.0 + unit(visits[0].0 - p) * inv;
    }
    if let (Some(p), Some(last)) = (pins.end, g.last_mut()) {
        last.1 = last.1 + unit(visits[visits.len() - 1].1 - p) * inv;
    }
    g
}

/// Result of the entry/exit optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct P4Solution {
    pub plan: WaypointPlan,
    pub objective: f64,
    pub initial_objective: f64,
    pub iterations: usize,
}

/// Chooses entry/exit points for every cluster of `plan` (already in
/// visiting order), starting from `s_g = f_g = v_g` and returning the best
/// feasible iterate.
pub fn optimize_waypoints(
    gts: &[Point],
    plan: &CoveragePlan,
    min_time: f64,
    max_speed: f64,
    pins: PinnedEnds,
    opts: &SubgradientOptions,
) -> Result<P4Solution> {
    if plan.is_empty() {
        return Err(Error::Precondition("coverage plan has no VBS".into()));
    }
    if !(max_speed > 0.0 && min_time >= 0.0) {
        return Err(Error::Domain(format!("need V_max > 0 and T_min >= 0, got {max_speed}, {min_time}")));
    }
    let regions: Vec<ConnectionRegion> = plan.regions(gts)?;
    let mut x: Vec<(Point, Point)> = plan.vbs.iter().map(|&v| (v, v)).collect();
    for (g, r) in regions.iter().enumerate() {
        if !r.contains(plan.vbs[g]) {
            return Err(Error::Precondition(format!("VBS {g} lies outside its connection region")));
        }
    }
    let initial = p4_objective(&x, min_time, max_speed, pins);
    let mut best = (initial, x.clone());
    let scale = opts.step_scale_m.unwrap_or(plan.radius).max(1e-3);

    let mut last_mark = initial;
    let mut iterations = 0;
    for k in 1..=opts.max_iters {
        iterations = k;
        let g = p4_subgradient(&x, min_time, max_speed, pins);
        let norm = g.iter().map(|(a, b)| a.norm_sq() + b.norm_sq()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let step = scale / (k as f64).sqrt() / norm;
        for (i, r) in regions.iter().enumerate() {
            x[i].0 = r.project(x[i].0 - g[i].0 * step)?;
            x[i].1 = r.project(x[i].1 - g[i].1 * step)?;
        }
        let obj = p4_objective(&x, min_time, max_speed, pins);
        if obj < best.0 {
            best = (obj, x.clone());
        }
        if k % opts.stall_iters == 0 {
            if last_mark - best.0 < opts.stall_tol {
                break;
            }
            last_mark = best.0;
        }
    }

    let (objective, visits) = best;
    let mut waypoints = Vec::with_capacity(2 * visits.len() + 2);
    waypoints.extend(pins.start);
    for &(s, f) in &visits {
        waypoints.push(s);
        waypoints.push(f);
    }
    waypoints.extend(pins.end);
    waypoints.dedup();
    let region_visits =
        visits.iter().enumerate().map(|(g, &(entry, exit))| RegionVisit { cluster: g, entry, exit }).collect();
    Ok(P4Solution {
        plan: WaypointPlan::new(WaypointScheme::OptimizedWaypoints, waypoints, region_visits),
        objective,
        initial_objective: initial,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::place_vbs;
    use crate::routing::TourVariant;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_gts(n: usize, side: f64, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side))).collect()
    }

    fn visits_of(sol: &P4Solution) -> Vec<(Point, Point)> {
        sol.plan.region_visits.iter().map(|v| (v.entry, v.exit)).collect()
    }

    #[test]
    fn strip_examples() {
        let line = [Point::new(0.0, 5.0), Point::new(300.0, 5.0), Point::new(120.0, 5.0)];
        let p = strip_waypoints(&line, 200.0).unwrap();
        assert_eq!(p.waypoints.len(), 3);
        assert!(p.waypoints.windows(2).all(|w| w[0].x < w[1].x));
        assert!((p.path_length - 300.0).abs() < 1e-12);

        let square = [Point::new(0.0, 0.0), Point::new(3000.0, 3000.0)];
        let p = strip_waypoints(&square, 400.0).unwrap();
        let mut ys: Vec<f64> = p.waypoints.iter().map(|w| w.y).collect();
        ys.dedup();
        assert_eq!(ys.len(), 4);
        assert!((p.path_length - (4.0 * 3000.0 + 3.0 * 800.0)).abs() < 1e-9);
        assert!(strip_waypoints(&square, 0.0).is_err());
    }

    #[test]
    fn strip_covers_every_gt() {
        for seed in 0..10 {
            let gts = uniform_gts(60, 3000.0, seed);
            for radius in [150.0, 400.0, 900.0] {
                let p = strip_waypoints(&gts, radius).unwrap();
                for w in &gts {
                    assert!(p.waypoints.iter().any(|q| q.dist(*w) <= radius + 1e-9));
                }
            }
        }
    }

    #[test]
    fn gts_scheme_examples() {
        let one = [Point::new(7.0, 7.0)];
        let p = gts_as_waypoints(&one, TourVariant::default()).unwrap();
        assert_eq!(p.waypoints, vec![Point::new(7.0, 7.0)]);

        let square = [Point::new(0.0, 0.0), Point::new(10.0, 10.0), Point::new(10.0, 0.0), Point::new(0.0, 10.0)];
        let p = gts_as_waypoints(&square, TourVariant::default()).unwrap();
        assert!((p.path_length - 30.0).abs() < 1e-9);
    }

    #[test]
    fn vbs_scheme_examples() {
        let gts = uniform_gts(50, 3000.0, 42);
        let cover = place_vbs(&gts, 0.0).unwrap();
        let ordered = order_clusters(&cover, TourVariant::default()).unwrap();
        let vbs = vbs_as_waypoints(&ordered);
        let direct = gts_as_waypoints(&gts, TourVariant::default()).unwrap();
        assert!((vbs.path_length - direct.path_length).abs() < 1e-6);

        let cover = place_vbs(&gts, 400.0).unwrap();
        let ordered = order_clusters(&cover, TourVariant::default()).unwrap();
        assert!(vbs_as_waypoints(&ordered).path_length < direct.path_length);
        // Order of magnitude of a 50-GT tour over a 3 km square.
        assert!(direct.path_length > 5e3 && direct.path_length < 5e4);

        let single = place_vbs(&[Point::new(1.0, 2.0)], 100.0).unwrap();
        assert_eq!(vbs_as_waypoints(&single).waypoints.len(), 1);
    }

    #[test]
    fn two_cluster_toy_improves_on_vbs() {
        // Each GT is its own cluster; the regions overlap the direct line.
        let gts = [Point::new(0.0, 0.0), Point::new(1000.0, 300.0)];
        let plan = CoveragePlan { vbs: gts.to_vec(), clusters: vec![vec![0], vec![1]], radius: 200.0 };
        let sol =
            optimize_waypoints(&gts, &plan, 2.0, 50.0, PinnedEnds::default(), &SubgradientOptions::default()).unwrap();
        assert!(sol.objective < sol.initial_objective);
        // Straight-line optimum: both exits pulled 200 m toward each other.
        let gap = gts[0].dist(gts[1]) - 400.0;
        let optimum = 2.0 * 2.0 + gap / 50.0;
        assert!(sol.objective <= optimum * (1.0 + 1e-3), "{} vs {}", sol.objective, optimum);
    }

    #[test]
    fn single_cluster_objective_is_min_time() {
        let gts = uniform_gts(4, 100.0, 1);
        let plan = place_vbs(&gts, 300.0).unwrap();
        assert_eq!(plan.len(), 1);
        let sol =
            optimize_waypoints(&gts, &plan, 5.2, 50.0, PinnedEnds::default(), &SubgradientOptions::default()).unwrap();
        assert!((sol.objective - 5.2).abs() < 1e-12);
    }

    #[test]
    fn solution_is_feasible_convex_and_reproducible() {
        for seed in 0..5 {
            let gts = uniform_gts(30, 2500.0, seed);
            let cover = order_clusters(&place_vbs(&gts, 430.0).unwrap(), TourVariant::default()).unwrap();
            let sol =
                optimize_waypoints(&gts, &cover, 5.2, 50.0, PinnedEnds::default(), &SubgradientOptions::default())
                    .unwrap();
            assert!(sol.objective <= sol.initial_objective);
            let regions = cover.regions(&gts).unwrap();
            for (visit, region) in sol.plan.region_visits.iter().zip(&regions) {
                assert!(region.max_distance(visit.entry) <= region.radius + 1e-6);
                assert!(region.max_distance(visit.exit) <= region.radius + 1e-6);
                for i in 0..=10 {
                    let q = visit.entry.lerp(visit.exit, i as f64 / 10.0);
                    assert!(region.max_distance(q) <= region.radius + 1e-6);
                }
            }
            let again = p4_objective(&visits_of(&sol), 5.2, 50.0, PinnedEnds::default());
            assert!((again - sol.objective).abs() <= 1e-9);
            assert!((polyline_length(&sol.plan.waypoints) - sol.plan.path_length).abs() < 1e-9);
        }
    }

    #[test]
    fn pinned_endpoints_enter_the_objective() {
        let gts = [Point::new(0.0, 0.0), Point::new(1000.0, 0.0)];
        let plan = CoveragePlan { vbs: gts.to_vec(), clusters: vec![vec![0], vec![1]], radius: 100.0 };
        let pins = PinnedEnds { start: Some(Point::new(-500.0, 0.0)), end: Some(Point::new(1500.0, 0.0)) };
        let sol = optimize_waypoints(&gts, &plan, 1.0, 50.0, pins, &SubgradientOptions::default()).unwrap();
        assert_eq!(sol.plan.waypoints.first(), Some(&Point::new(-500.0, 0.0)));
        assert_eq!(sol.plan.waypoints.last(), Some(&Point::new(1500.0, 0.0)));
        // Straight line of 2000 m with ≥ 1 s in each 200 m-wide region.
        assert!(sol.objective <= 2000.0 / 50.0 + 1e-2);
    }
}
