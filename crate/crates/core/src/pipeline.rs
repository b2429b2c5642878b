//! End-to-end planning: connection requirement, waypoints, speed LP,
//! trajectory, and a slot-level check of the result.

use serde::{Deserialize, Serialize};

use crate::channel::threshold_success_prob;
use crate::coverage::{place_vbs, CoveragePlan};
use crate::error::{Error, Result};
use crate::model::{Scenario, Trajectory};
use crate::recovery::{min_connection_requirement, ConnectionRequirement};
use crate::routing::TourVariant;
use crate::sim::{connection_slot_counts, slot_midpoints};
use crate::speed::{assemble_trajectory, default_step, discretize, solve_speed, DiscretizedPath, SpeedSolution};
use crate::waypoints::{
    gts_as_waypoints, optimize_waypoints, order_clusters, strip_waypoints, vbs_as_waypoints, PinnedEnds,
    SubgradientOptions, WaypointPlan, WaypointScheme,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanOptions {
    pub variant: TourVariant,
    /// Discretization step `δ_d`; `None` uses [`default_step`].
    pub step_m: Option<f64>,
    pub pins: PinnedEnds,
    pub subgradient: SubgradientOptions,
    /// Re-planning rounds allowed when the slot check fails.
    pub max_guard_rounds: u32,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            variant: TourVariant::default(),
            step_m: None,
            pins: PinnedEnds::default(),
            subgradient: SubgradientOptions::default(),
            max_guard_rounds: 10,
        }
    }
}

/// A planned mission and everything it was derived from.
#[derive(Debug, Clone)]
pub struct PlannedMission {
    pub scheme: WaypointScheme,
    pub radius: f64,
    pub requirement: ConnectionRequirement,
    pub coverage: Option<CoveragePlan>,
    pub waypoints: WaypointPlan,
    pub path: DiscretizedPath,
    pub speed: SpeedSolution,
    pub trajectory: Trajectory,
    /// Extra slots added to `T_min` before the slot check passed.
    pub guard_slots: u64,
    /// Connection slots per GT on the final trajectory.
    pub connection_slots: Vec<u64>,
    /// Every GT has at least `M_min` connection slots.
    pub requirement_met: bool,
}

impl PlannedMission {
    pub fn total_time(&self) -> f64 {
        self.trajectory.total_time()
    }

    pub fn path_length(&self) -> f64 {
        self.trajectory.path_length()
    }
}

/// `M_min` and `T_min` for the scenario's connection distance.
pub fn connection_requirement(scenario: &Scenario) -> Result<(f64, ConnectionRequirement)> {
    let radius = scenario.resolve_distance()?;
    let counts = scenario.counts()?;
    let p_d = threshold_success_prob(&scenario.channel, radius)?;
    let req = min_connection_requirement(
        p_d,
        counts.n_info,
        counts.packets_per_slot,
        scenario.rlnc.target_prob,
        scenario.rlnc.slot_s,
    )?;
    Ok((radius, req))
}

/// Plans a mission with the given waypoint scheme.
///
/// The LP is solved for `T_min' = (M_min + guard)·δ_t`, starting with no
/// guard; if the slot-level check of the assembled trajectory finds a GT
/// short of `M_min` connection slots, the guard grows by the largest
/// shortfall and the LP is solved again.
pub fn plan_mission(scenario: &Scenario, scheme: WaypointScheme, opts: &PlanOptions) -> Result<PlannedMission> {
    scenario.validate()?;
    let (radius, req) = connection_requirement(scenario)?;
    let gts = &scenario.gts;
    let vmax = scenario.rlnc.max_speed_mps;
    let plan_ordered = |scheme| -> Result<(WaypointPlan, Option<CoveragePlan>)> {
        Ok(match scheme {
            WaypointScheme::StripBased => (strip_waypoints(gts, radius)?, None),
            WaypointScheme::GtsAsWaypoints => (gts_as_waypoints(gts, opts.variant)?, None),
            WaypointScheme::VbsAsWaypoints | WaypointScheme::OptimizedWaypoints => {
                let cover = order_clusters(&place_vbs(gts, radius)?, opts.variant)?;
                (vbs_as_waypoints(&cover), Some(cover))
            }
        })
    };
    let (vbs_plan, cover) = plan_ordered(scheme)?;
    let vbs_mission = finish(scenario, radius, req, with_pins(vbs_plan, opts.pins), cover.clone(), opts)?;
    if scheme != WaypointScheme::OptimizedWaypoints {
        return Ok(vbs_mission);
    }
    let cover = cover.expect("VBS schemes carry a coverage plan");
    let p4 = optimize_waypoints(gts, &cover, req.min_time_s, vmax, opts.pins, &opts.subgradient)?;
    let opt = finish(scenario, radius, req, p4.plan, Some(cover), opts)?;
    // Keep the VBS trajectory when it is faster after speed planning.
    let mut best = if opt.total_time() <= vbs_mission.total_time() { opt } else { vbs_mission };
    best.scheme = WaypointScheme::OptimizedWaypoints;
    best.waypoints.scheme = WaypointScheme::OptimizedWaypoints;
    Ok(best)
}

fn with_pins(mut plan: WaypointPlan, pins: PinnedEnds) -> WaypointPlan {
    if let Some(s) = pins.start {
        if plan.waypoints.first() != Some(&s) {
            plan.waypoints.insert(0, s);
        }
    }
    if let Some(e) = pins.end {
        if plan.waypoints.last() != Some(&e) {
            plan.waypoints.push(e);
        }
    }
    plan.path_length = crate::geometry::polyline_length(&plan.waypoints);
    plan
}

fn finish(
    scenario: &Scenario,
    radius: f64,
    req: ConnectionRequirement,
    waypoints: WaypointPlan,
    coverage: Option<CoveragePlan>,
    opts: &PlanOptions,
) -> Result<PlannedMission> {
    let vmax = scenario.rlnc.max_speed_mps;
    let slot = scenario.rlnc.slot_s;
    let step = opts.step_m.unwrap_or_else(|| default_step(radius, vmax, slot));
    let path = discretize(&waypoints, &scenario.gts, radius, step)?;
    let mut guard = 0u64;
    for round in 0..=opts.max_guard_rounds {
        let min_time = (req.min_slots + guard) as f64 * slot;
        let speed = solve_speed(&path, min_time, vmax)?;
        let trajectory = assemble_trajectory(&path, &speed, vmax)?;
        let slots = connection_slot_counts(&slot_midpoints(&trajectory, slot)?, &scenario.gts, radius);
        let shortfall = slots.iter().map(|&c| req.min_slots.saturating_sub(c)).max().unwrap_or(0);
        if shortfall == 0 || round == opts.max_guard_rounds {
            if shortfall > 0 {
                log::warn!("{} plan still {shortfall} slot(s) short after {round} guard rounds", waypoints.scheme);
            }
            return Ok(PlannedMission {
                scheme: waypoints.scheme,
                radius,
                requirement: req,
                coverage,
                waypoints,
                path,
                speed,
                trajectory,
                guard_slots: guard,
                connection_slots: slots,
                requirement_met: shortfall == 0,
            });
        }
        guard += shortfall;
    }
    Err(Error::SolverFailure("guard loop exited without a plan".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn uniform(k: usize, side: f64, seed: u64) -> Vec<Point> {
        let mut rng = stream_rng(seed, 0);
        (0..k).map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side))).collect()
    }

    #[test]
    fn every_scheme_meets_the_slot_requirement() {
        let s = Scenario::reference(uniform(15, 1500.0, 3)).unwrap();
        for scheme in WaypointScheme::ALL {
            let m = plan_mission(&s, scheme, &PlanOptions::default()).unwrap();
            assert!(m.requirement_met, "{scheme}");
            assert!(m.connection_slots.iter().all(|&c| c >= m.requirement.min_slots));
            assert!((m.total_time() - m.speed.total_time).abs() <= 1e-9 * m.total_time());
            m.trajectory.check_speed(s.rlnc.max_speed_mps).unwrap();
        }
    }

    #[test]
    fn optimized_never_slower_than_vbs() {
        for seed in 0..3 {
            let s = Scenario::reference(uniform(20, 2000.0, seed)).unwrap();
            let v = plan_mission(&s, WaypointScheme::VbsAsWaypoints, &PlanOptions::default()).unwrap();
            let o = plan_mission(&s, WaypointScheme::OptimizedWaypoints, &PlanOptions::default()).unwrap();
            assert!(o.total_time() <= v.total_time());
        }
    }

    #[test]
    fn single_gt_hovers_about_min_time() {
        let s = Scenario::reference(vec![Point::new(10.0, 10.0)]).unwrap();
        for scheme in WaypointScheme::ALL {
            let m = plan_mission(&s, scheme, &PlanOptions::default()).unwrap();
            let t = m.requirement.min_time_s;
            assert!(m.total_time() >= t && m.total_time() <= t + 0.2, "{scheme}: {}", m.total_time());
        }
    }

    #[test]
    fn pins_become_path_endpoints() {
        let s = Scenario::reference(uniform(6, 1000.0, 1)).unwrap();
        let start = Point::new(-500.0, -500.0);
        let opts = PlanOptions { pins: PinnedEnds { start: Some(start), end: None }, ..Default::default() };
        for scheme in WaypointScheme::ALL {
            let m = plan_mission(&s, scheme, &opts).unwrap();
            assert_eq!(m.trajectory.waypoints()[0], start, "{scheme}");
        }
    }
}
