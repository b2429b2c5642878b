//! Shared fixtures for the criterion benchmarks in `benches/`.

use uavcast_core::{uniform_gts, PlanOptions, PlannedMission, Scenario, WaypointScheme};

/// Reference-setup scenario with `k` GTs uniform on a 3 km square.
pub fn reference_scenario(k: usize, seed: u64) -> Scenario {
    Scenario::reference(uniform_gts(k, 3000.0, seed, 0)).expect("reference setup is valid")
}

pub fn planned(scenario: &Scenario, scheme: WaypointScheme) -> PlannedMission {
    uavcast_core::plan_mission(scenario, scheme, &PlanOptions::default()).expect("reference instance plans")
}
