use uavcast_bench::{planned, reference_scenario};
use uavcast_core::WaypointScheme;

#[test]
fn fixtures_are_deterministic_and_plannable() {
    let a = reference_scenario(10, 3);
    assert_eq!(a, reference_scenario(10, 3));
    assert_ne!(a.gts, reference_scenario(10, 4).gts);
    let m = planned(&a, WaypointScheme::OptimizedWaypoints);
    assert!(m.requirement_met);
}
