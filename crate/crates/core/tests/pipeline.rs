//! End-to-end checks through the public API.

use proptest::prelude::*;
use uavcast_core::export;
use uavcast_core::{
    load_config, parse_config, plan_mission, simulate_recovery, to_toml, uniform_gts, PlanOptions, Point, Scenario,
    WaypointScheme,
};

#[test]
fn scenario_file_plans_and_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(
        &path,
        r#"
aux_distance_D = 400.0

[channel]
tx_power_P = "10 dBm"
fading = { model = "rician", k_factor_Kc = 2.0 }

[rlnc]
target_prob_Pbar = 0.95

[gts]
points = [[0.0, 0.0], [900.0, 100.0], [1800.0, -50.0]]
"#,
    )
    .unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.scenario.gts.len(), 3);
    assert_eq!(cfg.scenario.resolve_distance().unwrap(), 400.0);

    let again = parse_config(&to_toml(&cfg).unwrap()).unwrap();
    assert_eq!(again, cfg);

    let m = plan_mission(&cfg.scenario, WaypointScheme::OptimizedWaypoints, &cfg.plan).unwrap();
    assert!(m.requirement_met);
    let back = export::read_waypoint_schedule(&export::waypoint_schedule_csv(&m.trajectory).unwrap()).unwrap();
    assert_eq!(back, m.trajectory);
}

#[test]
fn planned_trajectory_survives_simulation() {
    let s = Scenario::reference(uniform_gts(25, 2000.0, 11, 0)).unwrap();
    let m = plan_mission(&s, WaypointScheme::OptimizedWaypoints, &PlanOptions::default()).unwrap();
    let r = simulate_recovery(&m.trajectory, &s, 2000, 5).unwrap();
    assert!(r.min_p_lb() >= s.rlnc.target_prob);
    assert!(r.bound_violations().is_empty());
    assert_eq!(r.per_gt.len(), 25);
}

#[test]
fn unreachable_threshold_is_an_error_not_a_plan() {
    let mut s = Scenario::reference(vec![Point::new(0.0, 0.0)]).unwrap();
    s.channel.altitude_m = 5000.0;
    assert!(plan_mission(&s, WaypointScheme::StripBased, &PlanOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_scheme_is_feasible_and_optimized_dominates(
        k in 1usize..12,
        side in 200.0..2500.0f64,
        seed in 0u64..1000,
    ) {
        let s = Scenario::reference(uniform_gts(k, side, seed, 0)).unwrap();
        let opts = PlanOptions::default();
        let mut times = Vec::new();
        for scheme in WaypointScheme::ALL {
            let m = plan_mission(&s, scheme, &opts).unwrap();
            prop_assert!(m.requirement_met);
            prop_assert!(m.trajectory.check_speed(s.rlnc.max_speed_mps).is_ok());
            prop_assert!(m.total_time() >= m.requirement.min_time_s - 1e-9);
            prop_assert!(m.speed.duality_gap() <= 1e-6);
            times.push(m.total_time());
        }
        prop_assert!(times[3] <= times[2]);
    }
}
