//! Trajectory planning and verification for UAV-enabled file multicasting.
//!
//! A UAV at fixed altitude broadcasts RLNC-coded packets of a common file to
//! a set of ground terminals (GTs). Each GT needs `N'` packets to decode.
//! The planners turn a target recovery probability into a minimum connection
//! time per GT and then search for a short trajectory meeting it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod coverage;
pub mod error;
pub mod export;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod model;
pub mod pipeline;
pub mod recovery;
pub mod rng;
pub mod routing;
pub mod sim;
pub mod speed;
pub mod waypoints;

pub use config::{load_config, parse_config, to_toml, ScenarioConfig};
pub use coverage::CoveragePlan;
pub use error::{Error, Result};
pub use geometry::Point;
pub use harness::{
    run_comparison, static_baseline, sweep_distance, uniform_gts, BenchConfig, ComparisonTable, StaticBaseline,
    SweepResult,
};
pub use model::{AuxDistance, ChannelParams, DerivedCounts, FadingModel, RlncParams, Scenario, Trajectory};
pub use pipeline::{plan_mission, PlanOptions, PlannedMission};
pub use recovery::ConnectionRequirement;
pub use routing::TourVariant;
pub use sim::{simulate_recovery, static_transmitter_curve, SimulationReport};
pub use speed::{DiscretizedPath, SpeedSolution};
pub use waypoints::{PinnedEnds, WaypointPlan, WaypointScheme};
