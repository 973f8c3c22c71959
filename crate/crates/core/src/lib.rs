//! Flood-barrier deployment planning for substations under hurricane flooding scenarios.
//!
//! A plan raises stackable barriers at substations before landfall; each flooding
//! scenario then leaves some buses and branches out of service and a DC power-flow
//! LP sheds load. The extensive form optimizes the expected loss over a budget.

pub mod analysis;
pub mod error;
pub mod extensive_form;
pub mod fixtures;
pub mod geo_remap;
pub mod grid_model;
pub mod heuristic;
pub mod io;
pub mod mitigation;
pub mod recourse;
pub mod scenario_gen;
pub mod scenario_model;

pub use analysis::{
    compare_rhat, nestedness, nestedness_of, solve_budget, spared_capacity, sweep, SparedCapacity, SweepConfig,
    SweepReport,
};
pub use error::{CoreError, Result};
pub use extensive_form::{BuildOptions, ExtensiveForm, StatusRef};
pub use fixtures::{make_fixture, Fixture, FIXTURE_NAMES};
pub use geo_remap::{distance, remap, GeoPoint};
pub use grid_model::{AngleLimits, Branch, Bus, GridNetwork, NetworkData, Substation, Violation, VoltageClass};
pub use heuristic::{benefit, greedy, portfolio, AttributeWeights};
pub use mitigation::{enumerate_plans, is_feasible, max_useful_budget, plan_cost, CostSchedule, MitigationPlan};
pub use recourse::{evaluate_plan, solve_recourse_lp, status_closure, LossWeights, PlanEvaluation, StatusVector};
pub use scenario_gen::{generate_scenarios, sigma_from_cone, stratified_landfalls, Coastline, InundationKernel, LandfallDistribution};
pub use scenario_model::{depth_to_level, DepthThresholds, FloodScenario, FloodScenarioSet, ScenarioFile};
