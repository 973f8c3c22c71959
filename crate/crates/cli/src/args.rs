use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "floodwall", version, about = "Plan flood-barrier deployment at substations")]
pub struct Cli {
    /// Write the result envelope here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// More log output; repeat for debug and trace.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check a network file, and optionally a scenario file against it.
    Validate(ValidateArgs),
    /// Generate equiprobable flooding scenarios from landfall sampling.
    GenScenarios(GenArgs),
    /// Greedy plan for one budget, or a portfolio over flow weights.
    Heuristic(HeuristicArgs),
    /// Optimal plan for one budget, or a sweep with --sweep.
    Solve(SolveArgs),
    /// Optimal plans for every budget up to a maximum.
    Sweep(SweepArgs),
    /// Expected loss of a plan file.
    Eval(EvalArgs),
    /// Minimum-distance assignment of one labeled point set into another.
    Remap(RemapArgs),
    /// Solve one budget and test whether its plan is the only optimum.
    CheckUnique(CheckUniqueArgs),
    /// Write a bundled instance to a directory.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    /// Rescale scenario probabilities that do not sum to one.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct InstanceArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub scenarios: PathBuf,
    #[arg(long)]
    pub normalize: bool,
    /// Unattainable barrier level; defaults to the scenario file's value.
    #[arg(long)]
    pub rhat: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_shed: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_over: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchingRule {
    MostFractional,
    PseudoCost,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0.0)]
    pub rel_gap: f64,
    #[arg(long, default_value_t = 0.0)]
    pub abs_gap: f64,
    #[arg(long)]
    pub node_limit: Option<usize>,
    /// Wall-clock limit per budget, seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "most-fractional")]
    pub branching: BranchingRule,
    /// Build the model without scenario merging, constant folding or relaxed statuses.
    #[arg(long)]
    pub literal: bool,
    /// Skip heuristic warm starts.
    #[arg(long)]
    pub no_warm_start: bool,
    /// Minimum expected served fraction at a load bus, as BUS=FRACTION.
    #[arg(long = "service-level", value_name = "BUS=FRACTION")]
    pub service_levels: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// JSON file with `vertices`, an ordered list of [lon, lat].
    #[arg(long)]
    pub coastline: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub peak_depth: f64,
    #[arg(long)]
    pub decay_km: f64,
    #[arg(long, default_value_t = 89.0)]
    pub cone_nmi: f64,
    /// Storm track bearing, degrees clockwise from north.
    #[arg(long, default_value_t = 315.0)]
    pub bearing: f64,
    #[arg(long, default_value_t = 0.0)]
    pub dry_depth: f64,
    /// Mean landfall as arc length along the coastline; defaults to its midpoint.
    #[arg(long)]
    pub mean_km: Option<f64>,
    /// Depth thresholds in meters; defaults to the three-barrier stack.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long, default_value_t = 3)]
    pub rhat: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct HeuristicArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub budget: u64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_load: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eta_gen: f64,
    /// One value gives a single plan; several give a portfolio.
    #[arg(long, num_args = 1.., conflicts_with = "portfolio")]
    pub eta_flow: Vec<f64>,
    /// Use the built-in flow-weight grid.
    #[arg(long)]
    pub portfolio: bool,
    /// Plan file, or a directory when a portfolio is produced.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["budget", "sweep"]))]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Solve every budget from 0 to --max-budget.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, requires = "sweep")]
    pub max_budget: Option<u64>,
    #[arg(long)]
    pub check_unique: bool,
    /// Plan file for a single budget, report directory for a sweep.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the model in LP format.
    #[arg(long, conflicts_with = "sweep")]
    pub lp_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Largest budget, or `auto` for the largest useful one.
    #[arg(long, default_value = "auto")]
    pub max_budget: String,
    #[arg(long)]
    pub check_unique: bool,
    /// Report directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// JSON map from substation id to barrier level.
    #[arg(long)]
    pub plan: PathBuf,
    /// Also report whether the plan fits this budget.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RemapArgs {
    /// CSV with columns id, lon, lat.
    #[arg(long)]
    pub from: PathBuf,
    /// CSV with columns id, lon, lat.
    #[arg(long)]
    pub to: PathBuf,
    /// CSV with columns from_id, to_id, distance_km.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckUniqueArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FixtureArgs {
    /// One of tiny3, star8, ring12, coastal40.
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub out: PathBuf,
}
