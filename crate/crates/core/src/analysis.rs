//! Budget sweeps, spared-capacity metrics, nestedness diagnostics and r-hat comparisons.

use std::collections::BTreeMap;
use std::time::Instant;

use floodwall_milp::{check_uniqueness, solve_milp, BnbConfig, MilpStatus, Sense};
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::extensive_form::{BuildOptions, ExtensiveForm};
use crate::grid_model::GridNetwork;
use crate::heuristic::{operational_attributes, portfolio};
use crate::mitigation::{max_useful_budget, plan_cost, CostSchedule, MitigationPlan};
use crate::recourse::{status_closure, LossWeights};
use crate::scenario_model::FloodScenarioSet;

/// Expected proportion of lost capacity that a plan keeps operational, plus the
/// expected absolute amounts spared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparedCapacity {
    pub load: f64,
    pub generation: f64,
    pub transmission: f64,
    pub load_abs: f64,
    pub generation_abs: f64,
    pub transmission_abs: f64,
}

/// Scenarios whose no-mitigation loss in an attribute is zero contribute 0 to that proportion.
pub fn spared_capacity(plan: &MitigationPlan, network: &GridNetwork, scenarios: &FloodScenarioSet) -> Result<SparedCapacity> {
    let zero = MitigationPlan::zeros(network.num_substations(), scenarios.level_count);
    let all = operational_attributes(network, &crate::recourse::StatusVector::all_up(network));
    let mut prop = [0.0; 3];
    let mut abs = [0.0; 3];
    for s in &scenarios.scenarios {
        let base = operational_attributes(network, &status_closure(network, &zero, s)?);
        let with = operational_attributes(network, &status_closure(network, plan, s)?);
        for i in 0..3 {
            let lost = all[i] - base[i];
            let spared = with[i] - base[i];
            abs[i] += s.probability * spared;
            if lost > 0.0 {
                prop[i] += s.probability * spared / lost;
            }
        }
    }
    Ok(SparedCapacity {
        load: prop[0],
        generation: prop[1],
        transmission: prop[2],
        load_abs: abs[0],
        generation_abs: abs[1],
        transmission_abs: abs[2],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub unique: bool,
    pub optimum: f64,
    pub cut_objective: f64,
    pub witness: Option<MitigationPlan>,
    /// The plan is nonzero, so the cut also removed each of its proper subsets.
    pub subsets_cut: bool,
    /// Same probe with a cut that removes only `x_star` itself.
    pub unique_exact: bool,
    pub exact_witness: Option<MitigationPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetSolution {
    pub budget: u64,
    pub plan: MitigationPlan,
    pub plan_cost: u64,
    pub objective: f64,
    pub bound: f64,
    pub status: String,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub warm_start_objective: Option<f64>,
    pub elapsed_ms: u128,
}

/// Build options that keep the model exact while shrinking it.
pub fn reduced_options() -> BuildOptions {
    BuildOptions { relax_status: true, merge_identical: true, fold_constant: true, ..BuildOptions::default() }
}

/// Solves a built form with warm-start plans; also returns the raw variable values.
pub fn solve_form(
    ef: &ExtensiveForm,
    schedule: &CostSchedule,
    budget: u64,
    config: &BnbConfig,
    warm: &[MitigationPlan],
) -> Result<(BudgetSolution, Vec<f64>)> {
    let mut cfg = config.clone();
    for p in warm {
        cfg.warm_starts.push(ef.plan_assignment(p)?);
    }
    let start = Instant::now();
    let sol = ef.solve(&cfg)?;
    let (Some(plan), Some(x)) = (sol.plan, sol.milp.x) else {
        return Err(CoreError::Solver(format!("no incumbent at budget {budget} ({:?})", sol.milp.status)));
    };
    Ok((
        BudgetSolution {
            budget,
            plan_cost: plan_cost(&plan, schedule)?,
            plan,
            objective: sol.milp.objective,
            bound: sol.milp.bound,
            status: format!("{:?}", sol.milp.status),
            nodes: sol.milp.nodes,
            lp_iterations: sol.milp.lp_iterations,
            warm_start_objective: sol.milp.warm_start_objective,
            elapsed_ms: start.elapsed().as_millis(),
        },
        x,
    ))
}

/// Optimal plan at one budget.
#[allow(clippy::too_many_arguments)]
pub fn solve_budget(
    network: &GridNetwork,
    scenarios: &FloodScenarioSet,
    schedule: &CostSchedule,
    budget: u64,
    rhat: u32,
    weights: &LossWeights,
    options: &BuildOptions,
    config: &BnbConfig,
    warm: &[MitigationPlan],
) -> Result<BudgetSolution> {
    let ef = ExtensiveForm::build(network, scenarios, schedule, budget, rhat, weights, options)?;
    Ok(solve_form(&ef, schedule, budget, config, warm)?.0)
}

/// Re-solves with the no-good cut on `x_star`, then with a cut excluding `x_star` alone.
pub fn uniqueness(ef: &ExtensiveForm, x_star: &[f64], config: &BnbConfig) -> Result<UniquenessReport> {
    let u = check_uniqueness(&ef.problem, x_star, &ef.plan_vars(), config)?;
    let plan = ef.plan_from_solution(x_star);
    let mut exact = ef.problem.clone();
    let mut ones = 0.0;
    let terms: Vec<(usize, f64)> = ef
        .plan_vars()
        .into_iter()
        .map(|j| {
            if x_star[j] > 0.5 {
                ones += 1.0;
                (j, -1.0)
            } else {
                (j, 1.0)
            }
        })
        .collect();
    exact.add_constraint("exclude_plan", terms, Sense::Ge, 1.0 - ones)?;
    let sol = solve_milp(&exact, config)?;
    let unique_exact = match sol.status {
        MilpStatus::Infeasible => true,
        _ => sol.objective > u.optimum + 1e-6,
    };
    Ok(UniquenessReport {
        unique: u.unique,
        optimum: u.optimum,
        cut_objective: u.cut_objective,
        witness: u.witness.map(|w| ef.plan_from_solution(&w)),
        subsets_cut: !plan.is_zero(),
        unique_exact,
        exact_witness: if unique_exact { None } else { sol.x.map(|w| ef.plan_from_solution(&w)) },
    })
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Defaults to the largest useful budget.
    pub max_budget: Option<u64>,
    pub bnb: BnbConfig,
    pub build: BuildOptions,
    pub check_unique: bool,
    pub heuristic_warm_starts: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_budget: None,
            bnb: BnbConfig::default(),
            build: reduced_options(),
            check_unique: false,
            heuristic_warm_starts: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub solution: Option<BudgetSolution>,
    pub budget: u64,
    pub spared: Option<SparedCapacity>,
    pub uniqueness: Option<UniquenessReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub substation: String,
    pub from_level: u32,
    pub to_level: u32,
    pub budget: u64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub unattainable_level: u32,
    pub substations: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub transitions: Vec<Transition>,
}

impl SweepReport {
    /// `(budget, objective)` for solved rows.
    pub fn objectives(&self) -> Vec<(u64, f64)> {
        self.rows.iter().filter_map(|r| r.solution.as_ref().map(|s| (r.budget, s.objective))).collect()
    }
}

/// Solves every budget `0..=F` in increasing order, seeding each with the heuristic
/// portfolio and all earlier optimal plans.
pub fn sweep(
    network: &GridNetwork,
    scenarios: &FloodScenarioSet,
    schedule: &CostSchedule,
    rhat: u32,
    weights: &LossWeights,
    config: &SweepConfig,
) -> Result<SweepReport> {
    let max_budget = config.max_budget.unwrap_or_else(|| max_useful_budget(scenarios, schedule, rhat));
    let mut ef = ExtensiveForm::build(network, scenarios, schedule, 0, rhat, weights, &config.build)?;
    let mut rows = Vec::new();
    let mut pool: Vec<MitigationPlan> = Vec::new();
    for f in 0..=max_budget {
        ef.set_budget(f);
        let mut warm = pool.clone();
        if config.heuristic_warm_starts {
            for e in portfolio(f, network, scenarios, schedule, rhat)? {
                if !warm.contains(&e.plan) {
                    warm.push(e.plan);
                }
            }
        }
        let row = match solve_form(&ef, schedule, f, &config.bnb, &warm) {
            Ok((sol, x)) => {
                log::info!("budget {f}: objective {:.6} plan {:?}", sol.objective, sol.plan.levels());
                let spared = spared_capacity(&sol.plan, network, scenarios)?;
                let uniqueness =
                    if config.check_unique { Some(uniqueness(&ef, &x, &config.bnb)?) } else { None };
                if !pool.contains(&sol.plan) {
                    pool.push(sol.plan.clone());
                }
                SweepRow { budget: f, spared: Some(spared), uniqueness, error: None, solution: Some(sol) }
            }
            Err(e) => {
                log::warn!("budget {f}: {e}");
                SweepRow { budget: f, solution: None, spared: None, uniqueness: None, error: Some(e.to_string()) }
            }
        };
        rows.push(row);
    }
    let substations: Vec<String> = network.substations().iter().map(|s| s.id.clone()).collect();
    let transitions = transitions_of(&rows, &substations);
    Ok(SweepReport { unattainable_level: rhat, substations, rows, transitions })
}

fn transitions_of(rows: &[SweepRow], substations: &[String]) -> Vec<Transition> {
    let solved: Vec<(u64, Vec<u32>)> =
        rows.iter().filter_map(|r| r.solution.as_ref().map(|s| (r.budget, s.plan.levels()))).collect();
    let mut out = Vec::new();
    for w in solved.windows(2) {
        for (k, id) in substations.iter().enumerate() {
            let (a, b) = (w[0].1[k], w[1].1[k]);
            if a != b {
                out.push(Transition {
                    substation: id.clone(),
                    from_level: a,
                    to_level: b,
                    budget: w[1].0,
                    direction: if b > a { Direction::Up } else { Direction::Down },
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionInterval {
    pub substation: String,
    /// Level `r` reached from `r - 1`.
    pub level: u32,
    pub first_budget: u64,
    pub last_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nestedness {
    /// Consecutive budget pairs whose plans are not nested.
    pub violations: Vec<(u64, u64)>,
    /// Number of budget increments on which each substation's level changed.
    pub changes: BTreeMap<String, usize>,
    pub intervals: Vec<TransitionInterval>,
}

/// Nestedness of a sequence of `(budget, levels)` rows in budget order.
pub fn nestedness_of(rows: &[(u64, Vec<u32>)], substations: &[String]) -> Nestedness {
    let mut violations = Vec::new();
    let mut changes: BTreeMap<String, usize> = substations.iter().map(|s| (s.clone(), 0)).collect();
    let mut spans: BTreeMap<(usize, u32), (u64, u64)> = BTreeMap::new();
    for w in rows.windows(2) {
        let (fa, a) = (&w[0].0, &w[0].1);
        let (fb, b) = (&w[1].0, &w[1].1);
        if a.iter().zip(b).any(|(x, y)| x > y) {
            violations.push((*fa, *fb));
        }
        for (k, id) in substations.iter().enumerate() {
            if a[k] != b[k] {
                *changes.get_mut(id).expect("known substation") += 1;
            }
            for r in a[k] + 1..=b[k] {
                let e = spans.entry((k, r)).or_insert((*fb, *fb));
                e.1 = *fb;
            }
        }
    }
    let intervals = spans
        .into_iter()
        .map(|((k, level), (first_budget, last_budget))| TransitionInterval {
            substation: substations[k].clone(),
            level,
            first_budget,
            last_budget,
        })
        .collect();
    Nestedness { violations, changes, intervals }
}

pub fn nestedness(report: &SweepReport) -> Nestedness {
    let rows: Vec<(u64, Vec<u32>)> =
        report.rows.iter().filter_map(|r| r.solution.as_ref().map(|s| (r.budget, s.plan.levels()))).collect();
    nestedness_of(&rows, &report.substations)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhatEntry {
    pub unattainable_level: u32,
    pub objective: f64,
    pub plan: MitigationPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhatComparison {
    pub budget: u64,
    pub entries: Vec<RhatEntry>,
    /// Substations whose level differs between any two entries.
    pub differing: Vec<String>,
    /// Objectives are nonincreasing in r-hat within 1e-6.
    pub ordered: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn compare_rhat(
    network: &GridNetwork,
    scenarios: &FloodScenarioSet,
    schedule: &CostSchedule,
    weights: &LossWeights,
    budget: u64,
    rhats: &[u32],
    options: &BuildOptions,
    config: &BnbConfig,
) -> Result<RhatComparison> {
    let mut rhats = rhats.to_vec();
    rhats.sort_unstable();
    rhats.dedup();
    let mut entries = Vec::new();
    let mut warm: Vec<MitigationPlan> = Vec::new();
    for &rhat in &rhats {
        if rhat < 2 {
            return Err(CoreError::InvalidArgument("r-hat must be at least 2".into()));
        }
        let sol = solve_budget(network, scenarios, schedule, budget, rhat, weights, options, config, &warm)?;
        warm.push(sol.plan.clone());
        entries.push(RhatEntry { unattainable_level: rhat, objective: sol.objective, plan: sol.plan });
    }
    let differing = network
        .substations()
        .iter()
        .enumerate()
        .filter(|(k, _)| entries.windows(2).any(|w| w[0].plan.level(*k) != w[1].plan.level(*k)))
        .map(|(_, s)| s.id.clone())
        .collect();
    let ordered = entries.windows(2).all(|w| w[1].objective <= w[0].objective + 1e-6);
    Ok(RhatComparison { budget, entries, differing, ordered })
}
