//! Parametric greedy heuristic: raise one substation at a time by the best
//! expected attribute gain per unit of cost.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::grid_model::GridNetwork;
use crate::mitigation::{CostSchedule, MitigationPlan};
use crate::recourse::{status_closure, StatusVector};
use crate::scenario_model::FloodScenarioSet;

pub const ETA_FLOW_GRID: [f64; 7] = [0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttributeWeights {
    pub eta_load: f64,
    pub eta_gen: f64,
    pub eta_flow: f64,
}

impl AttributeWeights {
    pub fn new(eta_load: f64, eta_gen: f64, eta_flow: f64) -> Result<Self> {
        let w = AttributeWeights { eta_load, eta_gen, eta_flow };
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !(ok(eta_load) && ok(eta_gen) && ok(eta_flow)) || eta_load + eta_gen + eta_flow == 0.0 {
            return Err(CoreError::InvalidArgument("attribute weights must be nonnegative and not all zero".into()));
        }
        Ok(w)
    }

    /// `eta_load = 1`, `eta_gen = 0`.
    pub fn with_flow(eta_flow: f64) -> Result<Self> {
        Self::new(1.0, 0.0, eta_flow)
    }
}

/// Operational load, generation capacity and flow capacity under `status`.
pub fn operational_attributes(network: &GridNetwork, status: &StatusVector) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (n, b) in network.buses().iter().enumerate() {
        if status.alpha[n] {
            out[0] += b.p_load;
            out[1] += b.p_gen_max;
        }
    }
    for (e, br) in network.branches().iter().enumerate() {
        if status.beta[e] {
            out[2] += br.flow_limit;
        }
    }
    out
}

fn expected_attributes(network: &GridNetwork, plan: &MitigationPlan, scenarios: &FloodScenarioSet) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for s in &scenarios.scenarios {
        let a = operational_attributes(network, &status_closure(network, plan, s)?);
        for i in 0..3 {
            out[i] += s.probability * a[i];
        }
    }
    Ok(out)
}

fn weigh(w: &AttributeWeights, a: [f64; 3]) -> f64 {
    a[0] * w.eta_load + a[1] * w.eta_gen + a[2] * w.eta_flow
}

/// Expected weighted gain in operational attributes from `x` to `x_tilde`.
pub fn benefit(
    x: &MitigationPlan,
    x_tilde: &MitigationPlan,
    weights: &AttributeWeights,
    network: &GridNetwork,
    scenarios: &FloodScenarioSet,
) -> Result<f64> {
    if x.num_substations() != x_tilde.num_substations() || x.level_count() != x_tilde.level_count() {
        return Err(CoreError::Dimension { expected: x.num_substations(), got: x_tilde.num_substations() });
    }
    if !x_tilde.dominates(x) {
        return Err(CoreError::InvalidArgument("candidate plan does not contain the current plan".into()));
    }
    let mut rho = [0.0; 3];
    for s in &scenarios.scenarios {
        let before = operational_attributes(network, &status_closure(network, x, s)?);
        let after = operational_attributes(network, &status_closure(network, x_tilde, s)?);
        for i in 0..3 {
            rho[i] += s.probability * (after[i] - before[i]);
        }
    }
    Ok(weigh(weights, rho))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyStep {
    pub substation: String,
    pub from_level: u32,
    pub to_level: u32,
    pub cost: u64,
    pub benefit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyResult {
    pub plan: MitigationPlan,
    pub cost: u64,
    pub steps: Vec<GreedyStep>,
}

pub fn greedy(
    weights: &AttributeWeights,
    budget: u64,
    network: &GridNetwork,
    scenarios: &FloodScenarioSet,
    schedule: &CostSchedule,
    rhat: u32,
) -> Result<GreedyResult> {
    let lc = scenarios.level_count;
    if rhat < 1 || rhat > lc {
        return Err(CoreError::InvalidArgument(format!("r-hat {rhat} outside 1..={lc}")));
    }
    let k_count = network.num_substations();
    if schedule.num_substations() != k_count {
        return Err(CoreError::Dimension { expected: k_count, got: schedule.num_substations() });
    }
    let mut order: Vec<usize> = (0..k_count).collect();
    order.sort_by(|&a, &b| network.substations()[a].id.cmp(&network.substations()[b].id));

    let mut plan = MitigationPlan::zeros(k_count, lc);
    let mut remaining = budget;
    let mut steps = Vec::new();
    let mut current = weigh(weights, expected_attributes(network, &plan, scenarios)?);
    while remaining > 0 {
        let mut best: Option<(f64, f64, usize, u32, u64, MitigationPlan)> = None;
        for &k in &order {
            let from = plan.level(k);
            for to in from + 1..rhat {
                let cost = schedule.cost_to_level(k, to) - schedule.cost_to_level(k, from);
                if cost > remaining {
                    break;
                }
                let cand = plan.with_level(k, to);
                let gain = weigh(weights, expected_attributes(network, &cand, scenarios)?) - current;
                let ratio = gain / cost as f64;
                let better = match &best {
                    None => true,
                    Some((r, ..)) => ratio > r + 1e-12 * r.abs().max(1.0),
                };
                if better {
                    best = Some((ratio, gain, k, to, cost, cand));
                }
            }
        }
        let Some((_, gain, k, to, cost, cand)) = best else { break };
        if gain <= 1e-12 {
            break;
        }
        steps.push(GreedyStep {
            substation: network.substations()[k].id.clone(),
            from_level: plan.level(k),
            to_level: to,
            cost,
            benefit: gain,
        });
        plan = cand;
        remaining -= cost;
        current += gain;
    }
    Ok(GreedyResult { plan, cost: budget - remaining, steps })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioEntry {
    pub plan: MitigationPlan,
    /// Every flow weight that produced this plan.
    pub eta_flow: Vec<f64>,
}

/// Greedy plans over the flow-weight grid with `eta_load = 1`, `eta_gen = 0`, deduplicated.
pub fn portfolio(
    budget: u64,
    network: &GridNetwork,
    scenarios: &FloodScenarioSet,
    schedule: &CostSchedule,
    rhat: u32,
) -> Result<Vec<PortfolioEntry>> {
    let mut out: Vec<PortfolioEntry> = Vec::new();
    for eta in ETA_FLOW_GRID {
        let plan = greedy(&AttributeWeights::with_flow(eta)?, budget, network, scenarios, schedule, rhat)?.plan;
        match out.iter_mut().find(|e| e.plan == plan) {
            Some(e) => e.eta_flow.push(eta),
            None => out.push(PortfolioEntry { plan, eta_flow: vec![eta] }),
        }
    }
    Ok(out)
}
