//! Second stage: component statuses under a plan and the DC power-flow load-shed LP.

use floodwall_milp::{solve_lp, LpStatus, MilpProblem, Sense};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid_model::GridNetwork;
use crate::mitigation::MitigationPlan;
use crate::scenario_model::{FloodScenario, FloodScenarioSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_shed: f64,
    pub lambda_over: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights { lambda_shed: 1.0, lambda_over: 1.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !ok(self.lambda_shed) || !ok(self.lambda_over) || self.lambda_shed + self.lambda_over == 0.0 {
            return Err(CoreError::InvalidArgument("loss weights must be nonnegative and not both zero".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatusVector {
    pub alpha: Vec<bool>,
    pub beta: Vec<bool>,
}

impl StatusVector {
    pub fn all_up(network: &GridNetwork) -> Self {
        StatusVector { alpha: vec![true; network.num_buses()], beta: vec![true; network.num_branches()] }
    }

    pub fn dominates(&self, other: &StatusVector) -> bool {
        self.alpha.iter().zip(&other.alpha).all(|(&a, &b)| a || !b)
            && self.beta.iter().zip(&other.beta).all(|(&a, &b)| a || !b)
    }
}

/// `prod_r (1 - xi_kr (1 - x_kr))` for substation `k`.
pub fn substation_operational(plan: &MitigationPlan, scenario: &FloodScenario, k: usize) -> bool {
    (1..=plan.level_count()).all(|r| !scenario.flooded(k, r) || plan.get(k, r))
}

pub fn status_closure(network: &GridNetwork, plan: &MitigationPlan, scenario: &FloodScenario) -> Result<StatusVector> {
    let k_count = network.num_substations();
    if plan.num_substations() != k_count {
        return Err(CoreError::Dimension { expected: k_count, got: plan.num_substations() });
    }
    if scenario.levels.len() != k_count {
        return Err(CoreError::Dimension { expected: k_count, got: scenario.levels.len() });
    }
    let up: Vec<bool> = (0..k_count).map(|k| substation_operational(plan, scenario, k)).collect();
    let alpha: Vec<bool> = (0..network.num_buses()).map(|n| up[network.bus_substation(n)]).collect();
    let beta = (0..network.num_branches())
        .map(|e| {
            let (n, m) = network.branch_ends(e);
            alpha[n] && alpha[m]
        })
        .collect();
    Ok(StatusVector { alpha, beta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispatchState {
    pub p_hat: Vec<f64>,
    pub p_check: Vec<f64>,
    pub p_flow: Vec<f64>,
    pub delta: Vec<f64>,
    pub theta: Vec<f64>,
}

impl DispatchState {
    pub fn zeros(network: &GridNetwork) -> Self {
        let n = network.num_buses();
        DispatchState {
            p_hat: vec![0.0; n],
            p_check: vec![0.0; n],
            p_flow: vec![0.0; network.num_branches()],
            delta: vec![0.0; n],
            theta: vec![0.0; n],
        }
    }

    pub fn served_load(&self, network: &GridNetwork) -> f64 {
        network.buses().iter().zip(&self.delta).map(|(b, d)| b.p_load * d).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecourseSolution {
    pub loss: f64,
    pub dispatch: DispatchState,
    pub duality_gap: f64,
    pub iterations: usize,
}

pub fn loss_of(network: &GridNetwork, dispatch: &DispatchState, weights: &LossWeights) -> f64 {
    network
        .buses()
        .iter()
        .enumerate()
        .map(|(n, b)| weights.lambda_shed * b.p_load * (1.0 - dispatch.delta[n]) + weights.lambda_over * dispatch.p_check[n])
        .sum()
}

/// `lambda_shed * total load + lambda_over * sum max(p_gen_min, 0)`.
pub fn loss_upper_bound(network: &GridNetwork, weights: &LossWeights) -> f64 {
    weights.lambda_shed * network.total_load()
        + weights.lambda_over * network.buses().iter().map(|b| b.p_gen_min.max(0.0)).sum::<f64>()
}

/// The always-feasible dispatch: generators at `max(p_gen_min * alpha, 0)`, all of it
/// overgenerated, no flows, flat angles, nothing served.
pub fn feasibility_witness(network: &GridNetwork, status: &StatusVector) -> DispatchState {
    let mut d = DispatchState::zeros(network);
    for (n, b) in network.buses().iter().enumerate() {
        let p = if status.alpha[n] { b.p_gen_min.max(0.0) } else { 0.0 };
        d.p_hat[n] = p;
        d.p_check[n] = p;
    }
    d
}

/// Constraint violations of `dispatch` under `status`, beyond `tol`.
pub fn dispatch_violations(network: &GridNetwork, status: &StatusVector, d: &DispatchState, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    let lim = network.angle_limits();
    let mut net_in = vec![0.0; network.num_buses()];
    for (e, br) in network.branches().iter().enumerate() {
        let (n, m) = network.branch_ends(e);
        let f = d.p_flow[e];
        net_in[n] -= f;
        net_in[m] += f;
        let cap = if status.beta[e] { br.flow_limit } else { 0.0 };
        if f.abs() > cap + tol {
            out.push(format!("flow bound on branch {}", br.id));
        }
        if status.beta[e] {
            if (f + br.susceptance * (d.theta[n] - d.theta[m])).abs() > tol {
                out.push(format!("Ohm's law on branch {}", br.id));
            }
            if (d.theta[n] - d.theta[m]).abs() > lim.diff_max + tol {
                out.push(format!("angle difference on branch {}", br.id));
            }
        }
    }
    for (n, b) in network.buses().iter().enumerate() {
        let a = if status.alpha[n] { 1.0 } else { 0.0 };
        let balance = d.p_hat[n] - d.p_check[n] - b.p_load * d.delta[n] + net_in[n];
        if balance.abs() > tol {
            out.push(format!("power balance at bus {}", b.id));
        }
        if d.p_hat[n] < (b.p_gen_min * a).max(0.0) - tol || d.p_hat[n] > b.p_gen_max * a + tol {
            out.push(format!("generation bounds at bus {}", b.id));
        }
        if d.p_check[n] < -tol || d.p_check[n] > d.p_hat[n] + tol {
            out.push(format!("overgeneration bounds at bus {}", b.id));
        }
        if d.delta[n] < -tol || d.delta[n] > a + tol {
            out.push(format!("served fraction at bus {}", b.id));
        }
        if d.theta[n].abs() > lim.abs_max + tol {
            out.push(format!("angle bound at bus {}", b.id));
        }
    }
    if d.theta[network.reference_bus()].abs() > tol {
        out.push("reference angle".into());
    }
    out
}

/// Solves the load-shed LP with statuses fixed.
pub fn solve_recourse_lp(network: &GridNetwork, status: &StatusVector, weights: &LossWeights) -> Result<RecourseSolution> {
    weights.validate()?;
    if status.alpha.len() != network.num_buses() || status.beta.len() != network.num_branches() {
        return Err(CoreError::Dimension { expected: network.num_buses(), got: status.alpha.len() });
    }
    let lim = network.angle_limits();
    let mut p = MilpProblem::new("recourse");
    p.objective_offset = weights.lambda_shed * network.total_load();
    let nb = network.num_buses();
    let mut delta = vec![None; nb];
    let mut gen = vec![None; nb];
    let mut theta = Vec::with_capacity(nb);
    for (n, b) in network.buses().iter().enumerate() {
        let t = if n == network.reference_bus() { 0.0 } else { lim.abs_max };
        theta.push(p.add_continuous(format!("theta_{}", b.id), -t, t, 0.0));
        if b.p_load > 0.0 {
            let hi = if status.alpha[n] { 1.0 } else { 0.0 };
            delta[n] = Some(p.add_continuous(format!("delta_{}", b.id), 0.0, hi, -weights.lambda_shed * b.p_load));
        }
        if status.alpha[n] && b.p_gen_max > 0.0 {
            let hat = p.add_continuous(format!("phat_{}", b.id), b.p_gen_min.max(0.0), b.p_gen_max, 0.0);
            let check = p.add_continuous(format!("pcheck_{}", b.id), 0.0, b.p_gen_max, weights.lambda_over);
            p.add_constraint(format!("over_{}", b.id), vec![(check, 1.0), (hat, -1.0)], Sense::Le, 0.0)?;
            gen[n] = Some((hat, check));
        }
    }
    let mut balance: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nb];
    let mut flow = vec![None; network.num_branches()];
    for (e, br) in network.branches().iter().enumerate() {
        if !status.beta[e] {
            continue;
        }
        let (n, m) = network.branch_ends(e);
        let f = p.add_continuous(format!("flow_{}", br.id), -br.flow_limit, br.flow_limit, 0.0);
        flow[e] = Some(f);
        let b = br.susceptance;
        p.add_constraint(format!("ohm_{}", br.id), vec![(f, 1.0), (theta[n], b), (theta[m], -b)], Sense::Eq, 0.0)?;
        p.add_constraint(format!("dlo_{}", br.id), vec![(theta[n], 1.0), (theta[m], -1.0)], Sense::Ge, -lim.diff_max)?;
        p.add_constraint(format!("dhi_{}", br.id), vec![(theta[n], 1.0), (theta[m], -1.0)], Sense::Le, lim.diff_max)?;
        balance[n].push((f, -1.0));
        balance[m].push((f, 1.0));
    }
    for (n, b) in network.buses().iter().enumerate() {
        let mut terms = std::mem::take(&mut balance[n]);
        if let Some((hat, check)) = gen[n] {
            terms.push((hat, 1.0));
            terms.push((check, -1.0));
        }
        if let Some(dv) = delta[n] {
            terms.push((dv, -b.p_load));
        }
        if !terms.is_empty() {
            p.add_constraint(format!("kcl_{}", b.id), terms, Sense::Eq, 0.0)?;
        }
    }
    let sol = solve_lp(&p);
    if sol.status != LpStatus::Optimal {
        return Err(CoreError::Solver(format!("recourse LP ended with {:?}", sol.status)));
    }
    let mut d = DispatchState::zeros(network);
    for n in 0..nb {
        d.theta[n] = sol.x[theta[n]];
        if let Some(v) = delta[n] {
            d.delta[n] = sol.x[v];
        }
        if let Some((hat, check)) = gen[n] {
            d.p_hat[n] = sol.x[hat];
            d.p_check[n] = sol.x[check];
        }
    }
    for (e, f) in flow.iter().enumerate() {
        if let Some(f) = f {
            d.p_flow[e] = sol.x[*f];
        }
    }
    Ok(RecourseSolution { loss: sol.objective, dispatch: d, duality_gap: sol.duality_gap(), iterations: sol.iterations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub id: String,
    pub probability: f64,
    pub loss: f64,
    pub served_load: f64,
    pub operational_buses: usize,
    pub operational_branches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanEvaluation {
    pub expected_loss: f64,
    pub scenarios: Vec<ScenarioOutcome>,
}

/// Probability-weighted recourse loss of `plan`; scenarios are solved in parallel.
pub fn evaluate_plan(
    network: &GridNetwork,
    plan: &MitigationPlan,
    scenarios: &FloodScenarioSet,
    weights: &LossWeights,
) -> Result<PlanEvaluation> {
    if plan.level_count() != scenarios.level_count {
        return Err(CoreError::Dimension { expected: scenarios.level_count as usize, got: plan.level_count() as usize });
    }
    let outcomes: Vec<Result<ScenarioOutcome>> = scenarios
        .scenarios
        .par_iter()
        .map(|s| {
            let status = status_closure(network, plan, s)?;
            let sol = solve_recourse_lp(network, &status, weights)?;
            Ok(ScenarioOutcome {
                id: s.id.clone(),
                probability: s.probability,
                loss: sol.loss,
                served_load: sol.dispatch.served_load(network),
                operational_buses: status.alpha.iter().filter(|&&a| a).count(),
                operational_branches: status.beta.iter().filter(|&&b| b).count(),
            })
        })
        .collect();
    let scenarios = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let expected_loss = scenarios.iter().map(|o| o.probability * o.loss).sum();
    Ok(PlanEvaluation { expected_loss, scenarios })
}
