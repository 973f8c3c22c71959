//! The deterministic-equivalent MILP over plan binaries and per-scenario recourse.

use std::collections::BTreeMap;

use floodwall_milp::{solve_milp, BnbConfig, MilpProblem, MilpSolution, MilpStatus, Sense, VarKind};
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::grid_model::GridNetwork;
use crate::mitigation::{is_feasible, CostSchedule, MitigationPlan};
use crate::recourse::{solve_recourse_lp, LossWeights, StatusVector};
use crate::scenario_model::FloodScenarioSet;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildOptions {
    /// Declare alpha and beta continuous in [0, 1].
    pub relax_status: bool,
    /// Minimum expected served fraction per load bus id.
    pub service_levels: BTreeMap<String, f64>,
    /// Merge scenarios whose effective flood levels coincide, summing probabilities.
    pub merge_identical: bool,
    /// Replace scenarios with no preventable flooding by their constant loss.
    pub fold_constant: bool,
}

/// A status that is either fixed by the flood data or carried by a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatusRef {
    Const(bool),
    Var(usize),
}

impl StatusRef {
    pub fn value(self, x: &[f64]) -> bool {
        match self {
            StatusRef::Const(b) => b,
            StatusRef::Var(j) => x[j] > 0.5,
        }
    }

    fn is_dead(self) -> bool {
        self == StatusRef::Const(false)
    }
}

/// Model variables of one scenario block.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBlock {
    pub id: String,
    pub probability: f64,
    /// Indices of the input scenarios represented by this block.
    pub members: Vec<usize>,
    /// Status per substation.
    pub alpha: Vec<StatusRef>,
    pub beta: Vec<StatusRef>,
    pub delta: Vec<Option<usize>>,
    pub p_hat: Vec<Option<usize>>,
    pub p_check: Vec<Option<usize>>,
    pub p_flow: Vec<Option<usize>>,
    pub theta: Vec<Option<usize>>,
    /// Loss of a folded block, already in the objective offset.
    pub folded_loss: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub variables: usize,
    pub binaries: usize,
    pub constraints: usize,
    pub blocks: usize,
    pub folded_blocks: usize,
}

#[derive(Debug, Clone)]
pub struct ExtensiveForm {
    pub problem: MilpProblem,
    /// `x[k][r-1]` for `r = 1..=level_count`.
    pub x: Vec<Vec<usize>>,
    pub blocks: Vec<ScenarioBlock>,
    pub budget_row: usize,
    pub level_count: u32,
    pub unattainable_level: u32,
    bus_sub: Vec<usize>,
}

struct Builder<'a> {
    net: &'a GridNetwork,
    weights: &'a LossWeights,
    relax: bool,
    p: MilpProblem,
}

impl Builder<'_> {
    fn status_var(&mut self, name: String) -> usize {
        if self.relax {
            self.p.add_continuous(name, 0.0, 1.0, 0.0)
        } else {
            self.p.add_binary(name, 0.0)
        }
    }

    fn row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Result<usize> {
        Ok(self.p.add_constraint(name, terms, sense, rhs)?)
    }

    fn block(&mut self, tag: &str, probability: f64, levels: &[u32], x: &[Vec<usize>], rhat: u32) -> Result<ScenarioBlock> {
        let net = self.net;
        let lim = net.angle_limits();
        let alpha: Vec<StatusRef> = levels
            .iter()
            .enumerate()
            .map(|(k, &l)| -> Result<StatusRef> {
                if l == 0 {
                    return Ok(StatusRef::Const(true));
                }
                if l >= rhat {
                    return Ok(StatusRef::Const(false));
                }
                let a = self.status_var(format!("alpha_{tag}_{}", net.substations()[k].id));
                let mut terms = vec![(a, 1.0)];
                terms.extend((0..l as usize).map(|r| (x[k][r], -1.0)));
                self.row(format!("link_{tag}_{}", net.substations()[k].id), terms, Sense::Ge, 1.0 - f64::from(l))?;
                for r in 0..l as usize {
                    self.row(format!("cap_{tag}_{}_{}", net.substations()[k].id, r + 1), vec![(a, 1.0), (x[k][r], -1.0)], Sense::Le, 0.0)?;
                }
                Ok(StatusRef::Var(a))
            })
            .collect::<Result<_>>()?;
        let bus_alpha: Vec<StatusRef> = (0..net.num_buses()).map(|n| alpha[net.bus_substation(n)]).collect();

        let mut beta = Vec::with_capacity(net.num_branches());
        for (e, br) in net.branches().iter().enumerate() {
            let (n, m) = net.branch_ends(e);
            let s = match (bus_alpha[n], bus_alpha[m]) {
                (StatusRef::Const(false), _) | (_, StatusRef::Const(false)) => StatusRef::Const(false),
                (StatusRef::Const(true), other) | (other, StatusRef::Const(true)) => other,
                (StatusRef::Var(a), StatusRef::Var(b)) if a == b => StatusRef::Var(a),
                (StatusRef::Var(a), StatusRef::Var(b)) => {
                    let v = self.status_var(format!("beta_{tag}_{}", br.id));
                    self.row(format!("both_{tag}_{}", br.id), vec![(v, 1.0), (a, -1.0), (b, -1.0)], Sense::Ge, -1.0)?;
                    self.row(format!("from_{tag}_{}", br.id), vec![(v, 1.0), (a, -1.0)], Sense::Le, 0.0)?;
                    self.row(format!("to_{tag}_{}", br.id), vec![(v, 1.0), (b, -1.0)], Sense::Le, 0.0)?;
                    StatusRef::Var(v)
                }
            };
            beta.push(s);
        }

        let nb = net.num_buses();
        let mut theta = vec![None; nb];
        for (e, s) in beta.iter().enumerate() {
            if !s.is_dead() {
                let (n, m) = net.branch_ends(e);
                for b in [n, m] {
                    if theta[b].is_none() {
                        let t = if b == net.reference_bus() { 0.0 } else { lim.abs_max };
                        theta[b] = Some(self.p.add_continuous(format!("theta_{tag}_{}", net.buses()[b].id), -t, t, 0.0));
                    }
                }
            }
        }

        let mut balance: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nb];
        let mut delta = vec![None; nb];
        let mut p_hat = vec![None; nb];
        let mut p_check = vec![None; nb];
        for (n, bus) in net.buses().iter().enumerate() {
            let a = bus_alpha[n];
            if a.is_dead() {
                continue;
            }
            if bus.p_load > 0.0 {
                let d = self.p.add_continuous(
                    format!("delta_{tag}_{}", bus.id),
                    0.0,
                    1.0,
                    -probability * self.weights.lambda_shed * bus.p_load,
                );
                if let StatusRef::Var(av) = a {
                    self.row(format!("serve_{tag}_{}", bus.id), vec![(d, 1.0), (av, -1.0)], Sense::Le, 0.0)?;
                }
                balance[n].push((d, -bus.p_load));
                delta[n] = Some(d);
            }
            if bus.p_gen_max > 0.0 {
                let lo = bus.p_gen_min.max(0.0);
                let hat = match a {
                    StatusRef::Const(_) => self.p.add_continuous(format!("phat_{tag}_{}", bus.id), lo, bus.p_gen_max, 0.0),
                    StatusRef::Var(av) => {
                        let hat = self.p.add_continuous(format!("phat_{tag}_{}", bus.id), 0.0, bus.p_gen_max, 0.0);
                        self.row(format!("gmax_{tag}_{}", bus.id), vec![(hat, 1.0), (av, -bus.p_gen_max)], Sense::Le, 0.0)?;
                        if bus.p_gen_min > 0.0 {
                            self.row(format!("gmin_{tag}_{}", bus.id), vec![(hat, 1.0), (av, -bus.p_gen_min)], Sense::Ge, 0.0)?;
                        }
                        hat
                    }
                };
                let check = self.p.add_continuous(
                    format!("pcheck_{tag}_{}", bus.id),
                    0.0,
                    bus.p_gen_max,
                    probability * self.weights.lambda_over,
                );
                self.row(format!("over_{tag}_{}", bus.id), vec![(check, 1.0), (hat, -1.0)], Sense::Le, 0.0)?;
                balance[n].push((hat, 1.0));
                balance[n].push((check, -1.0));
                p_hat[n] = Some(hat);
                p_check[n] = Some(check);
            }
        }

        let mut p_flow = vec![None; net.num_branches()];
        let two_max = 2.0 * lim.abs_max;
        for (e, br) in net.branches().iter().enumerate() {
            if beta[e].is_dead() {
                continue;
            }
            let (n, m) = net.branch_ends(e);
            let (tn, tm) = (theta[n].expect("live end"), theta[m].expect("live end"));
            let b = br.susceptance;
            let s = br.flow_limit;
            let f = self.p.add_continuous(format!("flow_{tag}_{}", br.id), -s, s, 0.0);
            p_flow[e] = Some(f);
            match beta[e] {
                StatusRef::Const(_) => {
                    self.row(format!("ohm_{tag}_{}", br.id), vec![(f, 1.0), (tn, b), (tm, -b)], Sense::Eq, 0.0)?;
                    self.row(format!("dlo_{tag}_{}", br.id), vec![(tn, 1.0), (tm, -1.0)], Sense::Ge, -lim.diff_max)?;
                    self.row(format!("dhi_{tag}_{}", br.id), vec![(tn, 1.0), (tm, -1.0)], Sense::Le, lim.diff_max)?;
                }
                StatusRef::Var(bv) => {
                    let big_m = net.big_m(e);
                    let slack = two_max - lim.diff_max;
                    self.row(format!("fhi_{tag}_{}", br.id), vec![(f, 1.0), (bv, -s)], Sense::Le, 0.0)?;
                    self.row(format!("flo_{tag}_{}", br.id), vec![(f, 1.0), (bv, s)], Sense::Ge, 0.0)?;
                    self.row(format!("ohmlo_{tag}_{}", br.id), vec![(f, -1.0), (tn, -b), (tm, b), (bv, -big_m)], Sense::Ge, -big_m)?;
                    self.row(format!("ohmhi_{tag}_{}", br.id), vec![(f, -1.0), (tn, -b), (tm, b), (bv, big_m)], Sense::Le, big_m)?;
                    self.row(format!("dlo_{tag}_{}", br.id), vec![(tn, 1.0), (tm, -1.0), (bv, -slack)], Sense::Ge, -two_max)?;
                    self.row(format!("dhi_{tag}_{}", br.id), vec![(tn, 1.0), (tm, -1.0), (bv, slack)], Sense::Le, two_max)?;
                }
            }
            balance[n].push((f, -1.0));
            balance[m].push((f, 1.0));
        }
        for (n, terms) in balance.into_iter().enumerate() {
            if !terms.is_empty() {
                self.row(format!("kcl_{tag}_{}", net.buses()[n].id), terms, Sense::Eq, 0.0)?;
            }
        }
        self.p.objective_offset += probability * self.weights.lambda_shed * net.total_load();
        Ok(ScenarioBlock {
            id: tag.to_string(),
            probability,
            members: Vec::new(),
            alpha,
            beta,
            delta,
            p_hat,
            p_check,
            p_flow,
            theta,
            folded_loss: None,
        })
    }
}

/// Effective level of a substation: floods above the level count saturate, and any
/// flood at or above `rhat` is recorded as `rhat`.
fn effective_levels(levels: &[u32], level_count: u32, rhat: u32) -> Vec<u32> {
    levels.iter().map(|&l| l.min(level_count).min(rhat)).collect()
}

impl ExtensiveForm {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        network: &GridNetwork,
        scenarios: &FloodScenarioSet,
        schedule: &CostSchedule,
        budget: u64,
        rhat: u32,
        weights: &LossWeights,
        options: &BuildOptions,
    ) -> Result<Self> {
        weights.validate()?;
        let k_count = network.num_substations();
        if schedule.num_substations() != k_count {
            return Err(CoreError::Dimension { expected: k_count, got: schedule.num_substations() });
        }
        if scenarios.num_substations() != k_count {
            return Err(CoreError::Dimension { expected: k_count, got: scenarios.num_substations() });
        }
        let lc = scenarios.level_count;
        if rhat < 1 || rhat > lc {
            return Err(CoreError::InvalidArgument(format!("r-hat {rhat} outside 1..={lc}")));
        }
        let mut service = Vec::new();
        for (id, &level) in &options.service_levels {
            let n = network.bus_index(id)?;
            if network.buses()[n].p_load <= 0.0 {
                return Err(CoreError::InvalidArgument(format!("service level on bus `{id}` without load")));
            }
            if !(0.0..=1.0).contains(&level) {
                return Err(CoreError::InvalidArgument(format!("service level {level} outside [0, 1]")));
            }
            service.push((n, level));
        }
        if options.fold_constant && !service.is_empty() {
            return Err(CoreError::InvalidArgument("folding constant scenarios is incompatible with service levels".into()));
        }

        let mut b = Builder { net: network, weights, relax: options.relax_status, p: MilpProblem::new("extensive_form") };
        let mut x = Vec::with_capacity(k_count);
        let mut budget_terms = Vec::new();
        for (k, sub) in network.substations().iter().enumerate() {
            let row: Vec<usize> = (1..=lc).map(|r| b.p.add_binary(format!("x_{}_{r}", sub.id), 0.0)).collect();
            for r in rhat..=lc {
                b.p.set_bounds(row[r as usize - 1], 0.0, 0.0);
            }
            for r in 1..lc as usize {
                b.row(format!("cumulative_{}_{}", sub.id, r + 1), vec![(row[r], 1.0), (row[r - 1], -1.0)], Sense::Le, 0.0)?;
            }
            budget_terms.extend((1..=lc).map(|r| (row[r as usize - 1], schedule.cost(k, r) as f64)));
            x.push(row);
        }
        let budget_row = b.row("budget".into(), budget_terms, Sense::Le, budget as f64)?;

        let mut groups: Vec<(Vec<u32>, f64, Vec<usize>)> = Vec::new();
        for (i, s) in scenarios.scenarios.iter().enumerate() {
            let eff = effective_levels(&s.levels, lc, rhat);
            match groups.iter_mut().find(|g| options.merge_identical && g.0 == eff) {
                Some(g) => {
                    g.1 += s.probability;
                    g.2.push(i);
                }
                None => groups.push((eff, s.probability, vec![i])),
            }
        }

        let mut blocks = Vec::with_capacity(groups.len());
        for (levels, prob, members) in groups {
            let tag = scenarios.scenarios[members[0]].id.clone();
            let constant = levels.iter().all(|&l| l == 0 || l >= rhat);
            let mut block = if options.fold_constant && constant {
                let alpha: Vec<StatusRef> = levels.iter().map(|&l| StatusRef::Const(l == 0)).collect();
                let status = StatusVector {
                    alpha: (0..network.num_buses()).map(|n| levels[network.bus_substation(n)] == 0).collect(),
                    beta: (0..network.num_branches())
                        .map(|e| {
                            let (n, m) = network.branch_ends(e);
                            levels[network.bus_substation(n)] == 0 && levels[network.bus_substation(m)] == 0
                        })
                        .collect(),
                };
                let loss = solve_recourse_lp(network, &status, weights)?.loss;
                b.p.objective_offset += prob * loss;
                ScenarioBlock {
                    id: tag,
                    probability: prob,
                    members: Vec::new(),
                    alpha,
                    beta: status.beta.iter().map(|&v| StatusRef::Const(v)).collect(),
                    delta: vec![None; network.num_buses()],
                    p_hat: vec![None; network.num_buses()],
                    p_check: vec![None; network.num_buses()],
                    p_flow: vec![None; network.num_branches()],
                    theta: vec![None; network.num_buses()],
                    folded_loss: Some(loss),
                }
            } else {
                b.block(&tag, prob, &levels, &x, rhat)?
            };
            block.members = members;
            blocks.push(block);
        }

        for (n, level) in service {
            let id = &network.buses()[n].id;
            let terms: Vec<(usize, f64)> =
                blocks.iter().filter_map(|blk| blk.delta[n].map(|d| (d, blk.probability))).collect();
            b.row(format!("service_{id}"), terms, Sense::Ge, level)?;
        }

        Ok(ExtensiveForm {
            problem: b.p,
            x,
            blocks,
            budget_row,
            level_count: lc,
            unattainable_level: rhat,
            bus_sub: (0..network.num_buses()).map(|n| network.bus_substation(n)).collect(),
        })
    }

    pub fn stats(&self) -> BuildStats {
        BuildStats {
            variables: self.problem.num_vars(),
            binaries: self.problem.num_binaries(),
            constraints: self.problem.num_rows(),
            blocks: self.blocks.len(),
            folded_blocks: self.blocks.iter().filter(|b| b.folded_loss.is_some()).count(),
        }
    }

    /// Plan binaries in `(k, r)` order.
    pub fn plan_vars(&self) -> Vec<usize> {
        self.x.iter().flatten().copied().collect()
    }

    pub fn plan_from_solution(&self, values: &[f64]) -> MitigationPlan {
        let m = self.x.iter().map(|row| row.iter().map(|&j| values[j] > 0.5).collect()).collect();
        MitigationPlan::from_matrix(m).expect("rectangular")
    }

    /// `(x var, value)` pairs fixing the first stage to `plan`, for warm starts.
    pub fn plan_assignment(&self, plan: &MitigationPlan) -> Result<Vec<(usize, f64)>> {
        self.check_plan(plan)?;
        let mut out = Vec::new();
        for (k, row) in self.x.iter().enumerate() {
            for (r, &j) in row.iter().enumerate() {
                out.push((j, if plan.get(k, r as u32 + 1) { 1.0 } else { 0.0 }));
            }
        }
        Ok(out)
    }

    fn check_plan(&self, plan: &MitigationPlan) -> Result<()> {
        if plan.num_substations() != self.x.len() || plan.level_count() != self.level_count {
            return Err(CoreError::Dimension { expected: self.x.len(), got: plan.num_substations() });
        }
        Ok(())
    }

    /// Bus and branch statuses of `block` at a solution.
    pub fn statuses(&self, block: usize, values: &[f64]) -> StatusVector {
        let blk = &self.blocks[block];
        StatusVector {
            alpha: self.bus_sub.iter().map(|&k| blk.alpha[k].value(values)).collect(),
            beta: blk.beta.iter().map(|s| s.value(values)).collect(),
        }
    }

    /// Fixes every plan binary to `plan`.
    pub fn fix_first_stage(&mut self, plan: &MitigationPlan, schedule: &CostSchedule, budget: u64) -> Result<()> {
        self.check_plan(plan)?;
        if !is_feasible(plan, schedule, budget, self.unattainable_level)? {
            return Err(CoreError::Infeasible("plan violates the first-stage constraints".into()));
        }
        for (j, v) in self.plan_assignment(plan)? {
            self.problem.set_bounds(j, v, v);
        }
        Ok(())
    }

    /// Appends `sum_{x*_kr = 0} x_kr >= 1` and returns the row index.
    pub fn add_no_good_cut(&mut self, plan: &MitigationPlan) -> Result<usize> {
        let terms: Vec<(usize, f64)> = self.plan_assignment(plan)?.into_iter().filter(|&(_, v)| v == 0.0).map(|(j, _)| (j, 1.0)).collect();
        Ok(self.problem.add_constraint("no_good", terms, Sense::Ge, 1.0)?)
    }

    pub fn set_budget(&mut self, budget: u64) {
        self.problem.set_rhs(self.budget_row, budget as f64);
    }

    pub fn to_lp_string(&self) -> String {
        self.problem.to_lp_string()
    }

    /// Solves and decodes the optimal plan.
    pub fn solve(&self, config: &BnbConfig) -> Result<ExtensiveSolution> {
        let milp = solve_milp(&self.problem, config)?;
        if matches!(milp.status, MilpStatus::Infeasible | MilpStatus::Unbounded) {
            return Err(CoreError::Solver(format!("extensive form ended with {:?}", milp.status)));
        }
        let plan = milp.x.as_ref().map(|v| self.plan_from_solution(v));
        Ok(ExtensiveSolution { plan, milp })
    }

    pub fn is_relaxed(&self) -> bool {
        self.blocks
            .iter()
            .flat_map(|b| b.alpha.iter())
            .any(|s| matches!(s, StatusRef::Var(j) if self.problem.var(*j).kind == VarKind::Continuous))
    }
}

#[derive(Debug, Clone)]
pub struct ExtensiveSolution {
    pub plan: Option<MitigationPlan>,
    pub milp: MilpSolution,
}

fn unit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Linear status rows of one substation on binary data:
/// `alpha >= sum_r (1 - xi_r (1 - x_r)) - |R| + 1` and `alpha <= 1 - xi_r (1 - x_r)` for every `r`.
pub fn status_rows_hold(xi: &[bool], x: &[bool], alpha: bool) -> bool {
    let terms: Vec<f64> = xi.iter().zip(x).map(|(&s, &v)| 1.0 - unit(s) * (1.0 - unit(v))).collect();
    let a = unit(alpha);
    a >= terms.iter().sum::<f64>() - xi.len() as f64 + 1.0 && terms.iter().all(|&t| a <= t)
}

/// Linear branch rows: `beta >= alpha_n + alpha_m - 1`, `beta <= alpha_n`, `beta <= alpha_m`.
pub fn branch_rows_hold(alpha_n: bool, alpha_m: bool, beta: bool) -> bool {
    let (a, b, c) = (unit(alpha_n), unit(alpha_m), unit(beta));
    c >= a + b - 1.0 && c <= a && c <= b
}
