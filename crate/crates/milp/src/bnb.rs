//! Best-bound branch-and-bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::problem::{MilpProblem, Sense, VarKind};
use crate::simplex::{Basis, LpEngine, LpStatus};
use crate::MilpError;

const MIN_PRUNE_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    #[default]
    MostFractional,
    PseudoCost,
}

#[derive(Debug, Clone)]
pub struct BnbConfig {
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub int_tol: f64,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    pub branching: Branching,
    /// Partial assignments `(variable, value)` tried before the search starts.
    pub warm_starts: Vec<Vec<(usize, f64)>>,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            abs_gap: 0.0,
            rel_gap: 0.0,
            int_tol: 1e-6,
            node_limit: None,
            time_limit: None,
            branching: Branching::MostFractional,
            warm_starts: Vec::new(),
        }
    }
}

impl BnbConfig {
    pub fn validate(&self) -> Result<(), MilpError> {
        for (name, v) in [("abs_gap", self.abs_gap), ("rel_gap", self.rel_gap), ("int_tol", self.int_tol)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(MilpError::InvalidBounds { name: name.to_string(), lower: v, upper: v });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    GapLimit,
    NodeLimit,
    TimeLimit,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub x: Option<Vec<f64>>,
    /// Incumbent objective, `+inf` without an incumbent.
    pub objective: f64,
    /// Proven lower bound.
    pub bound: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub numerical_failures: usize,
    /// Best objective among the feasible warm starts, if any.
    pub warm_start_objective: Option<f64>,
    /// `(nodes processed, global bound, incumbent)` recorded whenever either value changes.
    pub bound_history: Vec<(usize, f64, f64)>,
    pub elapsed: Duration,
}

impl MilpSolution {
    pub fn gap(&self) -> f64 {
        (self.objective - self.bound).max(0.0)
    }
}

struct Node {
    bound: f64,
    seq: usize,
    changes: Vec<(usize, f64, f64)>,
    basis: Option<Basis>,
    /// Distance the branching variable was moved to reach this node.
    step: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // reversed so that BinaryHeap pops the smallest bound, oldest first
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct PseudoCosts {
    sum: Vec<[f64; 2]>,
    count: Vec<[usize; 2]>,
}

impl PseudoCosts {
    fn new(n: usize) -> Self {
        PseudoCosts { sum: vec![[0.0; 2]; n], count: vec![[0; 2]; n] }
    }

    fn record(&mut self, j: usize, dir: usize, gain: f64, frac: f64) {
        if frac > 1e-9 {
            self.sum[j][dir] += gain.max(0.0) / frac;
            self.count[j][dir] += 1;
        }
    }

    fn estimate(&self, j: usize, dir: usize) -> f64 {
        if self.count[j][dir] == 0 {
            let total: f64 = self.sum.iter().map(|s| s[dir]).sum();
            let cnt: usize = self.count.iter().map(|c| c[dir]).sum();
            if cnt == 0 {
                1.0
            } else {
                total / cnt as f64
            }
        } else {
            self.sum[j][dir] / self.count[j][dir] as f64
        }
    }
}

fn is_integral(problem: &MilpProblem, x: &[f64], tol: f64) -> bool {
    problem.binaries().all(|j| (x[j] - x[j].round()).abs() <= tol)
}

fn round_binaries(problem: &MilpProblem, x: &mut [f64]) {
    for j in problem.binaries() {
        x[j] = x[j].round();
    }
}

/// Solves `problem` to optimality (or until a limit) by branch-and-bound.
pub fn solve_milp(problem: &MilpProblem, config: &BnbConfig) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    config.validate()?;
    let start = Instant::now();
    let mut engine = LpEngine::new(problem);
    let base_bounds: Vec<(f64, f64)> = (0..problem.num_vars()).map(|j| engine.var_bounds(j)).collect();
    let prune_tol = config.abs_gap.max(MIN_PRUNE_TOL);
    let mut incumbent: Option<Vec<f64>> = None;
    let mut inc_obj = f64::INFINITY;
    let mut numerical_failures = 0usize;
    let mut warm_start_objective: Option<f64> = None;

    for hint in &config.warm_starts {
        for &(j, v) in hint {
            if j >= problem.num_vars() {
                return Err(MilpError::UnknownVariable { row: "warm start".into(), var: j });
            }
            engine.set_var_bounds(j, v, v);
        }
        let lp = engine.solve();
        for &(j, _) in hint {
            engine.set_var_bounds(j, base_bounds[j].0, base_bounds[j].1);
        }
        if lp.status != LpStatus::Optimal {
            log::debug!("warm start rejected: {:?}", lp.status);
            continue;
        }
        let mut x = lp.x;
        if !is_integral(problem, &x, config.int_tol) {
            log::debug!("warm start leaves fractional binaries; ignored");
            continue;
        }
        round_binaries(problem, &mut x);
        if problem.max_violation(&x) > FEAS_TOL {
            continue;
        }
        let obj = problem.objective_value(&x);
        warm_start_objective = Some(warm_start_objective.map_or(obj, |w: f64| w.min(obj)));
        if obj < inc_obj {
            inc_obj = obj;
            incumbent = Some(x);
        }
    }
    engine.reset_basis();

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node { bound: f64::NEG_INFINITY, seq, changes: Vec::new(), basis: None, step: 0.0 });
    let mut nodes = 0usize;
    let mut history: Vec<(usize, f64, f64)> = Vec::new();
    let mut global_bound = f64::NEG_INFINITY;
    let mut pseudo = PseudoCosts::new(problem.num_vars());
    let mut status = None;
    let mut applied: Vec<usize> = Vec::new();

    let record = |history: &mut Vec<(usize, f64, f64)>, nodes: usize, bound: f64, inc: f64| {
        if history.last().is_none_or(|&(_, b, i)| b != bound || i != inc) {
            history.push((nodes, bound, inc));
        }
    };

    while let Some(node) = heap.peek() {
        let node_bound = node.bound;
        if node_bound >= inc_obj - prune_tol {
            heap.clear();
            break;
        }
        if node_bound > global_bound {
            global_bound = node_bound;
        }
        record(&mut history, nodes, global_bound.min(inc_obj), inc_obj);
        if inc_obj.is_finite() && config.rel_gap > 0.0 && inc_obj - global_bound <= config.rel_gap * inc_obj.abs().max(1.0)
        {
            status = Some(MilpStatus::GapLimit);
            break;
        }
        if config.node_limit.is_some_and(|lim| nodes >= lim) {
            status = Some(MilpStatus::NodeLimit);
            break;
        }
        if config.time_limit.is_some_and(|lim| start.elapsed() >= lim) {
            status = Some(MilpStatus::TimeLimit);
            break;
        }
        let node = heap.pop().expect("peeked");

        for &j in &applied {
            engine.set_var_bounds(j, base_bounds[j].0, base_bounds[j].1);
        }
        applied.clear();
        for &(j, lo, hi) in &node.changes {
            engine.set_var_bounds(j, lo, hi);
            applied.push(j);
        }
        if let Some(b) = &node.basis {
            engine.set_basis(b);
        }
        let mut lp = engine.solve();
        if matches!(lp.status, LpStatus::NumericalFailure | LpStatus::IterationLimit) {
            engine.reset_basis();
            lp = engine.solve();
        }
        nodes += 1;
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if node.changes.is_empty() {
                    status = Some(MilpStatus::Unbounded);
                    break;
                }
                continue;
            }
            LpStatus::NumericalFailure | LpStatus::IterationLimit => {
                numerical_failures += 1;
                log::warn!("node LP failed with {:?}; node dropped", lp.status);
                continue;
            }
        }
        let obj = lp.objective;
        if let Some(&(j, lo, _)) = node.changes.last() {
            if node.bound.is_finite() {
                pseudo.record(j, usize::from(lo > 0.5), obj - node.bound, node.step);
            }
        }
        if obj >= inc_obj - prune_tol {
            continue;
        }

        let mut branch_var = None;
        let mut best_score = f64::NEG_INFINITY;
        for j in problem.binaries() {
            let v = lp.x[j];
            let frac = v - v.floor();
            if frac <= config.int_tol || frac >= 1.0 - config.int_tol {
                continue;
            }
            let score = match config.branching {
                Branching::MostFractional => 0.5 - (frac - 0.5).abs(),
                Branching::PseudoCost => {
                    let down = pseudo.estimate(j, 0) * frac;
                    let up = pseudo.estimate(j, 1) * (1.0 - frac);
                    down.min(up).max(1e-6) * down.max(up).max(1e-6)
                }
            };
            if score > best_score + 1e-12 {
                best_score = score;
                branch_var = Some(j);
            }
        }

        match branch_var {
            None => {
                let mut x = lp.x;
                round_binaries(problem, &mut x);
                let val = problem.objective_value(&x);
                if problem.max_violation(&x) > FEAS_TOL {
                    log::warn!("rounded LP point violates constraints by {:.2e}", problem.max_violation(&x));
                }
                if val < inc_obj {
                    inc_obj = val;
                    incumbent = Some(x);
                    log::debug!("node {nodes}: new incumbent {val}");
                }
            }
            Some(j) => {
                let basis = engine.basis();
                let frac = lp.x[j] - lp.x[j].floor();
                for (v, step) in [(0.0, frac), (1.0, 1.0 - frac)] {
                    let mut changes = node.changes.clone();
                    changes.push((j, v, v));
                    seq += 1;
                    heap.push(Node { bound: obj, seq, changes, basis: Some(basis.clone()), step });
                }
            }
        }
    }

    let remaining = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let status = match status {
        Some(s) => s,
        None if incumbent.is_some() => MilpStatus::Optimal,
        None => MilpStatus::Infeasible,
    };
    let bound = match status {
        MilpStatus::Optimal => inc_obj,
        MilpStatus::Infeasible => f64::INFINITY,
        MilpStatus::Unbounded => f64::NEG_INFINITY,
        _ => remaining.min(inc_obj).max(global_bound),
    };
    record(&mut history, nodes, bound.min(inc_obj), inc_obj);
    let sol = MilpSolution {
        status,
        x: incumbent,
        objective: inc_obj,
        bound,
        nodes,
        lp_iterations: engine.total_iterations(),
        numerical_failures,
        warm_start_objective,
        bound_history: history,
        elapsed: start.elapsed(),
    };
    log::info!(
        "milp `{}`: {:?} obj={} bound={} nodes={} lp_iters={}",
        problem.name,
        sol.status,
        sol.objective,
        sol.bound,
        sol.nodes,
        sol.lp_iterations
    );
    Ok(sol)
}

#[derive(Debug, Clone)]
pub struct Uniqueness {
    pub unique: bool,
    pub optimum: f64,
    /// Optimum of the problem with the no-good cut, `+inf` when the cut makes it infeasible.
    pub cut_objective: f64,
    pub witness: Option<Vec<f64>>,
    pub cut_status: MilpStatus,
}

/// Adds the cut `sum_{j in vars, x*_j = 0} x_j >= 1` and re-solves.
pub fn check_uniqueness(
    problem: &MilpProblem,
    x_star: &[f64],
    vars: &[usize],
    config: &BnbConfig,
) -> Result<Uniqueness, MilpError> {
    if x_star.len() != problem.num_vars() {
        return Err(MilpError::DimensionMismatch { expected: problem.num_vars(), got: x_star.len() });
    }
    for &j in vars {
        if j >= problem.num_vars() || problem.var(j).kind != VarKind::Binary {
            return Err(MilpError::UnknownVariable { row: "no-good cut".into(), var: j });
        }
    }
    let optimum = problem.objective_value(x_star);
    let terms: Vec<(usize, f64)> = vars.iter().filter(|&&j| x_star[j] < 0.5).map(|&j| (j, 1.0)).collect();
    if terms.is_empty() {
        return Ok(Uniqueness {
            unique: true,
            optimum,
            cut_objective: f64::INFINITY,
            witness: None,
            cut_status: MilpStatus::Infeasible,
        });
    }
    let mut cut = problem.clone();
    cut.add_constraint("no_good", terms, Sense::Ge, 1.0)?;
    let sol = solve_milp(&cut, config)?;
    let unique = match sol.status {
        MilpStatus::Infeasible => true,
        _ => sol.objective > optimum + 1e-6,
    };
    Ok(Uniqueness {
        unique,
        optimum,
        cut_objective: sol.objective,
        witness: if unique { None } else { sol.x },
        cut_status: sol.status,
    })
}
