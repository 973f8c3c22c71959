//! Bounded-variable dual simplex.
//!
//! Rows are handled in the form `A x - r = 0`, where the logical variable
//! `r_i` carries the bounds of row `i`. Infinite bounds are replaced by wide
//! artificial boxes so that every nonbasic variable can be parked at the bound
//! matching the sign of its reduced cost; this makes any basis dual feasible
//! and lets a single dual phase do all the work. Artificial boxes that end up
//! binding at the optimum signal unboundedness.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::lu::LuFactor;
use crate::problem::{MilpProblem, Sense};
use crate::DUALITY_GAP_TOL;

const BIG: f64 = 1e7;
const BIG_CAP: f64 = 1e11;
const REFACTOR_EVERY: usize = 100;
const BLAND_STREAK: usize = 50;
const NONE: usize = usize::MAX;

static OPTIMAL_SOLVES: AtomicUsize = AtomicUsize::new(0);
static GAP_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// Process-wide counts of LP solves that reached optimality and of those whose
/// primal and dual objectives disagreed by more than [`DUALITY_GAP_TOL`].
pub fn lp_audit() -> (usize, usize) {
    (OPTIMAL_SOLVES.load(Ordering::Relaxed), GAP_FAILURES.load(Ordering::Relaxed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

/// Status of every structural variable followed by every row logical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub status: Vec<VarStatus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpTolerances {
    pub primal: f64,
    pub dual: f64,
    pub pivot: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances { primal: 1e-9, dual: 1e-9, pivot: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub dual_objective: f64,
    pub x: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// Row duals `y`, so that `reduced_costs = c - A^T y`.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

/// Solves the linear relaxation of `problem` from a slack basis.
pub fn solve_lp(problem: &MilpProblem) -> LpSolution {
    LpEngine::new(problem).solve()
}

enum Phase {
    Optimal,
    Infeasible(usize),
    IterationLimit,
    Numerical,
}

/// A reusable LP instance that keeps its basis between solves.
#[derive(Debug, Clone)]
pub struct LpEngine {
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    blo: Vec<f64>,
    bup: Vec<f64>,
    offset: f64,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    x: Vec<f64>,
    d: Vec<f64>,
    y: Vec<f64>,
    weights: Vec<f64>,
    lu: Option<LuFactor>,
    pub tol: LpTolerances,
    pub iteration_limit: usize,
    iterations: usize,
}

fn row_bounds(sense: Sense, rhs: f64) -> (f64, f64) {
    match sense {
        Sense::Le => (f64::NEG_INFINITY, rhs),
        Sense::Ge => (rhs, f64::INFINITY),
        Sense::Eq => (rhs, rhs),
    }
}

fn boxed(lower: f64, upper: f64) -> (f64, f64) {
    let lo = if lower.is_finite() { lower } else if upper.is_finite() { upper.min(0.0) - BIG } else { -BIG };
    let hi = if upper.is_finite() { upper } else { lo.max(0.0) + BIG };
    (lo, hi)
}

impl LpEngine {
    pub fn new(problem: &MilpProblem) -> Self {
        let n = problem.num_vars();
        let m = problem.num_rows();
        let mut cols = vec![Vec::new(); n];
        let mut rows = Vec::with_capacity(m);
        let mut cost = Vec::with_capacity(n + m);
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in problem.vars() {
            cost.push(v.cost);
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for (i, row) in problem.rows().iter().enumerate() {
            for &(j, a) in &row.terms {
                cols[j].push((i, a));
            }
            rows.push(row.terms.clone());
            let (lo, hi) = row_bounds(row.sense, row.rhs);
            cost.push(0.0);
            lower.push(lo);
            upper.push(hi);
        }
        let mut blo = Vec::with_capacity(n + m);
        let mut bup = Vec::with_capacity(n + m);
        for k in 0..n + m {
            let (lo, hi) = boxed(lower[k], upper[k]);
            blo.push(lo);
            bup.push(hi);
        }
        let mut status = Vec::with_capacity(n + m);
        for j in 0..n {
            status.push(Self::default_status(lower[j], upper[j]));
        }
        status.extend(std::iter::repeat_n(VarStatus::Basic, m));
        LpEngine {
            n,
            m,
            cols,
            rows,
            cost,
            lower,
            upper,
            blo,
            bup,
            offset: problem.objective_offset,
            status,
            head: (n..n + m).collect(),
            x: vec![0.0; n + m],
            d: vec![0.0; n + m],
            y: vec![0.0; m],
            weights: vec![1.0; m],
            lu: None,
            tol: LpTolerances::default(),
            iteration_limit: 50 * (n + m) + 10_000,
            iterations: 0,
        }
    }

    fn default_status(lower: f64, upper: f64) -> VarStatus {
        if lower.is_finite() {
            VarStatus::AtLower
        } else if upper.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations
    }

    pub fn var_bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn set_var_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        assert!(j < self.n, "variable index out of range");
        self.lower[j] = lower;
        self.upper[j] = upper;
        let (lo, hi) = boxed(lower, upper);
        self.blo[j] = lo;
        self.bup[j] = hi;
        if self.status[j] == VarStatus::Free && (lower.is_finite() || upper.is_finite()) {
            self.status[j] = Self::default_status(lower, upper);
        }
    }

    /// Appends a row; its logical starts basic. Returns the row index.
    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let i = self.m;
        let mut merged: Vec<(usize, f64)> = Vec::new();
        let mut sorted = terms.to_vec();
        sorted.sort_by_key(|t| t.0);
        for (j, a) in sorted {
            assert!(j < self.n, "variable index out of range");
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        for &(j, a) in &merged {
            self.cols[j].push((i, a));
        }
        self.rows.push(merged);
        let (lo, hi) = row_bounds(sense, rhs);
        let (blo, bup) = boxed(lo, hi);
        self.cost.push(0.0);
        self.lower.push(lo);
        self.upper.push(hi);
        self.blo.push(blo);
        self.bup.push(bup);
        self.status.push(VarStatus::Basic);
        self.head.push(self.n + i);
        self.x.push(0.0);
        self.d.push(0.0);
        self.y.push(0.0);
        self.weights.push(1.0);
        self.m += 1;
        self.lu = None;
        i
    }

    pub fn basis(&self) -> Basis {
        Basis { status: self.status.clone() }
    }

    /// Installs a basis. Returns `false` (leaving the current basis untouched)
    /// when it has the wrong shape. Missing trailing logicals are made basic.
    pub fn set_basis(&mut self, basis: &Basis) -> bool {
        let mut status = basis.status.clone();
        if status.len() > self.n + self.m || status.len() < self.n {
            return false;
        }
        status.resize(self.n + self.m, VarStatus::Basic);
        let head: Vec<usize> = (0..self.n + self.m).filter(|&k| status[k] == VarStatus::Basic).collect();
        if head.len() != self.m {
            return false;
        }
        for (k, s) in status.iter_mut().enumerate() {
            if *s == VarStatus::Free && (self.lower[k].is_finite() || self.upper[k].is_finite()) {
                *s = Self::default_status(self.lower[k], self.upper[k]);
            }
        }
        self.status = status;
        self.head = head;
        self.weights = vec![1.0; self.m];
        self.lu = None;
        true
    }

    pub fn reset_basis(&mut self) {
        for j in 0..self.n {
            self.status[j] = Self::default_status(self.lower[j], self.upper[j]);
        }
        for i in 0..self.m {
            self.status[self.n + i] = VarStatus::Basic;
        }
        self.head = (self.n..self.n + self.m).collect();
        self.weights = vec![1.0; self.m];
        self.lu = None;
    }

    pub fn solve(&mut self) -> LpSolution {
        let start = self.iterations;
        let mut status = self.run();
        let iterations = self.iterations - start;
        let mut sol = self.collect(status, iterations);
        if status == LpStatus::Optimal {
            OPTIMAL_SOLVES.fetch_add(1, Ordering::Relaxed);
            if sol.duality_gap() > DUALITY_GAP_TOL {
                GAP_FAILURES.fetch_add(1, Ordering::Relaxed);
                log::warn!(
                    "duality gap {:.3e} exceeds tolerance (primal {}, dual {})",
                    sol.duality_gap(),
                    sol.objective,
                    sol.dual_objective
                );
                status = LpStatus::NumericalFailure;
                sol.status = status;
            }
        }
        sol
    }

    fn column(&self, k: usize) -> Vec<(usize, f64)> {
        if k < self.n {
            self.cols[k].clone()
        } else {
            vec![(k - self.n, -1.0)]
        }
    }

    fn nonbasic_value(&self, k: usize) -> f64 {
        match self.status[k] {
            VarStatus::AtLower => self.blo[k],
            VarStatus::AtUpper => self.bup[k],
            VarStatus::Free => 0.0,
            VarStatus::Basic => self.x[k],
        }
    }

    fn refactor(&mut self) -> bool {
        for _ in 0..4 {
            let cols: Vec<Vec<(usize, f64)>> = self.head.iter().map(|&k| self.column(k)).collect();
            match LuFactor::factorize(self.m, &cols) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    return true;
                }
                Err(sing) => {
                    log::debug!("basis singular in {} columns, repairing with logicals", sing.positions.len());
                    for (&pos, &row) in sing.positions.iter().zip(&sing.rows) {
                        let out = self.head[pos];
                        self.status[out] = if self.d[out] < 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                        if self.lower[out] == f64::NEG_INFINITY && self.upper[out] == f64::INFINITY {
                            self.status[out] = VarStatus::Free;
                        }
                        self.head[pos] = self.n + row;
                        self.status[self.n + row] = VarStatus::Basic;
                    }
                    self.weights = vec![1.0; self.m];
                }
            }
        }
        false
    }

    fn recompute_primal(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for k in 0..self.n + self.m {
            if self.status[k] == VarStatus::Basic {
                continue;
            }
            let v = self.nonbasic_value(k);
            self.x[k] = v;
            if v == 0.0 {
                continue;
            }
            if k < self.n {
                for &(i, a) in &self.cols[k] {
                    rhs[i] -= a * v;
                }
            } else {
                rhs[k - self.n] += v;
            }
        }
        let xb = self.lu.as_ref().expect("factorized").ftran(&mut rhs);
        for (p, &k) in self.head.iter().enumerate() {
            self.x[k] = xb[p];
        }
    }

    fn recompute_dual(&mut self) {
        let mut cb: Vec<f64> = self.head.iter().map(|&k| self.cost[k]).collect();
        self.y = self.lu.as_ref().expect("factorized").btran(&mut cb);
        for j in 0..self.n {
            let dot: f64 = self.cols[j].iter().map(|&(i, a)| a * self.y[i]).sum();
            self.d[j] = self.cost[j] - dot;
        }
        for i in 0..self.m {
            self.d[self.n + i] = self.y[i];
        }
        for &k in &self.head {
            self.d[k] = 0.0;
        }
    }

    /// Moves nonbasic variables to the bound their reduced cost asks for.
    fn fix_dual_signs(&mut self) -> bool {
        let dtol = self.tol.dual;
        let mut changed = false;
        for k in 0..self.n + self.m {
            let st = self.status[k];
            if st == VarStatus::Basic {
                continue;
            }
            if self.blo[k] == self.bup[k] {
                if st != VarStatus::AtLower {
                    self.status[k] = VarStatus::AtLower;
                    changed = true;
                }
                continue;
            }
            let dk = self.d[k];
            let want = if dk > dtol {
                VarStatus::AtLower
            } else if dk < -dtol {
                VarStatus::AtUpper
            } else {
                st
            };
            if want != st {
                self.status[k] = want;
                changed = true;
            }
        }
        changed
    }

    fn max_primal_infeasibility(&self) -> f64 {
        self.head
            .iter()
            .map(|&k| (self.blo[k] - self.x[k]).max(self.x[k] - self.bup[k]).max(0.0))
            .fold(0.0, f64::max)
    }

    fn run(&mut self) -> LpStatus {
        if !self.refactor() {
            return LpStatus::NumericalFailure;
        }
        self.recompute_dual();
        self.fix_dual_signs();
        self.recompute_primal();
        let mut rounds = 0;
        loop {
            match self.dual_phase() {
                Phase::Optimal => {}
                Phase::IterationLimit => return LpStatus::IterationLimit,
                Phase::Numerical => return LpStatus::NumericalFailure,
                Phase::Infeasible(r) => {
                    if self.widen_artificial_boxes(r) {
                        self.recompute_primal();
                        continue;
                    }
                    return LpStatus::Infeasible;
                }
            }
            if !self.refactor() {
                return LpStatus::NumericalFailure;
            }
            self.recompute_dual();
            let flipped = self.fix_dual_signs();
            self.recompute_primal();
            let infeasible = self.max_primal_infeasibility() > self.tol.primal;
            if (flipped || infeasible) && rounds < 20 {
                rounds += 1;
                continue;
            }
            if infeasible {
                return LpStatus::NumericalFailure;
            }
            for k in 0..self.n + self.m {
                let artificial = match self.status[k] {
                    VarStatus::AtLower => self.lower[k] == f64::NEG_INFINITY,
                    VarStatus::AtUpper => self.upper[k] == f64::INFINITY,
                    _ => false,
                };
                if artificial && self.d[k].abs() > self.tol.dual {
                    return LpStatus::Unbounded;
                }
            }
            return LpStatus::Optimal;
        }
    }

    /// After a dual ray was found in row `r`, widens artificial boxes that the
    /// certificate relied on. Returns `false` when the certificate is genuine.
    fn widen_artificial_boxes(&mut self, r: usize) -> bool {
        let leaving = self.head[r];
        let below = self.x[leaving] < self.blo[leaving];
        let s = if below { 1.0 } else { -1.0 };
        let ar = self.pivot_row(r).1;
        let mut widened = false;
        let mut candidates: Vec<usize> = (0..self.n + self.m)
            .filter(|&k| self.status[k] != VarStatus::Basic)
            .filter(|&k| {
                let abar = s * ar[k];
                match self.status[k] {
                    VarStatus::AtLower => abar > self.tol.pivot && self.lower[k] == f64::NEG_INFINITY,
                    VarStatus::AtUpper => abar < -self.tol.pivot && self.upper[k] == f64::INFINITY,
                    _ => false,
                }
            })
            .collect();
        if self.lower[leaving] == f64::NEG_INFINITY && below || self.upper[leaving] == f64::INFINITY && !below {
            candidates.push(leaving);
        }
        for k in candidates {
            if self.lower[k] == f64::NEG_INFINITY && self.blo[k] > -BIG_CAP {
                self.blo[k] *= 100.0;
                widened = true;
            }
            if self.upper[k] == f64::INFINITY && self.bup[k] < BIG_CAP {
                self.bup[k] *= 100.0;
                widened = true;
            }
        }
        widened
    }

    /// Returns `rho = B^-T e_r` and the pivot row `alpha_r` over all columns.
    fn pivot_row(&self, r: usize) -> (Vec<f64>, Vec<f64>) {
        let mut e = vec![0.0; self.m];
        e[r] = 1.0;
        let rho = self.lu.as_ref().expect("factorized").btran(&mut e);
        let mut ar = vec![0.0; self.n + self.m];
        for (i, &ri) in rho.iter().enumerate() {
            if ri.abs() <= 1e-14 {
                continue;
            }
            for &(j, a) in &self.rows[i] {
                ar[j] += ri * a;
            }
            ar[self.n + i] = -ri;
        }
        (rho, ar)
    }

    fn dual_phase(&mut self) -> Phase {
        let ptol = self.tol.primal;
        let dtol = self.tol.dual;
        let ptiv = self.tol.pivot;
        let mut streak = 0usize;
        let mut retries = 0usize;
        loop {
            if self.iterations >= self.iteration_limit {
                return Phase::IterationLimit;
            }
            let bland = streak > BLAND_STREAK;

            let mut r = NONE;
            let mut best = 0.0;
            for (p, &k) in self.head.iter().enumerate() {
                let xk = self.x[k];
                let infeas = if xk < self.blo[k] - ptol {
                    self.blo[k] - xk
                } else if xk > self.bup[k] + ptol {
                    xk - self.bup[k]
                } else {
                    continue;
                };
                if bland {
                    if r == NONE || k < self.head[r] {
                        r = p;
                    }
                } else {
                    let score = infeas * infeas / self.weights[p];
                    if score > best {
                        best = score;
                        r = p;
                    }
                }
            }
            if r == NONE {
                return Phase::Optimal;
            }
            let leaving = self.head[r];
            let below = self.x[leaving] < self.blo[leaving];
            let s = if below { 1.0 } else { -1.0 };
            let (rho, ar) = self.pivot_row(r);

            let eligible = |k: usize, st: VarStatus, abar: f64| -> Option<f64> {
                match st {
                    VarStatus::AtLower if abar < -ptiv => Some(self.d[k]),
                    VarStatus::AtUpper if abar > ptiv => Some(-self.d[k]),
                    VarStatus::Free if abar.abs() > ptiv => Some(0.0),
                    _ => None,
                }
            };
            let mut q = NONE;
            if bland {
                let mut tmin = f64::INFINITY;
                for k in 0..self.n + self.m {
                    let st = self.status[k];
                    if st == VarStatus::Basic || self.blo[k] == self.bup[k] {
                        continue;
                    }
                    let abar = s * ar[k];
                    if let Some(slack) = eligible(k, st, abar) {
                        let t = slack.max(0.0) / abar.abs();
                        if t < tmin - 1e-12 {
                            tmin = t;
                            q = k;
                        }
                    }
                }
            } else {
                let mut tmax = f64::INFINITY;
                for k in 0..self.n + self.m {
                    let st = self.status[k];
                    if st == VarStatus::Basic || self.blo[k] == self.bup[k] {
                        continue;
                    }
                    let abar = s * ar[k];
                    if let Some(slack) = eligible(k, st, abar) {
                        tmax = tmax.min((slack.max(0.0) + dtol) / abar.abs());
                    }
                }
                let mut amax = 0.0;
                for k in 0..self.n + self.m {
                    let st = self.status[k];
                    if st == VarStatus::Basic || self.blo[k] == self.bup[k] {
                        continue;
                    }
                    let abar = s * ar[k];
                    if let Some(slack) = eligible(k, st, abar) {
                        if slack.max(0.0) / abar.abs() <= tmax && abar.abs() > amax {
                            amax = abar.abs();
                            q = k;
                        }
                    }
                }
            }
            if q == NONE {
                return Phase::Infeasible(r);
            }

            let mut rhs = vec![0.0; self.m];
            for (i, a) in self.column(q) {
                rhs[i] = a;
            }
            let lu = self.lu.as_ref().expect("factorized");
            let alpha = lu.ftran(&mut rhs);
            let arq = alpha[r];
            if (arq - ar[q]).abs() > 1e-7 * (1.0 + arq.abs()) || arq.abs() < 1e-12 {
                retries += 1;
                if retries > 5 || !self.refactor() {
                    return Phase::Numerical;
                }
                self.recompute_dual();
                self.fix_dual_signs();
                self.recompute_primal();
                continue;
            }

            let theta_d = self.d[q] / arq;
            if theta_d != 0.0 {
                for k in 0..self.n + self.m {
                    if self.status[k] != VarStatus::Basic && ar[k] != 0.0 {
                        self.d[k] -= theta_d * ar[k];
                    }
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;
            // keep nonbasic reduced costs consistent with their bound side
            for k in 0..self.n + self.m {
                let st = self.status[k];
                if st == VarStatus::AtLower && self.d[k] < 0.0 && self.d[k] > -dtol {
                    self.d[k] = 0.0;
                } else if st == VarStatus::AtUpper && self.d[k] > 0.0 && self.d[k] < dtol {
                    self.d[k] = 0.0;
                }
            }

            let target = if below { self.blo[leaving] } else { self.bup[leaving] };
            let theta_p = (self.x[leaving] - target) / arq;
            for (p, &k) in self.head.iter().enumerate() {
                if alpha[p] != 0.0 {
                    self.x[k] -= theta_p * alpha[p];
                }
            }
            self.x[q] += theta_p;
            self.x[leaving] = target;

            let mut rho_rhs = rho;
            let tau = lu.ftran(&mut rho_rhs);
            let wr = self.weights[r];
            for p in 0..self.m {
                if p == r {
                    continue;
                }
                let ratio = alpha[p] / arq;
                if ratio != 0.0 {
                    self.weights[p] = (self.weights[p] - 2.0 * ratio * tau[p] + ratio * ratio * wr).max(1e-8);
                }
            }
            self.weights[r] = (wr / (arq * arq)).max(1e-8);

            self.status[leaving] = if below { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.status[q] = VarStatus::Basic;
            self.head[r] = q;
            self.lu.as_mut().expect("factorized").push_eta(r, &alpha);
            self.iterations += 1;

            if theta_d.abs() <= 1e-12 {
                streak += 1;
            } else {
                streak = 0;
            }

            if self.lu.as_ref().expect("factorized").num_etas() >= REFACTOR_EVERY {
                if !self.refactor() {
                    return Phase::Numerical;
                }
                self.recompute_dual();
                self.fix_dual_signs();
                self.recompute_primal();
            }
        }
    }

    fn collect(&self, status: LpStatus, iterations: usize) -> LpSolution {
        let n = self.n;
        let x: Vec<f64> = self.x[..n].to_vec();
        let objective = self.offset + (0..n).map(|j| self.cost[j] * x[j]).sum::<f64>();
        let row_activity: Vec<f64> = self.rows.iter().map(|row| row.iter().map(|&(j, a)| a * x[j]).sum()).collect();
        let dtol = self.tol.dual;
        let mut dual_objective = self.offset;
        for k in 0..n + self.m {
            let dk = self.d[k];
            let contrib = if self.status[k] == VarStatus::Basic {
                0.0
            } else if dk > dtol {
                dk * self.lower[k]
            } else if dk < -dtol {
                dk * self.upper[k]
            } else {
                dk * self.x[k]
            };
            dual_objective += contrib;
        }
        if !dual_objective.is_finite() {
            dual_objective = f64::NEG_INFINITY;
        }
        LpSolution {
            status,
            objective,
            dual_objective,
            x,
            row_activity,
            duals: self.y.clone(),
            reduced_costs: self.d[..n].to_vec(),
            iterations,
        }
    }
}
