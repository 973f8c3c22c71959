//! First-stage decisions: cumulative barrier levels per substation, costs and budgets.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::grid_model::GridNetwork;
use crate::scenario_model::FloodScenarioSet;

const ENUMERATION_GUARD: u128 = 10_000_000;

/// Marginal cost `c_kr = base_units[k] * r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostSchedule {
    base_units: Vec<u32>,
}

impl CostSchedule {
    pub fn new(base_units: Vec<u32>) -> Result<Self> {
        if base_units.contains(&0) {
            return Err(CoreError::InvalidArgument("base units must be at least 1".into()));
        }
        Ok(CostSchedule { base_units })
    }

    /// Base units from each substation's voltage class.
    pub fn from_network(network: &GridNetwork) -> Self {
        CostSchedule { base_units: network.substations().iter().map(|s| s.voltage_class.base_units()).collect() }
    }

    pub fn num_substations(&self) -> usize {
        self.base_units.len()
    }

    pub fn base_units(&self, k: usize) -> u32 {
        self.base_units[k]
    }

    /// Marginal cost of level `r` (1-based) at substation `k`.
    pub fn cost(&self, k: usize, r: u32) -> u64 {
        u64::from(self.base_units[k]) * u64::from(r)
    }

    /// Total cost of raising substation `k` from nothing to `level`.
    pub fn cost_to_level(&self, k: usize, level: u32) -> u64 {
        let l = u64::from(level);
        u64::from(self.base_units[k]) * l * (l + 1) / 2
    }
}

/// Binary matrix `x[k][r-1]` over substations and levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MitigationPlan {
    x: Vec<Vec<bool>>,
}

impl MitigationPlan {
    pub fn zeros(num_substations: usize, level_count: u32) -> Self {
        MitigationPlan { x: vec![vec![false; level_count as usize]; num_substations] }
    }

    pub fn from_levels(levels: &[u32], level_count: u32) -> Result<Self> {
        if let Some(&l) = levels.iter().find(|&&l| l > level_count) {
            return Err(CoreError::InvalidArgument(format!("level {l} exceeds level count {level_count}")));
        }
        Ok(MitigationPlan { x: levels.iter().map(|&l| (1..=level_count).map(|r| r <= l).collect()).collect() })
    }

    pub fn from_matrix(x: Vec<Vec<bool>>) -> Result<Self> {
        if let Some(first) = x.first() {
            if x.iter().any(|row| row.len() != first.len()) {
                return Err(CoreError::Dimension { expected: first.len(), got: 0 });
            }
        }
        Ok(MitigationPlan { x })
    }

    pub fn num_substations(&self) -> usize {
        self.x.len()
    }

    pub fn level_count(&self) -> u32 {
        self.x.first().map_or(0, |r| r.len() as u32)
    }

    /// `x_kr` for a 1-based level `r`; levels above the matrix read as 0.
    pub fn get(&self, k: usize, r: u32) -> bool {
        r >= 1 && self.x[k].get(r as usize - 1).copied().unwrap_or(false)
    }

    pub fn set(&mut self, k: usize, r: u32, value: bool) {
        self.x[k][r as usize - 1] = value;
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.x
    }

    /// Number of leading protected levels at `k`.
    pub fn level(&self, k: usize) -> u32 {
        self.x[k].iter().take_while(|&&v| v).count() as u32
    }

    pub fn levels(&self) -> Vec<u32> {
        (0..self.x.len()).map(|k| self.level(k)).collect()
    }

    pub fn is_cumulative(&self) -> bool {
        self.x.iter().all(|row| row.windows(2).all(|w| w[0] || !w[1]))
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().all(|row| row.iter().all(|&v| !v))
    }

    /// Elementwise `self >= other`.
    pub fn dominates(&self, other: &MitigationPlan) -> bool {
        self.x.iter().zip(&other.x).all(|(a, b)| a.iter().zip(b).all(|(&u, &v)| u || !v))
    }

    pub fn with_level(&self, k: usize, level: u32) -> MitigationPlan {
        let mut out = self.clone();
        for r in 1..=self.level_count() {
            out.set(k, r, r <= level);
        }
        out
    }

    /// `{substation id: level}` for protected substations.
    pub fn to_level_map(&self, network: &GridNetwork) -> BTreeMap<String, u32> {
        (0..self.x.len())
            .filter(|&k| self.level(k) > 0)
            .map(|k| (network.substations()[k].id.clone(), self.level(k)))
            .collect()
    }

    pub fn from_level_map(map: &BTreeMap<String, u32>, network: &GridNetwork, level_count: u32) -> Result<Self> {
        let mut levels = vec![0; network.num_substations()];
        for (id, &l) in map {
            levels[network.substation_index(id)?] = l;
        }
        Self::from_levels(&levels, level_count)
    }
}

impl serde::Serialize for MitigationPlan {
    /// Serialized as the level per substation.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.levels().serialize(serializer)
    }
}

fn check_dims(plan: &MitigationPlan, schedule: &CostSchedule) -> Result<()> {
    if plan.num_substations() != schedule.num_substations() {
        return Err(CoreError::Dimension { expected: schedule.num_substations(), got: plan.num_substations() });
    }
    Ok(())
}

/// `sum_k sum_r c_kr x_kr`.
pub fn plan_cost(plan: &MitigationPlan, schedule: &CostSchedule) -> Result<u64> {
    check_dims(plan, schedule)?;
    let mut total = 0;
    for k in 0..plan.num_substations() {
        for r in 1..=plan.level_count() {
            if plan.get(k, r) {
                total += schedule.cost(k, r);
            }
        }
    }
    Ok(total)
}

/// Cumulative levels, nothing at or above `rhat`, and cost within `budget`.
pub fn is_feasible(plan: &MitigationPlan, schedule: &CostSchedule, budget: u64, rhat: u32) -> Result<bool> {
    check_dims(plan, schedule)?;
    if !plan.is_cumulative() {
        return Ok(false);
    }
    for k in 0..plan.num_substations() {
        for r in rhat.max(1)..=plan.level_count() {
            if plan.get(k, r) {
                return Ok(false);
            }
        }
    }
    Ok(plan_cost(plan, schedule)? <= budget)
}

/// Cost of protecting every substation against its worst flood below `rhat`.
pub fn max_useful_budget(scenarios: &FloodScenarioSet, schedule: &CostSchedule, rhat: u32) -> u64 {
    (0..schedule.num_substations())
        .map(|k| {
            let worst = scenarios
                .scenarios
                .iter()
                .map(|s| s.levels[k].min(scenarios.level_count))
                .filter(|&l| l < rhat)
                .max()
                .unwrap_or(0);
            schedule.cost_to_level(k, worst.min(rhat.saturating_sub(1)))
        })
        .sum()
}

/// Every feasible plan that is zero outside `subset`.
pub struct PlanIter<'a> {
    schedule: &'a CostSchedule,
    subset: Vec<usize>,
    budget: u64,
    max_level: u32,
    level_count: u32,
    digits: Vec<u32>,
    done: bool,
}

impl Iterator for PlanIter<'_> {
    type Item = MitigationPlan;

    fn next(&mut self) -> Option<MitigationPlan> {
        while !self.done {
            let cost: u64 =
                self.subset.iter().zip(&self.digits).map(|(&k, &l)| self.schedule.cost_to_level(k, l)).sum();
            let mut levels = vec![0; self.schedule.num_substations()];
            for (&k, &l) in self.subset.iter().zip(&self.digits) {
                levels[k] = l;
            }
            let mut i = 0;
            loop {
                if i == self.digits.len() {
                    self.done = true;
                    break;
                }
                if self.digits[i] < self.max_level {
                    self.digits[i] += 1;
                    break;
                }
                self.digits[i] = 0;
                i += 1;
            }
            if cost <= self.budget {
                return Some(MitigationPlan::from_levels(&levels, self.level_count).expect("levels below r-hat"));
            }
        }
        None
    }
}

pub fn enumerate_plans<'a>(
    schedule: &'a CostSchedule,
    budget: u64,
    rhat: u32,
    level_count: u32,
    subset: &[usize],
) -> Result<PlanIter<'a>> {
    if rhat < 1 || rhat > level_count {
        return Err(CoreError::InvalidArgument(format!("r-hat {rhat} outside 1..={level_count}")));
    }
    if let Some(&k) = subset.iter().find(|&&k| k >= schedule.num_substations()) {
        return Err(CoreError::Dimension { expected: schedule.num_substations(), got: k + 1 });
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let count = u128::from(rhat).checked_pow(subset.len() as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_GUARD {
        return Err(CoreError::EnumerationTooLarge(count));
    }
    Ok(PlanIter {
        schedule,
        digits: vec![0; subset.len()],
        subset,
        budget,
        max_level: rhat - 1,
        level_count,
        done: false,
    })
}
