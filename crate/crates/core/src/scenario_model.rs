//! Flooding scenarios: per-substation flood levels with probabilities.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid_model::GridNetwork;

const PROBABILITY_TOL: f64 = 1e-9;

/// Cumulative protection heights (meters) for levels 1, 2, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthThresholds(Vec<f64>);

impl DepthThresholds {
    pub fn new(heights: Vec<f64>) -> Result<Self> {
        if heights.is_empty() {
            return Err(CoreError::InvalidArgument("at least one depth threshold is required".into()));
        }
        if heights[0] <= 0.0 || heights.windows(2).any(|w| w[1] <= w[0]) || heights.iter().any(|h| !h.is_finite()) {
            return Err(CoreError::InvalidArgument("depth thresholds must be positive and strictly increasing".into()));
        }
        Ok(DepthThresholds(heights))
    }

    /// Barrier stack heights of 0.534 m, 1 m and 1.464 m.
    pub fn barrier_stack() -> Self {
        DepthThresholds(vec![0.534, 1.0, 1.464])
    }

    pub fn heights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Flood level for a water depth: 0 when dry, otherwise the first level whose
/// height covers the depth, or `len + 1` above the top threshold.
pub fn depth_to_level(depth: f64, thresholds: &DepthThresholds) -> Result<u32> {
    if !(depth >= 0.0) {
        return Err(CoreError::InvalidArgument(format!("negative depth {depth}")));
    }
    if depth == 0.0 {
        return Ok(0);
    }
    let r = thresholds.0.iter().position(|&h| depth <= h).unwrap_or(thresholds.0.len());
    Ok(r as u32 + 1)
}

/// Cumulative indicator row `xi_r = (r <= level)` for `r = 1..=level_count`.
pub fn level_to_indicators(level: u32, level_count: u32) -> Vec<bool> {
    (1..=level_count).map(|r| r <= level).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloodScenario {
    pub id: String,
    pub probability: f64,
    /// Flood level per substation index.
    pub levels: Vec<u32>,
}

impl FloodScenario {
    /// `xi_{k r}` for a 1-based level `r`.
    pub fn flooded(&self, k: usize, r: u32) -> bool {
        r >= 1 && self.levels[k] >= r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloodScenarioSet {
    pub level_count: u32,
    pub unattainable_level: u32,
    pub scenarios: Vec<FloodScenario>,
}

impl FloodScenarioSet {
    /// Validates probabilities and dimensions against `num_substations`.
    pub fn new(
        level_count: u32,
        unattainable_level: u32,
        scenarios: Vec<FloodScenario>,
        num_substations: usize,
    ) -> Result<Self> {
        let set = FloodScenarioSet { level_count, unattainable_level, scenarios };
        set.check(num_substations)?;
        Ok(set)
    }

    fn check(&self, num_substations: usize) -> Result<()> {
        if self.level_count < 1 {
            return Err(CoreError::InvalidScenarios("level_count must be at least 1".into()));
        }
        if self.unattainable_level < 1 || self.unattainable_level > self.level_count {
            return Err(CoreError::InvalidScenarios(format!(
                "unattainable_level {} outside 1..={}",
                self.unattainable_level, self.level_count
            )));
        }
        if self.scenarios.is_empty() {
            return Err(CoreError::InvalidScenarios("no scenarios".into()));
        }
        for s in &self.scenarios {
            if !(s.probability > 0.0 && s.probability <= 1.0) {
                return Err(CoreError::InvalidScenarios(format!(
                    "probability {} of scenario `{}` outside (0, 1]",
                    s.probability, s.id
                )));
            }
            if s.levels.len() != num_substations {
                return Err(CoreError::Dimension { expected: num_substations, got: s.levels.len() });
            }
        }
        let total = self.total_probability();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(CoreError::InvalidScenarios(format!("probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn total_probability(&self) -> f64 {
        self.scenarios.iter().map(|s| s.probability).sum()
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn num_substations(&self) -> usize {
        self.scenarios.first().map_or(0, |s| s.levels.len())
    }

    /// Copy with a different unattainable level.
    pub fn with_unattainable_level(&self, rhat: u32) -> Result<Self> {
        let mut out = self.clone();
        out.unattainable_level = rhat;
        out.check(self.num_substations())?;
        Ok(out)
    }

    /// Equiprobable set built from per-scenario level vectors.
    pub fn equiprobable(level_count: u32, unattainable_level: u32, levels: Vec<(String, Vec<u32>)>) -> Result<Self> {
        let n = levels.len();
        let subs = levels.first().map_or(0, |l| l.1.len());
        let scenarios =
            levels.into_iter().map(|(id, levels)| FloodScenario { id, probability: 1.0 / n as f64, levels }).collect();
        let mut set = FloodScenarioSet { level_count, unattainable_level, scenarios };
        set.renormalize();
        set.check(subs)?;
        Ok(set)
    }

    fn renormalize(&mut self) {
        let total = self.total_probability();
        for s in &mut self.scenarios {
            s.probability /= total;
        }
    }

    pub fn from_file(file: ScenarioFile, network: &GridNetwork, normalize: bool) -> Result<Self> {
        let k_count = network.num_substations();
        let mut scenarios = Vec::with_capacity(file.scenarios.len());
        for entry in file.scenarios {
            let mut levels = vec![0u32; k_count];
            for (sub, &level) in &entry.levels {
                let k = network.substation_index(sub).map_err(|_| {
                    CoreError::InvalidScenarios(format!("scenario `{}` names unknown substation `{sub}`", entry.id))
                })?;
                levels[k] = level;
            }
            if let Some(rows) = &entry.indicators {
                for (sub, row) in rows {
                    let k = network.substation_index(sub).map_err(|_| {
                        CoreError::InvalidScenarios(format!("scenario `{}` names unknown substation `{sub}`", entry.id))
                    })?;
                    if entry.levels.contains_key(sub) {
                        return Err(CoreError::InvalidScenarios(format!(
                            "substation `{sub}` given both a level and indicators in scenario `{}`",
                            entry.id
                        )));
                    }
                    if row.len() != file.level_count as usize {
                        return Err(CoreError::Dimension { expected: file.level_count as usize, got: row.len() });
                    }
                    if row.iter().any(|&v| v > 1) {
                        return Err(CoreError::InvalidScenarios(format!("indicator values must be 0 or 1 for `{sub}`")));
                    }
                    let level = row.iter().take_while(|&&v| v == 1).count();
                    if row[level..].iter().any(|&v| v == 1) {
                        return Err(CoreError::NonCumulative { scenario: entry.id.clone(), substation: sub.clone() });
                    }
                    levels[k] = level as u32;
                }
            }
            scenarios.push(FloodScenario { id: entry.id, probability: entry.probability, levels });
        }
        let mut set =
            FloodScenarioSet { level_count: file.level_count, unattainable_level: file.unattainable_level, scenarios };
        if normalize && set.total_probability() > 0.0 && set.scenarios.iter().all(|s| s.probability > 0.0) {
            set.renormalize();
        }
        set.check(k_count)?;
        Ok(set)
    }

    pub fn to_file(&self, network: &GridNetwork) -> ScenarioFile {
        let scenarios = self
            .scenarios
            .iter()
            .map(|s| ScenarioEntry {
                id: s.id.clone(),
                probability: s.probability,
                levels: s
                    .levels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l > 0)
                    .map(|(k, &l)| (network.substations()[k].id.clone(), l))
                    .collect(),
                indicators: None,
            })
            .collect();
        ScenarioFile { level_count: self.level_count, unattainable_level: self.unattainable_level, scenarios }
    }
}

/// Serialized scenario set. Substations missing from `levels` are dry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub level_count: u32,
    pub unattainable_level: u32,
    pub scenarios: Vec<ScenarioEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub id: String,
    pub probability: f64,
    #[serde(default)]
    pub levels: BTreeMap<String, u32>,
    /// Raw indicator rows, accepted as an alternative to levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicators: Option<BTreeMap<String, Vec<u8>>>,
}

pub fn load_scenarios(path: &Path, network: &GridNetwork, normalize: bool) -> Result<FloodScenarioSet> {
    let file: ScenarioFile = crate::io::read_json(path)?;
    FloodScenarioSet::from_file(file, network, normalize)
}
