//! Power-grid data model: buses, branches, substations and angle limits.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VoltageClass {
    #[serde(rename = "V115_161")]
    V115_161,
    V230,
    V500,
}

impl VoltageClass {
    /// Barrier segments needed per level increment.
    pub fn base_units(self) -> u32 {
        match self {
            VoltageClass::V115_161 => 1,
            VoltageClass::V230 => 2,
            VoltageClass::V500 => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: String,
    pub substation: String,
    #[serde(default)]
    pub p_load: f64,
    #[serde(default)]
    pub p_gen_min: f64,
    #[serde(default)]
    pub p_gen_max: f64,
    #[serde(default)]
    pub is_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    pub susceptance: f64,
    pub flow_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Substation {
    pub id: String,
    pub voltage_class: VoltageClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleLimits {
    pub abs_max: f64,
    pub diff_max: f64,
}

impl Default for AngleLimits {
    fn default() -> Self {
        AngleLimits { abs_max: PI / 2.0, diff_max: PI / 6.0 }
    }
}

/// Serialized form of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkData {
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub substations: Vec<Substation>,
    #[serde(default)]
    pub angle_limits: AngleLimits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_mva: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub entity: String,
    pub message: String,
}

impl Violation {
    fn new(entity: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { entity: entity.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

/// Checks every structural and numeric invariant of `data`.
pub fn validate(data: &NetworkData) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bus_ids = HashMap::new();
    let mut sub_ids = HashMap::new();
    let mut branch_ids = BTreeSet::new();
    for s in &data.substations {
        if sub_ids.insert(s.id.as_str(), ()).is_some() {
            out.push(Violation::new(format!("substation {}", s.id), "duplicate id"));
        }
        if let Some(lat) = s.lat {
            if !(-90.0..=90.0).contains(&lat) {
                out.push(Violation::new(format!("substation {}", s.id), "latitude outside [-90, 90]"));
            }
        }
        if s.lon.is_some() != s.lat.is_some() {
            out.push(Violation::new(format!("substation {}", s.id), "coordinates need both lon and lat"));
        }
    }
    let mut refs = 0;
    let mut members: HashMap<&str, usize> = HashMap::new();
    for b in &data.buses {
        let e = format!("bus {}", b.id);
        if bus_ids.insert(b.id.as_str(), ()).is_some() {
            out.push(Violation::new(&e, "duplicate id"));
        }
        if !sub_ids.contains_key(b.substation.as_str()) {
            out.push(Violation::new(&e, format!("unknown substation {}", b.substation)));
        }
        *members.entry(b.substation.as_str()).or_default() += 1;
        for (name, v) in [("p_load", b.p_load), ("p_gen_min", b.p_gen_min), ("p_gen_max", b.p_gen_max)] {
            if !v.is_finite() {
                out.push(Violation::new(&e, format!("non-finite {name}")));
            }
        }
        if b.p_load < 0.0 {
            out.push(Violation::new(&e, "negative load"));
        }
        if b.p_gen_min > b.p_gen_max {
            out.push(Violation::new(&e, "p_gen_min exceeds p_gen_max"));
        }
        if b.p_gen_max < 0.0 {
            out.push(Violation::new(&e, "negative generation capacity"));
        }
        if b.is_reference {
            refs += 1;
        }
    }
    if refs == 0 {
        out.push(Violation::new("network", "no reference bus"));
    } else if refs > 1 {
        out.push(Violation::new("network", "multiple reference buses"));
    }
    for s in &data.substations {
        if !members.contains_key(s.id.as_str()) {
            out.push(Violation::new(format!("substation {}", s.id), "substation has no buses"));
        }
    }
    for br in &data.branches {
        let e = format!("branch {}", br.id);
        if !branch_ids.insert(br.id.as_str()) {
            out.push(Violation::new(&e, "duplicate id"));
        }
        for end in [&br.from_bus, &br.to_bus] {
            if !bus_ids.contains_key(end.as_str()) {
                out.push(Violation::new(&e, format!("unknown bus {end}")));
            }
        }
        if br.from_bus == br.to_bus {
            out.push(Violation::new(&e, "from_bus equals to_bus"));
        }
        if !(br.flow_limit > 0.0) || !br.flow_limit.is_finite() {
            out.push(Violation::new(&e, "nonpositive flow limit"));
        }
        if br.susceptance == 0.0 || !br.susceptance.is_finite() {
            out.push(Violation::new(&e, "zero susceptance"));
        }
    }
    let a = data.angle_limits;
    if !(a.abs_max > 0.0) || !(a.diff_max > 0.0) {
        out.push(Violation::new("angle_limits", "nonpositive angle limit"));
    }
    if a.diff_max > 2.0 * a.abs_max {
        out.push(Violation::new("angle_limits", "diff_max exceeds 2 * abs_max"));
    }
    if let Some(base) = data.base_mva {
        if !(base > 0.0) {
            out.push(Violation::new("base_mva", "nonpositive base"));
        }
    }
    out
}

/// A validated, index-resolved network. Buses, branches and substations are
/// addressed by their position in the input lists.
#[derive(Debug, Clone)]
pub struct GridNetwork {
    data: NetworkData,
    bus_index: HashMap<String, usize>,
    sub_index: HashMap<String, usize>,
    branch_index: HashMap<String, usize>,
    bus_sub: Vec<usize>,
    sub_buses: Vec<Vec<usize>>,
    ends: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    reference: usize,
}

impl GridNetwork {
    pub fn new(data: NetworkData) -> Result<Self> {
        let violations = validate(&data);
        if !violations.is_empty() {
            return Err(CoreError::InvalidNetwork(violations));
        }
        let bus_index: HashMap<String, usize> = data.buses.iter().enumerate().map(|(i, b)| (b.id.clone(), i)).collect();
        let sub_index: HashMap<String, usize> =
            data.substations.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        let branch_index = data.branches.iter().enumerate().map(|(i, b)| (b.id.clone(), i)).collect();
        let bus_sub: Vec<usize> = data.buses.iter().map(|b| sub_index[&b.substation]).collect();
        let mut sub_buses = vec![Vec::new(); data.substations.len()];
        for (n, &k) in bus_sub.iter().enumerate() {
            sub_buses[k].push(n);
        }
        let ends: Vec<(usize, usize)> =
            data.branches.iter().map(|b| (bus_index[&b.from_bus], bus_index[&b.to_bus])).collect();
        let mut incident = vec![Vec::new(); data.buses.len()];
        for (e, &(n, m)) in ends.iter().enumerate() {
            incident[n].push(e);
            incident[m].push(e);
        }
        let reference = data.buses.iter().position(|b| b.is_reference).expect("validated");
        Ok(GridNetwork { data, bus_index, sub_index, branch_index, bus_sub, sub_buses, ends, incident, reference })
    }

    pub fn data(&self) -> &NetworkData {
        &self.data
    }

    pub fn buses(&self) -> &[Bus] {
        &self.data.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.data.branches
    }

    pub fn substations(&self) -> &[Substation] {
        &self.data.substations
    }

    pub fn angle_limits(&self) -> AngleLimits {
        self.data.angle_limits
    }

    pub fn base_mva(&self) -> Option<f64> {
        self.data.base_mva
    }

    pub fn num_buses(&self) -> usize {
        self.data.buses.len()
    }

    pub fn num_branches(&self) -> usize {
        self.data.branches.len()
    }

    pub fn num_substations(&self) -> usize {
        self.data.substations.len()
    }

    pub fn reference_bus(&self) -> usize {
        self.reference
    }

    pub fn bus_index(&self, id: &str) -> Result<usize> {
        self.bus_index.get(id).copied().ok_or_else(|| CoreError::UnknownId { kind: "bus", id: id.into() })
    }

    pub fn substation_index(&self, id: &str) -> Result<usize> {
        self.sub_index.get(id).copied().ok_or_else(|| CoreError::UnknownId { kind: "substation", id: id.into() })
    }

    pub fn branch_index(&self, id: &str) -> Result<usize> {
        self.branch_index.get(id).copied().ok_or_else(|| CoreError::UnknownId { kind: "branch", id: id.into() })
    }

    /// Substation index of bus `n`.
    pub fn bus_substation(&self, n: usize) -> usize {
        self.bus_sub[n]
    }

    pub fn substation_buses(&self, k: usize) -> &[usize] {
        &self.sub_buses[k]
    }

    /// `(from, to)` bus indices of branch `e`.
    pub fn branch_ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    /// Branch indices touching bus `n`.
    pub fn incident(&self, n: usize) -> &[usize] {
        &self.incident[n]
    }

    /// Ids of the branches with `bus` as an endpoint.
    pub fn incident_branches(&self, bus: &str) -> Result<BTreeSet<String>> {
        let n = self.bus_index(bus)?;
        Ok(self.incident[n].iter().map(|&e| self.data.branches[e].id.clone()).collect())
    }

    pub fn total_load(&self) -> f64 {
        self.data.buses.iter().map(|b| b.p_load).sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.data.buses.iter().map(|b| b.p_gen_max).sum()
    }

    pub fn coordinates(&self, k: usize) -> Option<(f64, f64)> {
        let s = &self.data.substations[k];
        Some((s.lon?, s.lat?))
    }

    /// Per-branch big-M constant `|b| * 2 * abs_max + flow_limit`.
    pub fn big_m(&self, e: usize) -> f64 {
        let br = &self.data.branches[e];
        br.susceptance.abs() * 2.0 * self.data.angle_limits.abs_max + br.flow_limit
    }
}
