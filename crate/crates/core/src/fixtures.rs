//! Bundled desk-scale instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::grid_model::{AngleLimits, Branch, Bus, GridNetwork, NetworkData, Substation, VoltageClass};
use crate::scenario_gen::{generate_scenarios, Coastline, InundationKernel, LandfallDistribution};
use crate::scenario_model::{DepthThresholds, FloodScenario, FloodScenarioSet};

pub const FIXTURE_NAMES: [&str; 4] = ["tiny3", "star8", "ring12", "coastal40"];

const LEVEL_COUNT: u32 = 4;
const DEFAULT_RHAT: u32 = 3;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub network: GridNetwork,
    pub scenarios: FloodScenarioSet,
    pub coastline: Option<Coastline>,
}

pub fn make_fixture(name: &str) -> Result<Fixture> {
    match name {
        "tiny3" => tiny3(),
        "star8" => star8(),
        "ring12" => ring12(),
        "coastal40" => coastal40(),
        _ => Err(CoreError::UnknownId { kind: "fixture", id: name.to_string() }),
    }
}

fn bus(id: &str, sub: &str, load: f64, gen: f64) -> Bus {
    Bus {
        id: id.into(),
        substation: sub.into(),
        p_load: load,
        p_gen_min: 0.0,
        p_gen_max: gen,
        is_reference: false,
    }
}

fn line(from: &str, to: &str, b: f64, limit: f64) -> Branch {
    Branch { id: format!("{from}-{to}"), from_bus: from.into(), to_bus: to.into(), susceptance: b, flow_limit: limit }
}

fn sub(id: &str, class: VoltageClass) -> Substation {
    Substation { id: id.into(), voltage_class: class, lon: None, lat: None }
}

fn scenarios(network: &GridNetwork, rows: &[(&str, f64, &[(&str, u32)])]) -> Result<FloodScenarioSet> {
    let mut out = Vec::new();
    for (id, p, floods) in rows {
        let mut levels = vec![0; network.num_substations()];
        for (s, l) in *floods {
            levels[network.substation_index(s)?] = *l;
        }
        out.push(FloodScenario { id: id.to_string(), probability: *p, levels });
    }
    FloodScenarioSet::new(LEVEL_COUNT, DEFAULT_RHAT, out, network.num_substations())
}

fn tiny3() -> Result<Fixture> {
    let mut b1 = bus("b1", "S1", 0.0, 3.0);
    b1.is_reference = true;
    let network = GridNetwork::new(NetworkData {
        buses: vec![b1, bus("b2", "S1", 1.0, 0.0), bus("b3", "S2", 1.0, 0.0)],
        branches: vec![line("b1", "b2", -10.0, 2.0), line("b1", "b3", -10.0, 2.0), line("b2", "b3", -10.0, 1.0)],
        substations: vec![sub("S1", VoltageClass::V230), sub("S2", VoltageClass::V115_161)],
        angle_limits: AngleLimits::default(),
        base_mva: Some(100.0),
    })?;
    let scenarios = scenarios(&network, &[("w1", 0.5, &[("S1", 1), ("S2", 2)]), ("w2", 0.5, &[("S2", 1)])])?;
    Ok(Fixture { name: "tiny3".into(), network, scenarios, coastline: None })
}

fn star8() -> Result<Fixture> {
    let mut h1 = bus("h1", "H", 0.0, 6.0);
    h1.is_reference = true;
    let network = GridNetwork::new(NetworkData {
        buses: vec![
            h1,
            bus("h2", "H", 0.5, 0.0),
            bus("a1", "A", 1.2, 0.0),
            bus("a2", "A", 0.3, 1.0),
            bus("b1", "B", 0.8, 0.0),
            bus("b2", "B", 0.6, 0.0),
            bus("c1", "C", 1.0, 0.0),
            bus("c2", "C", 0.4, 0.0),
        ],
        branches: vec![
            line("h1", "h2", -10.0, 1.0),
            line("h1", "a1", -10.0, 2.0),
            line("a1", "a2", -10.0, 1.0),
            line("h1", "b1", -10.0, 1.0),
            line("b1", "b2", -10.0, 1.0),
            line("h1", "c1", -10.0, 1.5),
            line("c1", "c2", -10.0, 1.0),
        ],
        substations: vec![
            sub("H", VoltageClass::V500),
            sub("A", VoltageClass::V230),
            sub("B", VoltageClass::V115_161),
            sub("C", VoltageClass::V230),
        ],
        angle_limits: AngleLimits::default(),
        base_mva: Some(100.0),
    })?;
    let scenarios = scenarios(
        &network,
        &[
            ("w1", 0.4, &[("A", 1), ("B", 2)]),
            ("w2", 0.3, &[("H", 1), ("C", 1)]),
            ("w3", 0.2, &[("A", 2), ("B", 1), ("C", 3)]),
            ("w4", 0.1, &[("H", 2), ("A", 3), ("B", 1)]),
        ],
    )?;
    Ok(Fixture { name: "star8".into(), network, scenarios, coastline: None })
}

fn ring12() -> Result<Fixture> {
    let mut w1 = bus("w1", "W", 0.0, 4.0);
    w1.is_reference = true;
    let mut buses = vec![w1, bus("w2", "W", 0.6, 0.0), bus("w3", "W", 0.4, 0.0)];
    buses.extend([bus("x1", "X", 0.8, 0.0), bus("x2", "X", 0.5, 0.0), bus("x3", "X", 0.3, 0.0)]);
    buses.extend([bus("y1", "Y", 0.0, 3.0), bus("y2", "Y", 0.7, 0.0), bus("y3", "Y", 0.4, 0.0)]);
    buses.extend([bus("z1", "Z", 1.0, 0.0), bus("z2", "Z", 0.8, 0.0), bus("z3", "Z", 0.6, 0.0)]);
    let mut branches = Vec::new();
    for s in ["w", "x", "y", "z"] {
        branches.push(line(&format!("{s}1"), &format!("{s}2"), -10.0, 1.5));
        branches.push(line(&format!("{s}1"), &format!("{s}3"), -10.0, 1.5));
    }
    for (a, b) in [("w1", "x1"), ("x1", "y1"), ("y1", "z1"), ("z1", "w1")] {
        branches.push(line(a, b, -8.0, 2.5));
    }
    let network = GridNetwork::new(NetworkData {
        buses,
        branches,
        substations: vec![
            sub("W", VoltageClass::V230),
            sub("X", VoltageClass::V115_161),
            sub("Y", VoltageClass::V230),
            sub("Z", VoltageClass::V115_161),
        ],
        angle_limits: AngleLimits::default(),
        base_mva: Some(100.0),
    })?;
    let scenarios = scenarios(
        &network,
        &[
            ("w1", 0.3, &[("Z", 3), ("X", 1)]),
            ("w2", 0.2, &[("Z", 3), ("Y", 2)]),
            ("w3", 0.3, &[("X", 2), ("W", 1)]),
            ("w4", 0.2, &[("Z", 1)]),
        ],
    )?;
    Ok(Fixture { name: "ring12".into(), network, scenarios, coastline: None })
}

/// Synthetic Gulf-like coastline, south-west to north-east.
pub fn gulf_coastline() -> Coastline {
    Coastline { vertices: vec![[-97.4, 26.0], [-97.2, 27.5], [-96.5, 28.3], [-95.0, 29.3], [-93.8, 29.7]] }
}

pub const COASTAL40_SEED: u64 = 2017;

pub fn coastal40_kernel() -> InundationKernel {
    InundationKernel { peak_depth: 1.3, decay_km: 6.0, track_bearing_deg: 315.0, dry_depth: 0.3 }
}

fn coastal40() -> Result<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let (cols, rows) = (5usize, 4usize);
    let gen_subs = [0usize, 7, 12, 19];
    let mut substations = Vec::new();
    let mut buses = Vec::new();
    let mut branches = Vec::new();
    for k in 0..cols * rows {
        let (c, r) = (k % cols, k / cols);
        let id = format!("S{:02}", k + 1);
        let class = if gen_subs.contains(&k) {
            VoltageClass::V500
        } else if k % 3 == 0 {
            VoltageClass::V230
        } else {
            VoltageClass::V115_161
        };
        let lon = -98.2 + 0.8 * c as f64 + 0.2 * (rng.random::<f64>() - 0.5);
        let lat = 27.0 + 0.8 * r as f64 + 0.2 * (rng.random::<f64>() - 0.5);
        substations.push(Substation { id: id.clone(), voltage_class: class, lon: Some(lon), lat: Some(lat) });
        let (hv, lv) = (format!("{id}h"), format!("{id}l"));
        let gen = match gen_subs.iter().position(|&g| g == k) {
            Some(i) => [3.0, 4.0, 3.0, 4.0][i],
            None => 0.0,
        };
        let mut h = bus(&hv, &id, 0.0, gen);
        if k == 0 {
            h.is_reference = true;
        }
        if k == 12 {
            h.p_gen_min = 0.5;
        }
        buses.push(h);
        let load = ((0.3 + 0.6 * rng.random::<f64>()) * 100.0).round() / 100.0;
        buses.push(bus(&lv, &id, load, 0.0));
        branches.push(line(&hv, &lv, -20.0, 1.5));
        if c + 1 < cols {
            branches.push(line(&hv, &format!("S{:02}h", k + 2), -8.0, 2.0));
        }
        if r + 1 < rows {
            branches.push(line(&hv, &format!("S{:02}h", k + cols + 1), -8.0, 2.0));
        }
    }
    let network = GridNetwork::new(NetworkData {
        buses,
        branches,
        substations,
        angle_limits: AngleLimits::default(),
        base_mva: Some(100.0),
    })?;
    let coastline = gulf_coastline();
    let mean = 0.5 * coastline.length_km();
    let dist = LandfallDistribution::new(coastline.clone(), mean, 89.0)?;
    let scenarios = generate_scenarios(
        &network,
        &dist,
        &coastal40_kernel(),
        &DepthThresholds::barrier_stack(),
        25,
        COASTAL40_SEED,
        DEFAULT_RHAT,
    )?;
    Ok(Fixture { name: "coastal40".into(), network, scenarios, coastline: Some(coastline) })
}

/// One forecast row: initialization hour (UTC), 15-hour precipitation maximum (mm), landfall lon/lat.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForecastRow {
    pub tool: String,
    pub init_hour_utc: u32,
    pub max_precip_mm: f64,
    pub landfall_lon: f64,
    pub landfall_lat: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Perturbation {
    pub init_hour_utc: u32,
    pub precip_scale: f64,
    pub shift_lon: f64,
    pub shift_lat: f64,
}

/// Baseline global forecast followed by four rapid-refresh forecasts of a 2019 tropical storm.
/// Shipped for file-format tests only; nothing here drives hydrology.
pub fn imelda_forecasts() -> Vec<ForecastRow> {
    let row = |tool: &str, h, p, lon, lat| ForecastRow {
        tool: tool.into(),
        init_hour_utc: h,
        max_precip_mm: p,
        landfall_lon: lon,
        landfall_lat: lat,
    };
    vec![
        row("GFS", 12, 1.6865, -95.28, 29.02),
        row("HRRR", 12, 5.1004, -95.17, 29.25),
        row("HRRR", 13, 3.5985, -95.21, 29.10),
        row("HRRR", 14, 2.7876, -95.31, 29.08),
        row("HRRR", 15, 3.3803, -95.22, 29.09),
    ]
}

/// Scale and translation that carry the baseline row onto each other row.
pub fn perturbations(rows: &[ForecastRow]) -> Vec<Perturbation> {
    let Some(base) = rows.first() else { return Vec::new() };
    rows[1..]
        .iter()
        .map(|r| Perturbation {
            init_hour_utc: r.init_hour_utc,
            precip_scale: r.max_precip_mm / base.max_precip_mm,
            shift_lon: r.landfall_lon - base.landfall_lon,
            shift_lat: r.landfall_lat - base.landfall_lat,
        })
        .collect()
}
