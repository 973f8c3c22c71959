//! Minimum-distance unbalanced assignment of one labeled point set into another.

use floodwall_milp::{solve_lp, LpStatus, MilpProblem, Sense};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
const INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub id: String,
    pub lon: f64,
    pub lat: f64,
}

fn check_lat(lat: f64) -> Result<()> {
    if !(-90.0..=90.0).contains(&lat) {
        return Err(CoreError::InvalidArgument(format!("latitude {lat} outside [-90, 90]")));
    }
    Ok(())
}

/// Great-circle distance in km between `(lon, lat)` pairs in degrees.
pub fn distance(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    check_lat(a.1)?;
    check_lat(b.1)?;
    if !(a.0.is_finite() && b.0.is_finite()) {
        return Err(CoreError::InvalidArgument("non-finite longitude".into()));
    }
    Ok(central_angle(a, b) * EARTH_RADIUS_KM)
}

/// Haversine central angle in radians.
pub(crate) fn central_angle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (l1, p1) = (a.0.to_radians(), a.1.to_radians());
    let (l2, p2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((p2 - p1) / 2.0).sin().powi(2) + p1.cos() * p2.cos() * ((l2 - l1) / 2.0).sin().powi(2);
    2.0 * h.sqrt().min(1.0).asin()
}

/// Initial bearing from `a` to `b`, radians clockwise from north.
pub(crate) fn initial_bearing(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (l1, p1) = (a.0.to_radians(), a.1.to_radians());
    let (l2, p2) = (b.0.to_radians(), b.1.to_radians());
    let y = (l2 - l1).sin() * p2.cos();
    let x = p1.cos() * p2.sin() - p1.sin() * p2.cos() * (l2 - l1).cos();
    y.atan2(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignedPair {
    pub from_id: String,
    pub to_id: String,
    pub distance_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub pairs: Vec<AssignedPair>,
    /// Index into `to` for each point of `from`.
    pub targets: Vec<usize>,
    pub total_km: f64,
    /// Largest distance of any LP value from {0, 1}.
    pub integrality_error: f64,
}

/// Solves the assignment LP `min sum c x` with every `a` covered at least once and
/// every `b` used at most once, and reads off the integral solution.
pub fn remap(from: &[GeoPoint], to: &[GeoPoint]) -> Result<Assignment> {
    if to.len() < from.len() {
        return Err(CoreError::Infeasible(format!("{} targets for {} points", to.len(), from.len())));
    }
    let mut cost = vec![vec![0.0; to.len()]; from.len()];
    for (i, a) in from.iter().enumerate() {
        for (j, b) in to.iter().enumerate() {
            cost[i][j] = distance((a.lon, a.lat), (b.lon, b.lat))?;
        }
    }
    let mut p = MilpProblem::new("assignment");
    let vars: Vec<Vec<usize>> = (0..from.len())
        .map(|i| (0..to.len()).map(|j| p.add_continuous(format!("x_{i}_{j}"), 0.0, 1.0, cost[i][j])).collect())
        .collect();
    for (i, row) in vars.iter().enumerate() {
        p.add_constraint(format!("cover_{i}"), row.iter().map(|&v| (v, 1.0)), Sense::Ge, 1.0)?;
    }
    for j in 0..to.len() {
        p.add_constraint(format!("use_{j}"), vars.iter().map(|row| (row[j], 1.0)), Sense::Le, 1.0)?;
    }
    let sol = solve_lp(&p);
    if sol.status != LpStatus::Optimal {
        return Err(CoreError::Solver(format!("assignment LP ended with {:?}", sol.status)));
    }
    let integrality_error = sol.x.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max);
    if integrality_error > INTEGRALITY_TOL {
        return Err(CoreError::Solver(format!("assignment LP solution is fractional ({integrality_error:e})")));
    }
    let mut targets = Vec::with_capacity(from.len());
    for row in &vars {
        let chosen: Vec<usize> = (0..to.len()).filter(|&j| sol.x[row[j]] > 0.5).collect();
        // Extra coverage is never cheaper; keep the lexicographically first target.
        targets.push(*chosen.iter().min_by(|&&a, &&b| to[a].id.cmp(&to[b].id)).expect("covered"));
    }
    let mut used = vec![false; to.len()];
    for &j in &targets {
        used[j] = true;
    }
    for (i, t) in targets.iter_mut().enumerate() {
        let tie = (0..to.len())
            .filter(|&j| !used[j] && cost[i][j] == cost[i][*t] && to[j].id < to[*t].id)
            .min_by(|&a, &b| to[a].id.cmp(&to[b].id));
        if let Some(j) = tie {
            used[*t] = false;
            used[j] = true;
            *t = j;
        }
    }
    let pairs: Vec<AssignedPair> = from
        .iter()
        .zip(&targets)
        .enumerate()
        .map(|(i, (a, &j))| AssignedPair { from_id: a.id.clone(), to_id: to[j].id.clone(), distance_km: cost[i][j] })
        .collect();
    let total_km = pairs.iter().map(|p| p.distance_km).sum();
    Ok(Assignment { pairs, targets, total_km, integrality_error })
}
