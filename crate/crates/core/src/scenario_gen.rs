//! Landfall sampling along a coastline and a surrogate inundation kernel.
//!
//! The kernel is NOT a hydrologic model: depth decays exponentially with the
//! cross-track distance from a straight storm track through the landfall point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CoreError, Result};
use crate::geo_remap::{central_angle, initial_bearing, EARTH_RADIUS_KM};
use crate::grid_model::GridNetwork;
use crate::scenario_model::{depth_to_level, DepthThresholds, FloodScenarioSet};

pub const KM_PER_NMI: f64 = 1.852;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coastline {
    /// `[lon, lat]` in degrees.
    pub vertices: Vec<[f64; 2]>,
}

impl Coastline {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let c = Coastline { vertices };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 2 {
            return Err(CoreError::InvalidArgument("coastline needs at least 2 vertices".into()));
        }
        for v in &self.vertices {
            if !(-90.0..=90.0).contains(&v[1]) || !v[0].is_finite() {
                return Err(CoreError::InvalidArgument(format!("invalid coastline vertex {v:?}")));
            }
        }
        if self.vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::InvalidArgument("consecutive coastline vertices coincide".into()));
        }
        Ok(())
    }

    fn segment_km(&self, i: usize) -> f64 {
        let (a, b) = (self.vertices[i], self.vertices[i + 1]);
        central_angle((a[0], a[1]), (b[0], b[1])) * EARTH_RADIUS_KM
    }

    pub fn length_km(&self) -> f64 {
        (0..self.vertices.len() - 1).map(|i| self.segment_km(i)).sum()
    }

    /// Point at arc length `s` km, interpolated linearly in lon/lat within a segment.
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let mut rest = s.max(0.0);
        for i in 0..self.vertices.len() - 1 {
            let len = self.segment_km(i);
            if rest <= len || i == self.vertices.len() - 2 {
                let t = (rest / len).min(1.0);
                let (a, b) = (self.vertices[i], self.vertices[i + 1]);
                return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]));
            }
            rest -= len;
        }
        unreachable!("coastline has a segment")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandfallDistribution {
    pub coastline: Coastline,
    /// Arc-length position of the mean landfall, km.
    pub mean_km: f64,
    pub cone_radius_nmi: f64,
}

impl LandfallDistribution {
    pub fn new(coastline: Coastline, mean_km: f64, cone_radius_nmi: f64) -> Result<Self> {
        coastline.validate()?;
        if !(cone_radius_nmi > 0.0) {
            return Err(CoreError::InvalidArgument("cone radius must be positive".into()));
        }
        if !(0.0..=coastline.length_km()).contains(&mean_km) {
            return Err(CoreError::InvalidArgument("mean landfall outside the coastline".into()));
        }
        Ok(LandfallDistribution { coastline, mean_km, cone_radius_nmi })
    }

    pub fn sigma_km(&self) -> f64 {
        sigma_from_cone(self.cone_radius_nmi).expect("validated radius") * KM_PER_NMI
    }

    fn position(&self, u: f64) -> f64 {
        let z = Normal::standard().inverse_cdf(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON));
        (self.mean_km + self.sigma_km() * z).clamp(0.0, self.coastline.length_km())
    }
}

/// Standard deviation putting probability 2/3 within `cone_radius` of the mean.
pub fn sigma_from_cone(cone_radius: f64) -> Result<f64> {
    if !(cone_radius > 0.0) || !cone_radius.is_finite() {
        return Err(CoreError::InvalidArgument(format!("cone radius {cone_radius} must be positive")));
    }
    Ok(cone_radius / Normal::standard().inverse_cdf(5.0 / 6.0))
}

/// One uniform draw inside each of `count` equal-probability strata, mapped to arc length.
pub fn stratified_landfalls(dist: &LandfallDistribution, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count < 1 {
        return Err(CoreError::InvalidArgument("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|i| dist.position((i as f64 + rng.random::<f64>()) / count as f64)).collect())
}

/// Independent draws from the landfall distribution.
pub fn sample_landfalls(dist: &LandfallDistribution, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| dist.position(rng.random::<f64>())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InundationKernel {
    pub peak_depth: f64,
    pub decay_km: f64,
    pub track_bearing_deg: f64,
    /// Depths at or below this are treated as dry.
    #[serde(default)]
    pub dry_depth: f64,
}

impl InundationKernel {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_depth >= 0.0) || !(self.decay_km > 0.0) || !(self.dry_depth >= 0.0) {
            return Err(CoreError::InvalidArgument("kernel needs peak >= 0, decay > 0, dry depth >= 0".into()));
        }
        Ok(())
    }

    pub fn depth_at(&self, distance_km: f64) -> f64 {
        let d = self.peak_depth * (-distance_km / self.decay_km).exp2();
        if d <= self.dry_depth {
            0.0
        } else {
            d
        }
    }
}

/// Great-circle distance from `point` to the track through `origin` at `bearing_deg`.
pub fn cross_track_km(point: (f64, f64), origin: (f64, f64), bearing_deg: f64) -> f64 {
    let d13 = central_angle(origin, point);
    let t13 = initial_bearing(origin, point);
    (d13.sin() * (t13 - bearing_deg.to_radians()).sin()).asin().abs() * EARTH_RADIUS_KM
}

/// Equiprobable scenarios from stratified landfalls. Levels run to `thresholds.len() + 1`.
pub fn generate_scenarios(
    network: &GridNetwork,
    dist: &LandfallDistribution,
    kernel: &InundationKernel,
    thresholds: &DepthThresholds,
    count: usize,
    seed: u64,
    unattainable_level: u32,
) -> Result<FloodScenarioSet> {
    kernel.validate()?;
    let coords: Vec<(f64, f64)> = (0..network.num_substations())
        .map(|k| {
            network.coordinates(k).ok_or_else(|| {
                CoreError::InvalidArgument(format!("substation `{}` has no coordinates", network.substations()[k].id))
            })
        })
        .collect::<Result<_>>()?;
    let landfalls = stratified_landfalls(dist, count, seed)?;
    let width = count.to_string().len();
    let mut levels = Vec::with_capacity(count);
    for (i, &s) in landfalls.iter().enumerate() {
        let origin = dist.coastline.point_at(s);
        let row = coords
            .iter()
            .map(|&c| depth_to_level(kernel.depth_at(cross_track_km(c, origin, kernel.track_bearing_deg)), thresholds))
            .collect::<Result<Vec<u32>>>()?;
        levels.push((format!("landfall_{:0width$}", i + 1), row));
    }
    FloodScenarioSet::equiprobable(thresholds.len() as u32 + 1, unattainable_level, levels)
}
