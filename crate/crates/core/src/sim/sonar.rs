use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::{nearest_boundary_point, Ellipse, Obstacle};
use crate::wrap_angle;

use super::VehicleState;

/// Smallest perceived semi-axis.
pub const MIN_PERCEIVED_AXIS: f64 = 0.1;

/// Standard deviations at full range; they scale linearly with distance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SonarNoise {
    pub sigma_pos: f64,
    pub sigma_axes: f64,
    pub sigma_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SonarConfig {
    pub range: f64,
    /// Half opening angle of the field of view, radians.
    pub fov_half_angle: f64,
    pub noise: SonarNoise,
}

impl Default for SonarConfig {
    fn default() -> Self {
        Self {
            range: 100.0,
            fov_half_angle: std::f64::consts::FRAC_PI_3,
            noise: SonarNoise { sigma_pos: 0.5, sigma_axes: 0.3, sigma_theta: 0.05 },
        }
    }
}

impl SonarConfig {
    pub fn check(&self) -> Result<(), (&'static str, &'static str)> {
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(("range", "must be positive and finite"));
        }
        if !(self.fov_half_angle > 0.0 && self.fov_half_angle <= std::f64::consts::PI) {
            return Err(("fov_half_angle", "must lie in (0, pi]"));
        }
        for (name, v) in [
            ("noise.sigma_pos", self.noise.sigma_pos),
            ("noise.sigma_axes", self.noise.sigma_axes),
            ("noise.sigma_theta", self.noise.sigma_theta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err((name, "must be non-negative and finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub obstacle_id: String,
    pub perceived: Ellipse<f64>,
    pub first_seen: f64,
    pub last_seen: f64,
    /// Range to the nearest boundary point; in a `DetectionMap`, the smallest range so far.
    pub distance: f64,
}

/// Obstacles visible from `state`, each perturbed with distance-scaled Gaussian noise.
///
/// Five normal draws are taken per visible obstacle, in world order, whatever the sigmas.
pub fn sonar_scan(
    state: &VehicleState,
    world: &[Obstacle<f64>],
    cfg: &SonarConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Detection> {
    let mut out = Vec::new();
    for o in world {
        let (q, d) = nearest_boundary_point(state.position, &o.ellipse);
        if d > cfg.range {
            continue;
        }
        if d > 0.0 {
            let bearing = wrap_angle((q - state.position).angle() - state.course);
            if bearing.abs() > cfg.fov_half_angle {
                continue;
            }
        }
        let scale = d.max(0.0) / cfg.range;
        let mut n = || -> f64 { rng.sample(StandardNormal) };
        let (nx, ny, na, nb, nt) = (n(), n(), n(), n(), n());
        let e = &o.ellipse;
        let noise = &cfg.noise;
        let center = e.center + crate::geometry::Point2::new(nx, ny) * (noise.sigma_pos * scale);
        let floor = MIN_PERCEIVED_AXIS + 1e-9;
        let mut a = (e.a + na * noise.sigma_axes * scale).max(floor);
        let mut b = (e.b + nb * noise.sigma_axes * scale).max(floor);
        let mut theta = e.theta + nt * noise.sigma_theta * scale;
        if a < b {
            std::mem::swap(&mut a, &mut b);
            theta += std::f64::consts::FRAC_PI_2;
        }
        let perceived = Ellipse::new(center, a, b, theta).expect("clamped axes are valid");
        out.push(Detection {
            obstacle_id: o.id.clone(),
            perceived,
            first_seen: state.time,
            last_seen: state.time,
            distance: d,
        });
    }
    out
}

/// Running inverse-variance weighted sums of one obstacle's measurements. Noise grows
/// linearly with range, so a measurement at range d gets weight 1/(d² + 1).
/// Orientation is averaged on the doubled angle since an ellipse is symmetric under a
/// half turn.
#[derive(Debug, Clone, Default, PartialEq)]
struct Fusion {
    w: f64,
    x: f64,
    y: f64,
    a: f64,
    b: f64,
    cos2: f64,
    sin2: f64,
}

impl Fusion {
    fn add(&mut self, d: &Detection) {
        let w = 1.0 / (d.distance.max(0.0).powi(2) + 1.0);
        let e = &d.perceived;
        self.w += w;
        self.x += w * e.center.x;
        self.y += w * e.center.y;
        self.a += w * e.a;
        self.b += w * e.b;
        self.cos2 += w * (2.0 * e.theta).cos();
        self.sin2 += w * (2.0 * e.theta).sin();
    }

    fn estimate(&self, last: &Ellipse<f64>) -> Ellipse<f64> {
        let center = crate::geometry::Point2::new(self.x / self.w, self.y / self.w);
        let (a, b) = (self.a / self.w, self.b / self.w);
        let theta = if self.cos2.hypot(self.sin2) > 1e-12 { 0.5 * self.sin2.atan2(self.cos2) } else { last.theta };
        Ellipse::new(center, a.max(b), b.min(a), theta).unwrap_or(*last)
    }
}

/// Everything detected so far, keyed by id. The perceived shape is the weighted mean of
/// all measurements, so late updates of a long-tracked obstacle are small.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionMap {
    entries: BTreeMap<String, (Detection, Fusion)>,
}

impl DetectionMap {
    pub fn update(&mut self, scans: Vec<Detection>) {
        for d in scans {
            let (known, fusion) =
                self.entries.entry(d.obstacle_id.clone()).or_insert_with(|| (d.clone(), Fusion::default()));
            fusion.add(&d);
            known.perceived = fusion.estimate(&d.perceived);
            known.last_seen = d.last_seen;
            known.distance = known.distance.min(d.distance);
        }
    }

    pub fn get(&self, id: &str) -> Option<&Detection> {
        self.entries.get(id).map(|(d, _)| d)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Detection> {
        self.entries.values().map(|(d, _)| d)
    }

    /// Perceived obstacles in id order.
    pub fn obstacles(&self) -> Vec<Obstacle<f64>> {
        self.entries.values().map(|(d, _)| Obstacle::new(d.obstacle_id.clone(), d.perceived)).collect()
    }
}
