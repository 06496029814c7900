use serde::{Deserialize, Serialize};

use crate::command::{GuidanceCommand, SpeedLimits};
use crate::geometry::Point2;
use crate::identification::SeaCurrent;
use crate::wrap_angle;

/// Kinematic vehicle and autopilot parameters. Speeds default to 4 and 6 knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    pub u_cruise: f64,
    pub u_max: f64,
    /// Turn rate limit, rad/s.
    pub r_max: f64,
    /// Course loop gain, 1/s.
    pub k_course: f64,
    /// Speed loop gain, 1/s.
    pub k_speed: f64,
    /// Acceleration limit, m/s².
    pub a_max: f64,
    /// Integration step, s.
    pub dt: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self { u_cruise: 2.06, u_max: 3.09, r_max: 0.15, k_course: 0.5, k_speed: 0.5, a_max: 0.2, dt: 0.5 }
    }
}

impl VehicleParams {
    /// First violated constraint as `(field, reason)`.
    pub fn check(&self) -> Result<(), (&'static str, &'static str)> {
        let positive = [
            ("u_cruise", self.u_cruise),
            ("u_max", self.u_max),
            ("r_max", self.r_max),
            ("k_course", self.k_course),
            ("k_speed", self.k_speed),
            ("a_max", self.a_max),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err((name, "must be positive and finite"));
            }
        }
        if self.u_cruise > self.u_max {
            return Err(("u_cruise", "must not exceed u_max"));
        }
        Ok(())
    }

    pub fn speed_limits(&self) -> SpeedLimits<f64> {
        SpeedLimits { cruise: self.u_cruise, max: self.u_max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub position: Point2<f64>,
    /// Course over the water, radians in (-π, π].
    pub course: f64,
    /// Through-water speed, m/s.
    pub speed: f64,
    pub time: f64,
}

/// Turn rate and acceleration from proportional course and speed loops, both saturated.
pub fn autopilot_step(state: &VehicleState, cmd: &GuidanceCommand<f64>, params: &VehicleParams) -> (f64, f64) {
    let r = (params.k_course * wrap_angle(cmd.desired_course - state.course)).clamp(-params.r_max, params.r_max);
    let accel = (params.k_speed * (cmd.desired_speed - state.speed)).clamp(-params.a_max, params.a_max);
    (r, accel)
}

/// Semi-implicit Euler step; the current adds to the through-water velocity.
pub fn vehicle_step(
    state: &VehicleState,
    r: f64,
    accel: f64,
    current: SeaCurrent<f64>,
    params: &VehicleParams,
) -> VehicleState {
    let dt = params.dt;
    let course = wrap_angle(state.course + r * dt);
    let speed = (state.speed + accel * dt).clamp(0.0, params.u_max);
    let ground = Point2::from_angle(course) * speed + current.velocity();
    VehicleState { position: state.position + ground * dt, course, speed, time: state.time + dt }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(course: f64, speed: f64) -> VehicleState {
        VehicleState { position: Point2::origin(), course, speed, time: 0.0 }
    }

    #[test]
    fn autopilot_examples() {
        let p = VehicleParams::default();
        assert_eq!(autopilot_step(&at(0.3, 1.5), &GuidanceCommand::new(0.3, 1.5), &p), (0.0, 0.0));

        let (r, _) = autopilot_step(&at(3.0, 0.0), &GuidanceCommand::new(-3.0, 0.0), &p);
        let err = 2.0 * std::f64::consts::PI - 6.0;
        assert!((r - (0.5 * err).min(p.r_max)).abs() < 1e-12);
        assert!(r > 0.0);

        let (r, _) = autopilot_step(&at(0.0, 0.0), &GuidanceCommand::new(std::f64::consts::PI, 0.0), &p);
        assert_eq!(r.abs(), p.r_max);
        let (_, a) = autopilot_step(&at(0.0, 0.0), &GuidanceCommand::new(0.0, 3.0), &p);
        assert_eq!(a, p.a_max);
    }

    #[test]
    fn vehicle_examples() {
        let p = VehicleParams::default();
        let s = vehicle_step(&at(0.0, 2.0), 0.0, 0.0, SeaCurrent::new(0.0, 0.0), &p);
        assert!((s.position - Point2::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.time, 0.5);

        let s = vehicle_step(&at(1.0, 0.0), 0.0, 0.0, SeaCurrent::new(0.5, 0.0), &p);
        assert!((s.position - Point2::new(0.25, 0.0)).norm() < 1e-12);

        let s = vehicle_step(&at(3.1, 3.0), p.r_max, p.a_max, SeaCurrent::new(0.0, 0.0), &p);
        assert!(wrap_angle(s.course - 3.1).abs() <= p.r_max * p.dt + 1e-12);
        assert!(s.course < 0.0);
        assert_eq!(s.speed, p.u_max);
    }

    #[test]
    fn params_check() {
        assert!(VehicleParams::default().check().is_ok());
        let bad = VehicleParams { u_cruise: 4.0, ..Default::default() };
        assert_eq!(bad.check(), Err(("u_cruise", "must not exceed u_max")));
        let bad = VehicleParams { dt: 0.0, ..Default::default() };
        assert_eq!(bad.check().unwrap_err().0, "dt");
    }
}
