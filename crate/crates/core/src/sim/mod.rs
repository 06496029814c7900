//! Closed-loop simulation: vehicle kinematics, autopilot, sonar and the supervisor.

mod sonar;
mod supervisor;
mod vehicle;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use sonar::{sonar_scan, Detection, DetectionMap, SonarConfig, SonarNoise, MIN_PERCEIVED_AXIS};
pub use supervisor::{is_legal_transition, Supervisor, SupervisorOutput, SupervisorSetup, VcsConfig, VcsMode};
pub use vehicle::{autopilot_step, vehicle_step, VehicleParams, VehicleState};

use crate::geometry::{nearest_boundary_point, Obstacle, Point2};
use crate::identification::{IdentPhase, SeaCurrent};
use crate::mission::MissionPlan;
use crate::planner::SquareRegion;
use crate::wrap_angle;

/// Everything one run needs. The true world is only read by the sonar and the metrics.
#[derive(Debug, Clone)]
pub struct SimInput {
    pub world: Vec<Obstacle<f64>>,
    pub plan: MissionPlan<f64>,
    pub vehicle: VehicleParams,
    pub sonar: SonarConfig,
    pub vcs: VcsConfig,
    pub current: SeaCurrent<f64>,
    pub region: SquareRegion<f64>,
    pub seed: u64,
    pub max_time: f64,
    /// Initial position and course; defaults to the route start heading along the first leg.
    pub start: Option<(Point2<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Point2<f64>,
    pub psi: f64,
    pub u: f64,
    pub psi_cmd: f64,
    pub u_cmd: f64,
    pub mode: VcsMode,
    pub active: Vec<String>,
    pub ident_phase: Option<IdentPhase>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEvent {
    pub t: f64,
    pub message: String,
}

/// One row per step, taken after the supervisor decided, plus the event list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryLog {
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<LogEvent>,
    /// Snapshot of what the vehicle believed at the end of the run.
    pub perceived: Vec<Obstacle<f64>>,
}

pub const CSV_HEADER: &str = "t,x,y,psi,u,psi_cmd,u_cmd,mode";

impl TrajectoryLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.samples.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
                s.t, s.position.x, s.position.y, s.psi, s.u, s.psi_cmd, s.u_cmd, s.mode
            );
        }
        out
    }

    pub fn events_text(&self) -> String {
        self.events.iter().map(|e| format!("{:.6} {}\n", e.t, e.message)).collect()
    }

    /// Modes in order of appearance with consecutive repeats collapsed.
    pub fn mode_sequence(&self) -> Vec<VcsMode> {
        let mut seq: Vec<VcsMode> = Vec::new();
        for s in &self.samples {
            if seq.last() != Some(&s.mode) {
                seq.push(s.mode);
            }
        }
        seq
    }

    pub fn final_sample(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Completed,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub path_length: f64,
    pub completion_time: f64,
    /// Largest change rate of the commanded course between samples, rad/s.
    pub max_abs_turn_rate: f64,
    /// Smallest signed distance to a true obstacle boundary; `None` without obstacles.
    pub min_clearance: Option<f64>,
    pub mode_durations: BTreeMap<String, f64>,
    pub outcome: Outcome,
    pub replan_interval: f64,
    pub reactive_trigger_distance: f64,
}

/// Metrics of a logged run against the true world.
pub fn compute_metrics(log: &TrajectoryLog, world: &[Obstacle<f64>], dt: f64, vcs: &VcsConfig) -> Metrics {
    let s = &log.samples;
    let path_length = s.windows(2).map(|w| w[0].position.distance(w[1].position)).sum();
    let max_abs_turn_rate =
        s.windows(2).map(|w| wrap_angle(w[1].psi_cmd - w[0].psi_cmd).abs() / dt).fold(0.0, f64::max);
    let min_clearance = s
        .iter()
        .flat_map(|x| world.iter().map(move |o| nearest_boundary_point(x.position, &o.ellipse).1))
        .reduce(f64::min);
    let mut mode_durations = BTreeMap::new();
    for w in s.windows(2) {
        *mode_durations.entry(w[0].mode.to_string()).or_insert(0.0) += w[1].t - w[0].t;
    }
    let last = s.last();
    let outcome = match last.map(|x| x.mode) {
        Some(VcsMode::MissionComplete) => Outcome::Completed,
        _ => Outcome::Aborted,
    };
    Metrics {
        path_length,
        completion_time: last.map_or(0.0, |x| x.t),
        max_abs_turn_rate,
        min_clearance,
        mode_durations,
        outcome,
        replan_interval: vcs.replan_interval,
        reactive_trigger_distance: vcs.reactive_trigger_distance,
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: TrajectoryLog,
    pub metrics: Metrics,
}

/// Runs sonar → supervisor → autopilot → vehicle at fixed `dt` until the mission completes,
/// aborts, or `max_time` is spent (which aborts).
pub fn simulate(input: &SimInput) -> RunOutput {
    let vp = input.vehicle;
    let dt = vp.dt;
    let plan = &input.plan;
    let (position, course) = input.start.unwrap_or_else(|| (plan.start(), plan.legs()[0].direction().angle()));
    let mut state = VehicleState { position, course: wrap_angle(course), speed: vp.u_cruise, time: 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    let mut detections = DetectionMap::default();
    let mut supervisor = Supervisor::new(SupervisorSetup {
        plan: plan.clone(),
        config: input.vcs,
        vehicle: vp,
        current: input.current,
        region: input.region,
        sonar_range: input.sonar.range,
    });
    let mut log = TrajectoryLog::default();
    let mut seen = 0usize;

    for k in 0usize.. {
        let scans = sonar_scan(&state, &input.world, &input.sonar, &mut rng);
        detections.update(scans);
        if detections.len() > seen {
            for d in detections.iter().filter(|d| d.first_seen == state.time) {
                log.events.push(LogEvent {
                    t: state.time,
                    message: format!("detected `{}` at {:.1} m", d.obstacle_id, d.distance),
                });
            }
            seen = detections.len();
        }
        let perceived = detections.obstacles();
        let out = supervisor.step(&state, &perceived);
        log.events.extend(out.events.into_iter().map(|message| LogEvent { t: state.time, message }));
        if !supervisor.mode().is_terminal() && state.time >= input.max_time - 1e-9 {
            let message = supervisor.abort("time budget exhausted");
            log.events.push(LogEvent { t: state.time, message });
        }
        let mode = supervisor.mode();
        log.samples.push(TrajectorySample {
            t: state.time,
            position: state.position,
            psi: state.course,
            u: state.speed,
            psi_cmd: out.command.desired_course,
            u_cmd: out.command.desired_speed,
            mode,
            active: supervisor.active_obstacles().to_vec(),
            ident_phase: supervisor.ident_phase(),
        });
        if mode.is_terminal() {
            break;
        }
        let (r, accel) = autopilot_step(&state, &out.command, &vp);
        state = vehicle_step(&state, r, accel, input.current, &vp);
        state.time = (k + 1) as f64 * dt;
    }
    log.perceived = detections.obstacles();
    let metrics = compute_metrics(&log, &input.world, dt, &input.vcs);
    RunOutput { log, metrics }
}
