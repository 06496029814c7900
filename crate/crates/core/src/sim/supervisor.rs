use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::command::GuidanceCommand;
use crate::geometry::{inflate, security_circle, Obstacle, Point2};
use crate::identification::{
    align_command, identification_task, orbit_command, AlignConfig, AlignState, IdentPhase, IdentTask, OrbitConfig,
    OrbitState, SeaCurrent,
};
use crate::mission::{
    collision_observation, goal_point_generation, project_onto_route, MissionError, MissionPlan, Rendezvous,
    RouteProgress,
};
use crate::planner::{
    plan_quadtree_path, plan_visibility_path, PlannerKind, SquareRegion, DEFAULT_PLANNING_MARGIN,
    DEFAULT_POLYGON_CORNERS,
};
use crate::reactive::{nominal_speed, reactive_gradient, EscapeLatch, ReactiveConfig, ReactiveError, ReactiveMethod};

use super::{VehicleParams, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VcsMode {
    Automatic,
    AvoidPlanned,
    AvoidReactive,
    IdentifyAlign,
    IdentifyOrbit,
    SeekRendezvous,
    MissionComplete,
    Aborted,
}

impl VcsMode {
    pub const ALL: [VcsMode; 8] = [
        VcsMode::Automatic,
        VcsMode::AvoidPlanned,
        VcsMode::AvoidReactive,
        VcsMode::IdentifyAlign,
        VcsMode::IdentifyOrbit,
        VcsMode::SeekRendezvous,
        VcsMode::MissionComplete,
        VcsMode::Aborted,
    ];

    pub fn is_terminal(self) -> bool {
        matches!(self, VcsMode::MissionComplete | VcsMode::Aborted)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VcsMode::Automatic => "Automatic",
            VcsMode::AvoidPlanned => "AvoidPlanned",
            VcsMode::AvoidReactive => "AvoidReactive",
            VcsMode::IdentifyAlign => "IdentifyAlign",
            VcsMode::IdentifyOrbit => "IdentifyOrbit",
            VcsMode::SeekRendezvous => "SeekRendezvous",
            VcsMode::MissionComplete => "MissionComplete",
            VcsMode::Aborted => "Aborted",
        }
    }
}

impl std::fmt::Display for VcsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for VcsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VcsMode::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// Transition table of the supervisor. Any mode may abort.
#[allow(clippy::match_like_matches_macro)]
pub fn is_legal_transition(from: VcsMode, to: VcsMode) -> bool {
    use VcsMode::*;
    if from.is_terminal() || from == to {
        return false;
    }
    match (from, to) {
        (_, Aborted) => true,
        (Automatic, AvoidPlanned | AvoidReactive | IdentifyAlign | IdentifyOrbit | MissionComplete) => true,
        (AvoidPlanned, AvoidReactive | Automatic) => true,
        (AvoidReactive, AvoidPlanned | Automatic) => true,
        (IdentifyAlign | IdentifyOrbit, SeekRendezvous) => true,
        (SeekRendezvous, AvoidReactive | Automatic) => true,
        _ => false,
    }
}

/// Supervisor settings. Lengths in meters, times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VcsConfig {
    pub planner: PlannerKind,
    pub reactive: ReactiveMethod,
    /// Object growth for collision observation, planning and rendezvous search.
    pub planning_margin: f64,
    pub polygon_corners: usize,
    pub quadtree_max_depth: usize,
    /// Security circle margin of the reactive methods.
    pub reactive_margin: f64,
    pub capture_radius: f64,
    pub hysteresis: f64,
    pub epsilon_singularity: f64,
    /// Depth inside a security circle still treated as grazing it rather than escaping.
    pub graze_tolerance: f64,
    /// A conflict closer than this is handled reactively first.
    pub reactive_trigger_distance: f64,
    pub replan_interval: f64,
    pub los_lookahead: f64,
    /// Defaults to twice the sonar range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observation_lookahead: Option<f64>,
    /// Defaults to twice the sonar range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clear_run: Option<f64>,
    pub rendezvous_step: f64,
    /// Inflated perimeter up to `size_factor · standoff` selects aligning, larger objects are orbited.
    pub size_factor: f64,
    /// Avoid with the reactive method only, toward the route end, without replanning.
    pub reactive_only: bool,
    pub align: AlignConfig<f64>,
    pub orbit: OrbitConfig<f64>,
}

/// Drops polyline vertices that a straight segment clear of every grown object can skip.
/// Quadtree paths run through cell centers and make short zigzag legs the vehicle cannot
/// turn onto.
fn shortcut(path: &[Point2<f64>], obs: &[Obstacle<f64>], margin: f64) -> Vec<Point2<f64>> {
    let grown: Vec<_> = obs.iter().map(|o| inflate(&o.ellipse, margin).expect("non-negative margin")).collect();
    let clear = |a: Point2<f64>, b: Point2<f64>| grown.iter().all(|e| e.segment_overlap(a, b).is_none());
    let Some(&first) = path.first() else { return Vec::new() };
    let mut out = vec![first];
    let mut i = 0;
    while i + 1 < path.len() {
        let j = (i + 2..path.len()).rev().find(|&j| clear(path[i], path[j])).unwrap_or(i + 1);
        out.push(path[j]);
        i = j;
    }
    out
}

impl Default for VcsConfig {
    fn default() -> Self {
        Self {
            planner: PlannerKind::Visibility,
            reactive: ReactiveMethod::Geometric,
            planning_margin: DEFAULT_PLANNING_MARGIN,
            polygon_corners: DEFAULT_POLYGON_CORNERS,
            quadtree_max_depth: 7,
            reactive_margin: 3.0,
            capture_radius: 2.0,
            hysteresis: 1.05,
            epsilon_singularity: 0.1,
            graze_tolerance: 0.25,
            reactive_trigger_distance: 40.0,
            replan_interval: 10.0,
            los_lookahead: 20.0,
            observation_lookahead: None,
            clear_run: None,
            rendezvous_step: 5.8,
            size_factor: 8.0,
            reactive_only: false,
            align: AlignConfig::default(),
            orbit: OrbitConfig::default(),
        }
    }
}

impl VcsConfig {
    pub fn reactive_config(&self) -> ReactiveConfig<f64> {
        ReactiveConfig {
            method: self.reactive,
            margin: self.reactive_margin,
            capture_radius: self.capture_radius,
            hysteresis: self.hysteresis,
            epsilon_singularity: self.epsilon_singularity,
            graze_tolerance: self.graze_tolerance,
        }
    }

    pub fn check(&self) -> Result<(), (String, String)> {
        let err = |f: &str, r: &str| Err((f.to_string(), r.to_string()));
        for (name, v) in
            [("planning_margin", self.planning_margin), ("reactive_trigger_distance", self.reactive_trigger_distance)]
        {
            if !(v >= 0.0) || !v.is_finite() {
                return err(name, "must be non-negative and finite");
            }
        }
        for (name, v) in [
            ("replan_interval", self.replan_interval),
            ("los_lookahead", self.los_lookahead),
            ("rendezvous_step", self.rendezvous_step),
            ("size_factor", self.size_factor),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return err(name, "must be positive and finite");
            }
        }
        for (name, v) in [("observation_lookahead", self.observation_lookahead), ("clear_run", self.clear_run)] {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() {
                    return err(name, "must be non-negative and finite");
                }
            }
        }
        if self.polygon_corners < 3 {
            return err("polygon_corners", "must be at least 3");
        }
        if self.quadtree_max_depth == 0 || self.quadtree_max_depth > crate::planner::MAX_QUADTREE_DEPTH {
            return err("quadtree_max_depth", "out of range");
        }
        if let Err(ReactiveError::InvalidConfig(r)) = self.reactive_config().validate() {
            let field = r.split_whitespace().next().unwrap_or("reactive");
            let field = if field == "margin" { "reactive_margin" } else { field };
            return err(field, r);
        }
        if let Err(e) = self.align.validate() {
            return err("align", &e.to_string());
        }
        if let Err(e) = self.orbit.validate() {
            return err("orbit", &e.to_string());
        }
        Ok(())
    }
}

/// Fixed inputs of the supervisor.
#[derive(Debug, Clone)]
pub struct SupervisorSetup {
    pub plan: MissionPlan<f64>,
    pub config: VcsConfig,
    pub vehicle: VehicleParams,
    /// Known sea current, used by the aligning maneuver.
    pub current: SeaCurrent<f64>,
    /// Square planning region for the quadtree.
    pub region: SquareRegion<f64>,
    pub sonar_range: f64,
}

/// Output of one supervisor step.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisorOutput {
    pub command: GuidanceCommand<f64>,
    /// Human-readable events raised during the step, in order.
    pub events: Vec<String>,
}

enum Step {
    Command(GuidanceCommand<f64>),
    Switch(VcsMode, String),
}

/// The special-situation state machine. It only ever sees perceived obstacles.
#[derive(Debug, Clone)]
pub struct Supervisor {
    setup: SupervisorSetup,
    mode: VcsMode,
    progress: RouteProgress<f64>,
    rendezvous: Option<Rendezvous<f64>>,
    path: Vec<Point2<f64>>,
    path_index: usize,
    last_replan: f64,
    latch: EscapeLatch,
    align: Option<AlignState<f64>>,
    orbit: Option<OrbitState<f64>>,
    target: Option<String>,
    /// An identification finished during the current step.
    finished: bool,
    identified: BTreeSet<String>,
    active: Vec<String>,
}

fn los_course(p: Point2<f64>, from: Point2<f64>, to: Point2<f64>, lookahead: f64) -> f64 {
    let dir = (to - from).normalized().unwrap_or_else(|| Point2::new(1.0, 0.0));
    let cross = (p - from).dot(dir.perp());
    dir.angle() - (cross / lookahead).atan()
}

impl Supervisor {
    pub fn new(setup: SupervisorSetup) -> Self {
        Self {
            setup,
            mode: VcsMode::Automatic,
            progress: RouteProgress::default(),
            rendezvous: None,
            path: Vec::new(),
            path_index: 0,
            last_replan: 0.0,
            latch: EscapeLatch::default(),
            align: None,
            orbit: None,
            target: None,
            finished: false,
            identified: BTreeSet::new(),
            active: Vec::new(),
        }
    }

    pub fn mode(&self) -> VcsMode {
        self.mode
    }

    pub fn progress(&self) -> RouteProgress<f64> {
        self.progress
    }

    pub fn rendezvous(&self) -> Option<Rendezvous<f64>> {
        self.rendezvous
    }

    /// Polyline currently followed in AvoidPlanned or SeekRendezvous.
    pub fn planned_path(&self) -> &[Point2<f64>] {
        &self.path
    }

    /// Ids of the obstacles the current mode is dealing with.
    pub fn active_obstacles(&self) -> &[String] {
        &self.active
    }

    /// Phase of the running identification maneuver, or `Done` on the step that finished one.
    pub fn ident_phase(&self) -> Option<IdentPhase> {
        match self.mode {
            VcsMode::IdentifyAlign => self.align.as_ref().map(|s| s.phase),
            VcsMode::IdentifyOrbit => self.orbit.map(|s| s.phase),
            _ if self.finished => Some(IdentPhase::Done),
            _ => None,
        }
    }

    pub fn identified(&self) -> &BTreeSet<String> {
        &self.identified
    }

    fn lookahead(&self) -> f64 {
        self.setup.config.observation_lookahead.unwrap_or(2.0 * self.setup.sonar_range)
    }

    fn clear_run(&self) -> f64 {
        self.setup.config.clear_run.unwrap_or(2.0 * self.setup.sonar_range)
    }

    /// Forces the Aborted mode, e.g. when the time budget is spent.
    pub fn abort(&mut self, reason: &str) -> String {
        let ev = format!("{} -> Aborted: {reason}", self.mode);
        self.mode = VcsMode::Aborted;
        ev
    }

    /// Decides the mode and the guidance command for the current state.
    pub fn step(&mut self, state: &VehicleState, detections: &[Obstacle<f64>]) -> SupervisorOutput {
        let mut events = Vec::new();
        self.finished = false;
        for _ in 0..8 {
            let step = match self.mode {
                VcsMode::Automatic => self.automatic(state, detections),
                VcsMode::AvoidPlanned | VcsMode::SeekRendezvous => self.follow_path(state, detections),
                VcsMode::AvoidReactive => self.reactive(state, detections, &mut events),
                VcsMode::IdentifyAlign | VcsMode::IdentifyOrbit => self.identify(state, detections, &mut events),
                VcsMode::MissionComplete | VcsMode::Aborted => Step::Command(GuidanceCommand::new(state.course, 0.0)),
            };
            match step {
                Step::Command(command) => return SupervisorOutput { command, events },
                Step::Switch(to, reason) => {
                    debug_assert!(is_legal_transition(self.mode, to), "{} -> {to}", self.mode);
                    events.push(format!("{} -> {to}: {reason}", self.mode));
                    let from = self.mode;
                    self.mode = to;
                    if let Err(reason) = self.enter(from, state, detections, &mut events) {
                        events.push(format!("{to} -> Aborted: {reason}"));
                        self.mode = VcsMode::Aborted;
                    }
                }
            }
        }
        events.push(self.abort("mode switching did not settle"));
        SupervisorOutput { command: GuidanceCommand::new(state.course, 0.0), events }
    }

    fn enter(
        &mut self,
        from: VcsMode,
        state: &VehicleState,
        obs: &[Obstacle<f64>],
        events: &mut Vec<String>,
    ) -> Result<(), String> {
        let p = state.position;
        match self.mode {
            VcsMode::Automatic => {
                if let Some(rv) = self.rendezvous.take() {
                    self.progress = RouteProgress {
                        leg_index: rv.leg_index,
                        arc_length: rv.arc_length.max(self.progress.arc_length),
                    };
                }
                self.path.clear();
                self.active.clear();
            }
            VcsMode::AvoidPlanned | VcsMode::SeekRendezvous => {
                if self.mode == VcsMode::SeekRendezvous {
                    self.progress = project_onto_route(p, &self.setup.plan, self.progress);
                }
                if self.rendezvous.is_none() || from != VcsMode::AvoidReactive {
                    self.rendezvous = Some(self.find_rendezvous(obs).map_err(|e| e.to_string())?);
                }
                if self.path.is_empty() {
                    match self.plan_path(p, obs) {
                        Ok(path) => self.set_path(path),
                        Err(e) => {
                            // e.g. start inside a grown object
                            events.push(format!("{} -> AvoidReactive: planning failed: {e}", self.mode));
                            self.mode = VcsMode::AvoidReactive;
                            return self.enter(from, state, obs, events);
                        }
                    }
                }
            }
            VcsMode::AvoidReactive => {
                if self.rendezvous.is_none() {
                    self.rendezvous = Some(self.find_rendezvous(obs).map_err(|e| e.to_string())?);
                }
                self.path.clear();
                self.last_replan = state.time;
                self.latch = EscapeLatch::default();
            }
            VcsMode::IdentifyAlign => {
                let target = self.target_obstacle(obs)?;
                self.align = Some(AlignState::start(p, &target, self.setup.current));
            }
            VcsMode::IdentifyOrbit => {
                self.target_obstacle(obs)?;
                self.orbit = Some(OrbitState::default());
            }
            VcsMode::MissionComplete | VcsMode::Aborted => {}
        }
        Ok(())
    }

    fn find_rendezvous(&self, obs: &[Obstacle<f64>]) -> Result<Rendezvous<f64>, MissionError> {
        let plan = &self.setup.plan;
        if self.setup.config.reactive_only {
            let k = plan.legs().len() - 1;
            return Ok(Rendezvous { arc_length: plan.total_length(), leg_index: k, point: plan.end() });
        }
        let c = &self.setup.config;
        goal_point_generation(plan, self.progress, obs, c.planning_margin, self.clear_run(), c.rendezvous_step)
    }

    fn plan_path(&self, p: Point2<f64>, obs: &[Obstacle<f64>]) -> Result<Vec<Point2<f64>>, String> {
        let goal = self.rendezvous.ok_or("no rendezvous")?.point;
        let c = &self.setup.config;
        let path = match c.planner {
            PlannerKind::Visibility => {
                let (g, r) = plan_visibility_path(p, goal, obs, c.polygon_corners, c.planning_margin)
                    .map_err(|e| e.to_string())?;
                r.polyline(&g)
            }
            PlannerKind::Quadtree => {
                let (qg, r, _, _) =
                    plan_quadtree_path(p, goal, self.setup.region, obs, c.quadtree_max_depth, c.planning_margin)
                        .map_err(|e| e.to_string())?;
                r.polyline(&qg.graph)
            }
        };
        Ok(shortcut(&path, obs, c.planning_margin))
    }

    fn set_path(&mut self, path: Vec<Point2<f64>>) {
        self.path = path;
        self.path_index = 1.min(self.path.len().saturating_sub(1));
    }

    fn target_obstacle(&self, obs: &[Obstacle<f64>]) -> Result<Obstacle<f64>, String> {
        let id = self.target.as_deref().ok_or("identification without a target")?;
        obs.iter().find(|o| o.id == id).cloned().ok_or_else(|| format!("target `{id}` is not among the detections"))
    }

    fn automatic(&mut self, state: &VehicleState, obs: &[Obstacle<f64>]) -> Step {
        let p = state.position;
        let c = self.setup.config;
        let plan = &self.setup.plan;
        self.progress = project_onto_route(p, plan, self.progress);
        let last = plan.legs().len() - 1;
        if self.progress.leg_index == last && p.distance(plan.end()) <= c.capture_radius {
            return Step::Switch(VcsMode::MissionComplete, "route end reached".into());
        }

        let conflicts = match collision_observation(plan, self.progress, obs, c.planning_margin, self.lookahead()) {
            Ok(v) => v,
            Err(e) => return Step::Switch(VcsMode::Aborted, e.to_string()),
        };
        if let Some(first) = conflicts.first() {
            let ahead = first.entry_arc_length - self.progress.arc_length;
            let id = first.obstacle_id.clone();
            self.active = vec![id.clone()];
            if plan.identify_targets.contains(&id) && !self.identified.contains(&id) {
                let o = obs.iter().find(|o| o.id == id).expect("conflicts come from detections");
                self.target = Some(id.clone());
                return match identification_task(o, c.align.standoff, c.align.safety_margin, c.size_factor) {
                    Ok(IdentTask::Align) => {
                        Step::Switch(VcsMode::IdentifyAlign, format!("identify `{id}` by aligning"))
                    }
                    Ok(IdentTask::Orbit) => {
                        Step::Switch(VcsMode::IdentifyOrbit, format!("identify `{id}` by orbiting"))
                    }
                    Err(e) => Step::Switch(VcsMode::Aborted, e.to_string()),
                };
            }
            let why = format!("conflict with `{id}` {ahead:.1} m ahead");
            return if c.reactive_only || ahead <= c.reactive_trigger_distance {
                Step::Switch(VcsMode::AvoidReactive, why)
            } else {
                Step::Switch(VcsMode::AvoidPlanned, why)
            };
        }

        let k = self.progress.leg_index;
        let leg = plan.legs()[k];
        let remaining = plan.total_length() - self.progress.arc_length;
        let cmd = if k == last && remaining <= c.los_lookahead {
            let to_end = plan.end() - p;
            let speed = nominal_speed(to_end.norm(), leg.speed, c.capture_radius);
            GuidanceCommand::new(to_end.angle(), speed.min(leg.speed))
        } else {
            GuidanceCommand::new(los_course(p, leg.from, leg.to, c.los_lookahead), leg.speed)
        };
        Step::Command(self.clamped(cmd))
    }

    fn clamped(&self, cmd: GuidanceCommand<f64>) -> GuidanceCommand<f64> {
        GuidanceCommand::new(cmd.desired_course, self.setup.vehicle.speed_limits().clamp(cmd.desired_speed))
    }

    /// Whether the polyline ahead, within the trigger distance, cuts an object grown by half
    /// the planning margin.
    fn path_threatened(&self, p: Point2<f64>, obs: &[Obstacle<f64>]) -> Option<String> {
        let c = &self.setup.config;
        let mut budget = c.reactive_trigger_distance;
        let mut a = p;
        for &b in &self.path[self.path_index..] {
            if budget <= 0.0 {
                break;
            }
            let len = a.distance(b);
            let end = if len > budget { a.lerp(b, budget / len) } else { b };
            if a != end {
                for o in obs {
                    let grown = inflate(&o.ellipse, 0.5 * c.planning_margin).expect("non-negative margin");
                    if grown.segment_overlap(a, end).is_some() {
                        return Some(o.id.clone());
                    }
                }
            }
            budget -= len;
            a = b;
        }
        None
    }

    fn follow_path(&mut self, state: &VehicleState, obs: &[Obstacle<f64>]) -> Step {
        let p = state.position;
        let c = self.setup.config;
        let rv = self.rendezvous.expect("path modes have a rendezvous");
        let last = self.path.len() - 1;
        while self.path_index < last {
            let (a, b) = (self.path[self.path_index - 1], self.path[self.path_index]);
            let passed = (p - a).dot(b - a) >= (b - a).norm_squared();
            if p.distance(b) <= c.capture_radius || passed {
                self.path_index += 1;
            } else {
                break;
            }
        }
        let (a, b) = (self.path[self.path_index - 1], self.path[self.path_index]);
        let passed_end = self.path_index == last && (p - a).dot(b - a) >= (b - a).norm_squared();
        if p.distance(rv.point) <= c.capture_radius || passed_end {
            return Step::Switch(VcsMode::Automatic, "rendezvous reached".into());
        }
        if let Some(id) = self.path_threatened(p, obs) {
            self.active = vec![id.clone()];
            return Step::Switch(VcsMode::AvoidReactive, format!("`{id}` threatens the planned path"));
        }
        let speed = self.setup.plan.legs()[rv.leg_index].speed;
        Step::Command(self.clamped(GuidanceCommand::new(los_course(p, a, b, c.los_lookahead), speed)))
    }

    fn reactive(&mut self, state: &VehicleState, obs: &[Obstacle<f64>], events: &mut Vec<String>) -> Step {
        let p = state.position;
        let c = self.setup.config;
        let rv = self.rendezvous.expect("reactive mode has a rendezvous");
        if p.distance(rv.point) <= c.capture_radius {
            return Step::Switch(VcsMode::Automatic, "rendezvous reached".into());
        }
        if !c.reactive_only && state.time - self.last_replan >= c.replan_interval - 1e-9 {
            self.last_replan = state.time;
            match self.find_rendezvous(obs) {
                Ok(fresh) => {
                    let old = self.rendezvous.replace(fresh);
                    match self.plan_path(p, obs) {
                        Ok(path) => {
                            self.set_path(path);
                            if self.path_threatened(p, obs).is_none() {
                                return Step::Switch(VcsMode::AvoidPlanned, "replanned with fresh detections".into());
                            }
                            self.path.clear();
                        }
                        Err(e) => {
                            self.rendezvous = old;
                            events.push(format!("replan failed: {e}"));
                        }
                    }
                }
                Err(MissionError::RouteBlocked) => return Step::Switch(VcsMode::Aborted, "route blocked".into()),
                Err(e) => events.push(format!("replan failed: {e}")),
            }
        }
        let rv = self.rendezvous.expect("reactive mode has a rendezvous");
        let rcfg = c.reactive_config();
        match reactive_gradient(p, obs, rv.point, &rcfg, &mut self.latch) {
            Ok(g) => {
                if let Some(k) = g.active {
                    self.active = vec![obs[k].id.clone()];
                }
                let speed = nominal_speed(p.distance(rv.point), self.setup.vehicle.u_cruise, c.capture_radius);
                Step::Command(
                    self.clamped(GuidanceCommand::new(g.direction.angle(), speed.min(self.hug_speed(p, obs)))),
                )
            }
            Err(ReactiveError::GoalReached) => Step::Switch(VcsMode::Automatic, "rendezvous reached".into()),
            Err(e) => Step::Switch(VcsMode::Aborted, e.to_string()),
        }
    }

    /// Speed at which the vehicle can still follow the tightest nearby security circle
    /// within 90 % of its turn rate limit.
    fn hug_speed(&self, p: Point2<f64>, obs: &[Obstacle<f64>]) -> f64 {
        let c = &self.setup.config;
        obs.iter()
            .filter_map(|o| security_circle(o, c.reactive_margin).ok())
            .filter(|s| p.distance(s.center) - s.radius < c.reactive_trigger_distance)
            .map(|s| 0.9 * self.setup.vehicle.r_max * s.radius)
            .fold(f64::INFINITY, f64::min)
    }

    fn identify(&mut self, state: &VehicleState, obs: &[Obstacle<f64>], events: &mut Vec<String>) -> Step {
        let target = match self.target_obstacle(obs) {
            Ok(t) => t,
            Err(e) => return Step::Switch(VcsMode::Aborted, e),
        };
        let c = self.setup.config;
        let speeds = self.setup.vehicle.speed_limits();
        let (p, course) = (state.position, state.course);
        let (cmd, before, after) = if self.mode == VcsMode::IdentifyAlign {
            let st = self.align.take().expect("align state set on entry");
            match align_command(p, course, &target, self.setup.current, &c.align, &speeds, &st, self.setup.vehicle.dt) {
                Ok((cmd, next)) => {
                    let phases = (st.phase, next.phase);
                    self.align = Some(next);
                    (cmd, phases.0, phases.1)
                }
                Err(e) => return Step::Switch(VcsMode::Aborted, e.to_string()),
            }
        } else {
            let st = self.orbit.expect("orbit state set on entry");
            match orbit_command(p, course, &target, &c.orbit, &speeds, &st) {
                Ok((cmd, next)) => {
                    self.orbit = Some(next);
                    (cmd, st.phase, next.phase)
                }
                Err(e) => return Step::Switch(VcsMode::Aborted, e.to_string()),
            }
        };
        if before != after {
            events.push(format!("{} `{}` phase {before:?} -> {after:?}", self.mode, target.id));
        }
        if after == IdentPhase::Done {
            self.identified.insert(target.id.clone());
            self.finished = true;
            return Step::Switch(VcsMode::SeekRendezvous, format!("`{}` identified", target.id));
        }
        Step::Command(self.clamped(cmd))
    }
}
