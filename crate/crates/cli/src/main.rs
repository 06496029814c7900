//! `deepc-guidance`: run, plan, compare and render guidance scenarios.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use deepc_guidance::geometry::security_circle;
use deepc_guidance::planner::{static_plan, PlannerKind, StaticPlan, StaticPlanConfig};
use deepc_guidance::reactive::{sample_direction_field, ReactiveMethod};
use deepc_guidance::render::{render_svg, Canvas, Scene};
use deepc_guidance::scenario::{load_scenario, run_scenario, Scenario};
use deepc_guidance::sim::{Outcome, RunOutput};

#[derive(Parser)]
#[command(name = "deepc-guidance", version, about = "AUV guidance in special situations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a path over the true world from route start to route end.
    Plan(Common),
    /// Simulate the scenario.
    Run(Common),
    /// Simulate with both reactive methods and compare them.
    CompareReactive(Common),
    /// Simulate and write trajectory, plan and direction-field drawings.
    Render(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    planner: Option<PlannerArg>,
    #[arg(long, value_enum)]
    reactive: Option<ReactiveArg>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write SVG drawings.
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerArg {
    Visibility,
    Quadtree,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReactiveArg {
    Geometric,
    Dipole,
}

/// Failure before any simulation result exists.
struct InputError(anyhow::Error);

const EXIT_ABORTED: u8 = 2;
const EXIT_INPUT: u8 = 1;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DEEPC_GUIDANCE_LOG", "warn")).init();
    // usage errors are input errors; clap's own code 2 means aborted here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Completed) => ExitCode::SUCCESS,
        Ok(Outcome::Aborted) => ExitCode::from(EXIT_ABORTED),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome, InputError> {
    let (common, f): (_, fn(&Scenario, &Common) -> Result<Outcome>) = match cmd {
        Command::Plan(c) => (c, cmd_plan),
        Command::Run(c) => (c, cmd_run),
        Command::CompareReactive(c) => (c, cmd_compare_reactive),
        Command::Render(c) => (c, cmd_render),
    };
    let scenario = load(&common).map_err(InputError)?;
    fs::create_dir_all(&common.out)
        .with_context(|| format!("cannot create {}", common.out.display()))
        .map_err(InputError)?;
    f(&scenario, &common).map_err(InputError)
}

fn load(c: &Common) -> Result<Scenario> {
    let mut s = load_scenario(&c.scenario)?;
    if let Some(p) = c.planner {
        s.vcs.planner = match p {
            PlannerArg::Visibility => PlannerKind::Visibility,
            PlannerArg::Quadtree => PlannerKind::Quadtree,
        };
    }
    if let Some(r) = c.reactive {
        s.vcs.reactive = match r {
            ReactiveArg::Geometric => ReactiveMethod::Geometric,
            ReactiveArg::Dipole => ReactiveMethod::Dipole,
        };
    }
    if let Some(seed) = c.seed {
        s.seed = seed;
    }
    s.validate()?;
    log::info!("loaded {} (seed {})", c.scenario.display(), s.seed);
    Ok(s)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn canvas(s: &Scenario) -> Canvas {
    Canvas::new(s.world.bounds.min, s.world.bounds.max)
}

fn write_run(s: &Scenario, run: &RunOutput, dir: &Path, svg: bool) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write(&dir.join("trajectory.csv"), &run.log.to_csv())?;
    write(&dir.join("metrics.json"), &(serde_json::to_string_pretty(&run.metrics)? + "\n"))?;
    write(&dir.join("events.log"), &run.log.events_text())?;
    if svg {
        let world = s.obstacles()?;
        let route = s.mission_plan()?.waypoints();
        let scene = Scene {
            obstacles: &world,
            perceived: &run.log.perceived,
            route: &route,
            log: Some(&run.log),
            ..Default::default()
        };
        write(&dir.join("trajectory.svg"), &render_svg(&canvas(s), &scene))?;
    }
    Ok(())
}

fn cmd_run(s: &Scenario, c: &Common) -> Result<Outcome> {
    let run = run_scenario(s)?;
    write_run(s, &run, &c.out, c.svg)?;
    log::info!("{:?} after {:.1} s", run.metrics.outcome, run.metrics.completion_time);
    Ok(run.metrics.outcome)
}

fn plan_on_truth(s: &Scenario) -> Result<StaticPlan<f64>> {
    let plan = s.mission_plan()?;
    let cfg = StaticPlanConfig {
        kind: s.vcs.planner,
        margin: s.vcs.planning_margin,
        polygon_corners: s.vcs.polygon_corners,
        region: s.region(),
        max_depth: s.vcs.quadtree_max_depth,
    };
    Ok(static_plan(plan.start(), plan.end(), &s.obstacles()?, &cfg)?)
}

fn cmd_plan(s: &Scenario, c: &Common) -> Result<Outcome> {
    let sp = plan_on_truth(s)?;
    let g = &sp.graph;
    let mut graph_csv = String::from("kind,i,j,x,y,cost\n");
    for (i, v) in g.vertices().iter().enumerate() {
        let _ = writeln!(graph_csv, "vertex,{i},,{:.6},{:.6},", v.x, v.y);
    }
    for e in g.edges() {
        let _ = writeln!(graph_csv, "edge,{},{},,,{:.6}", e.i, e.j, e.cost);
    }
    let mut path_csv = String::from("k,vertex,x,y\n");
    for (k, &v) in sp.path.vertex_seq.iter().enumerate() {
        let p = g.vertices()[v];
        let _ = writeln!(path_csv, "{k},{v},{:.6},{:.6}", p.x, p.y);
    }
    let stats = serde_json::json!({
        "planner": s.vcs.planner.to_string(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "path_cost": sp.path.total_cost,
        "expanded": sp.path.expanded,
        "build_ms": sp.build_time.as_secs_f64() * 1e3,
        "search_ms": sp.search_time.as_secs_f64() * 1e3,
    });
    write(&c.out.join("graph.csv"), &graph_csv)?;
    write(&c.out.join("path.csv"), &path_csv)?;
    write(&c.out.join("stats.json"), &(serde_json::to_string_pretty(&stats)? + "\n"))?;
    if c.svg {
        write(&c.out.join("plan.svg"), &plan_svg(s, &sp)?)?;
    }
    Ok(Outcome::Completed)
}

fn plan_svg(s: &Scenario, sp: &StaticPlan<f64>) -> Result<String> {
    let world = s.obstacles()?;
    let path = sp.path.polyline(&sp.graph);
    let scene =
        Scene { obstacles: &world, graph: Some(&sp.graph), leaves: &sp.leaves, planned: &path, ..Default::default() };
    Ok(render_svg(&canvas(s), &scene))
}

fn cmd_compare_reactive(s: &Scenario, c: &Common) -> Result<Outcome> {
    let mut runs = Vec::new();
    for method in [ReactiveMethod::Geometric, ReactiveMethod::Dipole] {
        let mut v = s.clone();
        v.vcs.reactive = method;
        let run = run_scenario(&v)?;
        write_run(&v, &run, &c.out.join(method.to_string()), c.svg)?;
        runs.push(run);
    }
    let (g, d) = (&runs[0].metrics, &runs[1].metrics);
    let ratio = if d.max_abs_turn_rate > 0.0 { Some(g.max_abs_turn_rate / d.max_abs_turn_rate) } else { None };
    let clearance = |m: Option<f64>| m.map_or("".to_string(), |v| format!("{v:.6}"));
    let mut table = String::from("metric,geometric,dipole\n");
    let _ = writeln!(table, "path_length,{:.6},{:.6}", g.path_length, d.path_length);
    let _ = writeln!(table, "completion_time,{:.6},{:.6}", g.completion_time, d.completion_time);
    let _ = writeln!(table, "max_abs_turn_rate,{:.6},{:.6}", g.max_abs_turn_rate, d.max_abs_turn_rate);
    let _ = writeln!(table, "min_clearance,{},{}", clearance(g.min_clearance), clearance(d.min_clearance));
    let _ = writeln!(table, "outcome,{:?},{:?}", g.outcome, d.outcome);
    write(&c.out.join("comparison.csv"), &table)?;
    let summary = serde_json::json!({ "geometric": g, "dipole": d, "turn_rate_ratio": ratio });
    write(&c.out.join("comparison.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    match ratio {
        Some(r) => println!("max |r| geometric/dipole = {r:.3}"),
        None => println!("max |r| geometric/dipole undefined (dipole run never turned)"),
    }
    if g.outcome == Outcome::Completed && d.outcome == Outcome::Completed {
        Ok(Outcome::Completed)
    } else {
        Ok(Outcome::Aborted)
    }
}

fn cmd_render(s: &Scenario, c: &Common) -> Result<Outcome> {
    let run = run_scenario(s)?;
    write_run(s, &run, &c.out, true)?;
    write(&c.out.join("plan.svg"), &plan_svg(s, &plan_on_truth(s)?)?)?;

    let world = s.obstacles()?;
    let rcfg = s.vcs.reactive_config();
    let circles = world.iter().map(|o| security_circle(o, rcfg.margin)).collect::<Result<Vec<_>, _>>()?;
    let goal = s.mission_plan()?.end();
    let b = &s.world.bounds;
    let step = ((b.max.x - b.min.x).max(b.max.y - b.min.y) / 40.0).max(1e-3);
    let nx = ((b.max.x - b.min.x) / step).floor() as usize + 1;
    let ny = ((b.max.y - b.min.y) / step).floor() as usize + 1;
    let field = sample_direction_field(&circles, goal, &rcfg, b.min, b.max, nx, ny);
    let scene = Scene {
        obstacles: &world,
        circles: &circles,
        field: &field,
        glyph_length: step * 0.8,
        goal: Some(goal),
        ..Default::default()
    };
    write(&c.out.join("field.svg"), &render_svg(&canvas(s), &scene))?;
    Ok(run.metrics.outcome)
}
