//! Deterministic SVG 1.1 output for trajectories, planning graphs and direction fields.
//!
//! World y points up; the document flips it. Numbers are written with three decimals so
//! equal inputs give byte-identical documents.

use std::fmt::Write as _;

use crate::geometry::{Ellipse, Obstacle, Point2, SecurityCircle};
use crate::planner::{CellState, GeoGraph, QuadCell};
use crate::reactive::FieldSample;
use crate::sim::{TrajectoryLog, VcsMode};

/// World-to-document mapping over a fixed rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    pub min: Point2<f64>,
    pub max: Point2<f64>,
}

impl Canvas {
    pub fn new(min: Point2<f64>, max: Point2<f64>) -> Self {
        Self { min, max }
    }

    fn x(&self, x: f64) -> f64 {
        x
    }

    fn y(&self, y: f64) -> f64 {
        self.min.y + self.max.y - y
    }

    fn pt(&self, p: Point2<f64>) -> String {
        format!("{:.3},{:.3}", self.x(p.x), self.y(p.y))
    }

    /// Inverse of the document mapping, for readers of emitted files.
    pub fn to_world(&self, x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, self.min.y + self.max.y - y)
    }
}

/// Everything that may be drawn; empty parts are skipped.
#[derive(Debug, Clone, Default)]
pub struct Scene<'a> {
    pub obstacles: &'a [Obstacle<f64>],
    pub perceived: &'a [Obstacle<f64>],
    pub circles: &'a [SecurityCircle<f64>],
    pub route: &'a [Point2<f64>],
    pub planned: &'a [Point2<f64>],
    pub graph: Option<&'a GeoGraph<f64>>,
    pub leaves: &'a [QuadCell<f64>],
    pub log: Option<&'a TrajectoryLog>,
    pub field: &'a [FieldSample<f64>],
    /// Length of a field glyph in world units.
    pub glyph_length: f64,
    pub goal: Option<Point2<f64>>,
}

fn mode_color(m: VcsMode) -> &'static str {
    match m {
        VcsMode::Automatic => "#1f77b4",
        VcsMode::AvoidPlanned => "#2ca02c",
        VcsMode::AvoidReactive => "#d62728",
        VcsMode::IdentifyAlign => "#9467bd",
        VcsMode::IdentifyOrbit => "#8c564b",
        VcsMode::SeekRendezvous => "#e377c2",
        VcsMode::MissionComplete => "#7f7f7f",
        VcsMode::Aborted => "#000000",
    }
}

fn ellipse(out: &mut String, c: &Canvas, e: &Ellipse<f64>, class: &str, style: &str) {
    let (cx, cy) = (c.x(e.center.x), c.y(e.center.y));
    let _ = writeln!(
        out,
        r#"<ellipse class="{class}" cx="{cx:.3}" cy="{cy:.3}" rx="{:.3}" ry="{:.3}" transform="rotate({:.3} {cx:.3} {cy:.3})" {style}/>"#,
        e.a,
        e.b,
        -e.theta.to_degrees()
    );
}

fn polyline(out: &mut String, c: &Canvas, pts: &[Point2<f64>], class: &str, style: &str) {
    let coords: Vec<String> = pts.iter().map(|&p| c.pt(p)).collect();
    let _ = writeln!(out, r#"<polyline class="{class}" points="{}" fill="none" {style}/>"#, coords.join(" "));
}

/// Renders `scene` over the canvas rectangle.
pub fn render_svg(canvas: &Canvas, scene: &Scene<'_>) -> String {
    let (w, h) = (canvas.max.x - canvas.min.x, canvas.max.y - canvas.min.y);
    let stroke = (w.max(h) / 400.0).max(0.05);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{:.3} {:.3} {w:.3} {h:.3}" width="800" height="{:.0}">"#,
        canvas.min.x,
        canvas.min.y,
        800.0 * h / w
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="{h:.3}" fill="#ffffff"/>"##,
        canvas.min.x, canvas.min.y
    );

    for cell in scene.leaves {
        let fill = match cell.state {
            CellState::Free => "none",
            _ => "#dddddd",
        };
        let b = &cell.bounds;
        let _ = writeln!(
            out,
            r##"<rect class="leaf" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}" stroke="#bbbbbb" stroke-width="{:.3}"/>"##,
            canvas.x(b.min.x),
            canvas.y(b.min.y + b.side),
            b.side,
            b.side,
            stroke * 0.5
        );
    }
    for o in scene.obstacles {
        ellipse(&mut out, canvas, &o.ellipse, "obstacle", r##"fill="#555555" fill-opacity="0.6" stroke="#222222""##);
    }
    let dashed = format!(
        r##"fill="none" stroke="#ff7f0e" stroke-width="{stroke:.3}" stroke-dasharray="{0:.3} {0:.3}""##,
        stroke * 4.0
    );
    for o in scene.perceived {
        ellipse(&mut out, canvas, &o.ellipse, "perceived", &dashed);
    }
    for s in scene.circles {
        let _ = writeln!(
            out,
            r##"<circle class="security" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#999999" stroke-width="{stroke:.3}" stroke-dasharray="{:.3} {:.3}"/>"##,
            canvas.x(s.center.x),
            canvas.y(s.center.y),
            s.radius,
            stroke * 2.0,
            stroke * 2.0
        );
    }
    if let Some(g) = scene.graph {
        for e in g.edges() {
            let (a, b) = (g.vertices()[e.i], g.vertices()[e.j]);
            let _ = writeln!(
                out,
                r##"<line class="edge" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#cccccc" stroke-width="{:.3}"/>"##,
                canvas.x(a.x),
                canvas.y(a.y),
                canvas.x(b.x),
                canvas.y(b.y),
                stroke * 0.5
            );
        }
        for v in g.vertices() {
            let _ = writeln!(
                out,
                r##"<circle class="vertex" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="#888888"/>"##,
                canvas.x(v.x),
                canvas.y(v.y),
                stroke
            );
        }
    }
    if scene.route.len() >= 2 {
        let style =
            format!(r##"stroke="#000000" stroke-width="{stroke:.3}" stroke-dasharray="{0:.3} {0:.3}""##, stroke * 6.0);
        polyline(&mut out, canvas, scene.route, "route", &style);
    }
    if scene.planned.len() >= 2 {
        polyline(
            &mut out,
            canvas,
            scene.planned,
            "planned",
            &format!(r##"stroke="#17becf" stroke-width="{:.3}""##, stroke * 1.5),
        );
    }
    for f in scene.field {
        let tip = f.position + f.direction * scene.glyph_length;
        let _ = writeln!(
            out,
            r##"<line class="glyph" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#1f77b4" stroke-width="{stroke:.3}"/>"##,
            canvas.x(f.position.x),
            canvas.y(f.position.y),
            canvas.x(tip.x),
            canvas.y(tip.y)
        );
    }
    if let Some(log) = scene.log {
        // one polyline per stretch of constant mode; terminal rows extend the last stretch
        let mut seg: Vec<Point2<f64>> = Vec::new();
        let mut mode = None;
        for s in &log.samples {
            if let Some(m) = mode.filter(|&m| m != s.mode && !s.mode.is_terminal()) {
                seg.push(s.position);
                let style = format!(r#"stroke="{}" stroke-width="{:.3}""#, mode_color(m), stroke * 2.0);
                polyline(&mut out, canvas, &seg, "trajectory", &style);
                seg.clear();
            }
            if mode.is_none() || !s.mode.is_terminal() {
                mode = Some(s.mode);
            }
            seg.push(s.position);
        }
        if let Some(m) = mode {
            let style = format!(r#"stroke="{}" stroke-width="{:.3}""#, mode_color(m), stroke * 2.0);
            polyline(&mut out, canvas, &seg, "trajectory", &style);
        }
    }
    if let Some(g) = scene.goal {
        let _ = writeln!(
            out,
            r##"<circle class="goal" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="#2ca02c"/>"##,
            canvas.x(g.x),
            canvas.y(g.y),
            stroke * 3.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::TrajectorySample;

    fn sample(t: f64, x: f64, mode: VcsMode) -> TrajectorySample {
        TrajectorySample {
            t,
            position: Point2::new(x, 0.0),
            psi: 0.0,
            u: 2.0,
            psi_cmd: 0.0,
            u_cmd: 2.0,
            mode,
            active: vec![],
            ident_phase: None,
        }
    }

    fn canvas() -> Canvas {
        Canvas::new(Point2::new(-10.0, -10.0), Point2::new(110.0, 10.0))
    }

    #[test]
    fn modes_split_trajectory() {
        let log = TrajectoryLog {
            samples: vec![
                sample(0.0, 0.0, VcsMode::Automatic),
                sample(0.5, 1.0, VcsMode::AvoidPlanned),
                sample(1.0, 2.0, VcsMode::Automatic),
                sample(1.5, 3.0, VcsMode::MissionComplete),
            ],
            ..Default::default()
        };
        let svg = render_svg(&canvas(), &Scene { log: Some(&log), ..Default::default() });
        assert_eq!(svg.matches(r#"class="trajectory""#).count(), 3);
        let svg2 = render_svg(&canvas(), &Scene { log: Some(&log), ..Default::default() });
        assert_eq!(svg, svg2);
    }

    #[test]
    fn y_is_flipped() {
        let c = canvas();
        assert_eq!(c.pt(Point2::new(0.0, 10.0)), "0.000,-10.000");
        assert_eq!(c.to_world(0.0, -10.0), Point2::new(0.0, 10.0));
    }
}
