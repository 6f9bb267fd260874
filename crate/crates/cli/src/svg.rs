//! Deterministic SVG figures: heuristic heat map, obstacles, moving-obstacle
//! snapshots, expanded nodes, the planned path and wheel traces.

use std::collections::BTreeSet;
use std::fmt::Write;

use vstar::environment::zone_at_time;
use vstar::search::Expansion;
use vstar::{HeuristicField, Scenario, Shape, State, TrajectorySample, Vec2};

const PX_PER_M: f64 = 20.0;

/// Everything a figure may show; absent layers are skipped.
#[derive(Debug, Default, Clone, Copy)]
pub struct Figure<'a> {
    pub field: Option<&'a HeuristicField>,
    pub expansions: Option<&'a [Expansion]>,
    pub path: Option<&'a [State]>,
    pub trajectory: Option<&'a [TrajectorySample]>,
    /// Step interval between moving-obstacle snapshots.
    pub snapshot_every: u32,
}

struct Canvas<'s> {
    scenario: &'s Scenario,
    out: String,
}

impl Canvas<'_> {
    fn x(&self, x: f64) -> f64 {
        (x - self.scenario.bounds.min.x) * PX_PER_M
    }

    fn y(&self, y: f64) -> f64 {
        (self.scenario.bounds.max.y - y) * PX_PER_M
    }

    fn points(&self, pts: impl IntoIterator<Item = Vec2>) -> String {
        let mut s = String::new();
        for (k, p) in pts.into_iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", self.x(p.x), self.y(p.y));
        }
        s
    }

    fn line(&mut self, text: &str) {
        self.out.push_str(text);
        self.out.push('\n');
    }
}

pub fn render(scenario: &Scenario, fig: &Figure<'_>) -> String {
    let b = scenario.bounds;
    let (w, h) = (b.width() * PX_PER_M, b.height() * PX_PER_M);
    let mut c = Canvas {
        scenario,
        out: String::new(),
    };
    c.line(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    ));
    c.line(&format!(
        r##"<rect class="background" x="0" y="0" width="{w:.2}" height="{h:.2}" fill="#ffffff"/>"##
    ));

    if let Some(field) = fig.field {
        heat(&mut c, field);
    }
    obstacles(&mut c);
    if fig.snapshot_every > 0 {
        let last = fig.path.and_then(|p| p.last()).map_or(0, |s| s.t);
        snapshots(&mut c, last, fig.snapshot_every);
    }
    if let Some(exp) = fig.expansions {
        let unique: BTreeSet<(i32, i32)> = exp.iter().map(|e| (e.state.coord.i, e.state.coord.j)).collect();
        let spec = scenario.lattice_spec();
        c.line(r##"<g class="expanded" fill="#7f7f7f" fill-opacity="0.6">"##);
        for (i, j) in unique {
            let p = spec.position(vstar::LatticeCoord::new(i, j));
            let line = format!(r#"<circle cx="{:.2}" cy="{:.2}" r="1.5"/>"#, c.x(p.x), c.y(p.y));
            c.line(&line);
        }
        c.line("</g>");
    }
    if let Some(path) = fig.path.filter(|p| !p.is_empty()) {
        let pts = c.points(path.iter().map(|s| s.position));
        c.line(&format!(
            r##"<polyline class="path" points="{pts}" fill="none" stroke="#000000" stroke-width="1.5"/>"##
        ));
        c.line(r##"<g class="waypoints" fill="#000000">"##);
        for s in path {
            let mut line = format!(
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5""#,
                c.x(s.position.x),
                c.y(s.position.y)
            );
            if s.speed == 0.0 && s.t > 0 {
                line.push_str(r##" fill="#ff8c00""##);
            }
            line.push_str("/>");
            c.line(&line);
        }
        c.line("</g>");
    }
    if let Some(traj) = fig.trajectory.filter(|t| !t.is_empty()) {
        let front = c.points(traj.iter().map(|s| s.front));
        let rear = c.points(traj.iter().map(|s| s.rear));
        c.line(&format!(
            r##"<polyline class="front" points="{front}" fill="none" stroke="#1f4fd8" stroke-width="1.2" stroke-dasharray="6,4"/>"##
        ));
        c.line(&format!(
            r##"<polyline class="rear" points="{rear}" fill="none" stroke="#d62728" stroke-width="1.2"/>"##
        ));
    }
    let (s, g) = (scenario.start.position, scenario.goal);
    c.line(&format!(
        r##"<circle class="start" cx="{:.2}" cy="{:.2}" r="5" fill="#2ca02c"/>"##,
        c.x(s.x),
        c.y(s.y)
    ));
    c.line(&format!(
        r##"<circle class="goal" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#2ca02c" stroke-width="2"/>"##,
        c.x(g.x),
        c.y(g.y),
        scenario.planner.goal_tolerance * PX_PER_M
    ));
    c.line("</svg>");
    c.out
}

/// Darker cells are closer to the goal; unreachable cells are left blank.
fn heat(c: &mut Canvas<'_>, field: &HeuristicField) {
    let max = field.max_finite().max(1e-9);
    let size = field.cell * PX_PER_M;
    c.line(r#"<g class="heat">"#);
    for iy in 0..field.height {
        for ix in 0..field.width {
            let v = field.get(ix, iy);
            if !v.is_finite() {
                continue;
            }
            let shade = (60.0 + 195.0 * (v / max)).round() as u8;
            let lo = field.origin + Vec2::new(ix as f64 * field.cell, (iy + 1) as f64 * field.cell);
            let line = format!(
                r##"<rect x="{:.2}" y="{:.2}" width="{size:.2}" height="{size:.2}" fill="#{shade:02x}{shade:02x}{shade:02x}"/>"##,
                c.x(lo.x),
                c.y(lo.y)
            );
            c.line(&line);
        }
    }
    c.line("</g>");
}

fn obstacles(c: &mut Canvas<'_>) {
    c.line(r##"<g class="obstacles" fill="#3a3a3a">"##);
    for o in &c.scenario.static_obstacles {
        let line = match &o.shape {
            Shape::Circle { center, radius } => format!(
                r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
                c.x(center.x),
                c.y(center.y),
                radius * PX_PER_M
            ),
            Shape::Rect { min, max } => format!(
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                c.x(min.x),
                c.y(max.y),
                (max.x - min.x) * PX_PER_M,
                (max.y - min.y) * PX_PER_M
            ),
            Shape::Polygon { vertices } => {
                format!(r#"<polygon points="{}"/>"#, c.points(vertices.iter().copied()))
            }
        };
        c.line(&line);
    }
    c.line("</g>");
}

/// Safety zones at regular steps with the obstacle speed in m/s.
fn snapshots(c: &mut Canvas<'_>, last_step: u32, every: u32) {
    let zone = c.scenario.zone_params();
    let tau = c.scenario.planner.tau;
    c.line(r##"<g class="movers" fill="#9467bd" fill-opacity="0.25" stroke="#9467bd">"##);
    for o in &c.scenario.moving_obstacles {
        let mut t = 0;
        while t <= last_step.max(o.horizon().min(every * 4)) {
            let z = zone_at_time(o, f64::from(t), &zone);
            let speed = o.velocity_at(f64::from(t), tau).norm();
            let (cx, cy) = (c.x(z.center.x), c.y(z.center.y));
            let line = format!(
                r#"<ellipse cx="{cx:.2}" cy="{cy:.2}" rx="{:.2}" ry="{:.2}" transform="rotate({:.2} {cx:.2} {cy:.2})"/>"#,
                z.semi_major * PX_PER_M,
                z.semi_minor * PX_PER_M,
                -z.orientation.to_degrees()
            );
            c.line(&line);
            let label = format!(
                r##"<text x="{cx:.2}" y="{:.2}" font-size="10" text-anchor="middle" fill="#4b2a7a" stroke="none">t={t} {speed:.1} m/s</text>"##,
                cy - z.semi_major * PX_PER_M - 3.0
            );
            c.line(&label);
            t += every;
        }
    }
    c.line("</g>");
}
