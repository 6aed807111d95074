//! ASCII and SVG snapshots of a run at a chosen step.

use std::fmt::Write;

use disperse_core::engine::{Simulation, TraceDetail};
use disperse_core::{Algorithm, Cell, Direction, EngineError, Environment, Schedule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("step {at} is past the end of the run at step {last}")]
    StepOutOfRange { at: u64, last: u64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// What occupies a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mark {
    Settled,
    /// Active robot with its primary direction when the policy keeps one.
    Active(Option<Direction>),
}

/// The world at the end of step `t`.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: u64,
    pub env: Environment,
    pub robots: Vec<(Cell, Mark)>,
}

impl Snapshot {
    pub fn mark_at(&self, c: Cell) -> Option<Mark> {
        self.robots.iter().find(|(p, _)| *p == c).map(|&(_, m)| m)
    }
}

/// Replays `alg` under `schedule` up to the end of step `at`.
pub fn snapshot(
    env: &Environment,
    alg: Algorithm,
    schedule: Schedule,
    at: u64,
) -> Result<Snapshot, RenderError> {
    let mut sim = Simulation::new(env.clone(), schedule, TraceDetail::Compact);
    let mut policy = alg.policy(env);
    while sim.world.clock() < at {
        if sim.world.is_complete() {
            return Err(RenderError::StepOutOfRange {
                at,
                last: sim.world.clock(),
            });
        }
        sim.step(policy.as_mut())?;
    }
    let w = &sim.world;
    let robots = (0..w.robots().len())
        .map(|i| {
            let r = w.robot(i);
            let mark = if r.settled {
                Mark::Settled
            } else {
                Mark::Active(policy.heading(w, i))
            };
            (r.pos, mark)
        })
        .collect();
    Ok(Snapshot {
        t: at,
        env: env.clone(),
        robots,
    })
}

/// Rows from top to bottom with a one-cell wall margin.
fn frame(env: &Environment) -> (Cell, Cell) {
    let b = env
        .region()
        .tight_bounds()
        .expect("environment is non-empty");
    (
        Cell::new(b.min.x - 1, b.min.y - 1),
        Cell::new(b.max.x + 1, b.max.y + 1),
    )
}

/// `#` wall, `.` free, `S` empty source, `o` settled, arrows for active
/// robots and `@` for an active robot without a heading.
pub fn to_ascii(s: &Snapshot) -> String {
    let (lo, hi) = frame(&s.env);
    let mut out = String::new();
    for y in (lo.y..=hi.y).rev() {
        for x in lo.x..=hi.x {
            let c = Cell::new(x, y);
            let ch = match s.mark_at(c) {
                Some(Mark::Settled) => 'o',
                Some(Mark::Active(Some(d))) => d.glyph(),
                Some(Mark::Active(None)) => '@',
                None if c == s.env.source() => 'S',
                None if s.env.contains(c) => '.',
                None => '#',
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

/// Static SVG: walls shaded, free cells white, source outlined, settled
/// robots as dots and active robots as arrows.
pub fn to_svg(s: &Snapshot, px: u32) -> String {
    let (lo, hi) = frame(&s.env);
    let (w, h) = ((hi.x - lo.x + 1) as u32, (hi.y - lo.y + 1) as u32);
    let px = px.max(4) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w as f64 * px,
        h as f64 * px,
        w as f64 * px,
        h as f64 * px
    );
    let _ = writeln!(out, "<title>t={} robots={}</title>", s.t, s.robots.len());
    let origin = |c: Cell| ((c.x - lo.x) as f64 * px, (hi.y - c.y) as f64 * px);
    for y in (lo.y..=hi.y).rev() {
        for x in lo.x..=hi.x {
            let c = Cell::new(x, y);
            let (cx, cy) = origin(c);
            let fill = if s.env.contains(c) {
                "#ffffff"
            } else {
                "#5a5a5a"
            };
            let _ = writeln!(
                out,
                r##"<rect x="{cx}" y="{cy}" width="{px}" height="{px}" fill="{fill}" stroke="#c8c8c8" stroke-width="0.5"/>"##
            );
        }
    }
    let (sx, sy) = origin(s.env.source());
    let inset = px * 0.08;
    let _ = writeln!(
        out,
        r##"<rect class="source" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#d62728" stroke-width="{}"/>"##,
        sx + inset,
        sy + inset,
        px - 2.0 * inset,
        px - 2.0 * inset,
        px * 0.1
    );
    for &(c, mark) in &s.robots {
        let (x, y) = origin(c);
        let (mx, my) = (x + px / 2.0, y + px / 2.0);
        match mark {
            Mark::Settled => {
                let _ = writeln!(
                    out,
                    r#"<circle class="settled" cx="{mx}" cy="{my}" r="{}" fill="black"/>"#,
                    px * 0.18
                );
            }
            Mark::Active(Some(d)) => {
                // Arrow pointing up, rotated clockwise into place. SVG's y axis points down.
                let angle = 90 * d.code() as u32;
                let (a, b) = (px * 0.35, px * 0.25);
                let _ = writeln!(
                    out,
                    r#"<polygon class="active" data-dir="{}" points="{mx},{} {},{} {mx},{} {},{}" fill="black" transform="rotate({angle} {mx} {my})"/>"#,
                    d.name(),
                    my - a,
                    mx + b,
                    my + a,
                    my + a * 0.4,
                    mx - b,
                    my + a
                );
            }
            Mark::Active(None) => {
                let _ = writeln!(
                    out,
                    r#"<circle class="active" cx="{mx}" cy="{my}" r="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
                    px * 0.25,
                    px * 0.08
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
