//! ASCII and MovingAI map formats.
//!
//! Text rows run top to bottom, so the last row is `y = 0` and the first
//! column is `x = 0`.

use alloc::string::String;
use alloc::vec::Vec;

use super::{EnvError, Environment, Region};
use crate::grid::Cell;

fn rows_of(text: &str) -> Vec<&str> {
    let mut rows: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while rows.last().is_some_and(|l| l.is_empty()) {
        rows.pop();
    }
    rows
}

/// Parses `.` free, `#` wall and a single `S` source. Only the component of
/// the source is kept.
pub fn from_ascii(text: &str) -> Result<Environment, EnvError> {
    let rows = rows_of(text);
    let height = rows.len() as i32;
    let mut free = Vec::new();
    let mut sources = Vec::new();
    for (r, line) in rows.iter().enumerate() {
        let y = height - 1 - r as i32;
        for (x, ch) in line.chars().enumerate() {
            let c = Cell::new(x as i32, y);
            match ch {
                '.' => free.push(c),
                'S' => {
                    free.push(c);
                    sources.push(c);
                }
                '#' => {}
                _ => return Err(EnvError::BadChar { line: r + 1, ch }),
            }
        }
    }
    if free.is_empty() {
        return Err(EnvError::EmptyRegion);
    }
    if sources.len() != 1 {
        return Err(EnvError::NoSource(sources.len()));
    }
    Environment::component(&Region::from_cells(free), sources[0])
}

/// Renders an environment in the format read by [`from_ascii`]. The picture
/// spans from the origin (or the region's minimum if negative) to the
/// region's maximum, so environments with non-negative coordinates round-trip.
pub fn to_ascii(env: &Environment) -> String {
    let b = env
        .region()
        .tight_bounds()
        .expect("environment is non-empty");
    let (x0, y0) = (b.min.x.min(0), b.min.y.min(0));
    let mut out = String::new();
    for y in (y0..=b.max.y).rev() {
        for x in x0..=b.max.x {
            let c = Cell::new(x, y);
            out.push(if c == env.source() {
                'S'
            } else if env.contains(c) {
                '.'
            } else {
                '#'
            });
        }
        out.push('\n');
    }
    out
}

fn header_value<'a>(
    line: Option<&'a str>,
    line_no: usize,
    key: &'static str,
    expected: &'static str,
) -> Result<&'a str, EnvError> {
    let bad = EnvError::MalformedHeader {
        line: line_no,
        expected,
    };
    let line = line.ok_or(bad.clone())?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(bad);
    }
    let value = parts.next().ok_or(bad.clone())?;
    if parts.next().is_some() {
        return Err(bad);
    }
    Ok(value)
}

/// Parses a MovingAI `.map` file. `.` and `G` are passable, every other
/// terrain character is an obstacle.
pub fn load_movingai(text: &str, source: Cell) -> Result<Environment, EnvError> {
    let rows = rows_of(text);
    let mut it = rows.iter().copied();
    header_value(it.next(), 1, "type", "type <name>")?;
    let height: usize = header_value(it.next(), 2, "height", "height <H>")?
        .parse()
        .map_err(|_| EnvError::MalformedHeader {
            line: 2,
            expected: "height <H>",
        })?;
    let width: usize = header_value(it.next(), 3, "width", "width <W>")?
        .parse()
        .map_err(|_| EnvError::MalformedHeader {
            line: 3,
            expected: "width <W>",
        })?;
    if it.next().map(str::trim) != Some("map") {
        return Err(EnvError::MalformedHeader {
            line: 4,
            expected: "map",
        });
    }
    let body: Vec<&str> = it.collect();
    if body.len() != height {
        return Err(EnvError::DimensionMismatch {
            what: "row count differs from height",
        });
    }
    let mut free = Vec::new();
    for (r, line) in body.iter().enumerate() {
        if line.chars().count() != width {
            return Err(EnvError::DimensionMismatch {
                what: "row length differs from width",
            });
        }
        let y = (height - 1 - r) as i32;
        for (x, ch) in line.chars().enumerate() {
            if ch == '.' || ch == 'G' {
                free.push(Cell::new(x as i32, y));
            }
        }
    }
    let region = Region::from_cells(free);
    if !region.contains(source) {
        return Err(EnvError::SourceBlocked(source));
    }
    Environment::component(&region, source)
}
