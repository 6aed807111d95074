//! Event log, its text form, and replay.
//!
//! Lines are `t,event,robot,x,y[,x2,y2]` with robots numbered from 1 in entry
//! order and the source written as robot `-1`. A `#` header records the
//! region size, the source and the number of steps.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::RobotId;
use crate::environment::Environment;
use crate::grid::Cell;

/// How much is logged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraceDetail {
    /// Every event including wakes and broadcasts.
    #[default]
    Full,
    /// Entries, moves, settles and blocked entries only.
    Compact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Enter {
        t: u64,
        robot: RobotId,
        cell: Cell,
    },
    Wake {
        t: u64,
        robot: RobotId,
        cell: Cell,
    },
    Move {
        t: u64,
        robot: RobotId,
        from: Cell,
        to: Cell,
    },
    Settle {
        t: u64,
        robot: RobotId,
        cell: Cell,
    },
    Broadcast {
        t: u64,
        robot: RobotId,
        cell: Cell,
        bits: u8,
    },
    SourceBlocked {
        t: u64,
        cell: Cell,
    },
}

impl Event {
    pub fn t(&self) -> u64 {
        match *self {
            Event::Enter { t, .. }
            | Event::Wake { t, .. }
            | Event::Move { t, .. }
            | Event::Settle { t, .. }
            | Event::Broadcast { t, .. }
            | Event::SourceBlocked { t, .. } => t,
        }
    }

    /// True for events that change positions or settled flags.
    pub fn is_physical(&self) -> bool {
        matches!(
            self,
            Event::Enter { .. } | Event::Move { .. } | Event::Settle { .. }
        )
    }

    fn write_line(&self, out: &mut String) {
        let id = |r: RobotId| r as i64 + 1;
        let _ = match *self {
            Event::Enter { t, robot, cell } => {
                writeln!(out, "{t},enter,{},{},{}", id(robot), cell.x, cell.y)
            }
            Event::Wake { t, robot, cell } => {
                writeln!(out, "{t},wake,{},{},{}", id(robot), cell.x, cell.y)
            }
            Event::Move { t, robot, from, to } => {
                writeln!(
                    out,
                    "{t},move,{},{},{},{},{}",
                    id(robot),
                    from.x,
                    from.y,
                    to.x,
                    to.y
                )
            }
            Event::Settle { t, robot, cell } => {
                writeln!(out, "{t},settle,{},{},{}", id(robot), cell.x, cell.y)
            }
            Event::Broadcast {
                t,
                robot,
                cell,
                bits,
            } => {
                writeln!(
                    out,
                    "{t},broadcast,{},{},{},{bits}",
                    id(robot),
                    cell.x,
                    cell.y
                )
            }
            Event::SourceBlocked { t, cell } => {
                writeln!(out, "{t},source_blocked,-1,{},{}", cell.x, cell.y)
            }
        };
    }
}

/// Errors reading or replaying a trace.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: &'static str },
    #[error("step {t}: replay inconsistency: {reason}")]
    Replay { t: u64, reason: &'static str },
}

/// Append-only log of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    n: usize,
    source: Cell,
    steps: u64,
    detail: TraceDetail,
    events: Vec<Event>,
}

impl Trace {
    pub fn new(env: &Environment, detail: TraceDetail) -> Trace {
        Trace {
            n: env.n(),
            source: env.source(),
            steps: 0,
            detail,
            events: Vec::new(),
        }
    }

    /// Region size the run was filling.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> Cell {
        self.source
    }

    /// Number of steps executed.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn detail(&self) -> TraceDetail {
        self.detail
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub(crate) fn set_steps(&mut self, t: u64) {
        self.steps = t;
    }

    /// Physical events only, for comparing runs that differ in wakes and broadcasts.
    pub fn physical(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.is_physical())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# n={} source={},{} steps={}",
            self.n, self.source.x, self.source.y, self.steps
        );
        for e in &self.events {
            e.write_line(&mut out);
        }
        out
    }

    /// Parses the output of [`Trace::to_text`].
    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, reason| TraceError::Parse {
            line: line + 1,
            reason,
        };
        let (_, header) = lines.next().ok_or(bad(0, "empty trace"))?;
        let header = header.strip_prefix("# ").ok_or(bad(0, "missing header"))?;
        let (mut n, mut source, mut steps) = (None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or(bad(0, "header field without '='"))?;
            match k {
                "n" => n = v.parse().ok(),
                "steps" => steps = v.parse().ok(),
                "source" => {
                    source = v
                        .split_once(',')
                        .and_then(|(x, y)| Some(Cell::new(x.parse().ok()?, y.parse().ok()?)))
                }
                _ => return Err(bad(0, "unknown header field")),
            }
        }
        let mut trace = Trace {
            n: n.ok_or(bad(0, "header lacks n"))?,
            source: source.ok_or(bad(0, "header lacks source"))?,
            steps: steps.ok_or(bad(0, "header lacks steps"))?,
            detail: TraceDetail::Compact,
            events: Vec::new(),
        };
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() < 5 {
                return Err(bad(i, "too few fields"));
            }
            let num = |s: &str| s.parse::<i64>().map_err(|_| bad(i, "bad number"));
            let t = f[0].parse::<u64>().map_err(|_| bad(i, "bad step"))?;
            let rid = num(f[2])?;
            let robot = if rid >= 1 { (rid - 1) as RobotId } else { 0 };
            let cell = Cell::new(num(f[3])? as i32, num(f[4])? as i32);
            let want = |k: usize| {
                if f.len() == k {
                    Ok(())
                } else {
                    Err(bad(i, "wrong field count"))
                }
            };
            let need_robot = || {
                if rid >= 1 {
                    Ok(())
                } else {
                    Err(bad(i, "robot index must be positive"))
                }
            };
            let e = match f[1] {
                "enter" => {
                    want(5)?;
                    need_robot()?;
                    Event::Enter { t, robot, cell }
                }
                "wake" => {
                    want(5)?;
                    need_robot()?;
                    trace.detail = TraceDetail::Full;
                    Event::Wake { t, robot, cell }
                }
                "settle" => {
                    want(5)?;
                    need_robot()?;
                    Event::Settle { t, robot, cell }
                }
                "move" => {
                    want(7)?;
                    need_robot()?;
                    Event::Move {
                        t,
                        robot,
                        from: cell,
                        to: Cell::new(num(f[5])? as i32, num(f[6])? as i32),
                    }
                }
                "broadcast" => {
                    want(6)?;
                    need_robot()?;
                    trace.detail = TraceDetail::Full;
                    Event::Broadcast {
                        t,
                        robot,
                        cell,
                        bits: f[5].parse().map_err(|_| bad(i, "bad payload"))?,
                    }
                }
                "source_blocked" => {
                    want(5)?;
                    Event::SourceBlocked { t, cell }
                }
                _ => return Err(bad(i, "unknown event")),
            };
            trace.events.push(e);
        }
        Ok(trace)
    }

    /// Rebuilds every robot's final record by applying the events in order.
    pub fn replay(&self, env: &Environment) -> Result<Vec<RobotRecord>, TraceError> {
        let mut robots: Vec<RobotRecord> = Vec::new();
        let mut occupied = alloc::collections::BTreeMap::new();
        let fail = |t, reason| TraceError::Replay { t, reason };
        for e in &self.events {
            match *e {
                Event::Enter { t, robot, cell } => {
                    if robot != robots.len() || cell != env.source() {
                        return Err(fail(t, "entry out of order or away from source"));
                    }
                    if occupied.insert(cell, robot).is_some() {
                        return Err(fail(t, "entry into occupied source"));
                    }
                    robots.push(RobotRecord {
                        pos: cell,
                        settled: false,
                        t_start: t,
                        t_end: None,
                        moves: 0,
                        broadcast: None,
                    });
                }
                Event::Move { t, robot, from, to } => {
                    let r = robots.get_mut(robot).ok_or(fail(t, "unknown robot"))?;
                    if r.pos != from || r.settled || !from.is_adjacent(to) || !env.contains(to) {
                        return Err(fail(t, "illegal move"));
                    }
                    if occupied.get(&from) == Some(&robot) {
                        occupied.remove(&from);
                    }
                    r.pos = to;
                    r.moves += 1;
                    occupied.insert(to, robot);
                }
                Event::Settle { t, robot, cell } => {
                    let r = robots.get_mut(robot).ok_or(fail(t, "unknown robot"))?;
                    if r.pos != cell || r.settled {
                        return Err(fail(t, "illegal settle"));
                    }
                    r.settled = true;
                    r.t_end = Some(t);
                    r.broadcast = None;
                }
                Event::Broadcast { t, robot, bits, .. } => {
                    let r = robots.get_mut(robot).ok_or(fail(t, "unknown robot"))?;
                    r.broadcast = Some(bits);
                }
                Event::Wake { .. } | Event::SourceBlocked { .. } => {}
            }
        }
        let mut seen = alloc::collections::BTreeSet::new();
        if robots.iter().any(|r| !seen.insert(r.pos)) {
            return Err(fail(self.steps, "two robots share a cell"));
        }
        Ok(robots)
    }
}

/// Final state of one robot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RobotRecord {
    pub pos: Cell,
    pub settled: bool,
    pub t_start: u64,
    pub t_end: Option<u64>,
    pub moves: u64,
    pub broadcast: Option<u8>,
}
