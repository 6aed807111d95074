//! Look-Compute-Move world loop.
//!
//! Every awake robot decides against the step-start configuration, all moves
//! commit at once, then settles apply, then the source may admit a robot.
//! Conflicting moves are errors, never arbitrated.

mod policy;
mod sensing;
mod trace;

use alloc::vec;
use alloc::vec::Vec;

use crate::environment::{Environment, Region};
use crate::grid::Cell;
use crate::rng::{WakeProbability, WakeStream, SOURCE_ENTITY};

pub use policy::{Action, Capabilities, Decision, Local, LocalRule, Policy, Register};
pub use sensing::{sense, Sensed, SensorView};
pub use trace::{Event, RobotRecord, Trace, TraceDetail, TraceError};

/// Zero-based robot index in entry order. Robot `i` is displayed as `A{i+1}`.
pub type RobotId = usize;

const NONE: u32 = u32::MAX;

/// Fatal engine conditions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("step {t}: robots A{} and A{} both move into {cell}", .robots.0 + 1, .robots.1 + 1)]
    CollisionSameCell {
        t: u64,
        cell: Cell,
        robots: (RobotId, RobotId),
    },
    #[error("step {t}: robots A{} and A{} swap cells", .robots.0 + 1, .robots.1 + 1)]
    CollisionSwap { t: u64, robots: (RobotId, RobotId) },
    #[error("step {t}: robot A{} moves into occupied {cell}", .robot + 1)]
    MoveIntoOccupied { t: u64, robot: RobotId, cell: Cell },
    #[error("step {t}: robot A{} moves off the region to {cell}", .robot + 1)]
    MoveOffRegion { t: u64, robot: RobotId, cell: Cell },
    #[error("step {t}: a robot moved onto the source while a new robot enters")]
    SourceCollision { t: u64 },
    #[error("robot A{} is settled", .0 + 1)]
    RobotSettled(RobotId),
    #[error("no robot A{}", .0 + 1)]
    UnknownRobot(RobotId),
    #[error("robot A{}: capability violation: {what}", .robot + 1)]
    CapabilityViolation { robot: RobotId, what: &'static str },
    #[error("robot A{}: policy failure: {reason}", .robot + 1)]
    PolicyFailure {
        robot: RobotId,
        reason: &'static str,
    },
    #[error("wake probability must lie in (0, 1]")]
    BadProbability,
    #[error("step limit must be positive")]
    BadStepLimit,
}

/// Which stream decides whether the source admits a robot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceWake {
    /// The source has its own stream.
    Independent,
    /// The source uses the stream of the robot it would admit next.
    NextRobot,
}

/// Timing model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    /// Everyone wakes every step.
    Synchronous,
    /// Each robot and the source wake independently with probability `p`.
    Bernoulli {
        p: WakeProbability,
        seed: u64,
        source: SourceWake,
    },
}

impl Schedule {
    pub fn bernoulli(p: f64, seed: u64) -> Result<Schedule, EngineError> {
        let p = WakeProbability::new(p).ok_or(EngineError::BadProbability)?;
        Ok(Schedule::Bernoulli {
            p,
            seed,
            source: SourceWake::Independent,
        })
    }

    /// Bernoulli schedule whose source is driven by the next robot's stream,
    /// so a robot's wake times are the same in every environment.
    pub fn coupled(p: f64, seed: u64) -> Result<Schedule, EngineError> {
        let p = WakeProbability::new(p).ok_or(EngineError::BadProbability)?;
        Ok(Schedule::Bernoulli {
            p,
            seed,
            source: SourceWake::NextRobot,
        })
    }

    pub fn p(&self) -> Option<f64> {
        match self {
            Schedule::Synchronous => None,
            Schedule::Bernoulli { p, .. } => Some(p.p()),
        }
    }

    fn source_wakes(&self, next_robot: RobotId, t: u64) -> bool {
        match *self {
            Schedule::Synchronous => true,
            Schedule::Bernoulli {
                p,
                seed,
                source: SourceWake::Independent,
            } => WakeStream::new(seed, SOURCE_ENTITY).wakes(t, p),
            Schedule::Bernoulli {
                p,
                seed,
                source: SourceWake::NextRobot,
            } => WakeStream::new(seed, next_robot as i64 + 1).wakes(t, p),
        }
    }
}

/// One robot's physical state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Robot {
    pub pos: Cell,
    pub settled: bool,
    pub register: u32,
    /// Step at whose end the robot appeared.
    pub t_start: u64,
    /// Step in which it settled.
    pub t_end: Option<u64>,
    pub moves: u64,
    pub broadcast: Option<u8>,
}

#[derive(Clone, Debug, Default)]
struct Scratch {
    awake: Vec<RobotId>,
    decisions: Vec<(RobotId, Decision)>,
    moves: Vec<(RobotId, usize, usize)>,
    target_of: Vec<u32>,
    claim: Vec<u64>,
    /// Wake streams of robots `0..`, built for `stream_seed`.
    streams: Vec<WakeStream>,
    stream_seed: Option<u64>,
}

/// Dynamic simulation state.
#[derive(Clone, Debug)]
pub struct World {
    env: Environment,
    clock: u64,
    robots: Vec<Robot>,
    occupancy: Vec<u32>,
    active: Vec<RobotId>,
    settled: usize,
    scratch: Scratch,
}

impl World {
    pub fn new(env: Environment) -> World {
        let cap = env.region().capacity();
        World {
            env,
            clock: 0,
            robots: Vec::new(),
            occupancy: vec![NONE; cap],
            active: Vec::new(),
            settled: 0,
            scratch: Scratch {
                claim: vec![0; cap],
                ..Scratch::default()
            },
        }
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn robot(&self, id: RobotId) -> &Robot {
        &self.robots[id]
    }

    /// Unsettled robots in entry order.
    pub fn active(&self) -> &[RobotId] {
        &self.active
    }

    pub fn settled_count(&self) -> usize {
        self.settled
    }

    /// Every free cell holds a settled robot.
    pub fn is_complete(&self) -> bool {
        self.settled == self.env.n()
    }

    #[inline]
    pub fn occupant(&self, c: Cell) -> Option<RobotId> {
        self.occupant_at_slot(self.env.region().index(c)?)
    }

    #[inline]
    pub(crate) fn occupant_at_slot(&self, slot: usize) -> Option<RobotId> {
        let r = self.occupancy[slot];
        (r != NONE).then_some(r as RobotId)
    }

    pub fn is_settled_at(&self, c: Cell) -> bool {
        self.occupant(c).is_some_and(|r| self.robots[r].settled)
    }

    /// Free cells not holding a settled robot.
    pub fn residual_region(&self) -> Region {
        let mut r = self.env.region().clone();
        for robot in self.robots.iter().filter(|r| r.settled) {
            r.remove(robot.pos);
        }
        r
    }

    /// Per-robot summary comparable with [`Trace::replay`].
    pub fn records(&self, with_broadcast: bool) -> Vec<RobotRecord> {
        self.robots
            .iter()
            .map(|r| RobotRecord {
                pos: r.pos,
                settled: r.settled,
                t_start: r.t_start,
                t_end: r.t_end,
                moves: r.moves,
                broadcast: if with_broadcast { r.broadcast } else { None },
            })
            .collect()
    }

    /// Advances one step.
    pub fn step(
        &mut self,
        schedule: &Schedule,
        policy: &mut dyn Policy,
        trace: &mut Trace,
    ) -> Result<(), EngineError> {
        let t = self.clock + 1;
        let full = trace.detail() == TraceDetail::Full;
        let mut s = core::mem::take(&mut self.scratch);
        let result = self.step_inner(t, full, schedule, policy, trace, &mut s);
        self.scratch = s;
        result?;
        self.clock = t;
        trace.set_steps(t);
        Ok(())
    }

    fn step_inner(
        &mut self,
        t: u64,
        full: bool,
        schedule: &Schedule,
        policy: &mut dyn Policy,
        trace: &mut Trace,
        s: &mut Scratch,
    ) -> Result<(), EngineError> {
        let src = self.env.source();
        let src_slot = self.env.region().index(src).expect("source is free");
        let source_empty = self.occupancy[src_slot] == NONE;
        let source_awake = schedule.source_wakes(self.robots.len(), t);

        s.awake.clear();
        match *schedule {
            Schedule::Synchronous => s.awake.extend_from_slice(&self.active),
            Schedule::Bernoulli { p, seed, .. } => {
                if s.stream_seed != Some(seed) {
                    s.streams.clear();
                    s.stream_seed = Some(seed);
                }
                while s.streams.len() < self.robots.len() {
                    s.streams
                        .push(WakeStream::new(seed, s.streams.len() as i64 + 1));
                }
                let streams = &s.streams;
                s.awake.extend(
                    self.active
                        .iter()
                        .copied()
                        .filter(|&r| streams[r].wakes(t, p)),
                );
            }
        }

        policy.begin_step(self);
        let caps = policy.capabilities();
        s.decisions.clear();
        for &r in &s.awake {
            if full {
                trace.push(Event::Wake {
                    t,
                    robot: r,
                    cell: self.robots[r].pos,
                });
            }
            let d = policy.decide(self, r)?;
            if let Some(b) = d.broadcast {
                if !caps.allows_broadcast(b) {
                    return Err(EngineError::CapabilityViolation {
                        robot: r,
                        what: "broadcast exceeds budget",
                    });
                }
            }
            s.decisions.push((r, d));
        }

        let region = self.env.region();
        s.moves.clear();
        if s.target_of.len() < self.robots.len() {
            s.target_of.resize(self.robots.len(), NONE);
        }
        for &(r, d) in &s.decisions {
            if let Action::Move(dir) = d.action {
                let from = self.robots[r].pos;
                let to = from.step(dir);
                let to_slot = region.index(to).ok_or(EngineError::MoveOffRegion {
                    t,
                    robot: r,
                    cell: to,
                })?;
                s.moves.push((r, region.index(from).unwrap(), to_slot));
                s.target_of[r] = to_slot as u32;
            }
        }
        let check = (|| {
            for &(r, from, to) in &s.moves {
                let occ = self.occupancy[to];
                if occ != NONE {
                    if s.target_of[occ as usize] == from as u32 {
                        return Err(EngineError::CollisionSwap {
                            t,
                            robots: (r, occ as RobotId),
                        });
                    }
                    return Err(EngineError::MoveIntoOccupied {
                        t,
                        robot: r,
                        cell: region.cell_at(to),
                    });
                }
                if s.claim[to] == t {
                    let other = s.moves.iter().find(|m| m.2 == to).unwrap().0;
                    return Err(EngineError::CollisionSameCell {
                        t,
                        cell: region.cell_at(to),
                        robots: (other, r),
                    });
                }
                s.claim[to] = t;
            }
            Ok(())
        })();
        for &(r, _, _) in &s.moves {
            s.target_of[r] = NONE;
        }
        check?;

        for &(_, from, _) in &s.moves {
            self.occupancy[from] = NONE;
        }
        for &(r, from, to) in &s.moves {
            self.occupancy[to] = r as u32;
            let robot = &mut self.robots[r];
            robot.pos = region.cell_at(to);
            robot.moves += 1;
            trace.push(Event::Move {
                t,
                robot: r,
                from: region.cell_at(from),
                to: robot.pos,
            });
        }

        let mut any_settled = false;
        for &(r, d) in &s.decisions {
            let robot = &mut self.robots[r];
            robot.register = d.register;
            if d.action == Action::Settle {
                robot.settled = true;
                robot.t_end = Some(t);
                robot.broadcast = None;
                self.settled += 1;
                any_settled = true;
                trace.push(Event::Settle {
                    t,
                    robot: r,
                    cell: robot.pos,
                });
            } else if let Some(b) = d.broadcast {
                robot.broadcast = Some(b);
                if full {
                    trace.push(Event::Broadcast {
                        t,
                        robot: r,
                        cell: robot.pos,
                        bits: b,
                    });
                }
            }
        }
        if any_settled {
            let robots = &self.robots;
            self.active.retain(|&r| !robots[r].settled);
        }

        if source_awake {
            if source_empty {
                if self.occupancy[src_slot] != NONE {
                    return Err(EngineError::SourceCollision { t });
                }
                let id = self.robots.len();
                let broadcast = policy.entry_broadcast();
                self.robots.push(Robot {
                    pos: src,
                    settled: false,
                    register: 0,
                    t_start: t,
                    t_end: None,
                    moves: 0,
                    broadcast,
                });
                self.occupancy[src_slot] = id as u32;
                self.active.push(id);
                trace.push(Event::Enter {
                    t,
                    robot: id,
                    cell: src,
                });
                if let (true, Some(b)) = (full, broadcast) {
                    trace.push(Event::Broadcast {
                        t,
                        robot: id,
                        cell: src,
                        bits: b,
                    });
                }
            } else {
                trace.push(Event::SourceBlocked { t, cell: src });
            }
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Complete,
    StepLimitExceeded,
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: Trace,
    pub world: World,
    pub outcome: RunOutcome,
}

/// Steps until every cell holds a settled robot or `step_limit` steps ran.
pub fn run(
    env: &Environment,
    policy: &mut dyn Policy,
    schedule: &Schedule,
    step_limit: u64,
    detail: TraceDetail,
) -> Result<RunOutput, EngineError> {
    let mut sim = Simulation::new(env.clone(), *schedule, detail);
    let outcome = sim.run_until_complete(policy, step_limit)?;
    Ok(RunOutput {
        trace: sim.trace,
        world: sim.world,
        outcome,
    })
}

/// A world with its schedule and trace, advanced one step at a time.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub world: World,
    pub trace: Trace,
    pub schedule: Schedule,
}

impl Simulation {
    pub fn new(env: Environment, schedule: Schedule, detail: TraceDetail) -> Simulation {
        let trace = Trace::new(&env, detail);
        Simulation {
            world: World::new(env),
            trace,
            schedule,
        }
    }

    pub fn step(&mut self, policy: &mut dyn Policy) -> Result<(), EngineError> {
        self.world.step(&self.schedule, policy, &mut self.trace)
    }

    /// Steps until complete or until the clock reaches `step_limit`.
    pub fn run_until_complete(
        &mut self,
        policy: &mut dyn Policy,
        step_limit: u64,
    ) -> Result<RunOutcome, EngineError> {
        if step_limit == 0 {
            return Err(EngineError::BadStepLimit);
        }
        while !self.world.is_complete() {
            if self.world.clock() >= step_limit {
                return Ok(RunOutcome::StepLimitExceeded);
            }
            self.step(policy)?;
        }
        Ok(RunOutcome::Complete)
    }
}
