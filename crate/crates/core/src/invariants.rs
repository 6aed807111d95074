//! Run monitors for the structural properties of corner-following dispersion.

use alloc::vec::Vec;

use crate::engine::{
    EngineError, Event, Policy, RobotId, RunOutcome, Schedule, Simulation, Trace, TraceDetail,
};
use crate::environment::{classify, is_simply_connected, Environment};
use crate::grid::{Cell, Direction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantViolation {
    /// A robot settled at a cell that is not a corner of the unsettled region.
    SettleOffCorner { t: u64, robot: RobotId, cell: Cell },
    /// A robot changed its primary direction away from a hall.
    TurnOffHall { t: u64, robot: RobotId, cell: Cell },
    /// The unsettled region stopped being simply connected.
    RegionNotSimple { t: u64 },
    /// A robot did not step into its predecessor's previous cell.
    FollowBroken { t: u64, robot: RobotId },
    /// Two active robots were adjacent at a step boundary.
    ActiveAdjacent { t: u64, robots: (RobotId, RobotId) },
    /// More robots were active than the depth of the region.
    TooManyActive { t: u64, count: usize, limit: usize },
    /// The run hit its step limit.
    Unfinished,
}

/// Which checks to run after every step.
#[derive(Clone, Copy, Debug, Default)]
pub struct Checks {
    pub corners_and_halls: bool,
    pub follow_the_leader: bool,
    pub separation: bool,
    pub active_limit: Option<usize>,
}

impl Checks {
    /// Everything that holds for synchronous corner-following.
    pub fn corner_following() -> Checks {
        Checks {
            corners_and_halls: true,
            follow_the_leader: true,
            separation: false,
            active_limit: None,
        }
    }
}

/// Result of a monitored run.
#[derive(Clone, Debug)]
pub struct Monitored {
    pub trace: Trace,
    pub violations: Vec<InvariantViolation>,
    /// Largest number of simultaneously active robots seen.
    pub peak_active: usize,
}

/// Runs `policy` to completion, checking `checks` on every step.
pub fn run_monitored(
    env: &Environment,
    policy: &mut dyn Policy,
    schedule: Schedule,
    step_limit: u64,
    detail: TraceDetail,
    checks: Checks,
) -> Result<Monitored, EngineError> {
    let mut sim = Simulation::new(env.clone(), schedule, detail);
    let mut violations = Vec::new();
    let mut peak_active = 0;
    // Positions at the start of the previous step, indexed by robot.
    let mut before_prev: Vec<Cell> = Vec::new();
    let mut before: Vec<Cell> = Vec::new();
    let mut headings: Vec<Option<Direction>> = Vec::new();
    loop {
        if sim.world.is_complete() {
            break;
        }
        if sim.world.clock() >= step_limit {
            violations.push(InvariantViolation::Unfinished);
            break;
        }
        let t = sim.world.clock() + 1;
        let residual = checks
            .corners_and_halls
            .then(|| sim.world.residual_region());
        before_prev.clone_from(&before);
        before.clear();
        before.extend(sim.world.robots().iter().map(|r| r.pos));
        if checks.corners_and_halls {
            headings.clear();
            headings.extend((0..sim.world.robots().len()).map(|r| policy.heading(&sim.world, r)));
        }
        let active_before: Vec<RobotId> = sim.world.active().to_vec();
        let first_event = sim.trace.events().len();
        sim.step(policy)?;

        let mut settled_now = false;
        for e in &sim.trace.events()[first_event..] {
            match *e {
                Event::Settle { robot, cell, .. } => {
                    settled_now = true;
                    if let Some(region) = &residual {
                        if !classify(region, cell)
                            .map(|c| c.is_corner())
                            .unwrap_or(false)
                        {
                            violations.push(InvariantViolation::SettleOffCorner { t, robot, cell });
                        }
                    }
                }
                Event::Move { robot, to, .. } if checks.follow_the_leader && robot > 0 => {
                    let pred = robot - 1;
                    if active_before.binary_search(&pred).is_ok()
                        && before_prev.get(pred) != Some(&to)
                    {
                        violations.push(InvariantViolation::FollowBroken { t, robot });
                    }
                }
                _ => {}
            }
        }
        if let Some(region) = &residual {
            for &r in &active_before {
                let (old, new) = (headings[r], policy.heading(&sim.world, r));
                if old.is_some() && new != old && !sim.world.robot(r).settled {
                    let cell = before[r];
                    if !classify(region, cell).map(|c| c.is_hall()).unwrap_or(false) {
                        violations.push(InvariantViolation::TurnOffHall { t, robot: r, cell });
                    }
                }
            }
            if settled_now && !is_simply_connected(&sim.world.residual_region()) {
                violations.push(InvariantViolation::RegionNotSimple { t });
            }
        }
        let active = sim.world.active();
        peak_active = peak_active.max(active.len());
        if let Some(limit) = checks.active_limit {
            if active.len() > limit {
                violations.push(InvariantViolation::TooManyActive {
                    t,
                    count: active.len(),
                    limit,
                });
            }
        }
        if checks.separation {
            for (k, &a) in active.iter().enumerate() {
                for &b in &active[k + 1..] {
                    if sim.world.robot(a).pos.manhattan(sim.world.robot(b).pos) < 2 {
                        violations.push(InvariantViolation::ActiveAdjacent { t, robots: (a, b) });
                    }
                }
            }
        }
    }
    Ok(Monitored {
        trace: sim.trace,
        violations,
        peak_active,
    })
}

/// Convenience wrapper reporting whether the run completed.
pub fn outcome(m: &Monitored) -> RunOutcome {
    if m.violations.contains(&InvariantViolation::Unfinished) {
        RunOutcome::StepLimitExceeded
    } else {
        RunOutcome::Complete
    }
}
