//! Depth-first leader-follower baseline.

use alloc::vec::Vec;

use crate::engine::{Action, Capabilities, Decision, EngineError, Policy, RobotId, World};
use crate::environment::Environment;
use crate::grid::{Cell, Direction};

/// The leader walks to an unexplored neighbor, clockwise first, and settles
/// when there is none; its successor then leads. Every other robot steps
/// into the cell its predecessor held at the start of the previous step.
#[derive(Clone, Debug)]
pub struct Dflf {
    explored: Vec<bool>,
    prev_pos: Vec<Option<Cell>>,
    cur_pos: Vec<Cell>,
}

impl Dflf {
    pub fn new(env: &Environment) -> Dflf {
        Dflf {
            explored: alloc::vec![false; env.region().capacity()],
            prev_pos: Vec::new(),
            cur_pos: Vec::new(),
        }
    }
}

impl Policy for Dflf {
    fn name(&self) -> &'static str {
        "dflf"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::global()
    }

    fn begin_step(&mut self, world: &World) {
        self.prev_pos.clear();
        self.prev_pos.extend(self.cur_pos.iter().copied().map(Some));
        self.cur_pos.clear();
        self.cur_pos.extend(world.robots().iter().map(|r| r.pos));
        self.prev_pos.resize(self.cur_pos.len(), None);
        let region = world.env().region();
        for &id in world.active() {
            self.explored[region.slot(world.robot(id).pos).unwrap()] = true;
        }
    }

    fn decide(&mut self, world: &World, robot: RobotId) -> Result<Decision, EngineError> {
        let v = world.robot(robot).pos;
        if robot > 0 && !world.robot(robot - 1).settled {
            return Ok(match self.prev_pos[robot - 1] {
                Some(target) if target != v => {
                    let dir = v.direction_to(target).ok_or(EngineError::PolicyFailure {
                        robot,
                        reason: "predecessor's previous cell is not adjacent",
                    })?;
                    Decision::new(Action::Move(dir))
                }
                _ => Decision::new(Action::Wait),
            });
        }
        let region = world.env().region();
        for d in Direction::CLOCKWISE {
            let w = v.step(d);
            if let Some(j) = region.index(w) {
                if !self.explored[j] && world.occupant(w).is_none() {
                    self.explored[j] = true;
                    return Ok(Decision::new(Action::Move(d)));
                }
            }
        }
        Ok(Decision::new(Action::Settle))
    }
}
