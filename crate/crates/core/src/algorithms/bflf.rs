//! Breadth-first leader-follower baseline.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Action, Capabilities, Decision, EngineError, Policy, RobotId, World};
use crate::environment::{Environment, Region};
use crate::grid::Direction;

/// Cells are claimed as tree children when a robot first stands next to
/// them. A robot descends to the next unsettled child of its cell in
/// round-robin order, spreading successive robots over all branches, and
/// settles when every child is settled.
#[derive(Clone, Debug)]
pub struct Bflf {
    layout: Region,
    claimed: Vec<bool>,
    expanded: Vec<bool>,
    children: Vec<Vec<u32>>,
    next: Vec<u8>,
}

impl Bflf {
    pub fn new(env: &Environment) -> Bflf {
        let layout = env.region().clone();
        let cap = layout.capacity();
        let mut claimed = vec![false; cap];
        claimed[layout.slot(env.source()).unwrap()] = true;
        Bflf {
            layout,
            claimed,
            expanded: vec![false; cap],
            children: vec![Vec::new(); cap],
            next: vec![0; cap],
        }
    }
}

impl Policy for Bflf {
    fn name(&self) -> &'static str {
        "bflf"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::global()
    }

    fn begin_step(&mut self, world: &World) {
        for &id in world.active() {
            let v = world.robot(id).pos;
            let u = self.layout.slot(v).unwrap();
            if self.expanded[u] {
                continue;
            }
            self.expanded[u] = true;
            for d in Direction::CLOCKWISE {
                if let Some(j) = self.layout.index(v.step(d)) {
                    if !self.claimed[j] {
                        self.claimed[j] = true;
                        self.children[u].push(j as u32);
                    }
                }
            }
        }
    }

    fn decide(&mut self, world: &World, robot: RobotId) -> Result<Decision, EngineError> {
        let v = world.robot(robot).pos;
        let u = self.layout.slot(v).unwrap();
        let kids = &self.children[u];
        let k = kids.len();
        for off in 0..k {
            let idx = (self.next[u] as usize + off) % k;
            let c = self.layout.cell_at(kids[idx] as usize);
            if !world.is_settled_at(c) {
                self.next[u] = ((idx + 1) % k) as u8;
                return Ok(Decision::new(Action::Move(v.direction_to(c).unwrap())));
            }
        }
        Ok(Decision::new(Action::Settle))
    }
}
