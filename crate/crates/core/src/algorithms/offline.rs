//! Omniscient energy-optimal controller.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Action, Capabilities, Decision, EngineError, Policy, RobotId, World};
use crate::grid::Direction;

const FAR: u32 = u32::MAX;

/// Every active robot steps to the first neighbor, clockwise, that is farther
/// from the source in the unsettled region, and settles when none is. Under
/// asynchronous timing it waits while that neighbor is occupied.
#[derive(Clone, Debug, Default)]
pub struct OfflineOptimal {
    dist: Vec<u32>,
    settled_seen: Option<usize>,
}

impl OfflineOptimal {
    pub fn new() -> Self {
        Self::default()
    }

    fn recompute(&mut self, world: &World) {
        let region = world.env().region();
        self.dist.clear();
        self.dist.resize(region.capacity(), FAR);
        let src = world.env().source();
        if world.is_settled_at(src) {
            return;
        }
        let start = region.index(src).unwrap();
        self.dist[start] = 0;
        let mut queue = VecDeque::from(vec![start]);
        while let Some(i) = queue.pop_front() {
            for u in region.free_neighbors(region.cell_at(i)) {
                let j = region.slot(u).unwrap();
                if self.dist[j] == FAR && !world.is_settled_at(u) {
                    self.dist[j] = self.dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
}

impl Policy for OfflineOptimal {
    fn name(&self) -> &'static str {
        "offline-opt"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::global()
    }

    fn begin_step(&mut self, world: &World) {
        if self.settled_seen != Some(world.settled_count()) {
            self.recompute(world);
            self.settled_seen = Some(world.settled_count());
        }
    }

    fn decide(&mut self, world: &World, robot: RobotId) -> Result<Decision, EngineError> {
        let region = world.env().region();
        let v = world.robot(robot).pos;
        let dv = self.dist[region.slot(v).unwrap()];
        let step = Direction::CLOCKWISE.into_iter().find(|&d| {
            let w = v.step(d);
            region
                .index(w)
                .is_some_and(|j| self.dist[j] != FAR && self.dist[j] == dv + 1)
        });
        Ok(Decision::new(match step {
            None => Action::Settle,
            Some(d) if world.occupant(v.step(d)).is_some() => Action::Wait,
            Some(d) => Action::Move(d),
        }))
    }
}
