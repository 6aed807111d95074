//! Centralized layer-by-layer filling along a breadth-first tree.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Action, Capabilities, Decision, EngineError, Policy, RobotId, World};
use crate::environment::{bfs_distances, Environment, Region};
use crate::grid::Direction;

const NONE: u32 = u32::MAX;

/// Robots only ever travel down edges of a fixed breadth-first tree, so each
/// travels exactly its distance from the source. Layer `L + 1` is opened only
/// once layers `0..=L` are full, which forces waiting.
#[derive(Clone, Debug)]
pub struct BfsTree {
    layout: Region,
    source: usize,
    parent: Vec<u32>,
    children: Vec<Vec<u32>>,
    size: Vec<u32>,
    height: Vec<u32>,
    layers: Vec<Vec<u32>>,
    filled_upto: Vec<usize>,
    level: usize,
    pending: Vec<u32>,
    total_pending: u64,
    count: Vec<u32>,
    entered: usize,
}

impl BfsTree {
    pub fn new(env: &Environment) -> BfsTree {
        let region = env.region().clone();
        let dist = bfs_distances(&region, env.source()).unwrap();
        let cap = region.capacity();
        let mut depth = vec![NONE; cap];
        let mut layers: Vec<Vec<u32>> = vec![Vec::new(); dist.max() as usize + 1];
        for (c, d) in dist.iter() {
            let i = region.slot(c).unwrap();
            depth[i] = d;
            layers[d as usize].push(i as u32);
        }
        let mut parent = vec![NONE; cap];
        let mut children = vec![Vec::new(); cap];
        for layer in &layers {
            for &i in layer {
                let v = region.cell_at(i as usize);
                for d in Direction::CLOCKWISE {
                    if let Some(j) = region.index(v.step(d)) {
                        if depth[j] == depth[i as usize] + 1 && parent[j] == NONE {
                            parent[j] = i;
                            children[i as usize].push(j as u32);
                        }
                    }
                }
            }
        }
        let mut size = vec![0u32; cap];
        let mut height = vec![0u32; cap];
        for layer in layers.iter().rev() {
            for &i in layer {
                let i = i as usize;
                size[i] += 1;
                height[i] = height[i].max(depth[i]);
                if parent[i] != NONE {
                    let p = parent[i] as usize;
                    size[p] += size[i];
                    height[p] = height[p].max(height[i]);
                }
            }
        }
        let mut filled_upto = Vec::with_capacity(layers.len());
        let mut acc = 0;
        for layer in &layers {
            acc += layer.len();
            filled_upto.push(acc);
        }
        let source = region.index(env.source()).unwrap();
        BfsTree {
            layout: region,
            source,
            parent,
            children,
            size,
            height,
            layers,
            filled_upto,
            level: 0,
            pending: vec![0; cap],
            total_pending: 0,
            count: vec![0; cap],
            entered: 0,
        }
    }

    /// Deepest layer opened so far.
    pub fn level(&self) -> usize {
        self.level
    }
}

impl Policy for BfsTree {
    fn name(&self) -> &'static str {
        "bfs-tree"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::global()
    }

    fn begin_step(&mut self, world: &World) {
        while self.entered < world.robots().len() {
            self.entered += 1;
            self.count[self.source] += 1;
        }
        if self.total_pending == 0
            && self.level + 1 < self.layers.len()
            && self.entered == self.filled_upto[self.level]
        {
            self.level += 1;
            for &c in &self.layers[self.level] {
                let mut x = c as usize;
                while x != self.source {
                    self.pending[x] += 1;
                    self.total_pending += 1;
                    x = self.parent[x] as usize;
                }
            }
        }
    }

    fn decide(&mut self, world: &World, robot: RobotId) -> Result<Decision, EngineError> {
        let v = world.robot(robot).pos;
        let u = self.layout.slot(v).unwrap();
        for &c in &self.children[u] {
            let c = c as usize;
            let cell = self.layout.cell_at(c);
            if self.pending[c] > 0 && world.occupant(cell).is_none() {
                self.pending[c] -= 1;
                self.total_pending -= 1;
                self.count[c] += 1;
                let dir = v.direction_to(cell).expect("tree edges join neighbors");
                return Ok(Decision::new(Action::Move(dir)));
            }
        }
        if self.count[u] == self.size[u] && self.level as u32 >= self.height[u] {
            return Ok(Decision::new(Action::Settle));
        }
        Ok(Decision::new(Action::Wait))
    }
}
