//! Distances, connectivity, vertex classes and cut vertices.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{EnvError, Environment, Region, VertexClass};
use crate::grid::{Cell, Direction};

const UNREACHED: u32 = u32::MAX;

/// Shortest-path distances inside a region from one origin.
#[derive(Clone, Debug)]
pub struct DistanceMap {
    origin: Cell,
    layout: Region,
    dist: Vec<u32>,
}

impl DistanceMap {
    pub fn origin(&self) -> Cell {
        self.origin
    }

    pub fn get(&self, c: Cell) -> Option<u32> {
        self.layout
            .slot(c)
            .map(|i| self.dist[i])
            .filter(|&d| d != UNREACHED)
    }

    /// Reached cells with their distances, ordered by `(y, x)`.
    pub fn iter(&self) -> impl Iterator<Item = (Cell, u32)> + '_ {
        self.dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != UNREACHED)
            .map(|(i, &d)| (self.layout.cell_at(i), d))
    }

    pub fn reached(&self) -> usize {
        self.iter().count()
    }

    pub fn sum(&self) -> u64 {
        self.iter().map(|(_, d)| d as u64).sum()
    }

    pub fn max(&self) -> u32 {
        self.iter().map(|(_, d)| d).max().unwrap_or(0)
    }
}

/// Breadth-first distances from `origin` within `region`.
pub fn bfs_distances(region: &Region, origin: Cell) -> Result<DistanceMap, EnvError> {
    let start = region.index(origin).ok_or(EnvError::NotInRegion(origin))?;
    let mut dist = vec![UNREACHED; region.capacity()];
    let mut queue = VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    while let Some(i) = queue.pop_front() {
        let c = region.cell_at(i);
        for u in region.free_neighbors(c) {
            let j = region.slot(u).unwrap();
            if dist[j] == UNREACHED {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    Ok(DistanceMap {
        origin,
        layout: region.clone(),
        dist,
    })
}

pub fn is_connected(region: &Region) -> bool {
    match region.cells().next() {
        None => true,
        Some(c) => region.component_of(c).len() == region.len(),
    }
}

/// Wall components enclosed by free cells, each sorted by `(y, x)`.
pub fn hole_components(region: &Region) -> Vec<Vec<Cell>> {
    let Some(b) = region.bounds() else {
        return Vec::new();
    };
    let (w, h) = (b.width() as usize + 2, b.height() as usize + 2);
    let origin = Cell::new(b.min.x - 1, b.min.y - 1);
    let at = |i: usize| Cell::new(origin.x + (i % w) as i32, origin.y + (i / w) as i32);
    let wall = |i: usize| !region.contains(at(i));
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut flood = |seed: usize, seen: &mut Vec<bool>, out: &mut Vec<Cell>| {
        seen[seed] = true;
        stack.push(seed);
        while let Some(i) = stack.pop() {
            out.push(at(i));
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if !seen[j] && wall(j) {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
    };
    let mut outside = Vec::new();
    flood(0, &mut seen, &mut outside);
    let mut holes = Vec::new();
    for i in 0..w * h {
        if !seen[i] && wall(i) {
            let mut comp = Vec::new();
            flood(i, &mut seen, &mut comp);
            comp.sort_by_key(|c| (c.y, c.x));
            holes.push(comp);
        }
    }
    holes
}

/// Connected with a connected complement. The empty region counts as simply connected.
pub fn is_simply_connected(region: &Region) -> bool {
    is_connected(region) && hole_components(region).is_empty()
}

/// Corner/hall/open class of `v` within `region`.
pub fn classify(region: &Region, v: Cell) -> Result<VertexClass, EnvError> {
    if !region.contains(v) {
        return Err(EnvError::NotInRegion(v));
    }
    let free: Vec<Direction> = Direction::CLOCKWISE
        .into_iter()
        .filter(|&d| region.contains(v.step(d)))
        .collect();
    Ok(match free.as_slice() {
        [] | [_] => VertexClass::Corner { diag: None },
        [a, b] if *b != a.opposite() => {
            let w = v + a.offset() + b.offset();
            if region.contains(w) {
                VertexClass::Corner { diag: Some(w) }
            } else {
                VertexClass::Hall { diag: w }
            }
        }
        _ => VertexClass::Open,
    })
}

/// How many cells of each class a region has.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub corners: usize,
    pub halls: usize,
    pub open: usize,
}

pub fn count_classes(region: &Region) -> ClassCounts {
    let mut counts = ClassCounts::default();
    for c in region.cells() {
        match classify(region, c).unwrap() {
            VertexClass::Corner { .. } => counts.corners += 1,
            VertexClass::Hall { .. } => counts.halls += 1,
            VertexClass::Open => counts.open += 1,
        }
    }
    counts
}

/// Cut vertices of the free-cell adjacency graph.
pub fn articulation_points(region: &Region) -> BTreeSet<Cell> {
    let cap = region.capacity();
    let mut disc = vec![0u32; cap];
    let mut low = vec![0u32; cap];
    let mut out = BTreeSet::new();
    let mut timer = 1u32;
    // Frames hold (slot, parent slot, next direction to try, child count).
    let mut stack: Vec<(usize, usize, u8, u32)> = Vec::new();
    for root in region.cells() {
        let r = region.slot(root).unwrap();
        if disc[r] != 0 {
            continue;
        }
        disc[r] = timer;
        low[r] = timer;
        timer += 1;
        stack.push((r, usize::MAX, 0, 0));
        while let Some(top) = stack.last_mut() {
            let (v, parent, next, _) = *top;
            if next < 4 {
                top.2 += 1;
                let u = region.cell_at(v).step(Direction::from_code(next));
                let Some(j) = region.index(u) else { continue };
                if disc[j] == 0 {
                    top.3 += 1;
                    disc[j] = timer;
                    low[j] = timer;
                    timer += 1;
                    stack.push((j, v, 0, 0));
                } else if j != parent {
                    low[v] = low[v].min(disc[j]);
                }
            } else {
                let (_, _, _, children) = stack.pop().unwrap();
                if parent == usize::MAX {
                    if children > 1 {
                        out.insert(region.cell_at(v));
                    }
                } else {
                    low[parent] = low[parent].min(low[v]);
                    let parent_is_root = stack.last().map(|f| f.1 == usize::MAX).unwrap_or(false);
                    if !parent_is_root && low[v] >= disc[parent] {
                        out.insert(region.cell_at(parent));
                    }
                }
            }
        }
    }
    out
}

/// A cell minimizing the sum of distances to all cells, ties to the smallest `(y, x)`.
pub fn optimal_source(env: &Environment) -> Cell {
    let region = env.region();
    let mut best = (u64::MAX, env.source());
    for c in region.cells() {
        let total = bfs_distances(region, c).unwrap().sum();
        if total < best.0 {
            best = (total, c);
        }
    }
    best.1
}

/// Fills every enclosed wall component with free cells.
pub fn repair_holes(env: &Environment) -> Environment {
    let mut region = env.region().clone();
    for hole in hole_components(env.region()) {
        for c in hole {
            region.insert(c);
        }
    }
    Environment::new(region, env.source()).expect("filling holes keeps the region connected")
}
