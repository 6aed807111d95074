//! Grid regions, their topology and the environment generators.

mod generate;
mod parse;
mod topology;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::{Cell, Direction};

pub use generate::{gen_carved, gen_gkr, gen_path, gen_ring, gen_square, random_cell};
pub use parse::{from_ascii, load_movingai, to_ascii};
pub use topology::{
    articulation_points, bfs_distances, classify, count_classes, hole_components, is_connected,
    is_simply_connected, optimal_source, repair_holes, ClassCounts, DistanceMap,
};

/// Errors raised while building or querying environments.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error("expected exactly one source 'S', found {0}")]
    NoSource(usize),
    #[error("region has no free cells")]
    EmptyRegion,
    #[error("line {line}: unexpected character {ch:?}")]
    BadChar { line: usize, ch: char },
    #[error("line {line}: malformed header, expected `{expected}`")]
    MalformedHeader { line: usize, expected: &'static str },
    #[error("map dimensions do not match header: {what}")]
    DimensionMismatch { what: &'static str },
    #[error("source {0} is not a passable cell")]
    SourceBlocked(Cell),
    #[error("cell {0} is not in the region")]
    NotInRegion(Cell),
    #[error("source {0} is outside the square")]
    SourceOutOfBounds(Cell),
    #[error("no removable corner left")]
    NoCornerAvailable,
    #[error("bad generator parameters: {0}")]
    BadParams(&'static str),
    #[error("region is not 4-connected")]
    Disconnected,
}

/// Axis-aligned inclusive bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub min: Cell,
    pub max: Cell,
}

impl Bounds {
    pub fn width(&self) -> u32 {
        (self.max.x - self.min.x + 1) as u32
    }

    pub fn height(&self) -> u32 {
        (self.max.y - self.min.y + 1) as u32
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= self.min.x && c.x <= self.max.x && c.y >= self.min.y && c.y <= self.max.y
    }
}

/// A finite set of free cells stored as a mask over a bounding box.
#[derive(Clone)]
pub struct Region {
    min: Cell,
    width: u32,
    height: u32,
    mask: Vec<bool>,
    len: usize,
}

impl Region {
    pub fn from_cells<I: IntoIterator<Item = Cell>>(cells: I) -> Region {
        let cells: Vec<Cell> = cells.into_iter().collect();
        if cells.is_empty() {
            return Region {
                min: Cell::default(),
                width: 0,
                height: 0,
                mask: Vec::new(),
                len: 0,
            };
        }
        let (mut lo, mut hi) = (cells[0], cells[0]);
        for c in &cells {
            lo = Cell::new(lo.x.min(c.x), lo.y.min(c.y));
            hi = Cell::new(hi.x.max(c.x), hi.y.max(c.y));
        }
        let width = (hi.x - lo.x + 1) as u32;
        let height = (hi.y - lo.y + 1) as u32;
        let mut region = Region {
            min: lo,
            width,
            height,
            mask: vec![false; (width * height) as usize],
            len: 0,
        };
        for c in cells {
            region.insert_in_bounds(c);
        }
        region
    }

    /// Full `w`×`h` rectangle with lower-left corner `min`.
    pub fn rectangle(min: Cell, width: u32, height: u32) -> Region {
        let n = (width * height) as usize;
        Region {
            min,
            width,
            height,
            mask: vec![true; n],
            len: n,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The mask's bounding box. It can be larger than the tight box after removals.
    pub fn bounds(&self) -> Option<Bounds> {
        if self.width == 0 {
            return None;
        }
        let max = Cell::new(
            self.min.x + self.width as i32 - 1,
            self.min.y + self.height as i32 - 1,
        );
        Some(Bounds { min: self.min, max })
    }

    /// Tight bounding box of the free cells.
    pub fn tight_bounds(&self) -> Option<Bounds> {
        let mut it = self.cells();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for c in it {
            lo = Cell::new(lo.x.min(c.x), lo.y.min(c.y));
            hi = Cell::new(hi.x.max(c.x), hi.y.max(c.y));
        }
        Some(Bounds { min: lo, max: hi })
    }

    /// Number of slots in the mask; indices from [`Region::index`] are below this.
    pub fn capacity(&self) -> usize {
        self.mask.len()
    }

    /// Slot of `c` in the mask, whether or not `c` is free.
    #[inline]
    pub fn slot(&self, c: Cell) -> Option<usize> {
        let dx = c.x.wrapping_sub(self.min.x) as u32;
        let dy = c.y.wrapping_sub(self.min.y) as u32;
        if dx < self.width && dy < self.height {
            Some((dy * self.width + dx) as usize)
        } else {
            None
        }
    }

    /// Slot of `c` if it is free.
    #[inline]
    pub fn index(&self, c: Cell) -> Option<usize> {
        self.slot(c).filter(|&i| self.mask[i])
    }

    #[inline]
    pub fn cell_at(&self, slot: usize) -> Cell {
        let w = self.width as usize;
        Cell::new(
            self.min.x + (slot % w) as i32,
            self.min.y + (slot / w) as i32,
        )
    }

    #[inline]
    pub fn contains(&self, c: Cell) -> bool {
        self.index(c).is_some()
    }

    /// Free cells ordered by `(y, x)`.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(i, _)| self.cell_at(i))
    }

    pub fn free_neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        Direction::CLOCKWISE
            .into_iter()
            .map(move |d| c.step(d))
            .filter(move |&u| self.contains(u))
    }

    pub fn degree(&self, c: Cell) -> usize {
        self.free_neighbors(c).count()
    }

    /// Removes `c`, returning whether it was free.
    pub fn remove(&mut self, c: Cell) -> bool {
        match self.index(c) {
            Some(i) => {
                self.mask[i] = false;
                self.len -= 1;
                true
            }
            None => false,
        }
    }

    /// Adds `c`, growing the mask if needed. Returns whether it was new.
    pub fn insert(&mut self, c: Cell) -> bool {
        if self.contains(c) {
            return false;
        }
        if self.slot(c).is_some() {
            self.insert_in_bounds(c);
        } else {
            let mut all: Vec<Cell> = self.cells().collect();
            all.push(c);
            *self = Region::from_cells(all);
        }
        true
    }

    fn insert_in_bounds(&mut self, c: Cell) {
        let i = self.slot(c).expect("cell inside mask");
        if !self.mask[i] {
            self.mask[i] = true;
            self.len += 1;
        }
    }

    /// The 4-connected component of free cells containing `start`.
    pub fn component_of(&self, start: Cell) -> Region {
        let mut out = Region {
            min: self.min,
            width: self.width,
            height: self.height,
            mask: vec![false; self.mask.len()],
            len: 0,
        };
        let Some(i0) = self.index(start) else {
            return out;
        };
        let mut stack = vec![i0];
        out.mask[i0] = true;
        out.len = 1;
        while let Some(i) = stack.pop() {
            let c = self.cell_at(i);
            for u in self.free_neighbors(c) {
                let j = self.slot(u).unwrap();
                if !out.mask[j] {
                    out.mask[j] = true;
                    out.len += 1;
                    stack.push(j);
                }
            }
        }
        out
    }
}

impl PartialEq for Region {
    fn eq(&self, other: &Region) -> bool {
        self.len == other.len && self.cells().all(|c| other.contains(c))
    }
}

impl Eq for Region {}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("len", &self.len)
            .field("bounds", &self.bounds())
            .finish()
    }
}

/// A connected region together with its source cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    region: Region,
    source: Cell,
}

impl Environment {
    pub fn new(region: Region, source: Cell) -> Result<Environment, EnvError> {
        if region.is_empty() {
            return Err(EnvError::EmptyRegion);
        }
        if !region.contains(source) {
            return Err(EnvError::NotInRegion(source));
        }
        if region.component_of(source).len() != region.len() {
            return Err(EnvError::Disconnected);
        }
        Ok(Environment { region, source })
    }

    /// Keeps only the component of `region` that contains `source`.
    pub fn component(region: &Region, source: Cell) -> Result<Environment, EnvError> {
        if !region.contains(source) {
            return Err(EnvError::NotInRegion(source));
        }
        Ok(Environment {
            region: region.component_of(source),
            source,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn source(&self) -> Cell {
        self.source
    }

    /// Number of free cells.
    pub fn n(&self) -> usize {
        self.region.len()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.region.contains(c)
    }

    pub fn with_source(&self, source: Cell) -> Result<Environment, EnvError> {
        Environment::new(self.region.clone(), source)
    }
}

/// Local shape of a free cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexClass {
    /// At most one free neighbor (`diag` absent), or two perpendicular free
    /// neighbors whose common neighbor `diag` is free.
    Corner { diag: Option<Cell> },
    /// Two perpendicular free neighbors whose common neighbor `diag` is a wall.
    Hall { diag: Cell },
    /// Three or more free neighbors, or two opposite ones.
    Open,
}

impl VertexClass {
    pub fn is_corner(&self) -> bool {
        matches!(self, VertexClass::Corner { .. })
    }

    pub fn is_hall(&self) -> bool {
        matches!(self, VertexClass::Hall { .. })
    }
}
