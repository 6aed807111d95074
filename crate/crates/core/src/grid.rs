//! Cells, offsets and the four grid directions.

use core::fmt;
use core::ops::{Add, Neg, Sub};

/// A cell of Z². `y` grows upward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn step(self, dir: Direction) -> Cell {
        self + dir.offset()
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.manhattan(other) == 1
    }

    /// The direction leading from `self` to an adjacent `other`.
    pub fn direction_to(self, other: Cell) -> Option<Direction> {
        Direction::from_offset(other - self)
    }

    pub fn neighbors(self) -> impl Iterator<Item = Cell> {
        Direction::CLOCKWISE.into_iter().map(move |d| self.step(d))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A relative displacement between two cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Offset {
    pub dx: i32,
    pub dy: i32,
}

impl Offset {
    pub const ZERO: Offset = Offset { dx: 0, dy: 0 };

    pub const fn new(dx: i32, dy: i32) -> Self {
        Offset { dx, dy }
    }

    pub fn norm1(self) -> u32 {
        self.dx.unsigned_abs() + self.dy.unsigned_abs()
    }
}

impl Add<Offset> for Cell {
    type Output = Cell;
    fn add(self, o: Offset) -> Cell {
        Cell::new(self.x + o.dx, self.y + o.dy)
    }
}

impl Sub for Cell {
    type Output = Offset;
    fn sub(self, o: Cell) -> Offset {
        Offset::new(self.x - o.x, self.y - o.y)
    }
}

impl Add for Offset {
    type Output = Offset;
    fn add(self, o: Offset) -> Offset {
        Offset::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl Sub for Offset {
    type Output = Offset;
    fn sub(self, o: Offset) -> Offset {
        Offset::new(self.dx - o.dx, self.dy - o.dy)
    }
}

impl Neg for Offset {
    type Output = Offset;
    fn neg(self) -> Offset {
        Offset::new(-self.dx, -self.dy)
    }
}

/// One of the four grid directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    /// Clockwise order starting from up. All tie-breaking uses this order.
    pub const CLOCKWISE: [Direction; 4] = [
        Direction::Up,
        Direction::Right,
        Direction::Down,
        Direction::Left,
    ];

    pub const fn code(self) -> u8 {
        self as u8
    }

    pub const fn from_code(code: u8) -> Direction {
        Direction::CLOCKWISE[(code & 3) as usize]
    }

    pub const fn clockwise(self) -> Direction {
        Direction::from_code(self.code() + 1)
    }

    pub const fn counter_clockwise(self) -> Direction {
        Direction::from_code(self.code() + 3)
    }

    pub const fn opposite(self) -> Direction {
        Direction::from_code(self.code() + 2)
    }

    pub const fn offset(self) -> Offset {
        match self {
            Direction::Up => Offset::new(0, 1),
            Direction::Right => Offset::new(1, 0),
            Direction::Down => Offset::new(0, -1),
            Direction::Left => Offset::new(-1, 0),
        }
    }

    pub fn from_offset(o: Offset) -> Option<Direction> {
        match (o.dx, o.dy) {
            (0, 1) => Some(Direction::Up),
            (1, 0) => Some(Direction::Right),
            (0, -1) => Some(Direction::Down),
            (-1, 0) => Some(Direction::Left),
            _ => None,
        }
    }

    pub const fn glyph(self) -> char {
        match self {
            Direction::Up => '^',
            Direction::Right => '>',
            Direction::Down => 'v',
            Direction::Left => '<',
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Right => "right",
            Direction::Down => "down",
            Direction::Left => "left",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations() {
        for d in Direction::CLOCKWISE {
            assert_eq!(d.clockwise().counter_clockwise(), d);
            assert_eq!(d.opposite().opposite(), d);
            assert_eq!(d.clockwise().clockwise(), d.opposite());
            assert_eq!(d.offset() + d.opposite().offset(), Offset::ZERO);
            assert_eq!(Direction::from_offset(d.offset()), Some(d));
        }
        assert_eq!(Direction::Left.clockwise(), Direction::Up);
    }

    #[test]
    fn adjacency_is_unit_manhattan() {
        let c = Cell::new(2, -3);
        assert!(c.is_adjacent(Cell::new(2, -2)));
        assert!(!c.is_adjacent(Cell::new(3, -2)));
        assert!(!c.is_adjacent(c));
        assert_eq!(c.direction_to(Cell::new(1, -3)), Some(Direction::Left));
    }
}
